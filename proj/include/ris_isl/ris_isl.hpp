#pragma once

#include "ris_isl/core.hpp"
#include "ris_isl/fading.hpp"
#include "ris_isl/geometry.hpp"
#include "ris_isl/link.hpp"
#include "ris_isl/misalignment.hpp"
#include "ris_isl/monte_carlo.hpp"
#include "ris_isl/multi_ris.hpp"
#include "ris_isl/quadrature.hpp"
#include "ris_isl/random.hpp"
#include "ris_isl/rate.hpp"
#include "ris_isl/scenario.hpp"
#include "ris_isl/validation.hpp"
