#pragma once

// Rician amplitude model for solar scintillation, normalised to unit power,
// and the degree-1/2 Laguerre function that gives its mean.

#include <cmath>
#include <string_view>
#include <utility>

#include <boost/random/normal_distribution.hpp>

#include "ris_isl/core.hpp"

namespace ris_isl {

namespace detail {

/// exp(-z) I_n(z) for n in {0, 1}, z >= 0.
inline double scaled_bessel_i(int n, double z) {
    if (z < 500.0) return std::cyl_bessel_i(static_cast<double>(n), z) * std::exp(-z);
    // Hankel expansion; at z >= 500 eight terms are far below double precision.
    const double mu = 4.0 * n * n;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k <= 8; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= -(mu - odd * odd) / (k * 8.0 * z);
        sum += term;
    }
    return sum / std::sqrt(2.0 * pi * z);
}

}  // namespace detail

/// L_{1/2}(x) = e^{x/2} [ (1 - x) I0(-x/2) - x I1(-x/2) ], defined here for x <= 0.
inline double laguerre_half(double x) {
    if (!(x <= 0.0)) {
        throw invalid_argument_error("laguerre_half is only defined for x <= 0");
    }
    const double z = -x / 2.0;
    return (1.0 - x) * detail::scaled_bessel_i(0, z) - x * detail::scaled_bessel_i(1, z);
}

/// K is the LOS-to-scattered power ratio; total power E[alpha^2] is fixed at 1.
struct RicianConfig {
    double K = 10.0;

    bool operator==(const RicianConfig&) const = default;
};

inline void validate(const RicianConfig& cfg) { check_non_negative(cfg.K, "rician_K"); }

struct RicianMoments {
    double mean = 0.0;
    double mean_square = 1.0;
};

inline RicianMoments rician_mean_and_ms(const RicianConfig& cfg) {
    validate(cfg);
    return {std::sqrt(pi / (4.0 * (1.0 + cfg.K))) * laguerre_half(-cfg.K), 1.0};
}

/// (E[alpha])^2 = pi / (4 (1 + K)) * L_{1/2}(-K)^2
inline double rician_mean_squared(const RicianConfig& cfg) {
    const double m = rician_mean_and_ms(cfg).mean;
    return m * m;
}

inline double rician_pdf(const RicianConfig& cfg, double r) {
    validate(cfg);
    if (r <= 0.0) return 0.0;
    const double K = cfg.K;
    const double b = 2.0 * r * std::sqrt(K * (K + 1.0));
    return 2.0 * (K + 1.0) * r * std::exp(b - K - (K + 1.0) * r * r) *
           detail::scaled_bessel_i(0, b);
}

/// alpha = | sqrt(K/(K+1)) + sqrt(1/(2(K+1))) (Z1 + j Z2) |
template <class Urbg>
double sample_rician(const RicianConfig& cfg, Urbg& rng) {
    boost::random::normal_distribution<double> normal;
    const double los = std::sqrt(cfg.K / (cfg.K + 1.0));
    const double sigma = std::sqrt(0.5 / (cfg.K + 1.0));
    const double re = los + sigma * normal(rng);
    const double im = sigma * normal(rng);
    return std::sqrt(re * re + im * im);
}

enum class ScintillationRegime { Weak, Transition, Strong };

inline ScintillationRegime scintillation_regime(double K) {
    check_non_negative(K, "rician_K");
    if (K >= 7.0) return ScintillationRegime::Weak;
    if (K == 0.0) return ScintillationRegime::Strong;
    return ScintillationRegime::Transition;
}

inline std::string_view to_string(ScintillationRegime r) {
    switch (r) {
        case ScintillationRegime::Weak: return "weak";
        case ScintillationRegime::Transition: return "transition";
        case ScintillationRegime::Strong: return "strong";
    }
    return "unknown";
}

}  // namespace ris_isl
