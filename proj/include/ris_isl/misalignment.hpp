#pragma once

// Pointing-error (misalignment) fading for narrow Gaussian beams.
//
// A beam of footprint radius r_d lands on a receive aperture of effective
// radius r_a. With a radial pointing offset r the collected fraction is
//   zeta(r) = A0 * exp(-2 r^2 / w_eq^2),
// and under jitter the fraction has density
//   f(y) = kappa^2 / A0^(kappa^2) * y^(kappa^2 - 1),   0 <= y <= A0,
// with kappa = w_eq^2 / (2 sigma_s^2).

#include <cmath>
#include <limits>
#include <cstdint>
#include <random>

#include "ris_isl/core.hpp"

namespace ris_isl {

struct AntennaConfig {
    double carrier_frequency_Hz = 350e9;
    double gain_dBi = 30.0;

    double wavelength_m() const { return speed_of_light_m_s / carrier_frequency_Hz; }
    double gain_linear() const { return db_to_linear(gain_dBi); }

    bool operator==(const AntennaConfig&) const = default;
};

inline void validate(const AntennaConfig& ant) {
    check_positive(ant.carrier_frequency_Hz, "carrier_frequency_Hz");
    if (!std::isfinite(ant.gain_dBi)) throw invalid_argument_error("gain_dBi must be finite");
}

struct MisalignmentParams {
    double jitter_variance_m2 = 0.0;  ///< 0 means perfectly aligned
    double A0 = 1.0;
    double w_eq_m = 0.0;
    double kappa = std::numeric_limits<double>::infinity();
    double r_a_m = 0.0;
    double r_d_m = 0.0;

    double kappa_sq() const { return kappa * kappa; }
    bool aligned() const { return std::isinf(kappa); }

    /// kappa^2 / (kappa^2 + k), well defined for kappa = inf.
    double kappa_ratio(double k) const {
        const double k2 = kappa_sq();
        if (std::isinf(k2)) return 1.0;
        return k2 / (k2 + k);
    }

    /// E[zeta] = kappa^2 A0 / (kappa^2 + 1)
    double mean() const { return kappa_ratio(1.0) * A0; }
    /// E[zeta^2] = kappa^2 A0^2 / (kappa^2 + 2)
    double mean_square() const { return kappa_ratio(2.0) * A0 * A0; }

    bool operator==(const MisalignmentParams&) const = default;
};

/// r_a = (lambda / 2 pi) sqrt(G), from A_e = pi r_a^2 = lambda^2 G / (4 pi).
inline double effective_aperture_radius(const AntennaConfig& ant) {
    validate(ant);
    return ant.wavelength_m() / (2.0 * pi) * std::sqrt(ant.gain_linear());
}

/// Gaussian-beam radius at range d for a waist equal to the effective
/// aperture radius: w0 sqrt(1 + (d lambda / (pi w0^2))^2).
inline double footprint_radius(const AntennaConfig& ant, double d_m) {
    if (!(d_m > 0.0)) {
        throw invalid_argument_error("footprint distance must be positive");
    }
    const double w0 = effective_aperture_radius(ant);
    const double zr_ratio = d_m * ant.wavelength_m() / (pi * w0 * w0);
    return w0 * std::hypot(1.0, zr_ratio);
}

/// Collected fraction and equivalent beam width for a footprint radius r_d
/// on an aperture of radius r_a.
inline MisalignmentParams misalignment_params_for_footprint(double r_a_m, double r_d_m,
                                                            double jitter_variance_m2) {
    check_positive(r_a_m, "aperture radius");
    check_positive(r_d_m, "footprint radius");
    check_non_negative(jitter_variance_m2, "jitter_variance_m2");

    MisalignmentParams p;
    p.jitter_variance_m2 = jitter_variance_m2;
    p.r_a_m = r_a_m;
    p.r_d_m = r_d_m;

    const double v = std::sqrt(pi / 2.0) * r_a_m / r_d_m;
    const double erf_v = std::erf(v);
    p.A0 = erf_v * erf_v;

    // w_eq^2 = r_d^2 * sqrt(pi) erf(v) exp(v^2) / (2 v); the exp(v^2) factor
    // overflows once the aperture swallows the beam, so go through logs.
    const double log_weq_sq = 2.0 * std::log(r_d_m) + std::log(erf_v) + v * v +
                              0.5 * std::log(pi) - std::log(2.0 * v);
    p.w_eq_m = std::exp(0.5 * log_weq_sq);

    if (jitter_variance_m2 == 0.0) {
        p.kappa = std::numeric_limits<double>::infinity();
    } else {
        p.kappa = std::exp(log_weq_sq - std::log(2.0 * jitter_variance_m2));
    }
    return p;
}

/// Misalignment parameters at range d. Jitter variance is in m^2 at the
/// receiver plane; zero selects the perfectly aligned case (kappa = inf).
inline MisalignmentParams misalignment_params(const AntennaConfig& ant, double d_m,
                                              double jitter_variance_m2) {
    check_non_negative(jitter_variance_m2, "jitter_variance_m2");
    if (jitter_variance_m2 > 0.0 && jitter_variance_m2 < 1.0) {
        warn("jitter variance below 1 m^2: misalignment penalty is saturated in this range");
    }
    return misalignment_params_for_footprint(effective_aperture_radius(ant),
                                             footprint_radius(ant, d_m), jitter_variance_m2);
}

inline double misalignment_coefficient(const MisalignmentParams& p, double r_m) {
    if (!(r_m >= 0.0)) throw invalid_argument_error("pointing offset must be >= 0");
    if (std::isinf(p.w_eq_m)) return p.A0;
    return p.A0 * std::exp(-2.0 * r_m * r_m / (p.w_eq_m * p.w_eq_m));
}

/// Density of zeta; zero outside [0, A0].
inline double misalignment_pdf(const MisalignmentParams& p, double y) {
    if (!(y >= 0.0) || y > p.A0) return 0.0;
    const double k2 = p.kappa_sq();
    if (std::isinf(k2)) return 0.0;  // point mass at A0
    if (y == 0.0) {
        if (k2 > 1.0) return 0.0;
        if (k2 == 1.0) return 1.0 / p.A0;
        return std::numeric_limits<double>::infinity();
    }
    return k2 / p.A0 * std::pow(y / p.A0, k2 - 1.0);
}

inline double misalignment_cdf(const MisalignmentParams& p, double y) {
    if (y <= 0.0) return 0.0;
    if (y >= p.A0) return 1.0;
    if (p.aligned()) return 0.0;
    return std::pow(y / p.A0, p.kappa_sq());
}

namespace detail {
/// Uniform on (0, 1] from the top 53 bits.
template <class Urbg>
double uniform_open_closed(Urbg& rng) {
    static_assert(Urbg::max() - Urbg::min() == std::numeric_limits<std::uint64_t>::max(),
                  "expects a full-range 64-bit engine");
    return (static_cast<double>((rng() - Urbg::min()) >> 11) + 1.0) * 0x1.0p-53;
}
}  // namespace detail

/// Draw zeta by inverting its CDF: zeta = A0 * U^(1 / kappa^2).
template <class Urbg>
double sample_misalignment(const MisalignmentParams& p, Urbg& rng) {
    const double u = detail::uniform_open_closed(rng);
    if (p.aligned()) return p.A0;
    return p.A0 * std::exp(std::log(u) / p.kappa_sq());
}

/// Radial pointing offset r ~ Rayleigh(sigma_s).
template <class Urbg>
double sample_pointing_offset(const MisalignmentParams& p, Urbg& rng) {
    const double u = detail::uniform_open_closed(rng);
    return std::sqrt(-2.0 * p.jitter_variance_m2 * std::log(u));
}

}  // namespace ris_isl
