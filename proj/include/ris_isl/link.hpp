#pragma once

// Single-RIS link: free-space path loss, the CLT surrogate of the aggregate
// amplitude A, the MGF of gamma = A^2 Pt/N0 and the BPSK error probability.

#include <cmath>
#include <functional>
#include <string>

#include <boost/math/tools/roots.hpp>

#include "ris_isl/core.hpp"
#include "ris_isl/fading.hpp"
#include "ris_isl/misalignment.hpp"
#include "ris_isl/quadrature.hpp"

namespace ris_isl {

struct LinkBudget {
    AntennaConfig antenna;
    double d_SR_m = 0.0;
    double d_RD_m = 0.0;
    double ris_efficiency = 1.0;
    int ris_elements = 1;

    bool operator==(const LinkBudget&) const = default;
};

inline void validate(const LinkBudget& lb) {
    validate(lb.antenna);
    check_positive(lb.d_SR_m, "d_SR_m");
    check_positive(lb.d_RD_m, "d_RD_m");
    if (!(lb.ris_efficiency > 0.0 && lb.ris_efficiency <= 1.0)) {
        throw invalid_argument_error("ris_efficiency must lie in (0, 1]");
    }
    if (lb.ris_elements < 1) throw invalid_argument_error("ris_elements must be >= 1");
}

/// Mean and variance of the aggregate amplitude A (Gaussian by the CLT).
struct AmplitudeStats {
    double mean = 0.0;
    double variance = 0.0;
};

/// Pt/N0 in dB.
struct SnrBudget {
    double pt_over_n0_dB = 0.0;
};

/// Pt/N0 from transmit power, noise temperature and bandwidth, with
/// N0 = k_B T.
inline SnrBudget snr_from_thermal_noise(double pt_dBW, double noise_temperature_K,
                                        double bandwidth_Hz) {
    check_positive(noise_temperature_K, "noise_temperature_K");
    check_positive(bandwidth_Hz, "bandwidth_Hz");
    return {pt_dBW - linear_to_db(boltzmann_J_K * noise_temperature_K * bandwidth_Hz)};
}

/// Far-field RIS path loss (lambda / 4 pi)^4 G_i G_r eps / (d_SR^2 d_RD^2).
/// Both hops use the antenna gain of the link budget.
inline double free_space_path_loss(const LinkBudget& lb) {
    validate(lb);
    const double k = lb.antenna.wavelength_m() / (4.0 * pi);
    const double g = lb.antenna.gain_linear();
    const double k2 = k * k;
    return (k2 / lb.d_SR_m) * (k2 / lb.d_RD_m) / (lb.d_SR_m * lb.d_RD_m) * g * g *
           lb.ris_efficiency;
}

/// Per-element moments of X = alpha_SR alpha_RD zeta_SR zeta_RD.
struct ElementMoments {
    double mean = 0.0;      ///< E[X]
    double variance = 0.0;  ///< Var[X]
};

inline ElementMoments element_moments(const MisalignmentParams& mis, const RicianConfig& ric) {
    const double zeta_mean = mis.mean();
    const double m = rician_mean_squared(ric) * zeta_mean * zeta_mean;
    const double ms = mis.mean_square();
    return {m, std::max(ms * ms - m * m, 0.0)};
}

/// E[A] = (sum_k N_k sqrt(P_Lk)) E[X], Var[A] = (sum_k N_k P_Lk) Var[X].
inline AmplitudeStats amplitude_stats_from_sums(double sum_n_sqrt_pl, double sum_n_pl,
                                                const MisalignmentParams& mis,
                                                const RicianConfig& ric) {
    const ElementMoments x = element_moments(mis, ric);
    return {sum_n_sqrt_pl * x.mean, sum_n_pl * x.variance};
}

inline AmplitudeStats amplitude_stats_single(const LinkBudget& lb, const MisalignmentParams& mis,
                                             const RicianConfig& ric) {
    const double pl = free_space_path_loss(lb);
    if (lb.ris_elements < 64) {
        warn("RIS with " + std::to_string(lb.ris_elements) +
             " elements: Gaussian approximation of the aggregate amplitude is questionable");
    }
    const double n = lb.ris_elements;
    return amplitude_stats_from_sums(n * std::sqrt(pl), n * pl, mis, ric);
}

inline void validate(const AmplitudeStats& s) {
    check_non_negative(s.mean, "amplitude mean");
    check_non_negative(s.variance, "amplitude variance");
}

/// M(s) for gamma = c A^2 with A ~ N(mu, sigma^2): the non-central
/// chi-square (one degree of freedom) MGF
///   exp(s c mu^2 / (1 - 2 s c sigma^2)) / sqrt(1 - 2 s c sigma^2),  s <= 0.
inline double snr_mgf(const AmplitudeStats& stats, const SnrBudget& snr, double s) {
    if (!(s <= 0.0)) throw invalid_argument_error("MGF argument must be <= 0");
    validate(stats);
    if (s == 0.0) return 1.0;
    const double a = scale_by_db(stats.mean * stats.mean, snr.pt_over_n0_dB);
    const double b = scale_by_db(stats.variance, snr.pt_over_n0_dB);
    const double denom = 1.0 - 2.0 * s * b;
    return std::exp(s * a / denom) / std::sqrt(denom);
}

namespace detail {

/// Integrand of P_e = (1/pi) int_0^{pi/2} M(-1/sin^2 w) dw with the SNR
/// scaling applied once up front.
struct BerIntegrand {
    double a;  // c mu^2
    double b;  // c sigma^2
    double operator()(double w) const {
        const double sn = std::sin(w);
        const double x = 1.0 / (sn * sn);
        const double denom = 1.0 + 2.0 * x * b;
        return std::exp(-x * a / denom) / std::sqrt(denom);
    }
};

inline BerIntegrand ber_integrand(const AmplitudeStats& stats, const SnrBudget& snr) {
    validate(stats);
    if (!std::isfinite(snr.pt_over_n0_dB)) throw invalid_argument_error("Pt/N0 must be finite");
    return {scale_by_db(stats.mean * stats.mean, snr.pt_over_n0_dB),
            scale_by_db(stats.variance, snr.pt_over_n0_dB)};
}

}  // namespace detail

/// BPSK bit-error probability averaged over the Gaussian amplitude model.
inline double bpsk_ber(const AmplitudeStats& stats, const SnrBudget& snr,
                       const AdaptiveOptions& opt = {}) {
    const auto f = detail::ber_integrand(stats, snr);
    return adaptive_gauss_legendre(f, 0.0, pi / 2.0, opt) / pi;
}

/// Same integral with a single fixed Gauss-Legendre rule.
inline double bpsk_ber_fixed(const AmplitudeStats& stats, const SnrBudget& snr,
                             std::size_t nodes) {
    const auto f = detail::ber_integrand(stats, snr);
    return gauss_legendre(f, 0.0, pi / 2.0, nodes) / pi;
}

inline double bpsk_ber_single(const LinkBudget& lb, const MisalignmentParams& mis,
                              const RicianConfig& ric, const SnrBudget& snr) {
    return bpsk_ber(amplitude_stats_single(lb, mis, ric), snr);
}

/// Q(x) = P(Z > x).
inline double gaussian_q(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

/// BPSK error probability over AWGN at instantaneous SNR gamma (linear).
inline double bpsk_conditional_error(double gamma) { return 0.5 * std::erfc(std::sqrt(gamma)); }

/// Smallest Pt/N0 (dB) at which a monotonically decreasing error curve
/// reaches `target`.
inline double required_pt_over_n0_dB(const std::function<double(double)>& ber_at_dB,
                                     double target, double initial_guess_dB) {
    if (!(target > 0.0 && target < 0.5)) {
        throw invalid_argument_error("target error probability must lie in (0, 0.5)");
    }
    auto g = [&](double db) { return std::log(ber_at_dB(db)) - std::log(target); };
    double lo = initial_guess_dB - 5.0;
    double hi = initial_guess_dB + 5.0;
    for (int i = 0; g(lo) < 0.0; ++i) {
        if (i > 60) throw numeric_error("could not bracket required Pt/N0 from below");
        lo -= 10.0;
    }
    for (int i = 0; g(hi) > 0.0; ++i) {
        if (i > 60) throw numeric_error("could not bracket required Pt/N0 from above");
        hi += 10.0;
    }
    std::uintmax_t max_iter = 200;
    const auto [a, b] = boost::math::tools::toms748_solve(
        g, lo, hi, boost::math::tools::eps_tolerance<double>(45), max_iter);
    return 0.5 * (a + b);
}

/// Required Pt/N0 for the Gaussian amplitude model. The deterministic-channel
/// answer seeds the bracket.
inline double required_pt_over_n0_dB(const AmplitudeStats& stats, double target) {
    validate(stats);
    const double rms_sq = stats.mean * stats.mean + stats.variance;
    if (!(rms_sq > 0.0)) throw invalid_argument_error("amplitude carries no power");
    // Q(sqrt(2a)) ~ target gives a starting point.
    double x = 1.0;
    while (gaussian_q(x) > target) x += 0.25;
    const double guess = linear_to_db(0.5 * x * x) - linear_to_db(rms_sq);
    return required_pt_over_n0_dB([&](double db) { return bpsk_ber(stats, {db}); }, target,
                                  guess);
}

}  // namespace ris_isl
