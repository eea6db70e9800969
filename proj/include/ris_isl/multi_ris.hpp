#pragma once

// Multi-RIS topologies: M RIS satellites reflecting in parallel towards the
// destination, and a path folded through M RIS satellites in sequence.

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "ris_isl/link.hpp"

namespace ris_isl {

struct SimultaneousBranch {
    LinkBudget link;
    MisalignmentParams misalignment_SR;
    MisalignmentParams misalignment_RD;

    bool operator==(const SimultaneousBranch&) const = default;
};

struct SimultaneousTopology {
    std::vector<SimultaneousBranch> branches;
    RicianConfig rician;

    bool operator==(const SimultaneousTopology&) const = default;
};

/// Elements and path loss of one parallel branch; a zero path loss models a
/// branch that contributes nothing.
struct BranchGain {
    int elements = 0;
    double path_loss = 0.0;
};

namespace detail {
inline bool same_misalignment(const MisalignmentParams& a, const MisalignmentParams& b) {
    auto close = [](double x, double y) {
        if (x == y) return true;  // covers kappa = inf on both sides
        return std::abs(x - y) <= 1e-12 * std::max(std::abs(x), std::abs(y));
    };
    return close(a.A0, b.A0) && close(a.kappa, b.kappa);
}
}  // namespace detail

inline AmplitudeStats amplitude_stats_simultaneous(std::span<const BranchGain> branches,
                                                   const MisalignmentParams& mis,
                                                   const RicianConfig& ric) {
    if (branches.empty()) throw invalid_argument_error("simultaneous topology needs M >= 1");
    double sum_sqrt = 0.0;
    double sum_pl = 0.0;
    for (const auto& b : branches) {
        if (b.elements < 1) throw invalid_argument_error("branch needs at least one element");
        check_non_negative(b.path_loss, "branch path loss");
        sum_sqrt += b.elements * std::sqrt(b.path_loss);
        sum_pl += b.elements * b.path_loss;
    }
    return amplitude_stats_from_sums(sum_sqrt, sum_pl, mis, ric);
}

/// All branches must share one (A0, kappa) pair; the closed form factors the
/// misalignment moments out of the branch sum.
inline AmplitudeStats amplitude_stats_simultaneous(const SimultaneousTopology& t) {
    if (t.branches.empty()) throw invalid_argument_error("simultaneous topology needs M >= 1");
    const MisalignmentParams& ref = t.branches.front().misalignment_SR;
    std::vector<BranchGain> gains;
    gains.reserve(t.branches.size());
    for (std::size_t k = 0; k < t.branches.size(); ++k) {
        const auto& br = t.branches[k];
        if (!detail::same_misalignment(ref, br.misalignment_SR) ||
            !detail::same_misalignment(ref, br.misalignment_RD)) {
            throw invalid_argument_error(
                "branch " + std::to_string(k) +
                " has misalignment parameters (A0, kappa) that differ from branch 0; the "
                "simultaneous closed form needs one shared set");
        }
        gains.push_back({br.link.ris_elements, free_space_path_loss(br.link)});
    }
    return amplitude_stats_simultaneous(gains, ref, t.rician);
}

inline double bpsk_ber_simultaneous(const SimultaneousTopology& t, const SnrBudget& snr) {
    return bpsk_ber(amplitude_stats_simultaneous(t), snr);
}

/// M RIS reflections in sequence, transmitter and receiver fully aligned.
struct ConsecutiveTopology {
    int hop_count = 1;  ///< number of RIS reflections M
    int elements_per_ris = 1;
    double end_to_end_path_loss = 0.0;
    RicianConfig rician;

    bool operator==(const ConsecutiveTopology&) const = default;
};

inline void validate(const ConsecutiveTopology& t) {
    if (t.hop_count < 1) throw invalid_argument_error("consecutive topology needs M >= 1");
    if (t.elements_per_ris < 1) throw invalid_argument_error("elements_per_ris must be >= 1");
    check_positive(t.end_to_end_path_loss, "end_to_end_path_loss");
    validate(t.rician);
}

/// E[A]   = N^M sqrt(P_L pi / (4 (1 + K))) L_{1/2}(-K)
/// Var[A] = N^M P_L (1 - pi / (4 (1 + K)) L_{1/2}(-K)^2)
/// evaluated in the log domain; N^M terms are treated as independent.
inline AmplitudeStats amplitude_stats_consecutive(const ConsecutiveTopology& t) {
    validate(t);
    const double log_nm = t.hop_count * std::log(static_cast<double>(t.elements_per_ris));
    const double alpha_mean = rician_mean_and_ms(t.rician).mean;
    const double log_pl = std::log(t.end_to_end_path_loss);
    const double mean = std::exp(log_nm + 0.5 * log_pl + std::log(alpha_mean));
    const double spread = 1.0 - alpha_mean * alpha_mean;
    const double variance = spread > 0.0 ? std::exp(log_nm + log_pl + std::log(spread)) : 0.0;
    if (!std::isfinite(mean) || !std::isfinite(variance)) {
        throw numeric_error("N^M = " + std::to_string(t.elements_per_ris) + "^" +
                            std::to_string(t.hop_count) +
                            " overflows the amplitude statistics");
    }
    return {mean, variance};
}

inline double bpsk_ber_consecutive(const ConsecutiveTopology& t, const SnrBudget& snr) {
    return bpsk_ber(amplitude_stats_consecutive(t), snr);
}

}  // namespace ris_isl
