#pragma once

// Semi-analytic Monte Carlo: channel realisations are drawn element by
// element, and each trial contributes the exact conditional BPSK error
// Q(sqrt(2 gamma)). Serves as the independent check on the closed forms.

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ris_isl/link.hpp"
#include "ris_isl/multi_ris.hpp"
#include "ris_isl/parallel.hpp"
#include "ris_isl/random.hpp"

namespace ris_isl {

struct SingleTopology {
    LinkBudget link;
    MisalignmentParams misalignment;
    RicianConfig rician;

    bool operator==(const SingleTopology&) const = default;
};

using Topology = std::variant<SingleTopology, SimultaneousTopology, ConsecutiveTopology>;

inline AmplitudeStats analytic_amplitude_stats(const Topology& topology) {
    return std::visit(
        [](const auto& t) -> AmplitudeStats {
            using T = std::decay_t<decltype(t)>;
            if constexpr (std::is_same_v<T, SingleTopology>) {
                return amplitude_stats_single(t.link, t.misalignment, t.rician);
            } else if constexpr (std::is_same_v<T, SimultaneousTopology>) {
                return amplitude_stats_simultaneous(t);
            } else {
                return amplitude_stats_consecutive(t);
            }
        },
        topology);
}

struct McConfig {
    std::int64_t trials = 100000;
    std::uint64_t seed = 1;
    std::int64_t batch_size = 4096;  ///< trials per scheduled work unit
    unsigned workers = 0;            ///< 0: one per hardware thread
};

inline void validate(const McConfig& mc) {
    if (mc.trials < 1) throw invalid_argument_error("trials must be >= 1");
    if (mc.batch_size < 1) throw invalid_argument_error("batch_size must be >= 1");
}

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::int64_t trials_used = 0;
};

/// Draws A for one topology. Amplitudes are produced as a normalised sum
/// times a constant scale, exp(log_scale), so that products of tiny path
/// losses and collected fractions never underflow inside the loops.
class AmplitudeSampler {
public:
    /// Cascaded draws beyond this many per trial are refused.
    static constexpr double max_draws_per_trial = 5e7;

    explicit AmplitudeSampler(const Topology& topology) {
        std::visit([this](const auto& t) { init(t); }, topology);
    }

    double log_scale() const { return log_scale_; }

    template <class Urbg>
    double draw_normalized(Urbg& rng) const {
        return consecutive_ ? draw_cascade(rng) : draw_parallel(rng);
    }

    template <class Urbg>
    double draw(Urbg& rng) const {
        return std::exp(log_scale_) * draw_normalized(rng);
    }

private:
    struct Branch {
        int elements;
        double relative_gain;  // sqrt(P_Lk) relative to the reference branch
    };

    void init(const SingleTopology& t) {
        validate(t.link);
        validate(t.rician);
        set_misalignment(t.misalignment);
        rician_ = t.rician;
        branches_.push_back({t.link.ris_elements, 1.0});
        log_scale_ = 0.5 * std::log(free_space_path_loss(t.link)) + 2.0 * std::log(t.misalignment.A0);
    }

    void init(const SimultaneousTopology& t) {
        amplitude_stats_simultaneous(t);  // validates the shared-misalignment contract
        const MisalignmentParams& mis = t.branches.front().misalignment_SR;
        set_misalignment(mis);
        rician_ = t.rician;
        const double ref = free_space_path_loss(t.branches.front().link);
        for (const auto& br : t.branches) {
            branches_.push_back(
                {br.link.ris_elements, std::sqrt(free_space_path_loss(br.link) / ref)});
        }
        log_scale_ = 0.5 * std::log(ref) + 2.0 * std::log(mis.A0);
    }

    void init(const ConsecutiveTopology& t) {
        validate(t);
        consecutive_ = true;
        rician_ = t.rician;
        hops_ = t.hop_count;
        elements_ = t.elements_per_ris;
        const double n = elements_;
        if ((hops_ - 1) * n * n + 2 * n > max_draws_per_trial) {
            throw invalid_argument_error("consecutive topology too large to simulate element by element");
        }
        log_scale_ = 0.5 * std::log(t.end_to_end_path_loss);
    }

    void set_misalignment(const MisalignmentParams& mis) {
        inv_kappa_sq_ = mis.aligned() ? 0.0 : 1.0 / mis.kappa_sq();
        // |ln(U1 U2)| <= 106 ln 2; below this bound exp() rounds to exactly 1.
        zeta_trivial_ = 106.0 * std::log(2.0) * inv_kappa_sq_ < 0x1.0p-54;
    }

    template <class Urbg>
    double draw_parallel(Urbg& rng) const {
        double total = 0.0;
        for (const auto& br : branches_) {
            double sum = 0.0;
            for (int i = 0; i < br.elements; ++i) {
                const double alpha = sample_rician(rician_, rng) * sample_rician(rician_, rng);
                double zeta = 1.0;  // zeta_SR zeta_RD / A0^2
                if (!zeta_trivial_) {
                    const double u1 = detail::uniform_open_closed(rng);
                    const double u2 = detail::uniform_open_closed(rng);
                    zeta = std::exp(std::log(u1 * u2) * inv_kappa_sq_);
                }
                sum += alpha * zeta;
            }
            total += br.relative_gain * sum;
        }
        return total;
    }

    // sum_{i1..iM} a_{i1} B1_{i1 i2} ... B_{M-1} c_{iM}: one Rician draw per
    // hop and element pair along the cascade.
    template <class Urbg>
    double draw_cascade(Urbg& rng) const {
        std::vector<double> v(elements_);
        for (auto& x : v) x = sample_rician(rician_, rng);
        std::vector<double> next(elements_);
        for (int hop = 1; hop < hops_; ++hop) {
            std::fill(next.begin(), next.end(), 0.0);
            for (int i = 0; i < elements_; ++i) {
                for (int j = 0; j < elements_; ++j) next[j] += v[i] * sample_rician(rician_, rng);
            }
            v.swap(next);
        }
        double sum = 0.0;
        for (int j = 0; j < elements_; ++j) sum += v[j] * sample_rician(rician_, rng);
        return sum;
    }

    std::vector<Branch> branches_;
    RicianConfig rician_;
    double inv_kappa_sq_ = 0.0;
    bool zeta_trivial_ = true;
    bool consecutive_ = false;
    int hops_ = 0;
    int elements_ = 0;
    double log_scale_ = 0.0;
};

template <class Urbg>
double draw_aggregate_amplitude(const Topology& topology, Urbg& rng) {
    return AmplitudeSampler(topology).draw(rng);
}

namespace detail {

inline constexpr std::int64_t mc_chunk_trials = 1 << 16;

/// Fills out[k] with the normalised amplitude of trial first + k.
inline void draw_chunk(const AmplitudeSampler& sampler, const McConfig& mc, std::int64_t first,
                       std::vector<double>& out) {
    const std::int64_t n = static_cast<std::int64_t>(out.size());
    const std::int64_t batches = (n + mc.batch_size - 1) / mc.batch_size;
    parallel_for(static_cast<std::size_t>(batches), mc.workers, [&](std::size_t b) {
        const std::int64_t lo = static_cast<std::int64_t>(b) * mc.batch_size;
        const std::int64_t hi = std::min(n, lo + mc.batch_size);
        for (std::int64_t k = lo; k < hi; ++k) {
            RngStream rng(mc.seed, static_cast<std::uint64_t>(first + k));
            out[static_cast<std::size_t>(k)] = sampler.draw_normalized(rng);
        }
    });
}

/// Streaming mean and variance (Welford), fed strictly in trial order.
struct RunningMoments {
    std::int64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;
    double m3 = 0.0;
    double m4 = 0.0;

    void add(double x) {
        const std::int64_t n1 = n++;
        const double delta = x - mean;
        const double delta_n = delta / n;
        const double delta_n2 = delta_n * delta_n;
        const double term1 = delta * delta_n * n1;
        mean += delta_n;
        m4 += term1 * delta_n2 * (double(n) * n - 3.0 * n + 3.0) + 6.0 * delta_n2 * m2 -
              4.0 * delta_n * m3;
        m3 += term1 * delta_n * (n - 2.0) - 3.0 * delta_n * m2;
        m2 += term1;
    }

    double variance() const { return n > 1 ? m2 / (n - 1) : 0.0; }
};

}  // namespace detail

/// Estimates P_e at every Pt/N0 in `pt_over_n0_dB` from one shared set of
/// channel draws. Deterministic in (topology, seed, trials).
inline std::vector<McEstimate> semi_analytic_ber_sweep(const Topology& topology,
                                                       std::span<const double> pt_over_n0_dB,
                                                       const McConfig& mc) {
    validate(mc);
    const AmplitudeSampler sampler(topology);
    const std::size_t points = pt_over_n0_dB.size();
    std::vector<double> gain(points);  // gamma = gain * normalised_A^2
    for (std::size_t p = 0; p < points; ++p) {
        gain[p] = std::exp(std::log(10.0) * pt_over_n0_dB[p] / 10.0 + 2.0 * sampler.log_scale());
    }
    std::vector<detail::RunningMoments> acc(points);
    std::vector<double> chunk;
    for (std::int64_t first = 0; first < mc.trials; first += detail::mc_chunk_trials) {
        chunk.resize(static_cast<std::size_t>(std::min(detail::mc_chunk_trials, mc.trials - first)));
        detail::draw_chunk(sampler, mc, first, chunk);
        parallel_for(points, mc.workers, [&](std::size_t p) {
            for (double a : chunk) acc[p].add(bpsk_conditional_error(gain[p] * a * a));
        });
    }
    std::vector<McEstimate> out(points);
    for (std::size_t p = 0; p < points; ++p) {
        out[p] = {acc[p].mean, std::sqrt(acc[p].variance() / static_cast<double>(mc.trials)),
                  mc.trials};
        if (out[p].value < 10.0 / static_cast<double>(mc.trials)) {
            warn("Monte Carlo estimate " + std::to_string(out[p].value) + " at " +
                 std::to_string(pt_over_n0_dB[p]) + " dB is below 10/trials; tail unreliable");
        }
    }
    return out;
}

inline McEstimate semi_analytic_ber(const Topology& topology, const SnrBudget& snr,
                                    const McConfig& mc) {
    const double db[] = {snr.pt_over_n0_dB};
    return semi_analytic_ber_sweep(topology, db, mc).front();
}

struct EmpiricalAmplitudeStats {
    AmplitudeStats stats;
    double mean_std_error = 0.0;
    double variance_std_error = 0.0;
    std::int64_t trials = 0;
};

inline EmpiricalAmplitudeStats empirical_amplitude_stats(const Topology& topology,
                                                         const McConfig& mc) {
    validate(mc);
    const AmplitudeSampler sampler(topology);
    detail::RunningMoments acc;
    std::vector<double> chunk;
    for (std::int64_t first = 0; first < mc.trials; first += detail::mc_chunk_trials) {
        chunk.resize(static_cast<std::size_t>(std::min(detail::mc_chunk_trials, mc.trials - first)));
        detail::draw_chunk(sampler, mc, first, chunk);
        for (double a : chunk) acc.add(a);
    }
    const double n = static_cast<double>(mc.trials);
    const double scale = std::exp(sampler.log_scale());
    const double var = acc.variance();
    const double m4 = acc.m4 / n;
    const double var_se = std::sqrt(std::max(m4 - var * var, 0.0) / n);
    EmpiricalAmplitudeStats out;
    out.stats = {scale * acc.mean, scale * scale * var};
    out.mean_std_error = scale * std::sqrt(var / n);
    out.variance_std_error = scale * scale * var_se;
    out.trials = mc.trials;
    return out;
}

}  // namespace ris_isl
