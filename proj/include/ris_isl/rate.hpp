#pragma once

// Achievable rate of the two-branch simultaneous topology over the range of
// adjacent-plane distances.

#include <cmath>
#include <string>
#include <vector>

#include "ris_isl/geometry.hpp"
#include "ris_isl/multi_ris.hpp"
#include "ris_isl/quadrature.hpp"

namespace ris_isl {

enum class RateMode {
    MeanSnr,  ///< log2(1 + E[gamma]),  E[gamma] = (E[A]^2 + Var[A]) Pt/N0
    Ergodic,  ///< E[log2(1 + gamma)] by Gauss-Hermite over A ~ N(mu, sigma^2)
};

inline constexpr std::size_t ergodic_hermite_nodes = 64;

inline double achievable_rate(const AmplitudeStats& stats, const SnrBudget& snr,
                              RateMode mode = RateMode::MeanSnr) {
    validate(stats);
    if (mode == RateMode::MeanSnr) {
        const double mean_snr =
            scale_by_db(stats.mean * stats.mean + stats.variance, snr.pt_over_n0_dB);
        return std::log2(1.0 + mean_snr);
    }
    static const QuadratureRule rule = gauss_hermite_rule(ergodic_hermite_nodes);
    const double sigma = std::sqrt(stats.variance);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double a = stats.mean + std::sqrt(2.0) * sigma * rule.nodes[i];
        sum += rule.weights[i] * std::log2(1.0 + scale_by_db(a * a, snr.pt_over_n0_dB));
    }
    return sum / std::sqrt(pi);
}

struct RateGrid {
    std::vector<double> d_SR2_km;
    std::vector<double> d_R2D_km;
    double d_intra_km = 0.0;  ///< both hops of the fixed first branch
};

/// Evenly spaced grid over [d_nearest, d_farthest] on both axes.
inline RateGrid make_rate_grid(const DistanceSet& d, std::size_t points_per_axis) {
    if (points_per_axis < 1) throw invalid_argument_error("rate grid needs at least one point");
    const double lo = std::min(d.d_nearest_km, d.d_farthest_km);
    const double hi = std::max(d.d_nearest_km, d.d_farthest_km);
    RateGrid g;
    g.d_intra_km = d.d_intra_km;
    for (std::size_t i = 0; i < points_per_axis; ++i) {
        const double t = points_per_axis == 1 ? 0.0 : double(i) / double(points_per_axis - 1);
        g.d_SR2_km.push_back(i + 1 == points_per_axis ? hi : lo + t * (hi - lo));
    }
    g.d_R2D_km = g.d_SR2_km;
    return g;
}

inline void validate(const RateGrid& g, const DistanceSet& d) {
    if (g.d_SR2_km.empty() || g.d_R2D_km.empty()) throw invalid_argument_error("rate grid is empty");
    check_positive(g.d_intra_km, "d_intra_km");
    const double slack = 1e-9 * d.d_farthest_km;
    auto check = [&](double v) {
        if (v < d.d_nearest_km - slack || v > d.d_farthest_km + slack) {
            throw invalid_argument_error("rate grid distance " + std::to_string(v) +
                                         " km lies outside [d_nearest, d_farthest]");
        }
    };
    for (double v : g.d_SR2_km) check(v);
    for (double v : g.d_R2D_km) check(v);
}

/// Everything but the second branch's distances.
struct RateBaseTopology {
    AntennaConfig antenna;
    int ris_elements = 1024;
    double ris_efficiency = 1.0;
    MisalignmentParams misalignment;  ///< shared by both branches
    RicianConfig rician;
};

struct RatePoint {
    double d_SR2_km = 0.0;
    double d_R2D_km = 0.0;
    double rate_bits_per_s_per_Hz = 0.0;
};

inline SimultaneousTopology two_branch_topology(const RateBaseTopology& base, double d_intra_km,
                                                double d_SR2_km, double d_R2D_km) {
    auto branch = [&](double sr_km, double rd_km) {
        return SimultaneousBranch{
            LinkBudget{base.antenna, sr_km * 1e3, rd_km * 1e3, base.ris_efficiency, base.ris_elements},
            base.misalignment, base.misalignment};
    };
    return {{branch(d_intra_km, d_intra_km), branch(d_SR2_km, d_R2D_km)}, base.rician};
}

/// Row-major over (d_SR2, d_R2D).
inline std::vector<RatePoint> rate_surface(const RateGrid& grid, const RateBaseTopology& base,
                                           const SnrBudget& snr, RateMode mode = RateMode::MeanSnr) {
    if (grid.d_SR2_km.empty() || grid.d_R2D_km.empty()) {
        throw invalid_argument_error("rate grid is empty");
    }
    std::vector<RatePoint> out;
    out.reserve(grid.d_SR2_km.size() * grid.d_R2D_km.size());
    for (double sr : grid.d_SR2_km) {
        for (double rd : grid.d_R2D_km) {
            const auto stats = amplitude_stats_simultaneous(two_branch_topology(base, grid.d_intra_km, sr, rd));
            out.push_back({sr, rd, achievable_rate(stats, snr, mode)});
        }
    }
    return out;
}

}  // namespace ris_isl
