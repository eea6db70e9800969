#include <cmath>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "ris_isl/monte_carlo.hpp"

using namespace ris_isl;

namespace {

constexpr double hop_m = 945.4e3;

struct SilenceWarnings {
    warning_handler previous = set_warning_handler([](std::string_view) {});
    ~SilenceWarnings() { set_warning_handler(previous); }
};

SingleTopology starlink_single(int n, double jitter, double K = 10.0) {
    return {{AntennaConfig{}, hop_m, hop_m, 1.0, n}, misalignment_params(AntennaConfig{}, hop_m, jitter), {K}};
}

// Narrow footprint so that jitter actually perturbs the draws.
SingleTopology jittery_single(int n) {
    return {{AntennaConfig{}, hop_m, hop_m, 1.0, n}, misalignment_params_for_footprint(0.05, 0.4, 0.01), {2.0}};
}

std::vector<double> operating_points(const Topology& t) {
    const AmplitudeStats s = analytic_amplitude_stats(t);
    return {required_pt_over_n0_dB(s, 0.2), required_pt_over_n0_dB(s, 0.05), required_pt_over_n0_dB(s, 0.01)};
}

}  // namespace

TEST(RngStream, DistinctStreamsAndReproducible) {
    RngStream a(1, 0), b(1, 0), c(1, 1), d(2, 0);
    std::set<std::uint64_t> firsts;
    for (int i = 0; i < 100; ++i) {
        const auto x = a();
        ASSERT_EQ(x, b());
        firsts.insert(x);
    }
    EXPECT_EQ(firsts.size(), 100u);
    EXPECT_NE(RngStream(1, 0)(), c());
    EXPECT_NE(RngStream(1, 0)(), d());
}

TEST(RngStream, UniformBitsAreBalanced) {
    RngStream rng(3, 4);
    const int n = 200000;
    std::vector<int> ones(64, 0);
    for (int i = 0; i < n; ++i) {
        const auto x = rng();
        for (int b = 0; b < 64; ++b) ones[b] += static_cast<int>((x >> b) & 1u);
    }
    for (int b = 0; b < 64; ++b) EXPECT_NEAR(ones[b] / double(n), 0.5, 5.0 * 0.5 / std::sqrt(n)) << b;
}

TEST(MonteCarlo, EmpiricalMomentsMatchClosedFormSingle) {
    SilenceWarnings quiet;
    for (const Topology& t : {Topology{starlink_single(256, 1.0)}, Topology{jittery_single(128)}}) {
        const EmpiricalAmplitudeStats e = empirical_amplitude_stats(t, {40000, 17, 4096, 0});
        const AmplitudeStats a = analytic_amplitude_stats(t);
        EXPECT_LT(std::abs(e.stats.mean - a.mean), 3.0 * e.mean_std_error);
        EXPECT_LT(std::abs(e.stats.variance - a.variance), 3.0 * e.variance_std_error);
    }
}

TEST(MonteCarlo, EmpiricalMomentsMatchClosedFormSimultaneous) {
    const MisalignmentParams mis = misalignment_params_for_footprint(0.05, 0.4, 0.01);
    SimultaneousTopology t{{}, {5.0}};
    t.branches.push_back({{AntennaConfig{}, hop_m, hop_m, 1.0, 128}, mis, mis});
    t.branches.push_back({{AntennaConfig{}, 1.3 * hop_m, 0.8 * hop_m, 1.0, 256}, mis, mis});
    const EmpiricalAmplitudeStats e = empirical_amplitude_stats(t, {40000, 5, 1000, 0});
    const AmplitudeStats a = analytic_amplitude_stats(t);
    EXPECT_LT(std::abs(e.stats.mean - a.mean), 3.0 * e.mean_std_error);
    EXPECT_LT(std::abs(e.stats.variance - a.variance), 3.0 * e.variance_std_error);
}

TEST(MonteCarlo, CascadeMeanIsProductOfHopMeans) {
    // Every path through M relays crosses M + 1 independent Rician links.
    const ConsecutiveTopology t{2, 8, 1.0, {3.0}};
    const EmpiricalAmplitudeStats e = empirical_amplitude_stats(t, {50000, 9, 4096, 0});
    const double ea = rician_mean_and_ms({3.0}).mean;
    const double expected = 64.0 * ea * ea * ea;
    EXPECT_LT(std::abs(e.stats.mean - expected), 3.0 * e.mean_std_error);
}

TEST(MonteCarlo, RefusesOversizedCascade) {
    EXPECT_THROW(AmplitudeSampler(Topology{ConsecutiveTopology{3, 8192, 1e-30, {10.0}}}), invalid_argument_error);
}

TEST(MonteCarlo, SemiAnalyticAgreesWithClosedForm) {
    SilenceWarnings quiet;
    const Topology t = starlink_single(256, 1.0);
    const AmplitudeStats s = analytic_amplitude_stats(t);
    std::vector<double> db;
    for (double p : {0.3, 0.1, 1e-2, 1e-3}) db.push_back(required_pt_over_n0_dB(s, p));
    const auto est = semi_analytic_ber_sweep(t, db, {50000, 3, 4096, 0});
    for (std::size_t i = 0; i < db.size(); ++i) {
        const double ratio = est[i].value / bpsk_ber(s, {db[i]});
        EXPECT_GT(ratio, 0.5) << db[i];
        EXPECT_LT(ratio, 2.0) << db[i];
        EXPECT_EQ(est[i].trials_used, 50000);
    }
}

TEST(MonteCarlo, DeterministicAcrossWorkersAndBatchSizes) {
    SilenceWarnings quiet;
    const Topology t = jittery_single(64);
    const std::vector<double> db = operating_points(t);
    const auto reference = semi_analytic_ber_sweep(t, db, {70000, 42, 4096, 1});
    for (unsigned workers : {1u, 2u, 3u, 8u}) {
        for (std::int64_t batch : {1LL, 777LL, 4096LL, 100000LL}) {
            const auto est = semi_analytic_ber_sweep(t, db, {70000, 42, batch, workers});
            for (std::size_t i = 0; i < db.size(); ++i) {
                ASSERT_EQ(est[i].value, reference[i].value) << workers << " " << batch;
                ASSERT_EQ(est[i].std_error, reference[i].std_error);
            }
        }
    }
    const auto other_seed = semi_analytic_ber_sweep(t, db, {70000, 43, 4096, 1});
    EXPECT_NE(other_seed[1].value, reference[1].value);
}

TEST(MonteCarlo, SweepSharesDrawsAcrossPoints) {
    SilenceWarnings quiet;
    const Topology t = jittery_single(64);
    const std::vector<double> db = operating_points(t);
    const auto sweep = semi_analytic_ber_sweep(t, db, {20000, 8, 4096, 0});
    for (std::size_t i = 0; i < db.size(); ++i) {
        EXPECT_EQ(semi_analytic_ber(t, {db[i]}, {20000, 8, 4096, 0}).value, sweep[i].value);
    }
}

TEST(MonteCarlo, ValidatesConfiguration) {
    const Topology t = jittery_single(64);
    EXPECT_THROW(semi_analytic_ber(t, {0.0}, {0, 1, 1, 0}), invalid_argument_error);
    EXPECT_THROW(semi_analytic_ber(t, {0.0}, {10, 1, 0, 0}), invalid_argument_error);
}

TEST(MonteCarlo, WarnsWhenEstimateBelowResolution) {
    std::vector<std::string> seen;
    auto previous = set_warning_handler([&](std::string_view m) { seen.emplace_back(m); });
    const Topology t = starlink_single(256, 1.0);
    semi_analytic_ber(t, {1000.0}, {1000, 1, 4096, 0});
    set_warning_handler(previous);
    EXPECT_EQ(seen.size(), 1u);
}

TEST(Parallel, RethrowsTaskFailure) {
    EXPECT_THROW(parallel_for(100, 4, [](std::size_t i) {
                     if (i == 37) throw numeric_error("boom");
                 }),
                 numeric_error);
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), 3, [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) ASSERT_EQ(h, 1);
}
