#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "ris_isl/rate.hpp"

using namespace ris_isl;

namespace {

RateBaseTopology base_for(const ConstellationSpec& spec, double jitter) {
    const DistanceSet d = distance_set(spec);
    return {AntennaConfig{}, 1024, 1.0, misalignment_params(AntennaConfig{}, d.d_intra_km * 1e3, jitter), {10.0}};
}

}  // namespace

TEST(Rate, MeanSnrClosedForm) {
    EXPECT_DOUBLE_EQ(achievable_rate({1.0, 0.0}, {0.0}), 1.0);
    EXPECT_NEAR(achievable_rate({1.0, 1.0}, {10.0 * std::log10(1.5)}), 2.0, 1e-14);
}

TEST(Rate, ErgodicMatchesQuadratureOracle) {
    for (const AmplitudeStats s : {AmplitudeStats{1.0, 0.1}, AmplitudeStats{2.0, 0.5}, AmplitudeStats{0.5, 0.3}}) {
        for (double db : {0.0, 10.0}) {
            const double c = db_to_linear(db);
            auto f = [&](double a) {
                const double z = (a - s.mean) / std::sqrt(s.variance);
                return std::exp(-0.5 * z * z) / std::sqrt(2.0 * pi * s.variance) * std::log2(1.0 + c * a * a);
            };
            const double sd = std::sqrt(s.variance);
            const double ref = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
                f, s.mean - 12.0 * sd, s.mean + 12.0 * sd, 15, 1e-13);
            EXPECT_NEAR(achievable_rate(s, {db}, RateMode::Ergodic), ref, 1e-5 * ref);
        }
    }
}

TEST(Rate, ErgodicNeverExceedsMeanSnrRate) {
    for (double var : {0.0, 0.01, 0.3, 2.0}) {
        for (double db : {-10.0, 0.0, 20.0}) {
            const AmplitudeStats s{1.0, var};
            EXPECT_LE(achievable_rate(s, {db}, RateMode::Ergodic), achievable_rate(s, {db}) + 1e-12);
        }
    }
    EXPECT_NEAR(achievable_rate({1.0, 0.0}, {7.0}, RateMode::Ergodic), achievable_rate({1.0, 0.0}, {7.0}), 1e-12);
}

TEST(Rate, HighSnrSlopeIsOneBitPerThreeDecibels) {
    const AmplitudeStats s{1.0, 0.01};
    EXPECT_NEAR(achievable_rate(s, {70.0}) - achievable_rate(s, {60.0}), std::log2(10.0), 1e-5);
}

TEST(RateGrid, SpansNearestToFarthest) {
    const DistanceSet d = distance_set(presets::starlink());
    const RateGrid g = make_rate_grid(d, 11);
    ASSERT_EQ(g.d_SR2_km.size(), 11u);
    EXPECT_DOUBLE_EQ(g.d_SR2_km.front(), d.d_nearest_km);
    EXPECT_DOUBLE_EQ(g.d_SR2_km.back(), d.d_farthest_km);
    EXPECT_DOUBLE_EQ(g.d_intra_km, d.d_intra_km);
    EXPECT_NO_THROW(validate(g, d));
    RateGrid bad = g;
    bad.d_R2D_km.push_back(2.0 * d.d_farthest_km);
    EXPECT_THROW(validate(bad, d), invalid_argument_error);
    EXPECT_THROW(make_rate_grid(d, 0), invalid_argument_error);
}

TEST(RateSurface, CornerMaximumAndMonotoneAxes) {
    for (const auto& spec : {presets::starlink(), presets::iridium()}) {
        for (double jitter : {1.0, 10.0}) {
            for (RateMode mode : {RateMode::MeanSnr, RateMode::Ergodic}) {
                const DistanceSet d = distance_set(spec);
                const RateGrid g = make_rate_grid(d, 9);
                const auto surface = rate_surface(g, base_for(spec, jitter), {870.0}, mode);
                const std::size_t n = g.d_R2D_km.size();
                double best = -1.0;
                std::size_t best_index = 0;
                for (std::size_t k = 0; k < surface.size(); ++k) {
                    if (surface[k].rate_bits_per_s_per_Hz > best) {
                        best = surface[k].rate_bits_per_s_per_Hz;
                        best_index = k;
                    }
                }
                EXPECT_EQ(best_index, 0u);
                EXPECT_DOUBLE_EQ(surface[0].d_SR2_km, d.d_nearest_km);
                EXPECT_DOUBLE_EQ(surface[0].d_R2D_km, d.d_nearest_km);
                for (std::size_t i = 0; i < n; ++i) {
                    for (std::size_t j = 0; j + 1 < n; ++j) {
                        EXPECT_GE(surface[i * n + j].rate_bits_per_s_per_Hz, surface[i * n + j + 1].rate_bits_per_s_per_Hz);
                        EXPECT_GE(surface[j * n + i].rate_bits_per_s_per_Hz, surface[(j + 1) * n + i].rate_bits_per_s_per_Hz);
                    }
                }
            }
        }
    }
}

TEST(RateSurface, IridiumBelowStarlinkPointwise) {
    const auto starlink = rate_surface(make_rate_grid(distance_set(presets::starlink()), 7),
                                       base_for(presets::starlink(), 1.0), {870.0});
    const auto iridium = rate_surface(make_rate_grid(distance_set(presets::iridium()), 7),
                                      base_for(presets::iridium(), 1.0), {870.0});
    ASSERT_EQ(starlink.size(), iridium.size());
    for (std::size_t k = 0; k < starlink.size(); ++k) {
        EXPECT_LT(iridium[k].rate_bits_per_s_per_Hz, starlink[k].rate_bits_per_s_per_Hz);
    }
}

TEST(RateSurface, RejectsEmptyGrid) {
    EXPECT_THROW(rate_surface(RateGrid{}, base_for(presets::starlink(), 1.0), {870.0}), invalid_argument_error);
}
