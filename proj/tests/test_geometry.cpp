#include <array>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "ris_isl/geometry.hpp"

using namespace ris_isl;

namespace {

using Vec3 = std::array<double, 3>;

double distance(const Vec3& a, const Vec3& b) {
    return std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) +
                     (a[2] - b[2]) * (a[2] - b[2]));
}

// Satellites placed explicitly on circular polar orbits.
// Nearest pair: one satellite at the pole, its neighbour in the adjacent plane
// half a slot away. Farthest pair: an equatorial satellite and the two
// flanking satellites of the adjacent plane.
DistanceSet cartesian_distances(const ConstellationSpec& spec) {
    const double r = spec.orbit_radius_km();
    const double th = spec.theta_rad();
    const double ps = spec.psi_rad();
    const Vec3 p0{r, 0, 0};
    const Vec3 p1{r * std::cos(th), 0, r * std::sin(th)};
    const Vec3 pole{0, 0, r};
    const Vec3 neighbour{r * std::sin(th / 2) * std::cos(ps), r * std::sin(th / 2) * std::sin(ps),
                         r * std::cos(th / 2)};
    const Vec3 equatorial{r * std::cos(ps), r * std::sin(ps), 0};
    const Vec3 flank{r * std::cos(th / 2), 0, r * std::sin(th / 2)};
    return {distance(p0, p1), distance(pole, neighbour), distance(equatorial, flank)};
}

}  // namespace

TEST(Geometry, PublishedIridiumDistances) {
    const DistanceSet d = distance_set(presets::iridium());
    EXPECT_NEAR(d.d_intra_km / 4034.0, 1.0, 0.005);
    EXPECT_NEAR(d.d_nearest_km / 2037.8, 1.0, 0.005);
    EXPECT_NEAR(d.d_farthest_km / 4162.8, 1.0, 0.005);
}

TEST(Geometry, PublishedStarlinkDistances) {
    const DistanceSet d = distance_set(presets::starlink());
    EXPECT_NEAR(d.d_intra_km / 945.4, 1.0, 0.005);
    EXPECT_NEAR(d.d_nearest_km / 472.93, 1.0, 0.005);
    EXPECT_NEAR(d.d_farthest_km / 876.57, 1.0, 0.005);
}

// 40-digit reference values of the Cartesian construction.
TEST(Geometry, FrozenHighPrecisionValues) {
    const DistanceSet i = distance_set(presets::iridium());
    EXPECT_NEAR(i.d_intra_km, 4033.8467488555904, 1e-9);
    EXPECT_NEAR(i.d_nearest_km, 2037.6638543968966, 1e-9);
    EXPECT_NEAR(i.d_farthest_km, 4162.7564068928557, 1e-9);
    const DistanceSet s = distance_set(presets::starlink());
    EXPECT_NEAR(s.d_intra_km, 945.37406203334219, 1e-10);
    EXPECT_NEAR(s.d_nearest_km, 472.92038868029959, 1e-10);
    EXPECT_NEAR(s.d_farthest_km, 876.55425940656037, 1e-10);
}

TEST(Geometry, PresetsAreExact) {
    EXPECT_EQ(presets::starlink(), (ConstellationSpec{1150.0, 50, 32, 6378.0}));
    EXPECT_EQ(presets::iridium(), (ConstellationSpec{781.0, 11, 6, 6378.0}));
}

TEST(Geometry, MatchesCartesianConstructionOnRandomConstellations) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> alt(300.0, 2000.0);
    std::uniform_int_distribution<int> sats(3, 80);
    std::uniform_int_distribution<int> orbits(2, 40);
    for (int trial = 0; trial < 500; ++trial) {
        const ConstellationSpec spec{alt(rng), sats(rng), orbits(rng), 6378.0};
        const DistanceSet closed = distance_set(spec);
        const DistanceSet cart = cartesian_distances(spec);
        ASSERT_NEAR(closed.d_intra_km / cart.d_intra_km, 1.0, 1e-12);
        ASSERT_NEAR(closed.d_nearest_km / cart.d_nearest_km, 1.0, 1e-12);
        ASSERT_NEAR(closed.d_farthest_km / cart.d_farthest_km, 1.0, 1e-12);
    }
}

TEST(Geometry, ScalesLinearlyWithOrbitRadius) {
    const ConstellationSpec a{622.0, 20, 10, 6378.0};  // R = 7000
    const ConstellationSpec b{7622.0, 20, 10, 6378.0};  // R = 14000
    const DistanceSet da = distance_set(a);
    const DistanceSet db = distance_set(b);
    EXPECT_NEAR(db.d_intra_km / da.d_intra_km, 2.0, 1e-13);
    EXPECT_NEAR(db.d_nearest_km / da.d_nearest_km, 2.0, 1e-13);
    EXPECT_NEAR(db.d_farthest_km / da.d_farthest_km, 2.0, 1e-13);
}

TEST(Geometry, IntraDistanceFallsWithSatelliteCount) {
    double previous = intra_plane_distance({1000.0, 2, 4, 6378.0});
    for (int n = 3; n <= 200; ++n) {
        const double d = intra_plane_distance({1000.0, n, 4, 6378.0});
        ASSERT_LT(d, previous) << "n = " << n;
        previous = d;
    }
}

TEST(Geometry, OrderingOfDistances) {
    for (int n = 3; n <= 60; n += 3) {
        for (int m = 2; m <= 30; m += 2) {
            const DistanceSet d = distance_set({1000.0, n, m, 6378.0});
            ASSERT_LT(d.d_nearest_km, d.d_farthest_km);
            ASSERT_LT(d.d_nearest_km, d.d_intra_km);
        }
    }
}

TEST(Geometry, TwoSatellitesAreAntipodal) {
    const ConstellationSpec spec{1000.0, 2, 3, 6378.0};
    EXPECT_DOUBLE_EQ(intra_plane_distance(spec), 2.0 * spec.orbit_radius_km());
}

TEST(Geometry, RejectsDegenerateConstellations) {
    EXPECT_THROW(distance_set({1000.0, 1, 4, 6378.0}), invalid_argument_error);
    EXPECT_THROW(distance_set({1000.0, 10, 1, 6378.0}), invalid_argument_error);
    EXPECT_THROW(distance_set({-10.0, 10, 4, 6378.0}), invalid_argument_error);
    EXPECT_THROW(distance_set({1000.0, 10, 4, 0.0}), invalid_argument_error);
}
