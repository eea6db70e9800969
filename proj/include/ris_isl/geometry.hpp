#pragma once

// Inter-satellite distances for a circular, polar-idealised constellation
// shell: same-plane neighbours, and the two extreme separations between
// satellites in adjacent planes.

#include <cmath>

#include "ris_isl/core.hpp"

namespace ris_isl {

struct ConstellationSpec {
    double altitude_km = 0.0;
    int sats_per_orbit = 0;
    int orbit_count = 0;
    double earth_radius_km = 6378.0;

    double orbit_radius_km() const { return earth_radius_km + altitude_km; }
    /// In-plane angular spacing of neighbouring satellites.
    double theta_rad() const { return 2.0 * pi / sats_per_orbit; }
    /// Angle between neighbouring orbital planes.
    double psi_rad() const { return pi / orbit_count; }
    double theta_deg() const { return rad_to_deg(theta_rad()); }
    double psi_deg() const { return rad_to_deg(psi_rad()); }

    bool operator==(const ConstellationSpec&) const = default;
};

struct DistanceSet {
    double d_intra_km = 0.0;
    double d_nearest_km = 0.0;
    double d_farthest_km = 0.0;
};

inline void validate(const ConstellationSpec& spec) {
    check_positive(spec.altitude_km, "altitude_km");
    check_positive(spec.earth_radius_km, "earth_radius_km");
    if (spec.sats_per_orbit < 2) {
        throw invalid_argument_error("sats_per_orbit must be >= 2, got " +
                                     std::to_string(spec.sats_per_orbit));
    }
    if (spec.orbit_count < 2) {
        throw invalid_argument_error("orbit_count must be >= 2, got " +
                                     std::to_string(spec.orbit_count));
    }
}

namespace presets {

inline ConstellationSpec iridium() { return {781.0, 11, 6, 6378.0}; }
/// First deployment phase.
inline ConstellationSpec starlink() { return {1150.0, 50, 32, 6378.0}; }

}  // namespace presets

/// Law of sines on the isosceles triangle (Earth centre, two neighbours).
/// Two satellites per orbit are antipodal and the triangle degenerates to
/// the diameter.
inline double intra_plane_distance_for_angle(double orbit_radius_km, double theta_rad) {
    const double phi = (pi - theta_rad) / 2.0;
    if (std::sin(phi) == 0.0) return 2.0 * orbit_radius_km;
    return orbit_radius_km * std::sin(theta_rad) / std::sin(phi);
}

inline double intra_plane_distance(const ConstellationSpec& spec) {
    validate(spec);
    return intra_plane_distance_for_angle(spec.orbit_radius_km(), spec.theta_rad());
}

/// One satellite over the pole, its neighbour in the adjacent plane half a
/// slot away.
inline double nearest_distance(const ConstellationSpec& spec) {
    validate(spec);
    const double half = spec.theta_rad() / 2.0;
    const double phi = (pi - half) / 2.0;
    return spec.orbit_radius_km() * std::sin(half) / std::sin(phi);
}

/// One satellite over the equator, the adjacent plane's pair straddling it.
inline double farthest_distance_for_angles(double orbit_radius_km, double theta_rad,
                                           double psi_rad) {
    const double r = orbit_radius_km;
    const double half_chord = intra_plane_distance_for_angle(r, theta_rad) / 2.0;
    if (half_chord > r) {
        throw invalid_argument_error("half intra-plane chord exceeds orbit radius");
    }
    const double op = std::sqrt(r * r - half_chord * half_chord);
    const double d_sp_sq = r * r + op * op - 2.0 * r * op * std::cos(psi_rad);
    return std::sqrt(std::max(d_sp_sq, 0.0) + half_chord * half_chord);
}

inline double farthest_distance(const ConstellationSpec& spec) {
    validate(spec);
    return farthest_distance_for_angles(spec.orbit_radius_km(), spec.theta_rad(),
                                        spec.psi_rad());
}

inline DistanceSet distance_set(const ConstellationSpec& spec) {
    return {intra_plane_distance(spec), nearest_distance(spec), farthest_distance(spec)};
}

}  // namespace ris_isl
