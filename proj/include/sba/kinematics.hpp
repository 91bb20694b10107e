#pragma once

#include <array>
#include <numbers>

#include "sba/types.hpp"

namespace sba::kinematics {

// Bending angles below this are treated as the straight configuration.
inline constexpr double kStraightThreshold = 1e-9;

// Azimuth of each chamber centerline in the base frame (chamber 1 on +y).
inline constexpr std::array<double, 3> kChamberAzimuth = {
    std::numbers::pi / 2.0, 7.0 * std::numbers::pi / 6.0, 11.0 * std::numbers::pi / 6.0};

// Tip of a circular arc leaving the origin along +z.
TipPosition arc_to_tip(const ArcParameters& arc);

// Inverse of arc_to_tip. Throws Error(NonPositiveZ) for z <= 0.
ArcParameters tip_to_arc(const TipPosition& tip);

// Throws Error(NonPositiveLength) if the bend would compress a chamber to zero.
ChamberLengths arc_to_chamber_lengths(const ArcParameters& arc, const ActuatorGeometry& geo);

// Throws Error(DegenerateGeometry) for d <= 0.
ArcParameters chamber_lengths_to_arc(const ChamberLengths& lengths, const ActuatorGeometry& geo);

// Radius of curvature from the three chamber lengths. Throws
// Error(InfiniteRadius) when the lengths are equal.
double bending_radius(const ChamberLengths& lengths, const ActuatorGeometry& geo);

}  // namespace sba::kinematics
