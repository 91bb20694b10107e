#pragma once

#include <array>
#include <cstddef>

namespace sba {

// Physical constants of the three-chamber actuator. Lengths in mm, pressures
// in kPa, compliance in MPa^-1, shear modulus in MPa.
struct ActuatorGeometry {
  double d = 12.5;             // centerline-to-chamber offset
  double l0 = 120.0;           // rest chamber length
  double k = 2.128;            // compliance
  double mu0 = 2.547 / 2.128;  // initial shear modulus, k * mu0 == area_ratio
  double area_ratio = 2.547;   // A / A'
  double p_max = 200.0;

  // Builds a geometry whose shear modulus is derived from k and the area ratio.
  static ActuatorGeometry from_compliance(double d, double l0, double k, double area_ratio,
                                          double p_max);

  // Throws Error(InvalidArgument) naming the first violated invariant.
  void validate() const;
};

struct TipPosition {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  bool operator==(const TipPosition&) const = default;
};

// Constant-curvature state: arc length (mm), bending angle and azimuth (rad).
struct ArcParameters {
  double length = 0.0;
  double theta = 0.0;
  double phi = 0.0;

  bool operator==(const ArcParameters&) const = default;
};

struct ChamberLengths {
  std::array<double, 3> mm{};

  double operator[](std::size_t i) const { return mm[i]; }
  double& operator[](std::size_t i) { return mm[i]; }
  bool operator==(const ChamberLengths&) const = default;
};

// Gauge pressures in kPa. Any finite value is representable; admissibility
// against [0, p_max] is checked where it matters.
struct ChamberPressures {
  std::array<double, 3> kpa{};

  double operator[](std::size_t i) const { return kpa[i]; }
  double& operator[](std::size_t i) { return kpa[i]; }
  bool operator==(const ChamberPressures&) const = default;
};

double distance(const TipPosition& a, const TipPosition& b);

}  // namespace sba
