#include "sba/kinematics.hpp"

#include <cmath>

#include <fmt/format.h>

#include "sba/error.hpp"

namespace sba {

ActuatorGeometry ActuatorGeometry::from_compliance(double d, double l0, double k,
                                                   double area_ratio, double p_max) {
  ActuatorGeometry geo;
  geo.d = d;
  geo.l0 = l0;
  geo.k = k;
  geo.area_ratio = area_ratio;
  geo.mu0 = area_ratio / k;
  geo.p_max = p_max;
  return geo;
}

void ActuatorGeometry::validate() const {
  auto require_positive = [](double value, const char* name) {
    if (!std::isfinite(value) || value <= 0.0) {
      throw Error(ErrorCode::InvalidArgument, fmt::format("{} must be > 0 (got {})", name, value));
    }
  };
  require_positive(d, "d");
  require_positive(l0, "l0");
  require_positive(k, "k");
  require_positive(mu0, "mu0");
  require_positive(area_ratio, "area_ratio");
  require_positive(p_max, "p_max");
  if (std::abs(k * mu0 - area_ratio) > 1e-9 * area_ratio) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("k * mu0 = {} does not match area_ratio = {}", k * mu0, area_ratio));
  }
}

double distance(const TipPosition& a, const TipPosition& b) {
  return std::hypot(a.x - b.x, a.y - b.y, a.z - b.z);
}

namespace kinematics {
namespace {

constexpr double kPi = std::numbers::pi;

// atan2 returns -pi on the negative x axis with y == -0.0; fold it onto +pi.
double wrap_azimuth(double phi) { return phi <= -kPi ? kPi : phi; }

ArcParameters straight(double length) { return {length, 0.0, 0.0}; }

// Half the sum of squared pairwise differences. Algebraically equal to
// l1^2 + l2^2 + l3^2 - l1 l2 - l1 l3 - l2 l3 but free of the cancellation
// that form suffers when the bend is small.
double radicand(const ChamberLengths& l) {
  const double d12 = l[0] - l[1];
  const double d23 = l[1] - l[2];
  const double d13 = l[0] - l[2];
  return 0.5 * (d12 * d12 + d23 * d23 + d13 * d13);
}

void require_positive_lengths(const ChamberLengths& lengths) {
  for (std::size_t i = 0; i < 3; ++i) {
    if (!(lengths[i] > 0.0)) {
      throw Error(ErrorCode::NonPositiveLength,
                  fmt::format("chamber {} length {} mm is not positive", i + 1, lengths[i]));
    }
  }
}

}  // namespace

TipPosition arc_to_tip(const ArcParameters& arc) {
  if (arc.theta < kStraightThreshold) return {0.0, 0.0, arc.length};
  const double radius = arc.length / arc.theta;
  const double half = 0.5 * arc.theta;
  // 1 - cos(theta) written as 2 sin^2(theta/2)
  const double planar = radius * 2.0 * std::sin(half) * std::sin(half);
  return {planar * std::cos(arc.phi), planar * std::sin(arc.phi), radius * std::sin(arc.theta)};
}

ArcParameters tip_to_arc(const TipPosition& tip) {
  if (!(tip.z > 0.0)) {
    throw Error(ErrorCode::NonPositiveZ, fmt::format("tip z = {} mm is outside the model domain", tip.z));
  }
  if (tip.x == 0.0 && tip.y == 0.0) return straight(tip.z);

  const double phi = wrap_azimuth(std::atan2(tip.y, tip.x));

  // cos(theta) = (z^2 c^2 - x^2) / (z^2 c^2 + x^2) with c = cos(phi) is the
  // half-angle identity tan(theta/2) = x / (z c). Evaluating the tangent keeps
  // full precision near theta = 0, where acos is ill-conditioned. The sin(phi)
  // form takes over when the bend plane is closer to the y axis.
  double half_tan = 0.0;
  if (std::abs(tip.x) >= std::abs(tip.y)) {
    half_tan = std::abs(tip.x) / (tip.z * std::abs(std::cos(phi)));
  } else {
    half_tan = std::abs(tip.y) / (tip.z * std::abs(std::sin(phi)));
  }
  const double theta = 2.0 * std::atan(half_tan);
  if (theta < kStraightThreshold) return straight(tip.z);

  return {tip.z * theta / std::sin(theta), theta, phi};
}

ChamberLengths arc_to_chamber_lengths(const ArcParameters& arc, const ActuatorGeometry& geo) {
  ChamberLengths lengths;
  const double offset = arc.theta * geo.d;
  for (std::size_t i = 0; i < 3; ++i) {
    lengths[i] = arc.length - offset * std::cos(kChamberAzimuth[i] - arc.phi);
  }
  require_positive_lengths(lengths);
  return lengths;
}

double bending_radius(const ChamberLengths& lengths, const ActuatorGeometry& geo) {
  if (!(geo.d > 0.0)) {
    throw Error(ErrorCode::DegenerateGeometry, fmt::format("chamber offset d = {} mm", geo.d));
  }
  const double r = radicand(lengths);
  if (!(r > 0.0)) {
    throw Error(ErrorCode::InfiniteRadius, "equal chamber lengths describe a straight actuator");
  }
  const double sum = lengths[0] + lengths[1] + lengths[2];
  return geo.d * sum / (2.0 * std::sqrt(r));
}

ArcParameters chamber_lengths_to_arc(const ChamberLengths& lengths, const ActuatorGeometry& geo) {
  if (!(geo.d > 0.0)) {
    throw Error(ErrorCode::DegenerateGeometry, fmt::format("chamber offset d = {} mm", geo.d));
  }
  require_positive_lengths(lengths);
  const double length = (lengths[0] + lengths[1] + lengths[2]) / 3.0;
  if (!(radicand(lengths) > 0.0)) return straight(length);

  const double theta = length / bending_radius(lengths, geo);
  if (theta < kStraightThreshold) return straight(length);

  // (l - l_i) = theta d cos(alpha_i - phi); projecting onto cos/sin alpha
  // isolates cos(phi) and sin(phi). The azimuths sum to zero over the three
  // chambers, so chamber 1 can stand in for the mean length.
  double c = 0.0;
  double s = 0.0;
  for (std::size_t i = 1; i < 3; ++i) {
    const double diff = lengths[0] - lengths[i];
    c += diff * std::cos(kChamberAzimuth[i]);
    s += diff * std::sin(kChamberAzimuth[i]);
  }
  return {length, theta, wrap_azimuth(std::atan2(s, c))};
}

}  // namespace kinematics
}  // namespace sba
