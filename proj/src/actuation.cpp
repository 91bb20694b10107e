#include "sba/actuation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <fmt/format.h>

#include "sba/csv.hpp"
#include "sba/error.hpp"
#include "sba/kinematics.hpp"

namespace sba::actuation {
namespace {

constexpr double kKpaPerMpa = 1000.0;

// l/l0 - (l0/l)^3, which equals k * P at equilibrium.
double strain_measure(double length_mm, double l0) {
  const double inv = l0 / length_mm;
  return length_mm / l0 - inv * inv * inv;
}

}  // namespace

double length_to_pressure(double length_mm, const ActuatorGeometry& geo) {
  if (!(length_mm > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, fmt::format("chamber length {} mm", length_mm));
  }
  return strain_measure(length_mm, geo.l0) / geo.k * kKpaPerMpa;
}

double pressure_to_length(double pressure_kpa, const ActuatorGeometry& geo) {
  if (pressure_kpa == 0.0) return geo.l0;

  const double target = geo.k * pressure_kpa / kKpaPerMpa;
  auto residual = [&](double length) { return strain_measure(length, geo.l0) - target; };

  double lo = 0.5 * geo.l0;
  double hi = 3.0 * geo.l0;
  double g_lo = residual(lo);
  double g_hi = residual(hi);
  if (!(g_lo <= 0.0 && g_hi >= 0.0)) {
    throw Error(ErrorCode::BracketFailure,
                fmt::format("{} kPa has no chamber length in [{}, {}] mm", pressure_kpa, lo, hi));
  }

  // g is strictly increasing, so plain bisection down to adjacent doubles.
  while (true) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    const double g_mid = residual(mid);
    if (g_mid == 0.0) return mid;
    if (g_mid < 0.0) {
      lo = mid;
      g_lo = g_mid;
    } else {
      hi = mid;
      g_hi = g_mid;
    }
  }
  return std::abs(g_lo) <= std::abs(g_hi) ? lo : hi;
}

CalibrationFit calibrate(std::span<const CalibrationSample> samples, const ActuatorGeometry& geo) {
  if (samples.size() < 3) {
    throw Error(ErrorCode::InsufficientData,
                fmt::format("calibration needs at least 3 samples, got {}", samples.size()));
  }
  bool distinct = false;
  double sum_pu = 0.0;
  double sum_pp = 0.0;
  for (const auto& s : samples) {
    if (!(s.length_mm > 0.0) || !std::isfinite(s.pressure_kpa)) {
      throw Error(ErrorCode::InvalidArgument,
                  fmt::format("bad sample ({} kPa, {} mm)", s.pressure_kpa, s.length_mm));
    }
    distinct = distinct || s.pressure_kpa != samples.front().pressure_kpa;
    const double p = s.pressure_kpa / kKpaPerMpa;
    sum_pu += p * strain_measure(s.length_mm, geo.l0);
    sum_pp += p * p;
  }
  if (!distinct || sum_pp == 0.0) {
    throw Error(ErrorCode::DegenerateFit, "all calibration samples share one pressure");
  }
  const double k_hat = sum_pu / sum_pp;
  if (!(k_hat > 0.0)) {
    throw Error(ErrorCode::DegenerateFit, fmt::format("fitted compliance {} is not positive", k_hat));
  }

  double sq = 0.0;
  for (const auto& s : samples) {
    const double r = s.pressure_kpa / kKpaPerMpa - strain_measure(s.length_mm, geo.l0) / k_hat;
    sq += r * r;
  }
  return {k_hat, geo.area_ratio / k_hat, std::sqrt(sq / static_cast<double>(samples.size()))};
}

std::vector<CalibrationSample> synthetic_calibration_samples(const ActuatorGeometry& geo,
                                                             double step_kpa) {
  if (!(step_kpa > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, fmt::format("pressure step {} kPa", step_kpa));
  }
  std::vector<CalibrationSample> samples;
  const auto steps = static_cast<std::size_t>(std::floor(geo.p_max / step_kpa + 1e-9));
  for (std::size_t i = 0; i <= steps; ++i) {
    const double p = static_cast<double>(i) * step_kpa;
    samples.push_back({p, pressure_to_length(p, geo)});
  }
  return samples;
}

std::vector<CalibrationSample> read_calibration_csv(const std::filesystem::path& path) {
  const auto table = csv::read(path, {"P_kPa", "length_mm"});
  std::vector<CalibrationSample> samples;
  samples.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto context = fmt::format("{} row {}", path.string(), i + 1);
    samples.push_back({csv::parse_double(table.rows[i][0], context),
                       csv::parse_double(table.rows[i][1], context)});
  }
  return samples;
}

void write_calibration_csv(const std::filesystem::path& path,
                           std::span<const CalibrationSample> samples) {
  std::string out = "P_kPa,length_mm\n";
  for (const auto& s : samples) {
    out += fmt::format("{},{}\n", csv::format_double(s.pressure_kpa), csv::format_double(s.length_mm));
  }
  csv::write_text(path, out);
}

ChamberPressures analytical_ik(const TipPosition& tip, const ActuatorGeometry& geo) {
  const auto arc = kinematics::tip_to_arc(tip);
  ChamberLengths lengths;
  try {
    lengths = kinematics::arc_to_chamber_lengths(arc, geo);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NonPositiveLength) throw;
    throw UnreachableError(0, -std::numeric_limits<double>::infinity());
  }

  ChamberPressures pressures;
  for (std::size_t i = 0; i < 3; ++i) {
    double p = length_to_pressure(lengths[i], geo);
    if (p < -kAdmissibleSlackKpa || p > geo.p_max + kAdmissibleSlackKpa) {
      throw UnreachableError(static_cast<int>(i) + 1, p);
    }
    pressures[i] = std::clamp(p, 0.0, geo.p_max);
  }
  return pressures;
}

TipPosition forward_model(const ChamberPressures& pressures, const ActuatorGeometry& geo) {
  ChamberLengths lengths;
  for (std::size_t i = 0; i < 3; ++i) {
    const double p = pressures[i];
    if (!(p >= 0.0 && p <= geo.p_max)) {
      throw Error(ErrorCode::InvalidArgument,
                  fmt::format("chamber {} pressure {} kPa outside [0, {}]", i + 1, p, geo.p_max));
    }
    lengths[i] = pressure_to_length(p, geo);
  }
  return kinematics::arc_to_tip(kinematics::chamber_lengths_to_arc(lengths, geo));
}

}  // namespace sba::actuation
