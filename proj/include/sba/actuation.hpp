#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "sba/types.hpp"

namespace sba::actuation {

// Required pressures within this distance of [0, p_max] are treated as
// round-off and snapped onto the bound.
inline constexpr double kAdmissibleSlackKpa = 1e-7;

// Chamber pressure (kPa) that holds a chamber at the given length:
// P = (l/l0 - (l0/l)^3) / k. Throws Error(InvalidArgument) for length <= 0.
double length_to_pressure(double length_mm, const ActuatorGeometry& geo);

// Inverse of length_to_pressure by bisection on [0.5 l0, 3 l0]. Throws
// Error(BracketFailure) when the pressure has no root on that bracket.
double pressure_to_length(double pressure_kpa, const ActuatorGeometry& geo);

struct CalibrationSample {
  double pressure_kpa = 0.0;
  double length_mm = 0.0;
};

struct CalibrationFit {
  double k_hat = 0.0;     // MPa^-1
  double mu0_hat = 0.0;   // MPa
  double residual = 0.0;  // RMS pressure residual, MPa
};

// Least-squares fit of the compliance from an equal-pressurization run.
// The strain measure l/l0 - (l0/l)^3 is linear in P with slope k, so k is
// the through-origin regression slope.
CalibrationFit calibrate(std::span<const CalibrationSample> samples, const ActuatorGeometry& geo);

// Equal-pressurization samples produced by the model itself.
std::vector<CalibrationSample> synthetic_calibration_samples(const ActuatorGeometry& geo,
                                                             double step_kpa = 20.0);

// CSV with header `P_kPa,length_mm`.
std::vector<CalibrationSample> read_calibration_csv(const std::filesystem::path& path);
void write_calibration_csv(const std::filesystem::path& path,
                           std::span<const CalibrationSample> samples);

// tip -> arc -> chamber lengths -> pressures. Throws UnreachableError when a
// chamber would need a pressure outside [0, p_max].
ChamberPressures analytical_ik(const TipPosition& tip, const ActuatorGeometry& geo);

// pressures -> chamber lengths -> arc -> tip. Pressures must lie in [0, p_max].
TipPosition forward_model(const ChamberPressures& pressures, const ActuatorGeometry& geo);

}  // namespace sba::actuation
