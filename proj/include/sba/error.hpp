#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace sba {

enum class ErrorCode {
  InvalidArgument,
  NonPositiveZ,
  NonPositiveLength,
  DegenerateGeometry,
  InfiniteRadius,
  BracketFailure,
  InsufficientData,
  DegenerateFit,
  Unreachable,
  DegenerateFeature,
  DivergedLoss,
  NoEligibleComponents,
  ConstantTargets,
  UnknownLevel,
  Io,
  Format,
};

const char* to_string(ErrorCode code) noexcept;

// Base of every exception thrown by the library. The code lets callers
// (the CLI in particular) map failures onto exit codes without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// A target whose required chamber pressure falls outside [0, p_max].
class UnreachableError : public Error {
 public:
  UnreachableError(int chamber, double required_kpa,
                   std::optional<std::size_t> waypoint = std::nullopt);

  int chamber() const noexcept { return chamber_; }
  double required_kpa() const noexcept { return required_kpa_; }
  std::optional<std::size_t> waypoint() const noexcept { return waypoint_; }

  UnreachableError at_waypoint(std::size_t index) const;

 private:
  int chamber_;
  double required_kpa_;
  std::optional<std::size_t> waypoint_;
};

}  // namespace sba
