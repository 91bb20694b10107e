#include "sba/error.hpp"

#include <fmt/format.h>

namespace sba {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonPositiveZ: return "NonPositiveZ";
    case ErrorCode::NonPositiveLength: return "NonPositiveLength";
    case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::InfiniteRadius: return "InfiniteRadius";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::DegenerateFit: return "DegenerateFit";
    case ErrorCode::Unreachable: return "Unreachable";
    case ErrorCode::DegenerateFeature: return "DegenerateFeature";
    case ErrorCode::DivergedLoss: return "DivergedLoss";
    case ErrorCode::NoEligibleComponents: return "NoEligibleComponents";
    case ErrorCode::ConstantTargets: return "ConstantTargets";
    case ErrorCode::UnknownLevel: return "UnknownLevel";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Format: return "Format";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(fmt::format("{}: {}", to_string(code), message)), code_(code) {}

namespace {

std::string unreachable_message(int chamber, double required_kpa,
                                std::optional<std::size_t> waypoint) {
  std::string msg = fmt::format("chamber {} requires {:.6g} kPa", chamber, required_kpa);
  if (waypoint) msg = fmt::format("waypoint {}: {}", *waypoint, msg);
  return msg;
}

}  // namespace

UnreachableError::UnreachableError(int chamber, double required_kpa,
                                   std::optional<std::size_t> waypoint)
    : Error(ErrorCode::Unreachable, unreachable_message(chamber, required_kpa, waypoint)),
      chamber_(chamber),
      required_kpa_(required_kpa),
      waypoint_(waypoint) {}

UnreachableError UnreachableError::at_waypoint(std::size_t index) const {
  return UnreachableError(chamber_, required_kpa_, index);
}

}  // namespace sba
