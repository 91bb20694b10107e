#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "sba/bpnet/network.hpp"

namespace sba::bpnet {

// Components whose |target| is below this (kPa) are left out of the MAPE.
inline constexpr double kMapeMinTarget = 1.0;

struct MapeResult {
  double percent = 0.0;
  std::size_t eligible = 0;
};

// Mean absolute percentage error over all eligible components.
// Throws Error(NoEligibleComponents).
MapeResult mape(std::span<const Vec3> preds, std::span<const Vec3> targets,
                double min_abs_target = kMapeMinTarget);

// 1 - SS_res / SS_tot pooled over the three outputs, each output centred on
// its own mean. Throws Error(ConstantTargets).
double r_squared(std::span<const Vec3> preds, std::span<const Vec3> targets);

// Multiply-accumulate count b * N_T * (n m + m k).
std::uint64_t mac_count(const NetworkConfig& config, std::uint64_t samples);

}  // namespace sba::bpnet
