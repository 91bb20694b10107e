#include "sba/bpnet/metrics.hpp"

#include <cmath>

#include <fmt/format.h>

#include "sba/error.hpp"

namespace sba::bpnet {
namespace {

void require_aligned(std::span<const Vec3> preds, std::span<const Vec3> targets) {
  if (preds.size() != targets.size()) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("{} predictions but {} targets", preds.size(), targets.size()));
  }
}

}  // namespace

MapeResult mape(std::span<const Vec3> preds, std::span<const Vec3> targets, double min_abs_target) {
  require_aligned(preds, targets);
  double sum = 0.0;
  std::size_t eligible = 0;
  for (std::size_t s = 0; s < preds.size(); ++s) {
    for (std::size_t q = 0; q < 3; ++q) {
      const double t = targets[s][q];
      if (std::abs(t) < min_abs_target) continue;
      sum += std::abs(preds[s][q] - t) / std::abs(t);
      ++eligible;
    }
  }
  if (eligible == 0) {
    throw Error(ErrorCode::NoEligibleComponents,
                fmt::format("no target component has |T| >= {}", min_abs_target));
  }
  return {100.0 * sum / static_cast<double>(eligible), eligible};
}

double r_squared(std::span<const Vec3> preds, std::span<const Vec3> targets) {
  require_aligned(preds, targets);
  if (targets.size() < 2) {
    throw Error(ErrorCode::ConstantTargets, "R^2 needs at least two samples");
  }
  Vec3 mean{0.0, 0.0, 0.0};
  for (const auto& t : targets) {
    for (std::size_t q = 0; q < 3; ++q) mean[q] += t[q];
  }
  for (double& m : mean) m /= static_cast<double>(targets.size());

  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (std::size_t s = 0; s < targets.size(); ++s) {
    for (std::size_t q = 0; q < 3; ++q) {
      const double r = preds[s][q] - targets[s][q];
      const double c = targets[s][q] - mean[q];
      ss_res += r * r;
      ss_tot += c * c;
    }
  }
  if (!(ss_tot > 0.0)) throw Error(ErrorCode::ConstantTargets, "targets have no variance");
  return 1.0 - ss_res / ss_tot;
}

std::uint64_t mac_count(const NetworkConfig& config, std::uint64_t samples) {
  const std::uint64_t per_sample =
      config.inputs * config.hidden + config.hidden * config.outputs;
  return samples * static_cast<std::uint64_t>(config.max_epochs) * per_sample;
}

}  // namespace sba::bpnet
