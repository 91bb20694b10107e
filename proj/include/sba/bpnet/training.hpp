#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sba/bpnet/network.hpp"
#include "sba/types.hpp"

namespace sba::bpnet {

// Per-feature z-scoring with population statistics.
struct Standardizer {
  Vec3 mean{0.0, 0.0, 0.0};
  Vec3 stddev{1.0, 1.0, 1.0};

  // Throws Error(DegenerateFeature) if any feature is constant.
  static Standardizer fit(std::span<const Vec3> rows);
  static Standardizer identity() { return {}; }

  Vec3 transform(const Vec3& x) const;
  Vec3 inverse(const Vec3& z) const;

  bool operator==(const Standardizer&) const = default;
};

enum class StopReason { threshold, max_epochs };

const char* to_string(StopReason reason);

struct TrainingHistory {
  double initial_mse = 0.0;
  std::vector<double> mse;  // one entry per completed epoch, after its updates
  StopReason stop_reason = StopReason::max_epochs;
  std::uint64_t mac_count = 0;  // multiply-accumulates for the epochs actually run

  std::size_t epochs() const { return mse.size(); }
  double final_mse() const { return mse.empty() ? initial_mse : mse.back(); }
};

struct TrainedModel {
  NetworkConfig config;
  NetworkWeights weights;
  Standardizer input_scaler;
  Standardizer output_scaler;
  TrainingHistory history;
};

// Mean over samples of (1/k) sum_q (P_q - R_q)^2, in whatever units the
// inputs/targets are given.
double batch_mse(const NetworkWeights& weights, std::span<const Vec3> inputs,
                 std::span<const Vec3> targets, OutputActivation activation);

// Fits the standardizers on the training set, then runs gradient descent
// until the MSE reaches config.target_mse or config.max_epochs is exhausted.
// Throws Error(DegenerateFeature), Error(InsufficientData), Error(DivergedLoss).
TrainedModel train(const NetworkConfig& config, std::span<const Vec3> inputs,
                   std::span<const Vec3> targets);

// Network output in original target units.
Vec3 predict(const TrainedModel& model, const Vec3& input);

ChamberPressures predict_pressures(const TrainedModel& model, const TipPosition& tip);

}  // namespace sba::bpnet
