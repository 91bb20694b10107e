#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sba/bpnet/network.hpp"

namespace sba::bpnet {

struct SplitData {
  std::vector<Vec3> train_inputs;
  std::vector<Vec3> train_targets;
  std::vector<Vec3> test_inputs;
  std::vector<Vec3> test_targets;
};

struct SweepCell {
  std::size_t hidden = 0;
  std::uint64_t seed = 0;
  double final_mse = 0.0;
  double test_r2 = 0.0;
  std::string error;  // empty when training succeeded

  bool ok() const { return error.empty(); }
};

struct SweepResult {
  std::vector<SweepCell> rows;  // ordered by (hidden, seed position)
  std::optional<std::size_t> selected_hidden;
};

// Trains one network per (hidden size, seed). Each cell's weights are drawn
// from derive_seed(seed, hidden), so cells are independent and may run on
// worker threads. The size with the highest mean test R^2 wins; ties go to
// the smaller size. Training failures are recorded in the cell, not thrown.
SweepResult hidden_sweep(const NetworkConfig& base, std::span<const std::uint64_t> seeds,
                         const SplitData& data, std::span<const std::size_t> hidden_sizes = {},
                         std::size_t threads = 0);

}  // namespace sba::bpnet
