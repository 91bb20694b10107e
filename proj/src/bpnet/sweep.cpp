#include "sba/bpnet/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <thread>

#include <fmt/format.h>

#include "sba/bpnet/metrics.hpp"
#include "sba/bpnet/training.hpp"
#include "sba/error.hpp"
#include "sba/random.hpp"

namespace sba::bpnet {
namespace {

SweepCell run_cell(const NetworkConfig& base, std::size_t hidden, std::uint64_t seed,
                   const SplitData& data) {
  SweepCell cell;
  cell.hidden = hidden;
  cell.seed = seed;
  NetworkConfig config = base;
  config.hidden = hidden;
  config.seed = derive_seed(seed, hidden);
  try {
    const auto model = train(config, data.train_inputs, data.train_targets);
    std::vector<Vec3> preds;
    preds.reserve(data.test_inputs.size());
    for (const auto& x : data.test_inputs) preds.push_back(predict(model, x));
    cell.final_mse = model.history.final_mse();
    cell.test_r2 = r_squared(preds, data.test_targets);
  } catch (const Error& e) {
    cell.error = e.what();
  }
  return cell;
}

}  // namespace

SweepResult hidden_sweep(const NetworkConfig& base, std::span<const std::uint64_t> seeds,
                         const SplitData& data, std::span<const std::size_t> hidden_sizes,
                         std::size_t threads) {
  if (seeds.empty()) throw Error(ErrorCode::InvalidArgument, "sweep needs at least one seed");
  if (data.test_inputs.empty() || data.train_inputs.empty()) {
    throw Error(ErrorCode::InvalidArgument, "sweep needs non-empty train and test splits");
  }
  std::vector<std::size_t> sizes(hidden_sizes.begin(), hidden_sizes.end());
  if (sizes.empty()) sizes = candidate_hidden_sizes(base.inputs, base.outputs);
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());

  SweepResult result;
  result.rows.resize(sizes.size() * seeds.size());

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, result.rows.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < result.rows.size(); i = next++) {
      result.rows[i] = run_cell(base, sizes[i / seeds.size()], seeds[i % seeds.size()], data);
    }
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }

  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t h = 0; h < sizes.size(); ++h) {
    double sum = 0.0;
    std::size_t ok = 0;
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      const auto& cell = result.rows[h * seeds.size() + s];
      if (!cell.ok()) continue;
      sum += cell.test_r2;
      ++ok;
    }
    if (ok == 0) continue;
    const double mean = sum / static_cast<double>(ok);
    if (mean > best) {
      best = mean;
      result.selected_hidden = sizes[h];
    }
  }
  return result;
}

}  // namespace sba::bpnet
