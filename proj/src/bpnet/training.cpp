#include "sba/bpnet/training.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "sba/bpnet/metrics.hpp"
#include "sba/error.hpp"

namespace sba::bpnet {

Standardizer Standardizer::fit(std::span<const Vec3> rows) {
  if (rows.empty()) throw Error(ErrorCode::InsufficientData, "cannot standardize an empty set");
  Standardizer s;
  const auto count = static_cast<double>(rows.size());
  for (std::size_t f = 0; f < 3; ++f) {
    double sum = 0.0;
    for (const auto& r : rows) sum += r[f];
    const double mean = sum / count;
    double sq = 0.0;
    for (const auto& r : rows) sq += (r[f] - mean) * (r[f] - mean);
    const double stddev = std::sqrt(sq / count);
    if (!(stddev > 0.0)) {
      throw Error(ErrorCode::DegenerateFeature, fmt::format("feature {} has zero variance", f));
    }
    s.mean[f] = mean;
    s.stddev[f] = stddev;
  }
  return s;
}

Vec3 Standardizer::transform(const Vec3& x) const {
  Vec3 z;
  for (std::size_t f = 0; f < 3; ++f) z[f] = (x[f] - mean[f]) / stddev[f];
  return z;
}

Vec3 Standardizer::inverse(const Vec3& z) const {
  Vec3 x;
  for (std::size_t f = 0; f < 3; ++f) x[f] = z[f] * stddev[f] + mean[f];
  return x;
}

const char* to_string(StopReason reason) {
  return reason == StopReason::threshold ? "threshold" : "max_epochs";
}

double batch_mse(const NetworkWeights& weights, std::span<const Vec3> inputs,
                 std::span<const Vec3> targets, OutputActivation activation) {
  double sum = 0.0;
  for (std::size_t s = 0; s < inputs.size(); ++s) {
    sum += 2.0 * loss(forward_pass(weights, inputs[s], activation).output, targets[s]);
  }
  return sum / static_cast<double>(inputs.size() * weights.outputs());
}

TrainedModel train(const NetworkConfig& config, std::span<const Vec3> inputs,
                   std::span<const Vec3> targets) {
  config.validate();
  if (inputs.size() != targets.size()) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("{} inputs but {} targets", inputs.size(), targets.size()));
  }
  if (inputs.size() < config.hidden) {
    throw Error(ErrorCode::InsufficientData,
                fmt::format("{} samples for {} hidden units", inputs.size(), config.hidden));
  }

  TrainedModel model;
  model.config = config;
  model.input_scaler = Standardizer::fit(inputs);
  model.output_scaler = config.standardize_outputs ? Standardizer::fit(targets) : Standardizer::identity();

  std::vector<Vec3> x;
  std::vector<Vec3> t;
  x.reserve(inputs.size());
  t.reserve(targets.size());
  for (const auto& in : inputs) x.push_back(model.input_scaler.transform(in));
  for (const auto& out : targets) t.push_back(model.output_scaler.transform(out));

  model.weights = init_weights(config);
  auto& weights = model.weights;
  auto& history = model.history;
  const auto act = config.output_activation;
  history.initial_mse = batch_mse(weights, x, t, act);
  history.mse.reserve(config.max_epochs);

  auto grad = NetworkWeights::zeros(config.inputs, config.hidden, config.outputs);
  auto reset = [&grad]() {
    auto zero = [](std::span<double> xs) { std::fill(xs.begin(), xs.end(), 0.0); };
    zero(grad.input_hidden.data());
    zero(grad.hidden_bias);
    zero(grad.hidden_output.data());
    zero(grad.output_bias);
  };

  for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
    if (config.update_mode == UpdateMode::full_batch) {
      reset();
      for (std::size_t s = 0; s < x.size(); ++s) accumulate_gradient(weights, x[s], t[s], act, grad);
      apply_update(weights, grad, config.learning_rate);
    } else {
      for (std::size_t s = 0; s < x.size(); ++s) {
        reset();
        accumulate_gradient(weights, x[s], t[s], act, grad);
        apply_update(weights, grad, config.learning_rate);
      }
    }

    const double mse = batch_mse(weights, x, t, act);
    if (!std::isfinite(mse)) {
      throw Error(ErrorCode::DivergedLoss,
                  fmt::format("MSE became non-finite at epoch {} (learning rate {})", epoch + 1,
                              config.learning_rate));
    }
    history.mse.push_back(mse);
    if (mse <= config.target_mse) {
      history.stop_reason = StopReason::threshold;
      break;
    }
  }

  NetworkConfig ran = config;
  ran.max_epochs = history.epochs();
  history.mac_count = mac_count(ran, x.size());
  return model;
}

Vec3 predict(const TrainedModel& model, const Vec3& input) {
  const auto z = model.input_scaler.transform(input);
  const auto out = forward_pass(model.weights, z, model.config.output_activation).output;
  return model.output_scaler.inverse({out[0], out[1], out[2]});
}

ChamberPressures predict_pressures(const TrainedModel& model, const TipPosition& tip) {
  return {predict(model, {tip.x, tip.y, tip.z})};
}

}  // namespace sba::bpnet
