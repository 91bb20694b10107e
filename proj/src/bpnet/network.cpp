#include "sba/bpnet/network.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "sba/error.hpp"
#include "sba/random.hpp"

namespace sba::bpnet {

void NetworkConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidArgument, msg); };
  if (inputs != 3) fail(fmt::format("inputs must be 3 (got {})", inputs));
  if (outputs != 3) fail(fmt::format("outputs must be 3 (got {})", outputs));
  if (hidden < 3 || hidden > 13) fail(fmt::format("hidden must lie in [3, 13] (got {})", hidden));
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    fail(fmt::format("learning_rate must be > 0 (got {})", learning_rate));
  }
  if (max_epochs < 1) fail("max_epochs must be >= 1");
  if (!(target_mse > 0.0)) fail(fmt::format("target_mse must be > 0 (got {})", target_mse));
  if (!(init_half_width >= 0.0) || !std::isfinite(init_half_width)) {
    fail(fmt::format("init_half_width must be >= 0 (got {})", init_half_width));
  }
}

NetworkWeights NetworkWeights::zeros(std::size_t inputs, std::size_t hidden, std::size_t outputs) {
  return {Matrix(inputs, hidden), std::vector<double>(hidden, 0.0), Matrix(hidden, outputs),
          std::vector<double>(outputs, 0.0)};
}

bool NetworkWeights::all_finite() const {
  auto finite = [](std::span<const double> xs) {
    return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
  };
  return finite(input_hidden.data()) && finite(hidden_bias) && finite(hidden_output.data()) &&
         finite(output_bias);
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

std::vector<std::size_t> candidate_hidden_sizes(std::size_t n_in, std::size_t n_out) {
  if (n_in < 1 || n_out < 1) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("layer sizes must be >= 1 (got {}, {})", n_in, n_out));
  }
  const double root = std::sqrt(static_cast<double>(n_in + n_out));
  const auto lo = static_cast<std::size_t>(std::floor(root)) + 1;
  const auto hi = static_cast<std::size_t>(std::ceil(root)) + 10;
  std::vector<std::size_t> sizes;
  for (std::size_t m = lo; m <= hi; ++m) sizes.push_back(m);
  return sizes;
}

NetworkWeights init_weights(const NetworkConfig& config) {
  auto weights = NetworkWeights::zeros(config.inputs, config.hidden, config.outputs);
  Rng rng(config.seed);
  const double h = config.init_half_width;
  auto fill = [&](std::span<double> xs) {
    for (double& x : xs) x = rng.uniform(-h, h);
  };
  fill(weights.input_hidden.data());
  fill(weights.hidden_bias);
  fill(weights.hidden_output.data());
  fill(weights.output_bias);
  return weights;
}

ForwardResult forward_pass(const NetworkWeights& weights, std::span<const double> input,
                           OutputActivation activation) {
  const std::size_t n = weights.inputs();
  const std::size_t m = weights.hidden();
  const std::size_t k = weights.outputs();
  if (input.size() != n) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("input has {} features, network expects {}", input.size(), n));
  }

  ForwardResult result{std::vector<double>(k), std::vector<double>(m)};
  for (std::size_t j = 0; j < m; ++j) {
    double z = weights.hidden_bias[j];
    for (std::size_t i = 0; i < n; ++i) z += weights.input_hidden(i, j) * input[i];
    result.hidden[j] = sigmoid(z);
  }
  for (std::size_t q = 0; q < k; ++q) {
    double z = weights.output_bias[q];
    for (std::size_t j = 0; j < m; ++j) z += weights.hidden_output(j, q) * result.hidden[j];
    result.output[q] = activation == OutputActivation::logistic ? sigmoid(z) : z;
  }
  return result;
}

double loss(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != target.size()) {
    throw Error(ErrorCode::InvalidArgument, "prediction and target sizes differ");
  }
  double sum = 0.0;
  for (std::size_t q = 0; q < pred.size(); ++q) {
    const double e = pred[q] - target[q];
    sum += e * e;
  }
  return 0.5 * sum;
}

void accumulate_gradient(const NetworkWeights& weights, std::span<const double> input,
                         std::span<const double> target, OutputActivation activation,
                         Gradients& grad) {
  const std::size_t n = weights.inputs();
  const std::size_t m = weights.hidden();
  const std::size_t k = weights.outputs();
  if (target.size() != k) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("target has {} values, network has {} outputs", target.size(), k));
  }
  const auto fwd = forward_pass(weights, input, activation);

  // dE/dz at the output layer
  std::vector<double> out_delta(k);
  for (std::size_t q = 0; q < k; ++q) {
    const double e = fwd.output[q] - target[q];
    const double p = fwd.output[q];
    out_delta[q] = activation == OutputActivation::logistic ? e * p * (1.0 - p) : e;
    grad.output_bias[q] += out_delta[q];
    for (std::size_t j = 0; j < m; ++j) grad.hidden_output(j, q) += fwd.hidden[j] * out_delta[q];
  }

  for (std::size_t j = 0; j < m; ++j) {
    double back = 0.0;
    for (std::size_t q = 0; q < k; ++q) back += weights.hidden_output(j, q) * out_delta[q];
    const double y = fwd.hidden[j];
    const double hidden_delta = back * y * (1.0 - y);
    grad.hidden_bias[j] += hidden_delta;
    for (std::size_t i = 0; i < n; ++i) grad.input_hidden(i, j) += input[i] * hidden_delta;
  }
}

Gradients gradients(const NetworkWeights& weights, std::span<const Vec3> inputs,
                    std::span<const Vec3> targets, OutputActivation activation) {
  if (inputs.empty() || inputs.size() != targets.size()) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("batch needs matching non-empty inputs/targets ({} vs {})",
                            inputs.size(), targets.size()));
  }
  auto grad = NetworkWeights::zeros(weights.inputs(), weights.hidden(), weights.outputs());
  for (std::size_t s = 0; s < inputs.size(); ++s) {
    accumulate_gradient(weights, inputs[s], targets[s], activation, grad);
  }
  return grad;
}

void apply_update(NetworkWeights& weights, const Gradients& grad, double step) {
  auto axpy = [step](std::span<double> xs, std::span<const double> gs) {
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] -= step * gs[i];
  };
  axpy(weights.input_hidden.data(), grad.input_hidden.data());
  axpy(weights.hidden_bias, grad.hidden_bias);
  axpy(weights.hidden_output.data(), grad.hidden_output.data());
  axpy(weights.output_bias, grad.output_bias);
}

}  // namespace sba::bpnet
