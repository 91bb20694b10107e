#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace sba::bpnet {

using Vec3 = std::array<double, 3>;

enum class OutputActivation { identity, logistic };

// per_sample applies the weight update after every training example (classic
// back-propagation); full_batch sums the gradient over the whole set first.
enum class UpdateMode { per_sample, full_batch };

struct NetworkConfig {
  std::size_t inputs = 3;
  std::size_t hidden = 13;
  std::size_t outputs = 3;
  double learning_rate = 0.01;
  std::size_t max_epochs = 500;
  double target_mse = 0.01;  // stop once the standardized batch MSE reaches this
  std::uint64_t seed = 1;
  double init_half_width = 0.5;
  OutputActivation output_activation = OutputActivation::identity;
  UpdateMode update_mode = UpdateMode::per_sample;
  bool standardize_outputs = true;

  // Throws Error(InvalidArgument).
  void validate() const;
};

// Dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// v (inputs x hidden), b (hidden), w (hidden x outputs), beta (outputs).
struct NetworkWeights {
  Matrix input_hidden;
  std::vector<double> hidden_bias;
  Matrix hidden_output;
  std::vector<double> output_bias;

  static NetworkWeights zeros(std::size_t inputs, std::size_t hidden, std::size_t outputs);

  std::size_t inputs() const { return input_hidden.rows(); }
  std::size_t hidden() const { return input_hidden.cols(); }
  std::size_t outputs() const { return hidden_output.cols(); }
  bool all_finite() const;

  bool operator==(const NetworkWeights&) const = default;
};

// Partial derivatives laid out exactly like the weights they belong to.
using Gradients = NetworkWeights;

struct ForwardResult {
  std::vector<double> output;
  std::vector<double> hidden;
};

double sigmoid(double z);

// Hidden-size candidates sqrt(n_in + n_out) + alpha, alpha = 1..10. The
// square root is taken down for the lower end and up for the upper end, so a
// non-square sum yields eleven sizes (3..13 for a 3-in 3-out network).
std::vector<std::size_t> candidate_hidden_sizes(std::size_t n_in, std::size_t n_out);

// Uniform on [-h, h], drawn in the order v (row-major), b, w (row-major), beta.
NetworkWeights init_weights(const NetworkConfig& config);

ForwardResult forward_pass(const NetworkWeights& weights, std::span<const double> input,
                           OutputActivation activation = OutputActivation::identity);

// 1/2 * sum_q (pred_q - target_q)^2
double loss(std::span<const double> pred, std::span<const double> target);

// Gradient of the summed per-sample loss over the batch.
Gradients gradients(const NetworkWeights& weights, std::span<const Vec3> inputs,
                    std::span<const Vec3> targets,
                    OutputActivation activation = OutputActivation::identity);

// Adds one example's gradient into `grad`.
void accumulate_gradient(const NetworkWeights& weights, std::span<const double> input,
                         std::span<const double> target, OutputActivation activation,
                         Gradients& grad);

// weights -= step * grad
void apply_update(NetworkWeights& weights, const Gradients& grad, double step);

}  // namespace sba::bpnet
