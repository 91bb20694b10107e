#include "sba/bpnet/model_io.hpp"

#include <fmt/format.h>

#include "sba/csv.hpp"
#include "sba/error.hpp"

namespace sba::bpnet {

using nlohmann::json;

namespace {

json matrix_to_json(const Matrix& m) {
  return {{"rows", m.rows()},
          {"cols", m.cols()},
          {"data", std::vector<double>(m.data().begin(), m.data().end())}};
}

Matrix matrix_from_json(const json& j) {
  Matrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
  const auto data = j.at("data").get<std::vector<double>>();
  if (data.size() != m.rows() * m.cols()) {
    throw Error(ErrorCode::Format, fmt::format("matrix data has {} entries, shape is {}x{}",
                                               data.size(), m.rows(), m.cols()));
  }
  std::copy(data.begin(), data.end(), m.data().begin());
  return m;
}

json scaler_to_json(const Standardizer& s) { return {{"mean", s.mean}, {"std", s.stddev}}; }

Standardizer scaler_from_json(const json& j) {
  Standardizer s;
  s.mean = j.at("mean").get<Vec3>();
  s.stddev = j.at("std").get<Vec3>();
  return s;
}

template <class Fn>
auto wrap_format_errors(Fn&& fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Format, e.what());
  }
}

}  // namespace

json config_to_json(const NetworkConfig& c) {
  return {
      {"inputs", c.inputs},
      {"hidden", c.hidden},
      {"outputs", c.outputs},
      {"learning_rate", c.learning_rate},
      {"max_epochs", c.max_epochs},
      {"target_mse", c.target_mse},
      {"seed", c.seed},
      {"init_half_width", c.init_half_width},
      {"output_activation", c.output_activation == OutputActivation::logistic ? "logistic" : "identity"},
      {"update_mode", c.update_mode == UpdateMode::full_batch ? "full_batch" : "per_sample"},
      {"standardize_outputs", c.standardize_outputs},
  };
}

NetworkConfig config_from_json(const json& j) {
  return wrap_format_errors([&] {
    NetworkConfig c;
    c.inputs = j.at("inputs").get<std::size_t>();
    c.hidden = j.at("hidden").get<std::size_t>();
    c.outputs = j.at("outputs").get<std::size_t>();
    c.learning_rate = j.at("learning_rate").get<double>();
    c.max_epochs = j.at("max_epochs").get<std::size_t>();
    c.target_mse = j.at("target_mse").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.init_half_width = j.at("init_half_width").get<double>();
    const auto act = j.at("output_activation").get<std::string>();
    if (act != "identity" && act != "logistic") {
      throw Error(ErrorCode::Format, fmt::format("unknown output_activation '{}'", act));
    }
    c.output_activation = act == "logistic" ? OutputActivation::logistic : OutputActivation::identity;
    const auto mode = j.at("update_mode").get<std::string>();
    if (mode != "per_sample" && mode != "full_batch") {
      throw Error(ErrorCode::Format, fmt::format("unknown update_mode '{}'", mode));
    }
    c.update_mode = mode == "full_batch" ? UpdateMode::full_batch : UpdateMode::per_sample;
    c.standardize_outputs = j.at("standardize_outputs").get<bool>();
    return c;
  });
}

json model_to_json(const TrainedModel& model) {
  const auto& h = model.history;
  return {
      {"format_version", kModelFormatVersion},
      {"config", config_to_json(model.config)},
      {"standardizers",
       {{"input", scaler_to_json(model.input_scaler)}, {"output", scaler_to_json(model.output_scaler)}}},
      {"weights",
       {{"input_hidden", matrix_to_json(model.weights.input_hidden)},
        {"hidden_bias", model.weights.hidden_bias},
        {"hidden_output", matrix_to_json(model.weights.hidden_output)},
        {"output_bias", model.weights.output_bias}}},
      {"history",
       {{"epochs", h.epochs()},
        {"initial_mse", h.initial_mse},
        {"final_mse", h.final_mse()},
        {"stop_reason", to_string(h.stop_reason)},
        {"mac_count", h.mac_count},
        {"mse", h.mse}}},
  };
}

TrainedModel model_from_json(const json& j) {
  return wrap_format_errors([&] {
    const int version = j.at("format_version").get<int>();
    if (version != kModelFormatVersion) {
      throw Error(ErrorCode::Format, fmt::format("unsupported model format_version {}", version));
    }
    TrainedModel model;
    model.config = config_from_json(j.at("config"));
    model.input_scaler = scaler_from_json(j.at("standardizers").at("input"));
    model.output_scaler = scaler_from_json(j.at("standardizers").at("output"));

    const auto& w = j.at("weights");
    model.weights.input_hidden = matrix_from_json(w.at("input_hidden"));
    model.weights.hidden_bias = w.at("hidden_bias").get<std::vector<double>>();
    model.weights.hidden_output = matrix_from_json(w.at("hidden_output"));
    model.weights.output_bias = w.at("output_bias").get<std::vector<double>>();
    const auto& c = model.config;
    const auto& mw = model.weights;
    if (mw.inputs() != c.inputs || mw.hidden() != c.hidden || mw.hidden_output.rows() != c.hidden ||
        mw.outputs() != c.outputs || mw.hidden_bias.size() != c.hidden ||
        mw.output_bias.size() != c.outputs) {
      throw Error(ErrorCode::Format, "weight shapes do not match the stored config");
    }
    if (!mw.all_finite()) throw Error(ErrorCode::Format, "model contains non-finite weights");

    const auto& h = j.at("history");
    model.history.initial_mse = h.at("initial_mse").get<double>();
    model.history.mse = h.at("mse").get<std::vector<double>>();
    model.history.mac_count = h.at("mac_count").get<std::uint64_t>();
    const auto reason = h.at("stop_reason").get<std::string>();
    model.history.stop_reason = reason == "threshold" ? StopReason::threshold : StopReason::max_epochs;
    return model;
  });
}

void save_model(const std::filesystem::path& path, const TrainedModel& model) {
  csv::write_text(path, model_to_json(model).dump(2) + "\n");
}

TrainedModel load_model(const std::filesystem::path& path) {
  const auto text = csv::read_text(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Format, fmt::format("{}: {}", path.string(), e.what()));
  }
  return model_from_json(j);
}

}  // namespace sba::bpnet
