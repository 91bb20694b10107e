#pragma once

#include <filesystem>

#include <json.hpp>

#include "sba/bpnet/training.hpp"

namespace sba::bpnet {

inline constexpr int kModelFormatVersion = 1;

nlohmann::json config_to_json(const NetworkConfig& config);
// Throws Error(Format) on missing or mistyped fields.
NetworkConfig config_from_json(const nlohmann::json& j);

// {format_version, config, standardizers, weights, history}. Matrices are
// stored row-major with their shape.
nlohmann::json model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const nlohmann::json& j);

void save_model(const std::filesystem::path& path, const TrainedModel& model);
// Throws Error(Io) if unreadable, Error(Format) if not a valid model file.
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace sba::bpnet
