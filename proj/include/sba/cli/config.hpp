#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sba/bpnet/network.hpp"
#include "sba/datagen.hpp"
#include "sba/error.hpp"
#include "sba/types.hpp"

namespace sba::cli {

// Validation failure carrying the dotted path of the offending field.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& field_path, const std::string& message);

  const std::string& field_path() const noexcept { return field_path_; }

 private:
  std::string field_path_;
};

struct DatasetBlock {
  std::vector<double> levels = datagen::kDefaultLevels;
  std::vector<double> train_p1_levels = datagen::kDefaultTrainLevels;
};

struct TrajectoryBlock {
  double a = 15.0;
  double b = 15.0;
  double z_c = 124.0;
  std::size_t count = 41;
  std::optional<double> reference_length_mm;  // l0 when unset
  bool measurement_noise = false;             // apply the noise block when evaluating
};

struct RunConfig {
  ActuatorGeometry geometry;
  datagen::NoiseModel noise;
  DatasetBlock dataset;
  bpnet::NetworkConfig network;
  std::vector<std::uint64_t> sweep_seeds = {1, 2, 3, 4, 5};
  TrajectoryBlock trajectory;
  std::uint64_t seed = 1;
  std::filesystem::path output_dir = "out";

  // Throws ConfigError.
  void validate() const;
};

// Every key is optional and falls back to the default; unknown keys are
// rejected. Throws ConfigError.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);
nlohmann::json config_to_json(const RunConfig& config);

}  // namespace sba::cli
