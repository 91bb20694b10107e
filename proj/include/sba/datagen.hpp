#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <json.hpp>

#include "sba/bpnet/sweep.hpp"
#include "sba/types.hpp"

namespace sba::datagen {

enum class Split { train, test };

const char* to_string(Split split);

struct Record {
  ChamberPressures pressures;
  TipPosition tip;
  Split split = Split::train;

  bool operator==(const Record&) const = default;
};

// Per-axis Gaussian measurement noise on the tip, averaged over replicates.
struct NoiseModel {
  double sigma = 0.5;  // mm
  std::size_t replicates = 5;

  void validate() const;
  bool operator==(const NoiseModel&) const = default;
};

struct Provenance {
  ActuatorGeometry geometry;
  NoiseModel noise;
  std::uint64_t seed = 0;
  std::vector<double> levels;
};

struct Dataset {
  std::vector<Record> records;
  Provenance provenance;

  std::size_t count(Split split) const;
  // Inputs are tips, targets are pressures.
  bpnet::SplitData to_split_data() const;
};

inline const std::vector<double> kDefaultLevels = {0.0, 40.0, 80.0, 120.0, 160.0, 200.0};
inline const std::vector<double> kDefaultTrainLevels = {0.0, 80.0, 160.0};

// Cartesian product of the levels, p1 outermost. Throws Error(InvalidArgument)
// for empty levels or levels outside [0, p_max].
std::vector<ChamberPressures> pressure_grid(std::span<const double> levels,
                                            double p_max = ActuatorGeometry{}.p_max);

// Simulated measurement of every grid point. Record i draws its noise from
// derive_seed(seed, i), so results do not depend on evaluation order. All
// records come back tagged train; use split_dataset to assign the test set.
Dataset simulate_platform(std::span<const ChamberPressures> grid, const ActuatorGeometry& geo,
                          const NoiseModel& noise, std::uint64_t seed);

// Tags records whose p1 is one of train_p1_levels as train, the rest test.
// Throws Error(UnknownLevel) for a level not present in the dataset.
Dataset split_dataset(Dataset ds, std::span<const double> train_p1_levels);

nlohmann::json provenance_to_json(const Provenance& p);
Provenance provenance_from_json(const nlohmann::json& j);

// CSV `p1_kPa,p2_kPa,p3_kPa,x_mm,y_mm,z_mm,split` plus a JSON sidecar.
void write_dataset(const Dataset& ds, const std::filesystem::path& csv_path,
                   const std::filesystem::path& provenance_path);
// The sidecar is optional; when absent the provenance is left default.
Dataset read_dataset(const std::filesystem::path& csv_path,
                     const std::filesystem::path& provenance_path = {});

}  // namespace sba::datagen
