#include "sba/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include <fmt/format.h>

#include "sba/actuation.hpp"
#include "sba/csv.hpp"
#include "sba/error.hpp"
#include "sba/random.hpp"

namespace sba::datagen {

using nlohmann::json;

const char* to_string(Split split) { return split == Split::train ? "train" : "test"; }

void NoiseModel::validate() const {
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorCode::InvalidArgument, fmt::format("sigma must be >= 0 (got {})", sigma));
  }
  if (replicates < 1) throw Error(ErrorCode::InvalidArgument, "replicates must be >= 1");
}

std::size_t Dataset::count(Split split) const {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [split](const Record& r) { return r.split == split; }));
}

bpnet::SplitData Dataset::to_split_data() const {
  bpnet::SplitData data;
  for (const auto& r : records) {
    const bpnet::Vec3 tip{r.tip.x, r.tip.y, r.tip.z};
    if (r.split == Split::train) {
      data.train_inputs.push_back(tip);
      data.train_targets.push_back(r.pressures.kpa);
    } else {
      data.test_inputs.push_back(tip);
      data.test_targets.push_back(r.pressures.kpa);
    }
  }
  return data;
}

std::vector<ChamberPressures> pressure_grid(std::span<const double> levels, double p_max) {
  if (levels.empty()) throw Error(ErrorCode::InvalidArgument, "pressure levels are empty");
  for (double level : levels) {
    if (!(level >= 0.0 && level <= p_max)) {
      throw Error(ErrorCode::InvalidArgument,
                  fmt::format("pressure level {} kPa outside [0, {}]", level, p_max));
    }
  }
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (std::find(levels.begin(), levels.begin() + i, levels[i]) != levels.begin() + i) {
      throw Error(ErrorCode::InvalidArgument, fmt::format("pressure level {} kPa listed twice", levels[i]));
    }
  }
  std::vector<ChamberPressures> grid;
  grid.reserve(levels.size() * levels.size() * levels.size());
  for (double p1 : levels) {
    for (double p2 : levels) {
      for (double p3 : levels) grid.push_back({{p1, p2, p3}});
    }
  }
  return grid;
}

Dataset simulate_platform(std::span<const ChamberPressures> grid, const ActuatorGeometry& geo,
                          const NoiseModel& noise, std::uint64_t seed) {
  geo.validate();
  noise.validate();

  Dataset ds;
  ds.provenance = {geo, noise, seed, {}};
  std::set<double> levels;
  ds.records.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& p = grid[i];
    levels.insert(p.kpa.begin(), p.kpa.end());
    TipPosition tip = actuation::forward_model(p, geo);
    if (noise.sigma > 0.0) {
      Rng rng(derive_seed(seed, i));
      double dx = 0.0, dy = 0.0, dz = 0.0;
      for (std::size_t r = 0; r < noise.replicates; ++r) {
        dx += rng.normal(0.0, noise.sigma);
        dy += rng.normal(0.0, noise.sigma);
        dz += rng.normal(0.0, noise.sigma);
      }
      const auto n = static_cast<double>(noise.replicates);
      tip.x += dx / n;
      tip.y += dy / n;
      tip.z += dz / n;
    }
    ds.records.push_back({p, tip, Split::train});
  }
  ds.provenance.levels.assign(levels.begin(), levels.end());
  return ds;
}

Dataset split_dataset(Dataset ds, std::span<const double> train_p1_levels) {
  std::set<double> present;
  for (const auto& r : ds.records) present.insert(r.pressures[0]);
  for (double level : train_p1_levels) {
    if (!present.contains(level)) {
      throw Error(ErrorCode::UnknownLevel, fmt::format("p1 level {} kPa is not in the dataset", level));
    }
  }
  const std::set<double> train(train_p1_levels.begin(), train_p1_levels.end());
  for (auto& r : ds.records) r.split = train.contains(r.pressures[0]) ? Split::train : Split::test;
  return ds;
}

json provenance_to_json(const Provenance& p) {
  const auto& g = p.geometry;
  return {
      {"geometry",
       {{"d", g.d}, {"l0", g.l0}, {"k", g.k}, {"mu0", g.mu0}, {"area_ratio", g.area_ratio}, {"p_max", g.p_max}}},
      {"sigma", p.noise.sigma},
      {"replicates", p.noise.replicates},
      {"seed", p.seed},
      {"levels", p.levels},
  };
}

Provenance provenance_from_json(const json& j) {
  try {
    Provenance p;
    const auto& g = j.at("geometry");
    p.geometry.d = g.at("d").get<double>();
    p.geometry.l0 = g.at("l0").get<double>();
    p.geometry.k = g.at("k").get<double>();
    p.geometry.mu0 = g.at("mu0").get<double>();
    p.geometry.area_ratio = g.at("area_ratio").get<double>();
    p.geometry.p_max = g.at("p_max").get<double>();
    p.noise.sigma = j.at("sigma").get<double>();
    p.noise.replicates = j.at("replicates").get<std::size_t>();
    p.seed = j.at("seed").get<std::uint64_t>();
    p.levels = j.at("levels").get<std::vector<double>>();
    return p;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Format, fmt::format("dataset provenance: {}", e.what()));
  }
}

void write_dataset(const Dataset& ds, const std::filesystem::path& csv_path,
                   const std::filesystem::path& provenance_path) {
  std::string out = "p1_kPa,p2_kPa,p3_kPa,x_mm,y_mm,z_mm,split\n";
  for (const auto& r : ds.records) {
    out += fmt::format("{},{},{},{},{},{},{}\n", csv::format_double(r.pressures[0]),
                       csv::format_double(r.pressures[1]), csv::format_double(r.pressures[2]),
                       csv::format_double(r.tip.x), csv::format_double(r.tip.y),
                       csv::format_double(r.tip.z), to_string(r.split));
  }
  csv::write_text(csv_path, out);
  if (!provenance_path.empty()) {
    csv::write_text(provenance_path, provenance_to_json(ds.provenance).dump(2) + "\n");
  }
}

Dataset read_dataset(const std::filesystem::path& csv_path,
                     const std::filesystem::path& provenance_path) {
  const auto table =
      csv::read(csv_path, {"p1_kPa", "p2_kPa", "p3_kPa", "x_mm", "y_mm", "z_mm", "split"});
  Dataset ds;
  ds.records.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const auto context = fmt::format("{} row {}", csv_path.string(), i + 1);
    Record r;
    for (std::size_t c = 0; c < 3; ++c) r.pressures[c] = csv::parse_double(row[c], context);
    r.tip = {csv::parse_double(row[3], context), csv::parse_double(row[4], context),
             csv::parse_double(row[5], context)};
    if (row[6] == "train") {
      r.split = Split::train;
    } else if (row[6] == "test") {
      r.split = Split::test;
    } else {
      throw Error(ErrorCode::Format, fmt::format("{}: unknown split '{}'", context, row[6]));
    }
    ds.records.push_back(r);
  }
  if (!provenance_path.empty()) {
    try {
      ds.provenance = provenance_from_json(json::parse(csv::read_text(provenance_path)));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::Format, fmt::format("{}: {}", provenance_path.string(), e.what()));
    }
  }
  return ds;
}

}  // namespace sba::datagen
