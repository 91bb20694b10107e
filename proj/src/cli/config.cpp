#include "sba/cli/config.hpp"

#include <cmath>
#include <set>

#include <fmt/format.h>

#include "sba/bpnet/model_io.hpp"
#include "sba/csv.hpp"

namespace sba::cli {

using nlohmann::json;

ConfigError::ConfigError(const std::string& field_path, const std::string& message)
    : Error(ErrorCode::InvalidArgument, fmt::format("{}: {}", field_path, message)),
      field_path_(field_path) {}

namespace {

// Typed access to one JSON object, remembering which keys were consumed so
// that leftovers can be reported as unknown.
class Block {
 public:
  Block(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "must be an object");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out) {
    if (const auto* v = find(key)) {
      if (!v->is_number()) throw ConfigError(field(key), "must be a number");
      out = v->get<double>();
    }
  }

  template <class Int>
  void integer(const std::string& key, Int& out) {
    if (const auto* v = find(key)) {
      if (!v->is_number_unsigned()) throw ConfigError(field(key), "must be a non-negative integer");
      out = v->get<Int>();
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (const auto* v = find(key)) {
      if (!v->is_boolean()) throw ConfigError(field(key), "must be true or false");
      out = v->get<bool>();
    }
  }

  void string(const std::string& key, std::string& out) {
    if (const auto* v = find(key)) {
      if (!v->is_string()) throw ConfigError(field(key), "must be a string");
      out = v->get<std::string>();
    }
  }

  void numbers(const std::string& key, std::vector<double>& out) {
    if (const auto* v = find(key)) {
      if (!v->is_array()) throw ConfigError(field(key), "must be an array of numbers");
      out.clear();
      for (const auto& e : *v) {
        if (!e.is_number()) throw ConfigError(field(key), "must be an array of numbers");
        out.push_back(e.get<double>());
      }
    }
  }

  void integers(const std::string& key, std::vector<std::uint64_t>& out) {
    if (const auto* v = find(key)) {
      if (!v->is_array()) throw ConfigError(field(key), "must be an array of integers");
      out.clear();
      for (const auto& e : *v) {
        if (!e.is_number_unsigned()) throw ConfigError(field(key), "must be an array of integers");
        out.push_back(e.get<std::uint64_t>());
      }
    }
  }

  std::optional<Block> child(const std::string& key) {
    if (const auto* v = find(key)) return Block(*v, field(key));
    return std::nullopt;
  }

  void reject_unknown() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.contains(key)) throw ConfigError(field(key), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

// Module validators phrase messages as "<field> must ..."; turn that into a
// dotted path under the block name.
template <class Fn>
void validate_block(const std::string& block, Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    std::string msg = e.what();
    const auto colon = msg.find(": ");
    if (colon != std::string::npos) msg = msg.substr(colon + 2);
    const auto space = msg.find(' ');
    const std::string field = msg.substr(0, space);
    throw ConfigError(block + "." + field, space == std::string::npos ? "invalid" : msg.substr(space + 1));
  }
}

}  // namespace

void RunConfig::validate() const {
  validate_block("geometry", [&] { geometry.validate(); });
  validate_block("noise", [&] { noise.validate(); });
  validate_block("network", [&] { network.validate(); });

  if (dataset.levels.empty()) throw ConfigError("dataset.levels", "must not be empty");
  for (double level : dataset.levels) {
    if (!(level >= 0.0 && level <= geometry.p_max)) {
      throw ConfigError("dataset.levels", fmt::format("level {} outside [0, p_max]", level));
    }
  }
  const std::set<double> levels(dataset.levels.begin(), dataset.levels.end());
  if (levels.size() != dataset.levels.size()) throw ConfigError("dataset.levels", "duplicate level");
  for (double level : dataset.train_p1_levels) {
    if (!levels.contains(level)) {
      throw ConfigError("dataset.train_p1_levels", fmt::format("{} is not one of dataset.levels", level));
    }
  }
  if (sweep_seeds.empty()) throw ConfigError("network.sweep_seeds", "must not be empty");

  if (!std::isfinite(trajectory.a)) throw ConfigError("trajectory.a", "must be finite");
  if (!std::isfinite(trajectory.b)) throw ConfigError("trajectory.b", "must be finite");
  if (!(trajectory.z_c > 0.0)) throw ConfigError("trajectory.z_c", "must be > 0");
  if (trajectory.count < 2) throw ConfigError("trajectory.count", "must be >= 2");
  if (trajectory.reference_length_mm && !(*trajectory.reference_length_mm > 0.0)) {
    throw ConfigError("trajectory.reference_length_mm", "must be > 0");
  }
}

RunConfig parse_config(const json& j) {
  RunConfig c;
  Block root(j, "");
  root.integer("seed", c.seed);
  std::string out_dir = c.output_dir.string();
  root.string("output_dir", out_dir);
  c.output_dir = out_dir;

  if (auto g = root.child("geometry")) {
    g->number("d", c.geometry.d);
    g->number("l0", c.geometry.l0);
    g->number("k", c.geometry.k);
    g->number("area_ratio", c.geometry.area_ratio);
    g->number("p_max", c.geometry.p_max);
    c.geometry.mu0 = c.geometry.area_ratio / c.geometry.k;
    if (g->find("mu0")) {
      double mu0 = 0.0;
      g->number("mu0", mu0);
      if (!(std::abs(c.geometry.k * mu0 - c.geometry.area_ratio) <= 1e-9 * std::abs(c.geometry.area_ratio))) {
        throw ConfigError("geometry.mu0", fmt::format("must equal area_ratio / k = {}", c.geometry.mu0));
      }
      c.geometry.mu0 = mu0;
    }
    g->reject_unknown();
  }
  if (auto n = root.child("noise")) {
    n->number("sigma", c.noise.sigma);
    n->integer("replicates", c.noise.replicates);
    n->reject_unknown();
  }
  if (auto d = root.child("dataset")) {
    d->numbers("levels", c.dataset.levels);
    d->numbers("train_p1_levels", c.dataset.train_p1_levels);
    d->reject_unknown();
  }
  if (auto n = root.child("network")) {
    n->integer("hidden", c.network.hidden);
    n->number("learning_rate", c.network.learning_rate);
    n->integer("max_epochs", c.network.max_epochs);
    n->number("target_mse", c.network.target_mse);
    n->number("init_half_width", c.network.init_half_width);
    std::string activation = "identity";
    n->string("output_activation", activation);
    if (activation == "identity") {
      c.network.output_activation = bpnet::OutputActivation::identity;
    } else if (activation == "logistic") {
      c.network.output_activation = bpnet::OutputActivation::logistic;
    } else {
      throw ConfigError("network.output_activation", "must be \"identity\" or \"logistic\"");
    }
    std::string mode = "per_sample";
    n->string("update_mode", mode);
    if (mode == "per_sample") {
      c.network.update_mode = bpnet::UpdateMode::per_sample;
    } else if (mode == "full_batch") {
      c.network.update_mode = bpnet::UpdateMode::full_batch;
    } else {
      throw ConfigError("network.update_mode", "must be \"per_sample\" or \"full_batch\"");
    }
    n->boolean("standardize_outputs", c.network.standardize_outputs);
    n->integers("sweep_seeds", c.sweep_seeds);
    n->reject_unknown();
  }
  if (auto t = root.child("trajectory")) {
    t->number("a", c.trajectory.a);
    t->number("b", c.trajectory.b);
    t->number("z_c", c.trajectory.z_c);
    t->integer("count", c.trajectory.count);
    if (const auto* v = t->find("reference_length_mm"); v && !v->is_null()) {
      if (!v->is_number()) throw ConfigError(t->field("reference_length_mm"), "must be a number");
      c.trajectory.reference_length_mm = v->get<double>();
    }
    t->boolean("measurement_noise", c.trajectory.measurement_noise);
    t->reject_unknown();
  }
  root.reject_unknown();

  c.network.seed = c.seed;
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  const auto text = csv::read_text(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError("<root>", fmt::format("{} is not valid JSON: {}", path.string(), e.what()));
  }
  return parse_config(j);
}

json config_to_json(const RunConfig& c) {
  const auto& g = c.geometry;
  const auto& n = c.network;
  json trajectory = {{"a", c.trajectory.a},
                     {"b", c.trajectory.b},
                     {"z_c", c.trajectory.z_c},
                     {"count", c.trajectory.count},
                     {"measurement_noise", c.trajectory.measurement_noise}};
  trajectory["reference_length_mm"] =
      c.trajectory.reference_length_mm ? json(*c.trajectory.reference_length_mm) : json(nullptr);
  return {
      {"seed", c.seed},
      {"output_dir", c.output_dir.string()},
      {"geometry",
       {{"d", g.d}, {"l0", g.l0}, {"k", g.k}, {"mu0", g.mu0}, {"area_ratio", g.area_ratio}, {"p_max", g.p_max}}},
      {"noise", {{"sigma", c.noise.sigma}, {"replicates", c.noise.replicates}}},
      {"dataset", {{"levels", c.dataset.levels}, {"train_p1_levels", c.dataset.train_p1_levels}}},
      {"network",
       {{"hidden", n.hidden},
        {"learning_rate", n.learning_rate},
        {"max_epochs", n.max_epochs},
        {"target_mse", n.target_mse},
        {"init_half_width", n.init_half_width},
        {"output_activation", n.output_activation == bpnet::OutputActivation::logistic ? "logistic" : "identity"},
        {"update_mode", n.update_mode == bpnet::UpdateMode::full_batch ? "full_batch" : "per_sample"},
        {"standardize_outputs", n.standardize_outputs},
        {"sweep_seeds", c.sweep_seeds}}},
      {"trajectory", trajectory},
  };
}

}  // namespace sba::cli
