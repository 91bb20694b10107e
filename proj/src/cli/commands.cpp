#include "sba/cli/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <functional>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include "sba/actuation.hpp"
#include "sba/bpnet/metrics.hpp"
#include "sba/bpnet/model_io.hpp"
#include "sba/bpnet/sweep.hpp"
#include "sba/bpnet/training.hpp"
#include "sba/cli/config.hpp"
#include "sba/csv.hpp"
#include "sba/datagen.hpp"
#include "sba/random.hpp"
#include "sba/trajectory.hpp"

namespace sba::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Stream index for measurement noise during evaluation, kept apart from the
// per-record streams used by the data platform.
constexpr std::uint64_t kEvaluationNoiseStream = 0x65766131;

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  cmd->add_option("--seed", opts.seed, "Override the configured seed");
  cmd->add_option("--out", opts.out_dir, "Output directory (overrides output_dir)");
}

RunConfig resolve(const CommonOptions& opts) {
  RunConfig config = opts.config_path.empty() ? RunConfig{} : load_config(opts.config_path);
  if (opts.seed) {
    config.seed = *opts.seed;
    config.network.seed = *opts.seed;
  }
  if (!opts.out_dir.empty()) config.output_dir = opts.out_dir;
  config.validate();
  return config;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error(ErrorCode::Io, fmt::format("cannot create output directory {}", dir.string()));
  }
}

fs::path or_default(const std::string& given, const fs::path& fallback) {
  return given.empty() ? fallback : fs::path(given);
}

void write_json(const fs::path& path, const json& j) { csv::write_text(path, j.dump(2) + "\n"); }

datagen::Dataset load_dataset(const fs::path& csv_path) {
  fs::path provenance = csv_path;
  provenance.replace_extension(".json");
  return datagen::read_dataset(csv_path, fs::exists(provenance) ? provenance : fs::path{});
}

std::vector<trajectory::Waypoint> configured_waypoints(const RunConfig& c) {
  const auto& t = c.trajectory;
  return trajectory::lemniscate_waypoints(t.a, t.b, t.z_c, t.count);
}

bpnet::TrainedModel load_trained_model(const fs::path& path) {
  if (!fs::exists(path)) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("no trained model at {}; run `train` first or pass --model", path.string()));
  }
  return bpnet::load_model(path);
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::Io:
      return kExitIo;
    case ErrorCode::DivergedLoss:
    case ErrorCode::BracketFailure:
    case ErrorCode::Unreachable:
    case ErrorCode::NonPositiveZ:
    case ErrorCode::NonPositiveLength:
    case ErrorCode::InfiniteRadius:
    case ErrorCode::DegenerateGeometry:
      return kExitNumerical;
    default:
      return kExitValidation;
  }
}

// ---- commands ----

void cmd_generate(const RunConfig& c, std::ostream& out) {
  ensure_dir(c.output_dir);
  const auto grid = datagen::pressure_grid(c.dataset.levels, c.geometry.p_max);
  auto ds = datagen::simulate_platform(grid, c.geometry, c.noise, c.seed);
  ds = datagen::split_dataset(std::move(ds), c.dataset.train_p1_levels);
  datagen::write_dataset(ds, c.output_dir / "dataset.csv", c.output_dir / "dataset.json");
  fmt::print(out, "records={} train={} test={}\n", ds.records.size(), ds.count(datagen::Split::train),
             ds.count(datagen::Split::test));
}

struct CalibrateOptions {
  std::string samples;
  double noise_percent = 0.0;
};

void cmd_calibrate(const RunConfig& c, const CalibrateOptions& opts, std::ostream& out) {
  ensure_dir(c.output_dir);
  std::vector<actuation::CalibrationSample> samples;
  if (!opts.samples.empty()) {
    samples = actuation::read_calibration_csv(opts.samples);
  } else {
    samples = actuation::synthetic_calibration_samples(c.geometry);
    if (opts.noise_percent > 0.0) {
      Rng rng(derive_seed(c.seed, 0x63616c));
      for (auto& s : samples) {
        const double elongation = s.length_mm - c.geometry.l0;
        s.length_mm = c.geometry.l0 + elongation * (1.0 + rng.normal(0.0, opts.noise_percent / 100.0));
      }
    }
    actuation::write_calibration_csv(c.output_dir / "calibration_samples.csv", samples);
  }
  const auto fit = actuation::calibrate(samples, c.geometry);
  write_json(c.output_dir / "calibration.json", {{"k_hat_per_mpa", fit.k_hat},
                                                 {"mu0_hat_mpa", fit.mu0_hat},
                                                 {"rms_residual_mpa", fit.residual},
                                                 {"area_ratio", c.geometry.area_ratio},
                                                 {"samples", samples.size()}});
  fmt::print(out, "k_hat={:.6g} mu0_hat={:.6g} rms_residual={:.3g} samples={}\n", fit.k_hat, fit.mu0_hat,
             fit.residual, samples.size());
}

struct TrainOptions {
  std::string data;
  std::string model;
};

void cmd_train(const RunConfig& c, const TrainOptions& opts, std::ostream& out) {
  ensure_dir(c.output_dir);
  const auto ds = load_dataset(or_default(opts.data, c.output_dir / "dataset.csv"));
  const auto split = ds.to_split_data();
  if (split.test_inputs.empty()) throw Error(ErrorCode::InsufficientData, "dataset has no test records");
  if (split.train_inputs.empty()) throw Error(ErrorCode::InsufficientData, "dataset has no train records");

  const auto model = bpnet::train(c.network, split.train_inputs, split.train_targets);
  bpnet::save_model(or_default(opts.model, c.output_dir / "model.json"), model);

  std::vector<bpnet::Vec3> preds;
  preds.reserve(split.test_inputs.size());
  for (const auto& x : split.test_inputs) preds.push_back(bpnet::predict(model, x));
  const auto m = bpnet::mape(preds, split.test_targets);
  const double r2 = bpnet::r_squared(preds, split.test_targets);
  fmt::print(out, "train_mse={:.6g} test_mape={:.4g}% test_r2={:.6g} macs={} epochs={} stop={}\n",
             model.history.final_mse(), m.percent, r2, model.history.mac_count, model.history.epochs(),
             bpnet::to_string(model.history.stop_reason));
}

struct SweepOptions {
  std::string data;
  std::vector<std::uint64_t> seeds;
  std::size_t threads = 0;
};

void cmd_sweep(const RunConfig& c, const SweepOptions& opts, std::ostream& out) {
  ensure_dir(c.output_dir);
  const auto ds = load_dataset(or_default(opts.data, c.output_dir / "dataset.csv"));
  const auto split = ds.to_split_data();
  if (split.test_inputs.empty()) throw Error(ErrorCode::InsufficientData, "dataset has no test records");
  const auto& seeds = opts.seeds.empty() ? c.sweep_seeds : opts.seeds;
  const auto result = bpnet::hidden_sweep(c.network, seeds, split, {}, opts.threads);

  std::string table = "hidden,seed,final_mse,test_r2,error\n";
  for (const auto& row : result.rows) {
    std::string error = row.error;
    std::replace(error.begin(), error.end(), ',', ';');
    std::replace(error.begin(), error.end(), '\n', ' ');
    table += fmt::format("{},{},{},{},{}\n", row.hidden, row.seed,
                         row.ok() ? csv::format_double(row.final_mse) : "",
                         row.ok() ? csv::format_double(row.test_r2) : "", error);
  }
  csv::write_text(c.output_dir / "sweep.csv", table);
  for (const auto& row : result.rows) {
    if (!row.ok()) fmt::print(out, "cell hidden={} seed={} failed: {}\n", row.hidden, row.seed, row.error);
  }
  if (!result.selected_hidden) throw Error(ErrorCode::DivergedLoss, "every sweep cell failed");
  fmt::print(out, "rows={} selected_hidden={}\n", result.rows.size(), *result.selected_hidden);
}

struct PlanOptions {
  std::string solver = "analytical";
  std::string model;
};

trajectory::PressureSchedule make_schedule(const RunConfig& c, trajectory::Solver solver,
                                           std::span<const trajectory::Waypoint> waypoints,
                                           const std::string& model_path) {
  if (solver == trajectory::Solver::analytical) return trajectory::plan_analytical(waypoints, c.geometry);
  const auto model = load_trained_model(or_default(model_path, c.output_dir / "model.json"));
  return trajectory::plan_network(waypoints, model, c.geometry);
}

void cmd_plan(const RunConfig& c, const PlanOptions& opts, std::ostream& out) {
  ensure_dir(c.output_dir);
  const auto solver = trajectory::solver_from_string(opts.solver);
  const auto waypoints = configured_waypoints(c);
  const auto schedule = make_schedule(c, solver, waypoints, opts.model);
  trajectory::write_waypoints_csv(c.output_dir / "waypoints.csv", waypoints);
  trajectory::write_schedule_csv(c.output_dir / fmt::format("schedule_{}.csv", opts.solver), schedule);
  const auto clamped = std::count_if(schedule.entries.begin(), schedule.entries.end(),
                                     [](const auto& e) { return e.clamped; });
  fmt::print(out, "solver={} waypoints={} clamped={}\n", opts.solver, schedule.entries.size(), clamped);
}

trajectory::TrajectoryReport evaluate_and_write(const RunConfig& c, const trajectory::PressureSchedule& schedule,
                                                std::span<const trajectory::Waypoint> waypoints, bool svg) {
  std::optional<datagen::NoiseModel> noise;
  if (c.trajectory.measurement_noise) noise = c.noise;
  const auto report = trajectory::evaluate(schedule, waypoints, c.geometry, noise,
                                           derive_seed(c.seed, kEvaluationNoiseStream),
                                           c.trajectory.reference_length_mm);
  const std::string stem = fmt::format("trajectory_{}", trajectory::to_string(schedule.solver));
  trajectory::write_report_csv(c.output_dir / (stem + ".csv"), report);
  write_json(c.output_dir / (stem + ".json"), trajectory::summary_to_json(report));
  if (svg) {
    csv::write_text(c.output_dir / (stem + "_top.svg"), trajectory::render_svg(report.rows, trajectory::SvgView::top));
    csv::write_text(c.output_dir / (stem + "_side.svg"),
                    trajectory::render_svg(report.rows, trajectory::SvgView::side));
  }
  return report;
}

void print_summary(std::ostream& out, const trajectory::TrajectoryReport& r) {
  const auto& s = r.summary;
  fmt::print(out, "solver={} mean_mm={:.6g} max_mm={:.6g} std_mm={:.6g} relative={:.4g}%\n",
             trajectory::to_string(r.solver), s.mean_mm, s.max_mm, s.stddev_mm, s.relative_percent);
}

struct EvaluateOptions {
  std::string solver = "analytical";
  std::string schedule;
  std::string waypoints;
  bool svg = false;
};

void cmd_evaluate(const RunConfig& c, const EvaluateOptions& opts, std::ostream& out) {
  ensure_dir(c.output_dir);
  trajectory::solver_from_string(opts.solver);
  const auto schedule = trajectory::read_schedule_csv(
      or_default(opts.schedule, c.output_dir / fmt::format("schedule_{}.csv", opts.solver)));
  const auto waypoints = trajectory::read_waypoints_csv(or_default(opts.waypoints, c.output_dir / "waypoints.csv"));
  print_summary(out, evaluate_and_write(c, schedule, waypoints, opts.svg));
}

struct ReportOptions {
  std::string model;
  bool svg = false;
};

// Plans and evaluates with both solvers and collects the error table. The
// network column needs a trained model.
void cmd_report(const RunConfig& c, const ReportOptions& opts, std::ostream& out) {
  ensure_dir(c.output_dir);
  const auto waypoints = configured_waypoints(c);
  std::string table = "solver,waypoints,mean_error_mm,max_error_mm,stddev_error_mm,relative_error_percent\n";
  json rows = json::array();
  for (const auto solver : {trajectory::Solver::analytical, trajectory::Solver::bpnet}) {
    const auto schedule = make_schedule(c, solver, waypoints, opts.model);
    trajectory::write_schedule_csv(c.output_dir / fmt::format("schedule_{}.csv", trajectory::to_string(solver)),
                                   schedule);
    const auto report = evaluate_and_write(c, schedule, waypoints, opts.svg);
    const auto& s = report.summary;
    table += fmt::format("{},{},{},{},{},{}\n", trajectory::to_string(solver), s.waypoints,
                         csv::format_double(s.mean_mm), csv::format_double(s.max_mm),
                         csv::format_double(s.stddev_mm), csv::format_double(s.relative_percent));
    rows.push_back(trajectory::summary_to_json(report));
    print_summary(out, report);
  }
  trajectory::write_waypoints_csv(c.output_dir / "waypoints.csv", waypoints);
  csv::write_text(c.output_dir / "error_table.csv", table);
  write_json(c.output_dir / "error_table.json", rows);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Inverse kinematics toolkit for a three-chamber soft actuator", "sba_ik"};
  app.require_subcommand(1, 1);

  CommonOptions common;
  CalibrateOptions calibrate_opts;
  TrainOptions train_opts;
  SweepOptions sweep_opts;
  PlanOptions plan_opts;
  EvaluateOptions evaluate_opts;
  ReportOptions report_opts;
  std::function<void(const RunConfig&)> action;

  auto* generate = app.add_subcommand("generate", "Simulate the pressure grid and write dataset.csv/.json");
  add_common(generate, common);
  generate->callback([&] { action = [&](const RunConfig& c) { cmd_generate(c, out); }; });

  auto* calibrate = app.add_subcommand("calibrate", "Fit the compliance parameter from elongation samples");
  add_common(calibrate, common);
  calibrate->add_option("--samples", calibrate_opts.samples, "CSV with P_kPa,length_mm (default: synthetic)")
      ->check(CLI::ExistingFile);
  calibrate->add_option("--noise-percent", calibrate_opts.noise_percent,
                        "Multiplicative elongation noise for synthetic samples")
      ->check(CLI::NonNegativeNumber);
  calibrate->callback([&] { action = [&](const RunConfig& c) { cmd_calibrate(c, calibrate_opts, out); }; });

  auto* train = app.add_subcommand("train", "Train the network and write model.json");
  add_common(train, common);
  train->add_option("--data", train_opts.data, "Dataset CSV (default: <out>/dataset.csv)");
  train->add_option("--model", train_opts.model, "Model output path (default: <out>/model.json)");
  train->callback([&] { action = [&](const RunConfig& c) { cmd_train(c, train_opts, out); }; });

  auto* sweep = app.add_subcommand("sweep", "Hidden-size sweep over candidate sizes and seeds");
  add_common(sweep, common);
  sweep->add_option("--data", sweep_opts.data, "Dataset CSV (default: <out>/dataset.csv)");
  sweep->add_option("--seeds", sweep_opts.seeds, "Seed list (default: network.sweep_seeds)")->delimiter(',');
  sweep->add_option("--threads", sweep_opts.threads, "Worker threads (0 = hardware concurrency)");
  sweep->callback([&] { action = [&](const RunConfig& c) { cmd_sweep(c, sweep_opts, out); }; });

  auto* plan = app.add_subcommand("plan", "Compute the pressure schedule for the figure-8 waypoints");
  add_common(plan, common);
  plan->add_option("--solver", plan_opts.solver, "Inverse model")
      ->check(CLI::IsMember({"analytical", "bpnet"}));
  plan->add_option("--model", plan_opts.model, "Trained model (default: <out>/model.json)");
  plan->callback([&] { action = [&](const RunConfig& c) { cmd_plan(c, plan_opts, out); }; });

  auto* evaluate = app.add_subcommand("evaluate", "Run a schedule through the forward model and report errors");
  add_common(evaluate, common);
  evaluate->add_option("--solver", evaluate_opts.solver, "Solver whose schedule to evaluate")
      ->check(CLI::IsMember({"analytical", "bpnet"}));
  evaluate->add_option("--schedule", evaluate_opts.schedule, "Schedule CSV (default: <out>/schedule_<solver>.csv)");
  evaluate->add_option("--waypoints", evaluate_opts.waypoints, "Waypoint CSV (default: <out>/waypoints.csv)");
  evaluate->add_flag("--svg", evaluate_opts.svg, "Also write top and side SVG plots");
  evaluate->callback([&] { action = [&](const RunConfig& c) { cmd_evaluate(c, evaluate_opts, out); }; });

  auto* report = app.add_subcommand("report", "Evaluate both solvers and write the error table");
  add_common(report, common);
  report->add_option("--model", report_opts.model, "Trained model (default: <out>/model.json)");
  report->add_flag("--svg", report_opts.svg, "Also write top and side SVG plots");
  report->callback([&] { action = [&](const RunConfig& c) { cmd_report(c, report_opts, out); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    action(resolve(common));
    return kExitOk;
  } catch (const Error& e) {
    fmt::print(err, "error: {}\n", e.what());
    return exit_code_for(e.code());
  } catch (const json::exception& e) {
    fmt::print(err, "error: Format: {}\n", e.what());
    return kExitValidation;
  } catch (const std::filesystem::filesystem_error& e) {
    fmt::print(err, "error: Io: {}\n", e.what());
    return kExitIo;
  }
}

}  // namespace sba::cli
