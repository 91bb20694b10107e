#include "sba/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "sba/actuation.hpp"
#include "sba/error.hpp"
#include "sba/random.hpp"

namespace sba::trajectory {

const char* to_string(Solver solver) { return solver == Solver::bpnet ? "bpnet" : "analytical"; }

Solver solver_from_string(const std::string& name) {
  if (name == "analytical") return Solver::analytical;
  if (name == "bpnet") return Solver::bpnet;
  throw Error(ErrorCode::InvalidArgument, fmt::format("unknown solver '{}'", name));
}

std::vector<Waypoint> lemniscate_waypoints(double a, double b, double z_c, std::size_t count) {
  if (count < 2) throw Error(ErrorCode::InvalidArgument, "a trajectory needs at least 2 waypoints");
  std::vector<Waypoint> waypoints;
  waypoints.reserve(count);
  const double step = 2.0 * std::numbers::pi / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) {
    const double t = step * static_cast<double>(i);
    const double s = std::sin(t);
    waypoints.push_back({i, {a * s, b * s * std::cos(t), z_c}});
  }
  return waypoints;
}

PressureSchedule plan_analytical(std::span<const Waypoint> waypoints, const ActuatorGeometry& geo) {
  PressureSchedule schedule{Solver::analytical, {}};
  schedule.entries.reserve(waypoints.size());
  for (const auto& wp : waypoints) {
    try {
      schedule.entries.push_back({actuation::analytical_ik(wp.target, geo), false});
    } catch (const UnreachableError& e) {
      throw e.at_waypoint(wp.index);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NonPositiveZ) throw;
      throw UnreachableError(0, std::numeric_limits<double>::quiet_NaN(), wp.index);
    }
  }
  return schedule;
}

PressureSchedule plan_network(std::span<const Waypoint> waypoints, const bpnet::TrainedModel& model,
                              const ActuatorGeometry& geo) {
  PressureSchedule schedule{Solver::bpnet, {}};
  schedule.entries.reserve(waypoints.size());
  for (const auto& wp : waypoints) {
    ScheduleEntry entry{bpnet::predict_pressures(model, wp.target), false};
    for (double& p : entry.pressures.kpa) {
      const double clamped = std::clamp(p, 0.0, geo.p_max);
      if (clamped != p || !std::isfinite(p)) entry.clamped = true;
      p = std::isfinite(p) ? clamped : 0.0;
    }
    schedule.entries.push_back(entry);
  }
  return schedule;
}

TrackingSummary summarize(std::span<const TrackingRow> rows, double reference_length_mm) {
  TrackingSummary s;
  s.reference_length_mm = reference_length_mm;
  s.waypoints = rows.size();
  if (rows.empty()) return s;
  double sum = 0.0;
  for (const auto& r : rows) {
    sum += r.error_mm;
    s.max_mm = std::max(s.max_mm, r.error_mm);
  }
  const auto n = static_cast<double>(rows.size());
  s.mean_mm = sum / n;
  double sq = 0.0;
  for (const auto& r : rows) sq += (r.error_mm - s.mean_mm) * (r.error_mm - s.mean_mm);
  s.stddev_mm = std::sqrt(sq / n);
  s.relative_percent = s.mean_mm / reference_length_mm * 100.0;
  return s;
}

TrajectoryReport evaluate(const PressureSchedule& schedule, std::span<const Waypoint> waypoints,
                          const ActuatorGeometry& geo, const std::optional<datagen::NoiseModel>& noise,
                          std::uint64_t seed, std::optional<double> reference_length_mm) {
  if (schedule.entries.size() != waypoints.size()) {
    throw Error(ErrorCode::InvalidArgument,
                fmt::format("schedule has {} entries for {} waypoints", schedule.entries.size(),
                            waypoints.size()));
  }
  if (noise) noise->validate();

  TrajectoryReport report;
  report.solver = schedule.solver;
  report.rows.reserve(waypoints.size());
  for (std::size_t i = 0; i < waypoints.size(); ++i) {
    TipPosition achieved = actuation::forward_model(schedule.entries[i].pressures, geo);
    if (noise && noise->sigma > 0.0) {
      Rng rng(derive_seed(seed, i));
      double dx = 0.0, dy = 0.0, dz = 0.0;
      for (std::size_t r = 0; r < noise->replicates; ++r) {
        dx += rng.normal(0.0, noise->sigma);
        dy += rng.normal(0.0, noise->sigma);
        dz += rng.normal(0.0, noise->sigma);
      }
      const auto n = static_cast<double>(noise->replicates);
      achieved.x += dx / n;
      achieved.y += dy / n;
      achieved.z += dz / n;
    }
    const auto& target = waypoints[i].target;
    report.rows.push_back({waypoints[i].index, target, achieved, distance(target, achieved)});
  }
  report.summary = summarize(report.rows, reference_length_mm.value_or(geo.l0));
  return report;
}

nlohmann::json summary_to_json(const TrajectoryReport& report) {
  const auto& s = report.summary;
  return {
      {"solver", to_string(report.solver)},
      {"waypoints", s.waypoints},
      {"mean_error_mm", s.mean_mm},
      {"max_error_mm", s.max_mm},
      {"stddev_error_mm", s.stddev_mm},
      {"relative_error_percent", s.relative_percent},
      {"reference_length_mm", s.reference_length_mm},
  };
}

std::string render_svg(std::span<const TrackingRow> rows, SvgView view) {
  constexpr double kSize = 480.0;
  constexpr double kMargin = 40.0;
  auto horizontal = [](const TipPosition& p) { return p.x; };
  auto vertical = [view](const TipPosition& p) { return view == SvgView::top ? p.y : p.z; };

  double h_lo = 0.0, h_hi = 0.0, v_lo = 0.0, v_hi = 0.0;
  bool first = true;
  for (const auto& r : rows) {
    for (const auto* p : {&r.target, &r.achieved}) {
      const double h = horizontal(*p);
      const double v = vertical(*p);
      if (first) {
        h_lo = h_hi = h;
        v_lo = v_hi = v;
        first = false;
      }
      h_lo = std::min(h_lo, h);
      h_hi = std::max(h_hi, h);
      v_lo = std::min(v_lo, v);
      v_hi = std::max(v_hi, v);
    }
  }
  // one scale for both axes so the figure keeps its aspect ratio
  const double span = std::max({h_hi - h_lo, v_hi - v_lo, 1e-6});
  const double scale = (kSize - 2.0 * kMargin) / span;
  const double h_mid = 0.5 * (h_lo + h_hi);
  const double v_mid = 0.5 * (v_lo + v_hi);
  auto sx = [&](double h) { return kSize / 2.0 + (h - h_mid) * scale; };
  auto sy = [&](double v) { return kSize / 2.0 - (v - v_mid) * scale; };

  auto polyline = [&](auto pick, const char* colour, const char* dash) {
    std::string pts;
    for (const auto& r : rows) {
      const auto& p = pick(r);
      pts += fmt::format("{:.3f},{:.3f} ", sx(horizontal(p)), sy(vertical(p)));
    }
    if (!pts.empty()) pts.pop_back();
    return fmt::format(
        "  <polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"{}/>\n", pts,
        colour, dash);
  };

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{0}\" viewBox=\"0 0 {0} {0}\">\n",
      kSize);
  svg += fmt::format("  <rect width=\"{0}\" height=\"{0}\" fill=\"white\"/>\n", kSize);
  svg += fmt::format("  <text x=\"10\" y=\"20\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
                     view == SvgView::top ? "top view (x, y) mm" : "side view (x, z) mm");
  svg += polyline([](const TrackingRow& r) -> const TipPosition& { return r.target; }, "#1f77b4",
                  " stroke-dasharray=\"4 3\"");
  svg += polyline([](const TrackingRow& r) -> const TipPosition& { return r.achieved; }, "#d62728", "");
  for (const auto& r : rows) {
    svg += fmt::format("  <circle cx=\"{:.3f}\" cy=\"{:.3f}\" r=\"2\" fill=\"#1f77b4\"/>\n",
                       sx(horizontal(r.target)), sy(vertical(r.target)));
  }
  svg += "  <text x=\"10\" y=\"36\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#1f77b4\">target</text>\n";
  svg += "  <text x=\"60\" y=\"36\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#d62728\">achieved</text>\n";
  svg += "</svg>\n";
  return svg;
}

}  // namespace sba::trajectory
