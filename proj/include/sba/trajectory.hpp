#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sba/bpnet/training.hpp"
#include "sba/datagen.hpp"
#include "sba/types.hpp"

namespace sba::trajectory {

struct Waypoint {
  std::size_t index = 0;
  TipPosition target;
};

// Figure-8 (lemniscate of Gerono) at constant height:
// x = a sin t, y = b sin t cos t, z = z_c with t uniform on [0, 2 pi].
std::vector<Waypoint> lemniscate_waypoints(double a, double b, double z_c, std::size_t count = 41);

enum class Solver { analytical, bpnet };

const char* to_string(Solver solver);
// Throws Error(InvalidArgument) for anything but "analytical" / "bpnet".
Solver solver_from_string(const std::string& name);

struct ScheduleEntry {
  ChamberPressures pressures;
  bool clamped = false;  // a network prediction was pulled into [0, p_max]
};

struct PressureSchedule {
  Solver solver = Solver::analytical;
  std::vector<ScheduleEntry> entries;
};

// Throws UnreachableError carrying the waypoint index.
PressureSchedule plan_analytical(std::span<const Waypoint> waypoints, const ActuatorGeometry& geo);

// Never fails on range: out-of-range predictions are clamped and flagged.
PressureSchedule plan_network(std::span<const Waypoint> waypoints, const bpnet::TrainedModel& model,
                              const ActuatorGeometry& geo);

struct TrackingRow {
  std::size_t index = 0;
  TipPosition target;
  TipPosition achieved;
  double error_mm = 0.0;
};

struct TrackingSummary {
  double mean_mm = 0.0;
  double max_mm = 0.0;
  double stddev_mm = 0.0;  // population standard deviation over waypoints
  double relative_percent = 0.0;
  double reference_length_mm = 0.0;
  std::size_t waypoints = 0;
};

struct TrajectoryReport {
  Solver solver = Solver::analytical;
  std::vector<TrackingRow> rows;
  TrackingSummary summary;
};

TrackingSummary summarize(std::span<const TrackingRow> rows, double reference_length_mm);

// Runs each scheduled pressure through the forward model (optionally with
// measurement noise) and compares the result to the waypoint. The relative
// error uses reference_length_mm, or l0 when not given.
TrajectoryReport evaluate(const PressureSchedule& schedule, std::span<const Waypoint> waypoints,
                          const ActuatorGeometry& geo,
                          const std::optional<datagen::NoiseModel>& noise = std::nullopt,
                          std::uint64_t seed = 0,
                          std::optional<double> reference_length_mm = std::nullopt);

// Files. Schedule: `index,p1_kPa,p2_kPa,p3_kPa,clamped,solver`. Report rows:
// `index,tx,ty,tz,ax,ay,az,err_mm`; summary as JSON.
void write_schedule_csv(const std::filesystem::path& path, const PressureSchedule& schedule);
PressureSchedule read_schedule_csv(const std::filesystem::path& path);

void write_waypoints_csv(const std::filesystem::path& path, std::span<const Waypoint> waypoints);
std::vector<Waypoint> read_waypoints_csv(const std::filesystem::path& path);

void write_report_csv(const std::filesystem::path& path, const TrajectoryReport& report);
std::vector<TrackingRow> read_report_csv(const std::filesystem::path& path);

nlohmann::json summary_to_json(const TrajectoryReport& report);

enum class SvgView { top, side };

// Target vs achieved polylines; top = XOY plane, side = XOZ plane.
std::string render_svg(std::span<const TrackingRow> rows, SvgView view);

}  // namespace sba::trajectory
