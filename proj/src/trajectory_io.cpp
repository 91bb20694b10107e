#include <fmt/format.h>

#include "sba/csv.hpp"
#include "sba/error.hpp"
#include "sba/trajectory.hpp"

namespace sba::trajectory {

using csv::format_double;

void write_schedule_csv(const std::filesystem::path& path, const PressureSchedule& schedule) {
  std::string out = "index,p1_kPa,p2_kPa,p3_kPa,clamped,solver\n";
  for (std::size_t i = 0; i < schedule.entries.size(); ++i) {
    const auto& e = schedule.entries[i];
    out += fmt::format("{},{},{},{},{},{}\n", i, format_double(e.pressures[0]),
                       format_double(e.pressures[1]), format_double(e.pressures[2]),
                       e.clamped ? 1 : 0, to_string(schedule.solver));
  }
  csv::write_text(path, out);
}

PressureSchedule read_schedule_csv(const std::filesystem::path& path) {
  const auto table = csv::read(path, {"index", "p1_kPa", "p2_kPa", "p3_kPa", "clamped", "solver"});
  PressureSchedule schedule;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const auto context = fmt::format("{} row {}", path.string(), i + 1);
    if (csv::parse_unsigned(row[0], context) != i) {
      throw Error(ErrorCode::Format, fmt::format("{}: indices must be consecutive from 0", context));
    }
    ScheduleEntry entry;
    for (std::size_t c = 0; c < 3; ++c) entry.pressures[c] = csv::parse_double(row[c + 1], context);
    entry.clamped = csv::parse_unsigned(row[4], context) != 0;
    const Solver solver = solver_from_string(row[5]);
    if (i == 0) {
      schedule.solver = solver;
    } else if (solver != schedule.solver) {
      throw Error(ErrorCode::Format, fmt::format("{}: mixed solver tags", context));
    }
    schedule.entries.push_back(entry);
  }
  return schedule;
}

void write_waypoints_csv(const std::filesystem::path& path, std::span<const Waypoint> waypoints) {
  std::string out = "index,x_mm,y_mm,z_mm\n";
  for (const auto& wp : waypoints) {
    out += fmt::format("{},{},{},{}\n", wp.index, format_double(wp.target.x),
                       format_double(wp.target.y), format_double(wp.target.z));
  }
  csv::write_text(path, out);
}

std::vector<Waypoint> read_waypoints_csv(const std::filesystem::path& path) {
  const auto table = csv::read(path, {"index", "x_mm", "y_mm", "z_mm"});
  std::vector<Waypoint> waypoints;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const auto context = fmt::format("{} row {}", path.string(), i + 1);
    Waypoint wp;
    wp.index = csv::parse_unsigned(row[0], context);
    if (wp.index != i) {
      throw Error(ErrorCode::Format, fmt::format("{}: indices must be consecutive from 0", context));
    }
    wp.target = {csv::parse_double(row[1], context), csv::parse_double(row[2], context),
                 csv::parse_double(row[3], context)};
    waypoints.push_back(wp);
  }
  return waypoints;
}

void write_report_csv(const std::filesystem::path& path, const TrajectoryReport& report) {
  std::string out = "index,tx,ty,tz,ax,ay,az,err_mm\n";
  for (const auto& r : report.rows) {
    out += fmt::format("{},{},{},{},{},{},{},{}\n", r.index, format_double(r.target.x),
                       format_double(r.target.y), format_double(r.target.z),
                       format_double(r.achieved.x), format_double(r.achieved.y),
                       format_double(r.achieved.z), format_double(r.error_mm));
  }
  csv::write_text(path, out);
}

std::vector<TrackingRow> read_report_csv(const std::filesystem::path& path) {
  const auto table = csv::read(path, {"index", "tx", "ty", "tz", "ax", "ay", "az", "err_mm"});
  std::vector<TrackingRow> rows;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const auto context = fmt::format("{} row {}", path.string(), i + 1);
    TrackingRow r;
    r.index = csv::parse_unsigned(row[0], context);
    r.target = {csv::parse_double(row[1], context), csv::parse_double(row[2], context),
                csv::parse_double(row[3], context)};
    r.achieved = {csv::parse_double(row[4], context), csv::parse_double(row[5], context),
                  csv::parse_double(row[6], context)};
    r.error_mm = csv::parse_double(row[7], context);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace sba::trajectory
