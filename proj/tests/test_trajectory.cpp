#include <cmath>
#include <filesystem>
#include <numbers>

#include <gtest/gtest.h>

#include "sba/actuation.hpp"
#include "sba/error.hpp"
#include "sba/random.hpp"
#include "sba/trajectory.hpp"

using namespace sba;
using namespace sba::trajectory;
using std::numbers::pi;

namespace {

template <class Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::InvalidArgument;
}

std::vector<Waypoint> default_waypoints() { return lemniscate_waypoints(15.0, 15.0, 124.0, 41); }

}  // namespace

TEST(Lemniscate, Shape) {
  const auto wps = default_waypoints();
  ASSERT_EQ(wps.size(), 41u);
  EXPECT_NEAR(wps.front().target.x, wps.back().target.x, 1e-9);
  EXPECT_NEAR(wps.front().target.y, wps.back().target.y, 1e-9);
  EXPECT_NEAR(wps[10].target.x, 15.0, 1e-12);
  EXPECT_NEAR(wps[10].target.y, 0.0, 1e-12);
  for (std::size_t i = 0; i < wps.size(); ++i) {
    EXPECT_EQ(wps[i].index, i);
    EXPECT_EQ(wps[i].target.z, 124.0);
    const double t = 2.0 * pi * static_cast<double>(i) / 40.0;
    EXPECT_NEAR(wps[i].target.x, 15.0 * std::sin(t), 1e-12);
    EXPECT_NEAR(wps[i].target.y, 15.0 * std::sin(t) * std::cos(t), 1e-12);
  }
  for (const auto& wp : lemniscate_waypoints(0.0, 0.0, 120.0, 9)) {
    EXPECT_EQ(wp.target, (TipPosition{0.0, 0.0, 120.0}));
  }
  EXPECT_EQ(code_of([] { lemniscate_waypoints(1, 1, 120, 1); }), ErrorCode::InvalidArgument);
}

TEST(PlanAnalytical, Examples) {
  const ActuatorGeometry g;
  const std::vector<Waypoint> rest{{0, {0.0, 0.0, g.l0}}};
  const auto s = plan_analytical(rest, g);
  ASSERT_EQ(s.entries.size(), 1u);
  for (double p : s.entries[0].pressures.kpa) EXPECT_NEAR(p, 0.0, 1e-9);

  const auto full = plan_analytical(default_waypoints(), g);
  ASSERT_EQ(full.entries.size(), 41u);
  for (const auto& e : full.entries) {
    EXPECT_FALSE(e.clamped);
    for (double p : e.pressures.kpa) {
      EXPECT_GE(p, 0.0);
      EXPECT_LE(p, g.p_max);
    }
  }
}

TEST(PlanAnalytical, UnreachableNamesWaypoint) {
  const ActuatorGeometry g;
  auto wps = default_waypoints();
  wps[7].target = {80.0, 0.0, 60.0};
  try {
    plan_analytical(wps, g);
    FAIL() << "expected Unreachable";
  } catch (const UnreachableError& e) {
    ASSERT_TRUE(e.waypoint().has_value());
    EXPECT_EQ(*e.waypoint(), 7u);
    EXPECT_NE(std::string(e.what()).find("7"), std::string::npos);
  }
  wps[7].target = {0.0, 0.0, -5.0};
  EXPECT_EQ(code_of([&] { plan_analytical(wps, g); }), ErrorCode::Unreachable);
}

TEST(PlanNetwork, ClampsAndFlags) {
  const ActuatorGeometry g;
  bpnet::TrainedModel m;
  m.weights = bpnet::NetworkWeights::zeros(3, 13, 3);
  m.output_scaler.mean = {-5.0, 120.0, 260.0};
  const auto s = plan_network(default_waypoints(), m, g);
  ASSERT_EQ(s.entries.size(), 41u);
  for (const auto& e : s.entries) {
    EXPECT_TRUE(e.clamped);
    EXPECT_EQ(e.pressures, (ChamberPressures{{0.0, 120.0, 200.0}}));
  }
  m.output_scaler.mean = {5.0, 120.0, 160.0};
  for (const auto& e : plan_network(default_waypoints(), m, g).entries) EXPECT_FALSE(e.clamped);
}

TEST(Evaluate, AnalyticalClosedLoop) {
  const ActuatorGeometry g;
  const auto wps = default_waypoints();
  const auto report = evaluate(plan_analytical(wps, g), wps, g);
  EXPECT_EQ(report.summary.waypoints, 41u);
  EXPECT_LE(report.summary.mean_mm, 1e-6);
  EXPECT_LE(report.summary.max_mm, 1e-6);
  EXPECT_EQ(report.summary.reference_length_mm, g.l0);
}

TEST(Evaluate, ZeroScheduleMeasuresDistanceFromRest) {
  const ActuatorGeometry g;
  const auto wps = default_waypoints();
  PressureSchedule zero{Solver::bpnet, std::vector<ScheduleEntry>(wps.size())};
  const auto report = evaluate(zero, wps, g);
  for (std::size_t i = 0; i < wps.size(); ++i) {
    const auto& t = wps[i].target;
    EXPECT_NEAR(report.rows[i].error_mm, std::sqrt(t.x * t.x + t.y * t.y + (t.z - g.l0) * (t.z - g.l0)), 1e-12);
  }
}

TEST(Evaluate, SummaryRecomputesFromRows) {
  const ActuatorGeometry g;
  const auto wps = default_waypoints();
  PressureSchedule schedule{Solver::bpnet, {}};
  Rng rng(3);
  for (std::size_t i = 0; i < wps.size(); ++i) {
    schedule.entries.push_back({{{rng.uniform(0, 200), rng.uniform(0, 200), rng.uniform(0, 200)}}, false});
  }
  const auto report = evaluate(schedule, wps, g, std::nullopt, 0, 150.0);
  double sum = 0.0, mx = 0.0;
  for (const auto& r : report.rows) {
    EXPECT_NEAR(r.error_mm, distance(r.target, r.achieved), 0.0);
    sum += r.error_mm;
    mx = std::max(mx, r.error_mm);
  }
  const double mean = sum / 41.0;
  double sq = 0.0;
  for (const auto& r : report.rows) sq += (r.error_mm - mean) * (r.error_mm - mean);
  EXPECT_NEAR(report.summary.mean_mm, mean, 1e-12);
  EXPECT_NEAR(report.summary.max_mm, mx, 1e-12);
  EXPECT_NEAR(report.summary.stddev_mm, std::sqrt(sq / 41.0), 1e-12);
  EXPECT_NEAR(report.summary.relative_percent, mean / 150.0 * 100.0, 1e-12);
}

TEST(Evaluate, RotationInvariance) {
  // Rotating the waypoints by 2 pi / 3 about z and handing each chamber its
  // predecessor's pressure is the same experiment seen from a turned frame.
  const ActuatorGeometry g;
  const auto wps = default_waypoints();
  const double c = std::cos(2.0 * pi / 3.0), s = std::sin(2.0 * pi / 3.0);
  PressureSchedule a{Solver::bpnet, {}}, b{Solver::bpnet, {}};
  std::vector<Waypoint> turned;
  Rng rng(12);
  for (const auto& wp : wps) {
    const ChamberPressures p{{rng.uniform(0, 200), rng.uniform(0, 200), rng.uniform(0, 200)}};
    a.entries.push_back({p, false});
    b.entries.push_back({{{p[2], p[0], p[1]}}, false});
    turned.push_back({wp.index, {c * wp.target.x - s * wp.target.y, s * wp.target.x + c * wp.target.y, wp.target.z}});
  }
  const auto ra = evaluate(a, wps, g);
  const auto rb = evaluate(b, turned, g);
  for (std::size_t i = 0; i < wps.size(); ++i) EXPECT_NEAR(ra.rows[i].error_mm, rb.rows[i].error_mm, 1e-9);
  EXPECT_NEAR(ra.summary.mean_mm, rb.summary.mean_mm, 1e-9);
}

TEST(Evaluate, NoiseIsSeeded) {
  const ActuatorGeometry g;
  const auto wps = default_waypoints();
  const auto schedule = plan_analytical(wps, g);
  const datagen::NoiseModel noise{0.5, 5};
  const auto a = evaluate(schedule, wps, g, noise, 4);
  const auto b = evaluate(schedule, wps, g, noise, 4);
  EXPECT_EQ(a.summary.mean_mm, b.summary.mean_mm);
  EXPECT_GT(a.summary.mean_mm, 0.0);
  EXPECT_NE(evaluate(schedule, wps, g, noise, 5).summary.mean_mm, a.summary.mean_mm);
}

TEST(Evaluate, RejectsLengthMismatch) {
  const ActuatorGeometry g;
  const auto wps = default_waypoints();
  PressureSchedule short_schedule{Solver::analytical, std::vector<ScheduleEntry>(3)};
  EXPECT_EQ(code_of([&] { evaluate(short_schedule, wps, g); }), ErrorCode::InvalidArgument);
}

TEST(Files, RoundTrips) {
  const ActuatorGeometry g;
  const auto dir = std::filesystem::temp_directory_path();
  const auto wps = default_waypoints();
  auto schedule = plan_analytical(wps, g);
  schedule.entries[3].clamped = true;
  write_schedule_csv(dir / "sba_sched.csv", schedule);
  write_waypoints_csv(dir / "sba_wps.csv", wps);
  const auto s2 = read_schedule_csv(dir / "sba_sched.csv");
  ASSERT_EQ(s2.entries.size(), schedule.entries.size());
  EXPECT_EQ(s2.solver, Solver::analytical);
  for (std::size_t i = 0; i < s2.entries.size(); ++i) {
    EXPECT_EQ(s2.entries[i].pressures, schedule.entries[i].pressures);
    EXPECT_EQ(s2.entries[i].clamped, schedule.entries[i].clamped);
  }
  const auto w2 = read_waypoints_csv(dir / "sba_wps.csv");
  ASSERT_EQ(w2.size(), wps.size());
  for (std::size_t i = 0; i < wps.size(); ++i) EXPECT_EQ(w2[i].target, wps[i].target);

  const auto report = evaluate(schedule, wps, g);
  write_report_csv(dir / "sba_report.csv", report);
  const auto rows = read_report_csv(dir / "sba_report.csv");
  ASSERT_EQ(rows.size(), 41u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].achieved, report.rows[i].achieved);
    EXPECT_EQ(rows[i].error_mm, report.rows[i].error_mm);
  }
  const auto j = summary_to_json(report);
  EXPECT_EQ(j.at("solver"), "analytical");
  EXPECT_EQ(j.at("waypoints"), 41);
  for (const char* f : {"sba_sched.csv", "sba_wps.csv", "sba_report.csv"}) std::filesystem::remove(dir / f);
}

TEST(Svg, ContainsBothPolylines) {
  const ActuatorGeometry g;
  const auto wps = default_waypoints();
  const auto report = evaluate(plan_analytical(wps, g), wps, g);
  for (auto view : {SvgView::top, SvgView::side}) {
    const auto svg = render_svg(report.rows, view);
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    std::size_t count = 0;
    for (auto pos = svg.find("<polyline"); pos != std::string::npos; pos = svg.find("<polyline", pos + 1)) ++count;
    EXPECT_EQ(count, 2u);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
  }
}

TEST(Solver, Names) {
  EXPECT_EQ(solver_from_string("bpnet"), Solver::bpnet);
  EXPECT_STREQ(to_string(Solver::analytical), "analytical");
  EXPECT_EQ(code_of([] { solver_from_string("magic"); }), ErrorCode::InvalidArgument);
}
