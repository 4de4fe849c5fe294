#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "whisker/error.hpp"
#include "whisker/report_writers.hpp"
#include "whisker/scenarios.hpp"
#include "whisker/sim_harness.hpp"

using namespace whisker;

namespace {

const CharacterizedModel& model() {
  static const CalibrationBundle b = run_calibration(WhiskerParams{}, CalibrationSettings{}, 1, true);
  return b.characterized;
}

TickRecord contact_tick(long i, const Vec2& tip, double z = -8760) {
  TickRecord t;
  t.tick = i;
  t.time = i / 30.0;
  t.collision = true;
  t.z = z;
  t.contact_kind = ContactKind::kTip;
  t.filtered_tip = tip;
  return t;
}

TrialRecord record_of(std::vector<TickRecord> ticks) {
  TrialRecord r;
  r.tick_rate = 30;
  r.ticks = std::move(ticks);
  return r;
}

const Contour& flat_wall() {
  static const Contour c(ContourSpec{OpenPolyline{{{-100, 0}, {100, 0}}, 5}, {}});
  return c;
}

}  // namespace

TEST(StepWorld, ZeroVelocityKeepsPose) {
  const ControlConfig cfg;
  const Pose2D p{4, 5, 0.3};
  const Pose2D q = step_world(p, {0.3, 0, 0}, 0.1, cfg);
  EXPECT_EQ(q.position, p.position);
  EXPECT_DOUBLE_EQ(q.heading, p.heading);
}

TEST(StepWorld, TangentialIntegration) {
  const ControlConfig cfg;
  const Pose2D q = step_world(Pose2D{}, {0, 0, 10}, 0.1, cfg);
  EXPECT_NEAR(q.position.x(), 0.0, 1e-12);
  EXPECT_NEAR(q.position.y(), 1.0, 1e-12);
}

TEST(StepWorld, SlewIsRateLimited) {
  ControlConfig cfg;
  cfg.max_turn_rate = 1.0;
  const Pose2D q = step_world(Pose2D{0, 0, 0.2}, {0.7, 0, 0}, 0.1, cfg);
  EXPECT_NEAR(q.heading, 0.3, 1e-12);
  const Pose2D r = step_world(Pose2D{0, 0, 0.2}, {0.15, 0, 0}, 0.1, cfg);
  EXPECT_NEAR(r.heading, 0.15, 1e-12);
}

TEST(ComputeMetrics, PointsOnContourGiveZeroError) {
  const Contour circle(ContourSpec{Circle{80}, {}});
  std::vector<TickRecord> ticks;
  for (int i = 0; i < 400; ++i) {
    const double a = 2 * kPi * i / 400;
    ticks.push_back(contact_tick(i, 80 * Vec2{std::cos(a), std::sin(a)}));
  }
  const Metrics m = compute_metrics(record_of(ticks), circle, -8760, -8300);
  EXPECT_TRUE(m.valid);
  EXPECT_NEAR(m.mean_abs_error, 0.0, 1e-12);
  EXPECT_NEAR(m.max_error, 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(m.coverage_fraction, 1.0);
  EXPECT_DOUBLE_EQ(m.deflection_deviation_pct, 0.0);
}

TEST(ComputeMetrics, SinglePointOneMillimetreOff) {
  const Metrics m = compute_metrics(record_of({contact_tick(0, {3, -1})}), flat_wall(), -8760, -8300);
  EXPECT_DOUBLE_EQ(m.mean_abs_error, 1.0);
  EXPECT_EQ(m.points, 1u);
}

TEST(ComputeMetrics, HandComputedAggregates) {
  std::vector<TickRecord> ticks{contact_tick(0, {0, -0.5}, -8700), contact_tick(1, {1, 1.0}, -8800),
                                contact_tick(2, {2, -2.5}, -8760), contact_tick(3, {3, 0.0}, -8780)};
  TickRecord gap;
  for (long i = 4; i < 7; ++i) {
    gap.tick = i;
    ticks.push_back(gap);
  }
  ticks.push_back(contact_tick(7, {4, 0.0}, -8760));
  ticks[1].contact_kind = ContactKind::kTangential;
  ticks[2].contact_kind = ContactKind::kTangential;
  ticks[7].contact_kind = ContactKind::kTangential;
  const Metrics m = compute_metrics(record_of(ticks), flat_wall(), -8760, -8300);
  // Errors 0.5, 1, 2.5, 0, 0.
  EXPECT_EQ(m.points, 5u);
  EXPECT_NEAR(m.mean_abs_error, 4.0 / 5, 1e-12);
  const double var = (0.09 + 0.04 + 2.89 + 0.64 + 0.64) / 4;
  EXPECT_NEAR(m.std_error, std::sqrt(var), 1e-12);
  EXPECT_DOUBLE_EQ(m.max_error, 2.5);
  const double mean_z = (-8700 - 8800 - 8760 - 8780 - 8760) / 5.0;
  EXPECT_NEAR(m.mean_deflection, mean_z, 1e-9);
  EXPECT_NEAR(m.deflection_deviation_pct, 100 * std::abs(mean_z + 8760) / 460, 1e-9);
  EXPECT_EQ(m.slip_count, 2);
  EXPECT_NEAR(m.max_detachment_s, 3 / 30.0, 1e-12);
}

TEST(ComputeMetrics, NoContactIsInvalid) {
  TickRecord t;
  const Metrics m = compute_metrics(record_of({t, t}), flat_wall(), -8760, -8300);
  EXPECT_FALSE(m.valid);
  EXPECT_TRUE(std::isnan(m.mean_abs_error));
  EXPECT_TRUE(std::isnan(m.coverage_fraction));
  EXPECT_THROW(compute_metrics(record_of({}), flat_wall(), -8760, -8300), Error);
}

TEST(Scenarios, PresetsAndUnknownName) {
  for (const auto& n : scenario_names()) {
    const ScenarioConfig s = preset_scenario(n);
    EXPECT_EQ(s.name, n);
    EXPECT_NO_THROW(s.validate());
    const Contour c(s.contour);
    // The sensor starts in free space.
    EXPECT_GT(c.signed_distance(s.start.position), 0.0) << n;
  }
  try {
    preset_scenario("teapot");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kConfig);
  }
}

TEST(FlatSweep, WallPlacementMatchesDistance) {
  SweepConfig cfg;
  cfg.whisker.noise_std = 0;
  for (double d : {10.0, 25.0, 40.0}) {
    const Contour wall(ContourSpec{sweep_wall(d, cfg), {}});
    const WhiskerState st = solve_contact(Pose2D{}, wall, cfg.whisker);
    ASSERT_EQ(st.contact_kind, ContactKind::kTip) << d;
    EXPECT_NEAR(st.contact_point_world->y(), d, 1e-3);
  }
}

TEST(FlatSweep, NoiselessReplication) {
  const auto trials = run_flat_sweep(SweepConfig{}, model(), 1, true);
  ASSERT_EQ(trials.size(), 9u);
  int sub_mm = 0;
  std::vector<double> means;
  for (const auto& t : trials) {
    EXPECT_FALSE(t.metrics.failed) << t.distance;
    EXPECT_LT(t.metrics.mean_abs_error, 2.0) << t.distance;
    sub_mm += t.metrics.mean_abs_error < 1.0;
    means.push_back(t.metrics.mean_abs_error);
  }
  EXPECT_GE(sub_mm, 4);
  std::vector<double> sorted = means;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_LE(means[7], sorted[2]) << "40 mm trial among the three lowest";
  EXPECT_TRUE(trials.back().slipped);
  EXPECT_FALSE(trials.front().slipped);
}

TEST(FlatSweep, Deterministic) {
  const auto a = run_flat_sweep(SweepConfig{}, model(), 3, false);
  const auto b = run_flat_sweep(SweepConfig{}, model(), 3, false);
  EXPECT_EQ(sweep_csv(a), sweep_csv(b));
}

TEST(Follow, CylinderNoiseless) {
  const FollowResult r = run_follow(preset_scenario("cylinder"), model(), 1, true);
  EXPECT_FALSE(r.metrics.failed) << r.metrics.failure;
  EXPECT_GE(r.metrics.coverage_fraction, 0.9);
  EXPECT_LT(r.metrics.mean_abs_error, 1.0);
  EXPECT_LT(r.metrics.deflection_deviation_pct, 5.0);
  EXPECT_TRUE(r.record.completed);
}

TEST(Follow, OctagonRecoversAndCovers) {
  const FollowResult r = run_follow(preset_scenario("octagon"), model(), 2, false);
  EXPECT_FALSE(r.metrics.failed);
  EXPECT_GE(r.metrics.coverage_fraction, 0.8);
}

TEST(Follow, WallWithoutLongDetachment) {
  const FollowResult r = run_follow(preset_scenario("wall"), model(), 1, false);
  EXPECT_FALSE(r.metrics.failed);
  EXPECT_TRUE(r.record.completed);
  EXPECT_LE(r.metrics.max_detachment_s, 2.0);
}

TEST(Follow, DeterministicUnderSeed) {
  const ScenarioConfig s = preset_scenario("rounded_rectangle");
  const FollowResult a = run_follow(s, model(), 7, false);
  const FollowResult b = run_follow(s, model(), 7, false);
  EXPECT_EQ(trial_csv(a.record), trial_csv(b.record));
  EXPECT_EQ(filter_trace_csv(a.record.filter_trace), filter_trace_csv(b.record.filter_trace));
}

TEST(Follow, ErrorInvariantUnderRigidMotion) {
  const ScenarioConfig s = preset_scenario("cylinder");
  ScenarioConfig moved = s;
  const Pose2D t{140, -60, 1.1};
  moved.contour.placement = compose(t, s.contour.placement);
  moved.start = compose(t, s.start);
  const Metrics a = run_follow(s, model(), 1, true).metrics;
  const Metrics b = run_follow(moved, model(), 1, true).metrics;
  EXPECT_NEAR(a.mean_abs_error, b.mean_abs_error, 1e-3);
  EXPECT_NEAR(a.coverage_fraction, b.coverage_fraction, 0.02);
}

TEST(Follow, UnresolvableStartIsRecordedNotThrown) {
  ScenarioConfig s = preset_scenario("cylinder");
  s.start = Pose2D{0, -40, kPi / 2};
  const FollowResult r = run_follow(s, model(), 1, true);
  EXPECT_TRUE(r.metrics.failed);
  EXPECT_NE(r.metrics.failure.find("unresolvable"), std::string::npos);
}
