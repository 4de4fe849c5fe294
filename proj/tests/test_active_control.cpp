#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "whisker/active_control.hpp"
#include "whisker/error.hpp"
#include "whisker/sim_harness.hpp"

using namespace whisker;

namespace {

const CharacterizedModel& model() {
  static const CalibrationBundle b = run_calibration(WhiskerParams{}, CalibrationSettings{}, 1, true);
  return b.characterized;
}

}  // namespace

TEST(DetectCollision, ThresholdBoundary) {
  const ControlConfig cfg;
  EXPECT_FALSE(detect_collision(-8300, -8300, cfg));
  EXPECT_TRUE(detect_collision(-8600, -8300, cfg));
  EXPECT_TRUE(detect_collision(-8000, -8300, cfg));
  EXPECT_FALSE(detect_collision(-8300 - 299.999, -8300, cfg));
}

TEST(DeflectionError, SignConvention) {
  const ControlConfig cfg;
  EXPECT_DOUBLE_EQ(deflection_error(-8760, -8300, cfg), 0.0);
  EXPECT_DOUBLE_EQ(deflection_error(-8300, -8300, cfg), 460.0);
  EXPECT_DOUBLE_EQ(deflection_error(-8860, -8300, cfg), -100.0);
}

TEST(KeyPointDeque, Gates) {
  const ControlConfig cfg;
  KeyPointDeque dq(cfg.keypoint_count);
  EXPECT_TRUE(dq.maybe_push({0, 0}, 0, cfg));
  // Stride not met.
  EXPECT_FALSE(dq.maybe_push({5, 0}, 5, cfg));
  // Spacing not met, regardless of how long ago the last push was.
  EXPECT_FALSE(dq.maybe_push({1.5, 0}, 1000, cfg));
  EXPECT_TRUE(dq.maybe_push({2.5, 0}, 1000, cfg));
  EXPECT_EQ(dq.size(), 2u);
  EXPECT_EQ(*dq.last_push_iter(), 1000);
}

TEST(KeyPointDeque, StationarySensorStoresOnePoint) {
  const ControlConfig cfg;
  KeyPointDeque dq(cfg.keypoint_count);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0, 0.1);
  for (long i = 0; i < 1000; ++i) dq.maybe_push(Vec2{40 + n(rng), 5 + n(rng)}, i, cfg);
  EXPECT_LE(dq.size(), 1u);
}

TEST(KeyPointDeque, EvictsOldestAndKeepsSpacing) {
  const ControlConfig cfg;
  KeyPointDeque dq(cfg.keypoint_count);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-3, 3);
  Vec2 p{0, 0};
  for (long i = 0; i < 2000; ++i) {
    p += Vec2{0.3 + 0.1 * u(rng), 0.1 * u(rng)};
    dq.maybe_push(p, i, cfg);
    const auto& pts = dq.points();
    for (std::size_t k = 1; k < pts.size(); ++k) EXPECT_GE((pts[k] - pts[k - 1]).norm(), cfg.keypoint_min_spacing);
    EXPECT_LE(dq.size(), 5u);
  }
  EXPECT_TRUE(dq.full());
  EXPECT_THROW(dq.maybe_push({NAN, 0}, 5000, cfg), Error);
}

TEST(FitSpline, NeedsFullDeque) {
  const ControlConfig cfg;
  KeyPointDeque dq(cfg.keypoint_count);
  dq.maybe_push({0, 0}, 0, cfg);
  try {
    fit_spline(dq, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kPrecondition);
  }
  for (int i = 1; i < 5; ++i) dq.maybe_push({3.0 * i, 0}, 10 * i, cfg);
  const SplinePredictor sp = fit_spline(dq, cfg);
  EXPECT_LT((sp.extrapolate_next() - Vec2{15, 0}).norm(), 1e-6);
}

TEST(TargetOrientation, Quadrants) {
  EXPECT_NEAR(*target_orientation({0, 0}, {1, 0}), 0.0, 1e-15);
  EXPECT_NEAR(*target_orientation({0, 0}, {0, 1}), kPi / 2, 1e-15);
  EXPECT_NEAR(*target_orientation({0, 0}, {-1, -1}), -3 * kPi / 4, 1e-15);
  EXPECT_FALSE(target_orientation({2, 2}, {2, 2}).has_value());
}

TEST(Pid, SteadyStateAndProportional) {
  ControlConfig cfg;
  PidController zero(cfg);
  EXPECT_EQ(zero.update(0.0, 0.1), 0.0);

  cfg.pid = {0.03, 0.0, 0.0};
  PidController p(cfg);
  EXPECT_DOUBLE_EQ(p.update(100.0, 0.1), 3.0);
  EXPECT_DOUBLE_EQ(p.update(-50.0, 0.1), -1.5);
}

TEST(Pid, IntegralGrowsLinearlyThenClamps) {
  ControlConfig cfg;
  cfg.pid = {0.0, 0.002, 0.0};
  PidController pid(cfg);
  const double e = 100, dt = 0.1;
  const double clamp = cfg.total_velocity / cfg.pid.ki;
  for (int n = 1; n <= 700; ++n) {
    const double expected = cfg.pid.ki * std::min(e * dt * n, clamp);
    EXPECT_NEAR(pid.update(e, dt), expected, 1e-9) << n;
  }
  EXPECT_NEAR(pid.integral(), clamp, 1e-9);
}

TEST(Pid, DerivativeTermAndBounds) {
  ControlConfig cfg;
  cfg.pid = {0.0, 0.0, 0.01};
  PidController d(cfg);
  EXPECT_EQ(d.update(10, 0.1), 0.0);
  EXPECT_NEAR(d.update(30, 0.1), 0.01 * 200, 1e-12);

  PidController pid(ControlConfig{});
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1e5, 1e5);
  for (int i = 0; i < 1000; ++i) EXPECT_LE(std::abs(pid.update(u(rng), 1.0 / 30)), 10.0);
  EXPECT_THROW(pid.update(1, 0), Error);
}

TEST(ConstrainTangential, PythagoreanSplit) {
  ControlConfig cfg;
  cfg.tangential_sign = 1;
  EXPECT_DOUBLE_EQ(constrain_tangential(0, cfg), 10);
  EXPECT_DOUBLE_EQ(constrain_tangential(10, cfg), 0);
  EXPECT_DOUBLE_EQ(constrain_tangential(6, cfg), 8);
  EXPECT_DOUBLE_EQ(constrain_tangential(-6, cfg), 8);
  cfg.tangential_sign = -1;
  EXPECT_DOUBLE_EQ(constrain_tangential(6, cfg), -8);
  try {
    constrain_tangential(10.5, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kPrecondition);
  }
}

TEST(MountFrames, WhiskerPoseRoundTrip) {
  const ControlConfig cfg;
  const Pose2D sensor{12, -7, 0.9};
  const Pose2D base = whisker_pose(sensor, cfg);
  EXPECT_NEAR(base.heading, 0.9 + cfg.contact_angle, 1e-12);
  // The undeflected tip sits at the sensor origin.
  EXPECT_LT((to_world(base, {cfg.tool_offset, 0}) - sensor.position).norm(), 1e-12);
  const Pose2D back = sensor_pose_for(base, cfg);
  EXPECT_LT((back.position - sensor.position).norm(), 1e-12);
  EXPECT_NEAR(back.heading, sensor.heading, 1e-12);
}

TEST(ControlConfig, ValidateRejectsBadValues) {
  auto bad = [](auto mutate) {
    ControlConfig c;
    mutate(c);
    EXPECT_THROW(c.validate(), Error);
  };
  bad([](ControlConfig& c) { c.total_velocity = 0; });
  bad([](ControlConfig& c) { c.keypoint_count = 3; });
  bad([](ControlConfig& c) { c.tangential_sign = 0; });
  bad([](ControlConfig& c) { c.filter_window = 1; });
  bad([](ControlConfig& c) { c.contact_angle = 2.0; });
  bad([](ControlConfig& c) { c.pid.kp = -1; });
  EXPECT_NO_THROW(ControlConfig{}.validate());
  EXPECT_DOUBLE_EQ(ControlConfig{}.resolved_integral_clamp(), 5000.0);
}

TEST(ControlStep, PreContactApproach) {
  ControlState st(ControlConfig{}, model());
  const Pose2D pose{3, 4, 0.7};
  const ControlStep s = control_step(-8310, pose, st, 1.0 / 30);
  EXPECT_FALSE(s.collision);
  EXPECT_DOUBLE_EQ(s.command.target_orientation, 0.7);
  EXPECT_DOUBLE_EQ(s.command.v_x, 10.0);
  EXPECT_DOUBLE_EQ(s.command.v_y, 0.0);
  EXPECT_FALSE(st.in_contact);
}

TEST(ControlStep, FilterWaitsForFullWindow) {
  const ControlConfig cfg;
  ControlState st(cfg, model());
  const Pose2D pose{0, 0, 0};
  for (int i = 0; i < cfg.filter_window; ++i) {
    const ControlStep s = control_step(-8760 + (i % 2 ? 3.0 : -3.0), pose, st, 1.0 / 30);
    EXPECT_TRUE(s.collision);
    EXPECT_EQ(s.filter_updated, i == cfg.filter_window - 1) << i;
    EXPECT_EQ(s.filter_row.has_value(), s.filter_updated);
    // Contact held: the command speed equals the total velocity.
    EXPECT_NEAR(std::hypot(s.command.v_x, s.command.v_y), cfg.total_velocity, 1e-9);
    ASSERT_TRUE(s.raw_tip_world.has_value());
  }
  EXPECT_TRUE(st.in_contact);
}

TEST(ControlStep, ContactLossTurnsTowardObject) {
  const ControlConfig cfg;
  ControlState st(cfg, model());
  const Pose2D pose{0, 0, 0.2};
  for (int i = 0; i < 5; ++i) control_step(-8760, pose, st, 1.0 / 30);
  ASSERT_FALSE(st.keypoints.empty());
  const ControlStep lost = control_step(-8300, pose, st, 1.0 / 30);
  EXPECT_TRUE(lost.contact_lost);
  EXPECT_FALSE(st.in_contact);
  EXPECT_EQ(st.contact_losses, 1);
  EXPECT_NEAR(lost.command.target_orientation, 0.2 - cfg.tangential_sign * cfg.reacquire_turn, 1e-12);
  EXPECT_DOUBLE_EQ(lost.command.v_x, cfg.total_velocity);
  EXPECT_FALSE(st.filter.initialized);
  EXPECT_EQ(st.window.size(), 0u);
  // Re-contact freezes the heading where the surface was found.
  const Pose2D turned{0, 0, 0.9};
  const ControlStep again = control_step(-8760, turned, st, 1.0 / 30);
  EXPECT_TRUE(st.in_contact);
  EXPECT_FALSE(st.reacquiring);
  EXPECT_NEAR(again.command.target_orientation, 0.9, 1e-12);
}
