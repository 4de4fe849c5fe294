#pragma once

#include <deque>
#include <optional>

#include "whisker/bayes_filter.hpp"
#include "whisker/geometry.hpp"
#include "whisker/spline.hpp"
#include "whisker/tip_localization.hpp"

namespace whisker {

struct PidGains {
  double kp = 0.02;
  double ki = 0.002;
  double kd = 0.001;
};

struct ControlConfig {
  /// uT above the static reading.
  double collision_threshold = 300.0;
  double target_deflection = -8760.0;
  /// mm/s.
  double total_velocity = 10.0;
  int keypoint_count = 5;
  int keypoint_stride = 10;
  double keypoint_min_spacing = 2.0;
  int spline_degree = 3;
  PidGains pid;
  /// Bound on the integral of the error; total_velocity / ki when unset.
  std::optional<double> integral_clamp;
  /// rad/s, applied by the harness when slewing the heading.
  double max_turn_rate = 0.3;
  /// -1: tangential motion along sensor -Y (object on the left of travel).
  int tangential_sign = -1;
  /// Mounting angle of the whisker axis relative to the sensor +X axis, rad.
  /// Positive values lean the shaft toward its bending side, which is what
  /// lets bending relieve the contact.
  double contact_angle = 0.3;
  /// Distance from the whisker base to the sensor frame origin along the
  /// undeflected shaft, mm. Heading changes pivot about that point, so with
  /// the default (the shaft length) turning does not sweep the tip along the
  /// surface.
  double tool_offset = 75.0;
  /// Heading offset toward the object side commanded while detached after
  /// following has started, rad. The sensor turns about the tool point while
  /// it re-approaches, which carries the whisker around convex corners.
  double reacquire_turn = kPi / 2;
  int filter_window = 10;
  /// Filter process variance in the loop, mm^2. Larger than the filter's own
  /// default: the base-frame tip drifts whenever the deflection moves, and
  /// with 1e-5 the estimate trails it by millimetres.
  double process_noise = 1e-2;

  /// Throws Error(kInvalidArgument).
  void validate() const;
  double resolved_integral_clamp() const;
};

/// Frame of the whisker base for a sensor pose: rotated by the mounting angle
/// and set back by tool_offset along the shaft.
Pose2D whisker_pose(const Pose2D& sensor, const ControlConfig& cfg);
/// Inverse of whisker_pose.
Pose2D sensor_pose_for(const Pose2D& base, const ControlConfig& cfg);

/// |z - static_z| >= threshold.
bool detect_collision(double z, double static_z, const ControlConfig& cfg);

/// Error on |deflection| so the loop does not care about the sign of the
/// readings: positive when under-deflected (approach), negative when over.
double deflection_error(double z, double static_z, const ControlConfig& cfg);

class KeyPointDeque {
 public:
  explicit KeyPointDeque(int capacity = 5) : capacity_(capacity) {}

  /// Pushed iff the stride since the last push is met and `p` is at least
  /// min_spacing from the newest point. Evicts the oldest at capacity.
  bool maybe_push(const Vec2& p, long iter, const ControlConfig& cfg);

  bool full() const { return static_cast<int>(points_.size()) == capacity_; }
  bool empty() const { return points_.empty(); }
  std::size_t size() const { return points_.size(); }
  const std::deque<Vec2>& points() const { return points_; }
  std::vector<Vec2> to_vector() const { return {points_.begin(), points_.end()}; }
  std::optional<long> last_push_iter() const { return last_push_; }
  void clear();

 private:
  int capacity_;
  std::deque<Vec2> points_;
  std::optional<long> last_push_;
};

/// Spline through the full deque with the configured degree.
SplinePredictor fit_spline(const KeyPointDeque& dq, const ControlConfig& cfg);

/// Full-quadrant direction from p_cur to p_next; nullopt when they coincide.
std::optional<double> target_orientation(const Vec2& p_cur, const Vec2& p_next);

class PidController {
 public:
  explicit PidController(const ControlConfig& cfg);

  /// v_x for the current error; dt in seconds. Output bounded by
  /// +-total_velocity, integral by the configured clamp.
  double update(double error, double dt);
  void reset();

  double integral() const { return integral_; }

 private:
  PidGains gains_;
  double integral_clamp_;
  double limit_;
  double integral_ = 0.0;
  std::optional<double> previous_error_;
};

/// sign * sqrt(V^2 - v_x^2). Throws Error(kPrecondition) when |v_x| > V.
double constrain_tangential(double v_x, const ControlConfig& cfg);

struct ControlCommand {
  double target_orientation = 0.0;
  double v_x = 0.0;
  double v_y = 0.0;
};

/// Everything control_step carries between iterations.
struct ControlState {
  ControlState(const ControlConfig& cfg, const CharacterizedModel& model);

  ControlConfig cfg;
  const CharacterizedModel* model;
  bool in_contact = false;
  long iteration = 0;
  long contact_iteration = 0;
  FilterState filter;
  NoiseWindow window;
  KeyPointDeque keypoints;
  PidController pid;
  std::optional<double> held_heading;
  /// Set while the heading is turned toward the object after a detachment.
  bool reacquiring = false;
  long contact_losses = 0;
};

/// Diagnostics of one iteration, for logs and scoring.
struct ControlStep {
  ControlCommand command;
  bool collision = false;
  /// Localization failed or the deflection fell below the threshold after
  /// contact had been made.
  bool contact_lost = false;
  std::optional<Vec2> raw_tip_world;
  std::optional<Vec2> filtered_tip_world;
  bool filter_updated = false;
  bool keypoint_pushed = false;
  std::optional<Vec2> predicted_keypoint;
  /// atan2 of the spline prediction, before the heading offset.
  std::optional<double> surface_direction;
  std::optional<FilterTraceRow> filter_row;
};

/// One pass of the perception/control loop for reading z at `pose`:
/// collision gate, tip lookup, noise window and Kalman update, key-point gate,
/// spline prediction and heading, PID radial speed, tangential constraint.
ControlStep control_step(double z, const Pose2D& pose, ControlState& state, double dt);

}  // namespace whisker
