#include "whisker/active_control.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "whisker/error.hpp"

namespace whisker {

void ControlConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(Errc::kInvalidArgument, "control: " + msg); };
  if (!(collision_threshold > 0.0)) fail("collision_threshold must be > 0");
  if (!(total_velocity > 0.0)) fail("total_velocity must be > 0");
  if (spline_degree < 1) fail("spline_degree must be >= 1");
  if (keypoint_count < spline_degree + 1) fail("keypoint_count must be >= spline_degree + 1");
  if (keypoint_stride < 1) fail("keypoint_stride must be >= 1");
  if (!(keypoint_min_spacing > 0.0)) fail("keypoint_min_spacing must be > 0");
  if (pid.kp < 0.0 || pid.ki < 0.0 || pid.kd < 0.0) fail("pid gains must be >= 0");
  if (integral_clamp && !(*integral_clamp >= 0.0)) fail("integral_clamp must be >= 0");
  if (!(max_turn_rate > 0.0)) fail("max_turn_rate must be > 0");
  if (tangential_sign != 1 && tangential_sign != -1) fail("tangential_sign must be +1 or -1");
  if (!std::isfinite(contact_angle) || std::abs(contact_angle) >= kPi / 2) fail("contact_angle must be in (-pi/2, pi/2)");
  if (!(reacquire_turn >= 0.0 && reacquire_turn <= kPi)) fail("reacquire_turn must be in [0, pi]");
  if (!std::isfinite(tool_offset) || tool_offset < 0.0) fail("tool_offset must be >= 0");
  if (filter_window < 2) fail("filter_window must be >= 2");
  if (!(process_noise > 0.0)) fail("process_noise must be > 0");
  if (!std::isfinite(target_deflection)) fail("target_deflection must be finite");
}

double ControlConfig::resolved_integral_clamp() const {
  if (integral_clamp) return *integral_clamp;
  return pid.ki > 0.0 ? total_velocity / pid.ki : 0.0;
}

Pose2D whisker_pose(const Pose2D& sensor, const ControlConfig& cfg) {
  const double heading = sensor.heading + cfg.contact_angle;
  return Pose2D{sensor.position - rotate(Vec2{cfg.tool_offset, 0.0}, heading), heading};
}

Pose2D sensor_pose_for(const Pose2D& base, const ControlConfig& cfg) {
  return Pose2D{base.position + rotate(Vec2{cfg.tool_offset, 0.0}, base.heading), base.heading - cfg.contact_angle};
}

bool detect_collision(double z, double static_z, const ControlConfig& cfg) {
  return std::abs(z - static_z) >= cfg.collision_threshold;
}

double deflection_error(double z, double static_z, const ControlConfig& cfg) {
  return std::abs(cfg.target_deflection - static_z) - std::abs(z - static_z);
}

bool KeyPointDeque::maybe_push(const Vec2& p, long iter, const ControlConfig& cfg) {
  if (!std::isfinite(p.x()) || !std::isfinite(p.y())) {
    throw Error(Errc::kInvalidArgument, "maybe_push: non-finite key point");
  }
  if (last_push_ && iter - *last_push_ < cfg.keypoint_stride) return false;
  if (!points_.empty() && (p - points_.back()).norm() < cfg.keypoint_min_spacing) return false;
  if (static_cast<int>(points_.size()) == capacity_) points_.pop_front();
  points_.push_back(p);
  last_push_ = iter;
  return true;
}

void KeyPointDeque::clear() {
  points_.clear();
  last_push_.reset();
}

SplinePredictor fit_spline(const KeyPointDeque& dq, const ControlConfig& cfg) {
  if (!dq.full()) throw Error(Errc::kPrecondition, "fit_spline: key-point deque not full");
  return SplinePredictor::fit(dq.to_vector(), cfg.spline_degree);
}

std::optional<double> target_orientation(const Vec2& p_cur, const Vec2& p_next) {
  const Vec2 d = p_next - p_cur;
  if (!(d.norm() > 1e-12)) return std::nullopt;
  return std::atan2(d.y(), d.x());
}

PidController::PidController(const ControlConfig& cfg)
    : gains_(cfg.pid), integral_clamp_(cfg.resolved_integral_clamp()), limit_(cfg.total_velocity) {}

double PidController::update(double error, double dt) {
  if (!(dt > 0.0)) throw Error(Errc::kInvalidArgument, "pid: dt must be > 0");
  integral_ = std::clamp(integral_ + error * dt, -integral_clamp_, integral_clamp_);
  const double derivative = previous_error_ ? (error - *previous_error_) / dt : 0.0;
  previous_error_ = error;
  const double out = gains_.kp * error + gains_.ki * integral_ + gains_.kd * derivative;
  return std::clamp(out, -limit_, limit_);
}

void PidController::reset() {
  integral_ = 0.0;
  previous_error_.reset();
}

double constrain_tangential(double v_x, const ControlConfig& cfg) {
  const double v = cfg.total_velocity;
  if (std::abs(v_x) > v + 1e-12) {
    throw Error(Errc::kPrecondition, fmt::format("constrain_tangential: |v_x| = {} exceeds {}", std::abs(v_x), v));
  }
  return cfg.tangential_sign * std::sqrt(std::max(0.0, v * v - v_x * v_x));
}

ControlState::ControlState(const ControlConfig& config, const CharacterizedModel& characterized)
    : cfg(config),
      model(&characterized),
      window(static_cast<std::size_t>(config.filter_window)),
      keypoints(config.keypoint_count),
      pid(config) {
  cfg.validate();
}

namespace {

void drop_contact(ControlState& state, const Pose2D& pose) {
  state.in_contact = false;
  if (!state.keypoints.empty()) {
    state.held_heading = normalize_angle(pose.heading - state.cfg.tangential_sign * state.cfg.reacquire_turn);
    state.reacquiring = true;
  }
  state.filter = FilterState{};
  state.window.clear();
  state.pid.reset();
  ++state.contact_losses;
}

}  // namespace

ControlStep control_step(double z, const Pose2D& pose, ControlState& state, double dt) {
  const ControlConfig& cfg = state.cfg;
  const long iter = state.iteration++;
  ControlStep out;
  auto approach = [&] { return ControlCommand{state.held_heading.value_or(pose.heading), cfg.total_velocity, 0.0}; };

  out.collision = detect_collision(z, state.model->rest_measurement, cfg);
  if (!out.collision) {
    if (state.in_contact) {
      drop_contact(state, pose);
      out.contact_lost = true;
    }
    out.command = approach();
    return out;
  }

  TipEstimate tip;
  try {
    tip = tip_from_measurement(*state.model, z);
  } catch (const Error& e) {
    if (e.code() != Errc::kOutOfRange) throw;
    if (state.in_contact) drop_contact(state, pose);
    out.contact_lost = true;
    out.command = approach();
    return out;
  }

  if (!state.in_contact) {
    state.in_contact = true;
    state.contact_iteration = iter;
    // Stop the reacquisition turn where the surface was found.
    if (state.reacquiring) state.held_heading = pose.heading;
    state.reacquiring = false;
    state.filter = init_filter(tip.position, Vec2::Constant(cfg.process_noise));
  }
  const Pose2D base = whisker_pose(pose, cfg);
  out.raw_tip_world = to_world(base, tip.position);

  state.window.push(tip.position);
  Vec2 filtered = tip.position;
  if (state.window.full()) {
    const Vec2 noise = estimate_R(state.window);
    const FilterState prior = predict(state.filter);
    Vec2 gain;
    state.filter = update(prior, tip.position, noise, &gain);
    filtered = state.filter.mean;
    out.filter_updated = true;
    FilterTraceRow row;
    row.step = iter;
    row.prior_mean = prior.mean;
    row.prior_variance = prior.variance;
    row.measurement = tip.position;
    row.noise = noise;
    row.gain = gain;
    row.posterior_mean = state.filter.mean;
    row.posterior_variance = state.filter.variance;
    out.filter_row = row;
  }
  const Vec2 filtered_world = to_world(base, filtered);
  out.filtered_tip_world = filtered_world;

  out.keypoint_pushed = state.keypoints.maybe_push(filtered_world, iter, cfg);
  if (out.keypoint_pushed && state.keypoints.full()) {
    const SplinePredictor sp = fit_spline(state.keypoints, cfg);
    const Vec2 next = sp.extrapolate_next();
    out.predicted_keypoint = next;
    if (const auto dir = target_orientation(state.keypoints.points().back(), next)) {
      out.surface_direction = *dir;
      // A prediction pointing against the current travel direction comes from
      // key points disturbed by a detachment; it is treated as degenerate.
      const double travel = pose.heading + cfg.tangential_sign * kPi / 2;
      if (std::abs(angle_difference(*dir, travel)) < kPi / 2) {
        state.held_heading = normalize_angle(*dir - cfg.tangential_sign * kPi / 2);
      }
    }
  }

  const double v_x = state.pid.update(deflection_error(z, state.model->rest_measurement, cfg), dt);
  const double v_y = state.keypoints.empty() ? 0.0 : constrain_tangential(v_x, cfg);
  out.command = {state.held_heading.value_or(pose.heading), v_x, v_y};
  return out;
}

}  // namespace whisker
