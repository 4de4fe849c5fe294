#include "whisker/sim_harness.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>

#include "whisker/error.hpp"

namespace whisker {

void CalibrationSettings::validate() const {
  if (!(step > 0.0)) throw Error(Errc::kInvalidArgument, "calibration: step must be > 0");
  if (!(region.x_max > region.x_min) || !(region.y_max > region.y_min)) {
    throw Error(Errc::kInvalidArgument, "calibration: region bounds are inverted or empty");
  }
  if (characterized_degree < 1) throw Error(Errc::kInvalidArgument, "calibration: characterized_degree must be >= 1");
  if (characterized_samples < characterized_degree + 1) {
    throw Error(Errc::kInvalidArgument, "calibration: characterized_samples must exceed the degree");
  }
  trace.validate();
}

CalibrationBundle run_calibration(const WhiskerParams& params, const CalibrationSettings& settings,
                                  std::uint64_t seed, bool noiseless) {
  settings.validate();
  WhiskerParams p = params;
  if (noiseless) p.noise_std = 0.0;
  CalibrationBundle b;
  b.grid = sample_grid(p, settings.region, settings.step, seed);
  b.fit = fit_poly(b.grid);
  b.characterized = build_characterized_model(b.fit.model, p.shaft_length, settings.characterized_samples,
                                              settings.characterized_degree, settings.trace);
  return b;
}

void ScenarioConfig::validate() const {
  if (!(tick_rate > 0.0)) throw Error(Errc::kInvalidArgument, "scenario: tick_rate must be > 0");
  if (!(duration > 0.0)) throw Error(Errc::kInvalidArgument, "scenario: duration must be > 0");
  if (!(completion_laps > 0.0)) throw Error(Errc::kInvalidArgument, "scenario: completion_laps must be > 0");
  whisker.validate();
  control.validate();
  Contour{contour};
}

Pose2D step_world(const Pose2D& pose, const ControlCommand& cmd, double dt, const ControlConfig& cfg) {
  if (!(dt > 0.0)) throw Error(Errc::kInvalidArgument, "step_world: dt must be > 0");
  const double max_turn = cfg.max_turn_rate * dt;
  const double turn = std::clamp(angle_difference(cmd.target_orientation, pose.heading), -max_turn, max_turn);
  const Vec2 velocity = rotate(Vec2{cmd.v_x, cmd.v_y}, pose.heading);
  return Pose2D{pose.position + dt * velocity, pose.heading + turn};
}

std::vector<Vec2> TrialRecord::reconstructed() const {
  std::vector<Vec2> pts;
  for (const auto& t : ticks) {
    if (t.filtered_tip) pts.push_back(*t.filtered_tip);
  }
  return pts;
}

Metrics compute_metrics(const TrialRecord& record, const Contour& contour, double target_deflection,
                        double static_z) {
  Metrics m;
  m.completed = record.completed;
  m.failed = record.failed;
  m.failure = record.failure;
  if (record.ticks.empty()) throw Error(Errc::kPrecondition, "compute_metrics: empty record");

  ContactKind previous = ContactKind::kNone;
  for (const auto& t : record.ticks) {
    if (t.contact_kind == ContactKind::kTangential && previous != ContactKind::kTangential) ++m.slip_count;
    previous = t.contact_kind;
  }

  std::vector<double> errors;
  const double perimeter = contour.perimeter();
  const auto buckets = static_cast<std::size_t>(std::max(1.0, std::ceil(perimeter / kCoverageBucket)));
  std::vector<bool> covered(buckets, false);
  double z_sum = 0.0;
  std::size_t z_count = 0;
  std::optional<long> first_contact;
  long gap = 0;
  long longest_gap = 0;
  for (const auto& t : record.ticks) {
    if (t.collision) {
      z_sum += t.z;
      ++z_count;
      if (!first_contact) first_contact = t.tick;
      gap = 0;
    } else if (first_contact) {
      longest_gap = std::max(longest_gap, ++gap);
    }
    if (!t.filtered_tip) continue;
    const ClosestPointResult cp = contour.closest_point(*t.filtered_tip);
    errors.push_back(std::abs(cp.distance));
    if (std::abs(cp.distance) <= kCoverageBucket && cp.arc_length >= 0.0 && cp.arc_length <= perimeter) {
      const auto b = std::min(buckets - 1, static_cast<std::size_t>(cp.arc_length / kCoverageBucket));
      covered[b] = true;
    }
  }
  m.max_detachment_s = record.tick_rate > 0.0 ? static_cast<double>(longest_gap) / record.tick_rate : 0.0;

  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (errors.empty()) {
    m.valid = false;
    m.mean_abs_error = m.std_error = m.max_error = nan;
    m.mean_deflection = m.deflection_deviation_pct = m.coverage_fraction = nan;
    return m;
  }
  m.valid = true;
  m.points = errors.size();
  const double n = static_cast<double>(errors.size());
  double sum = 0.0;
  for (double e : errors) sum += e;
  m.mean_abs_error = sum / n;
  double sq = 0.0;
  for (double e : errors) sq += (e - m.mean_abs_error) * (e - m.mean_abs_error);
  m.std_error = errors.size() > 1 ? std::sqrt(sq / (n - 1.0)) : 0.0;
  m.max_error = *std::max_element(errors.begin(), errors.end());
  m.mean_deflection = z_count > 0 ? z_sum / static_cast<double>(z_count) : nan;
  m.deflection_deviation_pct =
      100.0 * std::abs(m.mean_deflection - target_deflection) / std::abs(target_deflection - static_z);
  m.coverage_fraction =
      static_cast<double>(std::count(covered.begin(), covered.end(), true)) / static_cast<double>(buckets);
  return m;
}

namespace {

Metrics score(const TrialRecord& rec, const Contour& contour, double target, double static_z) {
  if (!rec.ticks.empty()) return compute_metrics(rec, contour, target, static_z);
  Metrics m;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  m.mean_abs_error = m.std_error = m.max_error = nan;
  m.mean_deflection = m.deflection_deviation_pct = m.coverage_fraction = nan;
  m.failed = rec.failed;
  m.failure = rec.failure;
  return m;
}

void record_tick(TrialRecord& rec, long tick, double dt, const Pose2D& pose, double z, const WhiskerState& ws,
                 const ControlStep& step) {
  TickRecord t;
  t.tick = tick;
  t.time = static_cast<double>(tick) * dt;
  t.pose = pose;
  t.z = z;
  t.curvature = ws.curvature;
  t.contact_kind = ws.contact_kind;
  t.true_contact = ws.contact_point_world;
  t.collision = step.collision;
  t.raw_tip = step.raw_tip_world;
  t.filtered_tip = step.filtered_tip_world;
  t.keypoint = step.keypoint_pushed;
  t.command = step.command;
  rec.ticks.push_back(t);
  if (step.filter_row) rec.filter_trace.push_back(*step.filter_row);
}

}  // namespace

FollowResult run_follow(const ScenarioConfig& scenario, const CharacterizedModel& model, std::uint64_t seed,
                        bool noiseless) {
  scenario.validate();
  const Contour contour(scenario.contour);
  WhiskerParams params = scenario.whisker;
  if (noiseless) params.noise_std = 0.0;
  NoiseSource noise(seed);
  ControlState state(scenario.control, model);
  const double dt = 1.0 / scenario.tick_rate;
  const auto max_ticks = static_cast<long>(std::ceil(scenario.duration * scenario.tick_rate));

  FollowResult res;
  TrialRecord& rec = res.record;
  rec.scenario = scenario.name;
  rec.seed = seed;
  rec.tick_rate = scenario.tick_rate;

  const double perimeter = contour.perimeter();
  Pose2D pose = scenario.start;
  std::optional<double> last_s;
  double progress = 0.0;
  for (long tick = 0; tick < max_ticks; ++tick) {
    WhiskerState ws;
    try {
      ws = solve_contact(whisker_pose(pose, scenario.control), contour, params);
    } catch (const Error& e) {
      if (e.code() != Errc::kUnresolvableContact) throw;
      rec.failed = true;
      rec.failure = fmt::format("unresolvable contact at t={:.3f}s", static_cast<double>(tick) * dt);
      break;
    }
    const double z = measurement_from_curvature(ws.curvature, params, &noise).z;
    const ControlStep step = control_step(z, pose, state, dt);
    record_tick(rec, tick, dt, pose, z, ws, step);

    if (ws.contact_point_world) {
      const double s = contour.closest_point(*ws.contact_point_world).arc_length;
      if (contour.closed()) {
        if (last_s) {
          double ds = s - *last_s;
          if (ds > perimeter / 2) ds -= perimeter;
          if (ds < -perimeter / 2) ds += perimeter;
          progress += ds;
        }
        last_s = s;
        if (progress >= scenario.completion_laps * perimeter) {
          rec.completed = true;
          break;
        }
      } else if (s >= perimeter) {
        rec.completed = true;
        break;
      }
    }
    pose = step_world(pose, step.command, dt, scenario.control);
  }
  res.metrics = score(rec, contour, scenario.control.target_deflection, model.rest_measurement);
  return res;
}

void SweepConfig::validate() const {
  if (distances.empty()) throw Error(Errc::kInvalidArgument, "sweep: no distances");
  for (double d : distances) {
    if (!(d > 0.0)) throw Error(Errc::kInvalidArgument, "sweep: distances must be > 0");
  }
  if (!(wall_tilt >= 0.0 && wall_tilt < kPi / 2)) throw Error(Errc::kInvalidArgument, "sweep: wall_tilt out of [0, pi/2)");
  if (!(speed > 0.0) || !(travel > 0.0) || !(tick_rate > 0.0)) {
    throw Error(Errc::kInvalidArgument, "sweep: speed, travel and tick_rate must be > 0");
  }
  whisker.validate();
  control.validate();
}

OpenPolyline sweep_wall(double distance, const SweepConfig& cfg) {
  const double length = cfg.whisker.shaft_length;
  auto lateral = [&](double k) { return arc_point(k, length).y(); };
  // Lateral tip offset grows with curvature up to kL ~ 2.33.
  double lo = 0.0;
  double hi = 2.33 / length;
  if (!(distance < lateral(hi))) {
    throw Error(Errc::kInvalidArgument, fmt::format("sweep: distance {} beyond the shaft reach", distance));
  }
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    (lateral(mid) < distance ? lo : hi) = mid;
  }
  const Vec2 tip = arc_point(0.5 * (lo + hi), length);
  const Vec2 dir{-std::sin(cfg.wall_tilt), -std::cos(cfg.wall_tilt)};
  return OpenPolyline{{tip - 100.0 * dir, tip + 100.0 * dir}, 5.0};
}

std::vector<SweepTrial> run_flat_sweep(const SweepConfig& cfg, const CharacterizedModel& model, std::uint64_t seed,
                                       bool noiseless) {
  cfg.validate();
  WhiskerParams params = cfg.whisker;
  if (noiseless) params.noise_std = 0.0;
  const double dt = 1.0 / cfg.tick_rate;
  const auto ticks = static_cast<long>(std::llround(cfg.travel / cfg.speed * cfg.tick_rate));
  const Vec2 dir{-std::sin(cfg.wall_tilt), -std::cos(cfg.wall_tilt)};
  // Sensor turned so that the whisker base frame is the world frame.
  const Pose2D pose = sensor_pose_for(Pose2D{}, cfg.control);

  std::vector<SweepTrial> out;
  for (std::size_t i = 0; i < cfg.distances.size(); ++i) {
    const double d = cfg.distances[i];
    const OpenPolyline wall0 = sweep_wall(d, cfg);
    NoiseSource noise(seed + i);
    ControlState state(cfg.control, model);
    TrialRecord rec;
    rec.scenario = fmt::format("sweep_{:g}", d);
    rec.seed = seed + i;
    rec.tick_rate = cfg.tick_rate;
    std::optional<Contour> contour;
    for (long tick = 0; tick < ticks; ++tick) {
      OpenPolyline wall = wall0;
      const Vec2 shift = (cfg.speed * static_cast<double>(tick) * dt) * dir;
      for (auto& v : wall.vertices) v += shift;
      contour.emplace(ContourSpec{wall, Pose2D{}});
      WhiskerState ws;
      try {
        ws = solve_contact(whisker_pose(pose, cfg.control), *contour, params);
      } catch (const Error& e) {
        if (e.code() != Errc::kUnresolvableContact) throw;
        rec.failed = true;
        rec.failure = fmt::format("unresolvable contact at t={:.3f}s", static_cast<double>(tick) * dt);
        break;
      }
      const double z = measurement_from_curvature(ws.curvature, params, &noise).z;
      const ControlStep step = control_step(z, pose, state, dt);
      record_tick(rec, tick, dt, pose, z, ws, step);
    }
    rec.completed = !rec.failed;
    SweepTrial trial;
    trial.distance = d;
    trial.metrics = score(rec, *contour, cfg.control.target_deflection, model.rest_measurement);
    trial.slipped = trial.metrics.slip_count > 0;
    for (const auto& t : rec.ticks) {
      if (t.filtered_tip) trial.errors.push_back(std::abs(contour->signed_distance(*t.filtered_tip)));
    }
    out.push_back(trial);
  }
  return out;
}

}  // namespace whisker
