#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "whisker/active_control.hpp"
#include "whisker/calibration.hpp"
#include "whisker/contour.hpp"
#include "whisker/tip_localization.hpp"
#include "whisker/whisker_model.hpp"

namespace whisker {

/// Calibration stage settings: grid sweep, fit, characterization.
struct CalibrationSettings {
  Region region = default_calibration_region();
  double step = kDefaultCalibrationStep;
  int characterized_samples = 20;
  int characterized_degree = 5;
  TraceConfig trace;

  void validate() const;
};

struct CalibrationBundle {
  CalibrationGrid grid;
  PolyFit fit;
  CharacterizedModel characterized;
};

/// Samples the grid (noise from `seed` unless `noiseless`), fits the surface
/// and builds the characterized model.
CalibrationBundle run_calibration(const WhiskerParams& params, const CalibrationSettings& settings,
                                  std::uint64_t seed, bool noiseless);

struct ScenarioConfig {
  std::string name = "cylinder";
  ContourSpec contour;
  Pose2D start;
  /// Hz.
  double tick_rate = 30.0;
  /// Seconds of simulated time before giving up.
  double duration = 120.0;
  /// Closed contours stop once the contact has travelled this multiple of
  /// the perimeter.
  double completion_laps = 1.05;
  WhiskerParams whisker;
  ControlConfig control;

  /// Throws Error(kInvalidArgument).
  void validate() const;
};

/// Heading slews toward cmd.target_orientation by at most max_turn_rate*dt;
/// the position integrates (v_x, v_y) rotated by the current heading.
Pose2D step_world(const Pose2D& pose, const ControlCommand& cmd, double dt, const ControlConfig& cfg);

struct TickRecord {
  long tick = 0;
  double time = 0.0;
  Pose2D pose;
  double z = 0.0;
  double curvature = 0.0;
  ContactKind contact_kind = ContactKind::kNone;
  std::optional<Vec2> true_contact;
  bool collision = false;
  std::optional<Vec2> raw_tip;
  std::optional<Vec2> filtered_tip;
  bool keypoint = false;
  ControlCommand command;
};

struct TrialRecord {
  std::string scenario;
  std::uint64_t seed = 0;
  double tick_rate = 0.0;
  std::vector<TickRecord> ticks;
  std::vector<FilterTraceRow> filter_trace;
  bool completed = false;
  bool failed = false;
  std::string failure;

  /// Filtered tips of every tick in contact.
  std::vector<Vec2> reconstructed() const;
};

struct Metrics {
  bool valid = false;
  std::size_t points = 0;
  double mean_abs_error = 0.0;
  double std_error = 0.0;
  double max_error = 0.0;
  double mean_deflection = 0.0;
  /// |mean(z) - z*| / |z* - static| in percent.
  double deflection_deviation_pct = 0.0;
  int slip_count = 0;
  double coverage_fraction = 0.0;
  /// Longest run without a collision after first contact, seconds.
  double max_detachment_s = 0.0;
  bool completed = false;
  bool failed = false;
  std::string failure;
};

inline constexpr double kCoverageBucket = 2.0;

/// Scores the filtered tips of contacted ticks against the contour.
/// Without any contact the metrics come back NaN with valid = false.
Metrics compute_metrics(const TrialRecord& record, const Contour& contour, double target_deflection,
                        double static_z);

/// Closed-loop contour following from the scenario start pose.
struct FollowResult {
  TrialRecord record;
  Metrics metrics;
};
FollowResult run_follow(const ScenarioConfig& scenario, const CharacterizedModel& model, std::uint64_t seed,
                        bool noiseless);

struct SweepConfig {
  std::vector<double> distances{5, 10, 15, 20, 25, 30, 35, 40, 45};
  /// Wall tilt; the wall normal into the solid is (cos g, -sin g) in the
  /// sensor frame.
  double wall_tilt = 0.3;
  /// mm/s.
  double speed = 10.0;
  /// mm.
  double travel = 80.0;
  double tick_rate = 300.0;
  WhiskerParams whisker;
  ControlConfig control;

  void validate() const;
};

/// Wall placement for a sweep distance: the line through the tip-contact
/// point whose base-frame lateral offset is `distance`.
OpenPolyline sweep_wall(double distance, const SweepConfig& cfg);

struct SweepTrial {
  double distance = 0.0;
  Metrics metrics;
  bool slipped = false;
  /// Per-tick absolute errors of the filtered tip.
  std::vector<double> errors;
};

/// Fixed sensor, wall sliding past it; localization and filtering only.
std::vector<SweepTrial> run_flat_sweep(const SweepConfig& cfg, const CharacterizedModel& model, std::uint64_t seed,
                                       bool noiseless);

}  // namespace whisker
