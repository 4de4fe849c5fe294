#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>

#include "whisker/contour.hpp"
#include "whisker/geometry.hpp"

namespace whisker {

/// Ground-truth shaft and transducer parameters. Lengths in mm, measurements
/// in microtesla.
struct WhiskerParams {
  double shaft_length = 75.0;
  /// Curvature-to-flux scale, uT*mm.
  double measurement_gain = 2.0e5;
  /// Reading of the undeflected whisker.
  double static_offset = -8300.0;
  double curvature_max = 0.02;
  int arc_samples = 200;
  double noise_std = 3.0;

  /// Throws Error(kInvalidArgument).
  void validate() const;
};

enum class ContactKind { kNone, kTip, kTangential };

const char* to_string(ContactKind kind);

struct WhiskerState {
  double curvature = 0.0;
  std::optional<double> contact_s;
  ContactKind contact_kind = ContactKind::kNone;
  std::optional<Vec2> contact_point_world;
};

struct Measurement {
  double z = 0.0;
};

/// Seeded Gaussian source; owned by whoever runs the simulation.
class NoiseSource {
 public:
  explicit NoiseSource(std::uint64_t seed) : engine_(seed) {}
  double gaussian(double sigma);

 private:
  std::mt19937_64 engine_;
};

/// Point at arc length s on a constant-curvature shaft rooted at the origin
/// with initial tangent +X, bending toward +Y.
Vec2 arc_point(double curvature, double s);

/// Unit tangent of the same arc at arc length s.
Vec2 arc_tangent(double curvature, double s);

/// Curvature of the rooted arc passing through `contact` (base frame).
/// Throws Error(kDegenerateInput) within 1e-6 mm of the root.
double curvature_from_contact(const Vec2& contact);

/// Arc length from the root to `contact` along the arc through it.
double arc_length_to_contact(const Vec2& contact);

/// Affine transducer: z = z0 - g * curvature (+ noise when a source is given
/// and noise_std > 0).
Measurement measurement_from_curvature(double curvature, const WhiskerParams& params,
                                       NoiseSource* noise = nullptr);

/// Inverse of the noiseless transducer.
double curvature_from_measurement(double z, const WhiskerParams& params);

/// Smallest admissible curvature at which no sampled shaft point penetrates
/// the contour. Throws Error(kUnresolvableContact) when even curvature_max
/// penetrates.
WhiskerState solve_contact(const Pose2D& pose, const Contour& contour, const WhiskerParams& params);

/// Exact measurement field of the synthetic whisker: the level set z = c is
/// the rooted arc of curvature (z0 - c)/g. Singular at the root.
class ArcMeasurementField {
 public:
  explicit ArcMeasurementField(const WhiskerParams& params) : params_(params) {}

  double value(const Vec2& p) const;
  /// Non-finite at the root.
  Vec2 gradient(const Vec2& p) const;
  bool contains(const Vec2& p) const { return std::isfinite(p.x()) && std::isfinite(p.y()); }

 private:
  WhiskerParams params_;
};

}  // namespace whisker
