#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <fmt/format.h>
#include <optional>
#include <utility>
#include <vector>

#include "whisker/calibration.hpp"
#include "whisker/error.hpp"
#include "whisker/geometry.hpp"
#include "whisker/whisker_model.hpp"

namespace whisker {

/// A scalar measurement surface over the base frame whose level sets are the
/// possible deflected shaft shapes.
template <class F>
concept MeasurementField = requires(const F& f, const Vec2& p) {
  { f.value(p) } -> std::convertible_to<double>;
  { f.gradient(p) } -> std::convertible_to<Vec2>;
  { f.contains(p) } -> std::convertible_to<bool>;
};

struct TraceConfig {
  double step_size = 1e-3;
  /// Weight of the loss direction relative to the unit tangent.
  double loss_blend = 0.5;
  /// Defaults to ceil(1.5 * L / step_size).
  std::optional<long> max_steps;
  Vec2 root = Vec2::Zero();

  void validate() const;
  long resolved_max_steps(double length) const;
};

struct TipEstimate {
  Vec2 position = Vec2::Zero();
  double arc_length_traced = 0.0;
  bool converged = false;
};

/// Follows the level set f = z_c from the root for arc length `length`.
///
/// Each step advances exactly `step_size` along normalize(t + a*l): t is the
/// unit tangent of the level set (kept pointing the way the trace is already
/// going, +X at the root), l the normalized descent direction of
/// (f - z_c)^2 scaled by clamp(offset / step_size, -1, 1), where offset is the
/// first-order distance to the level set. Far from the level set this is the
/// plain normalized descent direction; on it the correction fades so the trace
/// does not zigzag. Where the gradient is not finite (the singular root of the
/// exact field) the trace keeps its previous direction.
///
/// Errors: kGradientVanished (|grad f| < 1e-9), kLeftDomain, kNotConverged.
template <MeasurementField F>
TipEstimate trace_tip(const F& field, double z_c, double length, const TraceConfig& cfg = {},
                      std::vector<Vec2>* path = nullptr) {
  cfg.validate();
  if (!(length > 0.0)) throw Error(Errc::kInvalidArgument, "trace_tip: length must be > 0");
  const long max_steps = cfg.resolved_max_steps(length);
  const double h = cfg.step_size;

  Vec2 p = cfg.root;
  Vec2 heading = Vec2::UnitX();
  double traced = 0.0;
  long steps = 0;
  if (path != nullptr) {
    path->clear();
    path->push_back(p);
  }
  while (traced < length) {
    if (steps >= max_steps) throw Error(Errc::kNotConverged, fmt::format("trace_tip: {} steps exhausted", steps));
    if (!field.contains(p)) {
      throw Error(Errc::kLeftDomain, fmt::format("trace_tip: left domain at ({:.3f}, {:.3f})", p.x(), p.y()));
    }
    const Vec2 grad = field.gradient(p);
    Vec2 dir = heading;
    if (std::isfinite(grad.x()) && std::isfinite(grad.y())) {
      const double norm = grad.norm();
      if (norm < 1e-9) {
        throw Error(Errc::kGradientVanished,
                    fmt::format("trace_tip: gradient vanished at ({:.3f}, {:.3f})", p.x(), p.y()));
      }
      const Vec2 normal = grad / norm;
      Vec2 tangent = left_normal(normal);
      if (tangent.dot(heading) < 0.0) tangent = -tangent;
      const double offset = (field.value(p) - z_c) / norm;
      const double weight = std::clamp(offset / h, -1.0, 1.0);
      dir = tangent - cfg.loss_blend * weight * normal;
      dir.normalize();
    }
    const double next = std::min(length, static_cast<double>(steps + 1) * h);
    p += (next - traced) * dir;
    traced = next;
    heading = dir;
    ++steps;
    if (path != nullptr) path->push_back(p);
  }
  if (!field.contains(p)) {
    throw Error(Errc::kLeftDomain, fmt::format("trace_tip: tip ({:.3f}, {:.3f}) outside domain", p.x(), p.y()));
  }
  return {p, traced, true};
}

/// Univariate least-squares polynomial over a scaled argument.
class ScaledPolynomial {
 public:
  ScaledPolynomial() = default;
  ScaledPolynomial(std::vector<double> coeffs, double center, double half_width)
      : coeffs_(std::move(coeffs)), center_(center), half_width_(half_width) {}

  static ScaledPolynomial fit(const std::vector<double>& t, const std::vector<double>& y, int degree);

  double operator()(double t) const;
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<double>& coefficients() const { return coeffs_; }
  double center() const { return center_; }
  double half_width() const { return half_width_; }

 private:
  std::vector<double> coeffs_;
  double center_ = 0.0;
  double half_width_ = 1.0;
};

/// Fast measurement-to-tip map built from resampled level-set traces.
struct CharacterizedModel {
  ScaledPolynomial x_of_z;
  ScaledPolynomial y_of_z;
  double z_min = 0.0;
  double z_max = 0.0;
  double rest_measurement = 0.0;
  double shaft_length = 0.0;
  FitReport x_report;
  FitReport y_report;
  /// Traced anchors the polynomials were fitted to.
  std::vector<double> anchor_z;
  std::vector<Vec2> anchor_tip;

  bool in_range(double z) const { return z >= z_min && z <= z_max; }
};

/// Valid measurement interval of a calibrated surface: from the strongest
/// sampled deflection up to the rest reading.
std::pair<double, double> valid_measurement_range(const PolyModel& model);

/// Traces `n_samples` evenly spaced z values over the valid range and fits
/// per-axis polynomials of `degree`. Throws on trace failure or when
/// n_samples < degree + 1.
CharacterizedModel build_characterized_model(const PolyModel& model, double length, int n_samples = 20,
                                             int degree = 5, const TraceConfig& cfg = {});

/// Throws Error(kOutOfRange) outside [z_min, z_max].
TipEstimate tip_from_measurement(const CharacterizedModel& model, double z);

}  // namespace whisker
