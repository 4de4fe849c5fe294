#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "whisker/geometry.hpp"
#include "whisker/whisker_model.hpp"

namespace whisker {

/// Axis-aligned box in the base frame, mm.
struct Region {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;

  bool contains(const Vec2& p) const {
    return p.x() >= x_min && p.x() <= x_max && p.y() >= y_min && p.y() <= y_max;
  }
  Vec2 center() const { return {0.5 * (x_min + x_max), 0.5 * (y_min + y_max)}; }
  Vec2 half_width() const { return {0.5 * (x_max - x_min), 0.5 * (y_max - y_min)}; }
};

/// Touch-rod sweep region used when none is configured: one side of the
/// shaft, hugging its axis so that weakly bent arcs are covered.
Region default_calibration_region();
inline constexpr double kDefaultCalibrationStep = 3.0;

struct CalibrationSample {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

struct CalibrationGrid {
  std::vector<CalibrationSample> samples;
  Region region;
  double step = kDefaultCalibrationStep;
  /// Where the fitted surface may be evaluated: the sweep region joined with
  /// the reach envelope of the shaft, so traces from the root stay inside.
  Region domain;
  /// Static (no-contact) reading recorded before the sweep.
  double rest_measurement = 0.0;
  std::uint64_t seed = 0;
};

/// Rod positions on a `step` lattice inside `region`; nodes whose rooted arc
/// would need more than curvature_max are skipped. Noise comes from `seed`
/// and params.noise_std.
CalibrationGrid sample_grid(const WhiskerParams& params, const Region& region, double step,
                            std::uint64_t seed = 0);

/// Fifth-order bivariate polynomial over monomials u^i v^j (i + j <= 5) of the
/// scaled coordinates u = (x - cx)/hx, v = (y - cy)/hy.
class PolyModel {
 public:
  static constexpr int kOrder = 5;
  static constexpr int kTerms = (kOrder + 1) * (kOrder + 2) / 2;
  using Coefficients = std::array<double, kTerms>;

  PolyModel() = default;
  PolyModel(const Coefficients& coeffs, const Vec2& center, const Vec2& half_width, const Region& domain,
            double rest_measurement, std::pair<double, double> measured_range);

  /// Exponent pair of coefficient k, ordered (0,0), (0,1), ..., (0,5), (1,0), ...
  static std::pair<int, int> exponents(int k);

  double value(const Vec2& p) const;
  Vec2 gradient(const Vec2& p) const;
  bool contains(const Vec2& p) const { return domain_.contains(p); }

  const Coefficients& coefficients() const { return coeffs_; }
  const Vec2& center() const { return center_; }
  const Vec2& half_width() const { return half_width_; }
  const Region& domain() const { return domain_; }
  double rest_measurement() const { return rest_; }
  /// [min, max] of the training measurements.
  std::pair<double, double> measured_range() const { return measured_range_; }

 private:
  void check_domain(const Vec2& p) const;

  Coefficients coeffs_{};
  Vec2 center_ = Vec2::Zero();
  Vec2 half_width_ = Vec2::Ones();
  Region domain_;
  double rest_ = 0.0;
  std::pair<double, double> measured_range_{0.0, 0.0};
};

struct FitReport {
  double rmse = 0.0;
  double r_squared = 0.0;
};

struct PolyFit {
  PolyModel model;
  FitReport report;
};

/// Least squares over the 21-term basis (column-pivoting QR on the scaled
/// design matrix). Throws Error(kInvalidArgument) with fewer than 21 samples
/// and Error(kRankDeficient) for degenerate layouts.
PolyFit fit_poly(const CalibrationGrid& grid);

/// Throws Error(kOutOfDomain) outside the model domain.
double eval_poly(const PolyModel& model, const Vec2& p);
Vec2 grad_poly(const PolyModel& model, const Vec2& p);

/// RMSE and R^2 of predictions against observations.
FitReport fit_report(const std::vector<double>& observed, const std::vector<double>& predicted);

}  // namespace whisker
