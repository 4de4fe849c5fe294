#pragma once

#include <vector>

#include "whisker/geometry.hpp"

namespace whisker {

/// Planar interpolating B-spline through ordered key points, parameterized by
/// centripetal (square-root chord) spacing normalized to [0, 1].
class SplinePredictor {
 public:
  /// Needs at least degree + 1 distinct consecutive points. Throws
  /// Error(kInvalidArgument) for bad sizes/degree and Error(kDegenerateInput)
  /// for coincident consecutive points.
  static SplinePredictor fit(const std::vector<Vec2>& points, int degree = 3);

  /// Point at parameter u. Outside [0, 1] the end span's polynomial is
  /// continued, which is what the prediction uses.
  Vec2 evaluate(double u) const;

  /// Parameter of the next key point, 1 + 1/(n - 1).
  double next_parameter() const;
  Vec2 extrapolate_next() const { return evaluate(next_parameter()); }

  int degree() const { return degree_; }
  const std::vector<double>& parameters() const { return params_; }
  const std::vector<double>& knots() const { return knots_; }
  const std::vector<Vec2>& control_points() const { return ctrl_; }

 private:
  int span_index(double u) const;
  /// Non-zero basis values B_{span-k..span}(u) by Cox-de Boor.
  std::vector<double> basis(int span, double u) const;

  int degree_ = 3;
  std::vector<double> params_;
  std::vector<double> knots_;
  std::vector<Vec2> ctrl_;
};

/// Centripetal parameter values of `points`, first 0 and last 1.
std::vector<double> centripetal_parameters(const std::vector<Vec2>& points);

}  // namespace whisker
