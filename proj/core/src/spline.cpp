#include "whisker/spline.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <fmt/format.h>

#include "whisker/error.hpp"

namespace whisker {

std::vector<double> centripetal_parameters(const std::vector<Vec2>& points) {
  const std::size_t n = points.size();
  if (n < 2) throw Error(Errc::kInvalidArgument, "centripetal_parameters: need at least 2 points");
  std::vector<double> u(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    const double chord = (points[i] - points[i - 1]).norm();
    if (!(chord > 1e-12)) {
      throw Error(Errc::kDegenerateInput, fmt::format("spline: key points {} and {} coincide", i - 1, i));
    }
    u[i] = u[i - 1] + std::sqrt(chord);
  }
  const double total = u.back();
  for (auto& v : u) v /= total;
  u.back() = 1.0;
  return u;
}

SplinePredictor SplinePredictor::fit(const std::vector<Vec2>& points, int degree) {
  if (degree < 1) throw Error(Errc::kInvalidArgument, "spline: degree must be >= 1");
  const int n = static_cast<int>(points.size());
  if (n < degree + 1) {
    throw Error(Errc::kInvalidArgument, fmt::format("spline: {} points cannot carry degree {}", n, degree));
  }
  SplinePredictor sp;
  sp.degree_ = degree;
  sp.params_ = centripetal_parameters(points);
  const auto& u = sp.params_;

  // Clamped ends; interior knots sit on data parameters (odd degree) or
  // between them (even degree), the not-a-knot arrangement.
  sp.knots_.assign(static_cast<std::size_t>(n + degree + 1), 0.0);
  for (int i = 0; i <= degree; ++i) sp.knots_[static_cast<std::size_t>(n + i)] = 1.0;
  for (int j = 1; j <= n - degree - 1; ++j) {
    double t;
    if (degree % 2 == 1) {
      t = u[static_cast<std::size_t>(j + (degree - 1) / 2)];
    } else {
      const auto m = static_cast<std::size_t>(j + degree / 2);
      t = 0.5 * (u[m - 1] + u[m]);
    }
    sp.knots_[static_cast<std::size_t>(degree + j)] = t;
  }

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const int span = sp.span_index(u[static_cast<std::size_t>(i)]);
    const auto b = sp.basis(span, u[static_cast<std::size_t>(i)]);
    for (int r = 0; r <= degree; ++r) a(i, span - degree + r) = b[static_cast<std::size_t>(r)];
  }
  Eigen::MatrixXd rhs(n, 2);
  for (int i = 0; i < n; ++i) rhs.row(i) = points[static_cast<std::size_t>(i)].transpose();
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible()) throw Error(Errc::kDegenerateInput, "spline: singular collocation matrix");
  const Eigen::MatrixXd c = lu.solve(rhs);
  sp.ctrl_.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) sp.ctrl_[static_cast<std::size_t>(i)] = c.row(i).transpose();
  return sp;
}

int SplinePredictor::span_index(double u) const {
  const int n = static_cast<int>(ctrl_.empty() ? params_.size() : ctrl_.size());
  const int k = degree_;
  if (u >= knots_[static_cast<std::size_t>(n)]) return n - 1;
  if (u < knots_[static_cast<std::size_t>(k + 1)]) return k;
  int span = k;
  while (span < n - 1 && u >= knots_[static_cast<std::size_t>(span + 1)]) ++span;
  return span;
}

std::vector<double> SplinePredictor::basis(int span, double u) const {
  const int k = degree_;
  std::vector<double> b(static_cast<std::size_t>(k + 1), 0.0);
  std::vector<double> left(static_cast<std::size_t>(k + 1)), right(static_cast<std::size_t>(k + 1));
  b[0] = 1.0;
  for (int j = 1; j <= k; ++j) {
    left[static_cast<std::size_t>(j)] = u - knots_[static_cast<std::size_t>(span + 1 - j)];
    right[static_cast<std::size_t>(j)] = knots_[static_cast<std::size_t>(span + j)] - u;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double tmp = b[static_cast<std::size_t>(r)] /
                         (right[static_cast<std::size_t>(r + 1)] + left[static_cast<std::size_t>(j - r)]);
      b[static_cast<std::size_t>(r)] = saved + right[static_cast<std::size_t>(r + 1)] * tmp;
      saved = left[static_cast<std::size_t>(j - r)] * tmp;
    }
    b[static_cast<std::size_t>(j)] = saved;
  }
  return b;
}

Vec2 SplinePredictor::evaluate(double u) const {
  if (ctrl_.empty()) throw Error(Errc::kUninitialized, "spline: not fitted");
  const int span = span_index(u);
  const auto b = basis(span, u);
  Vec2 p = Vec2::Zero();
  for (int r = 0; r <= degree_; ++r) {
    p += b[static_cast<std::size_t>(r)] * ctrl_[static_cast<std::size_t>(span - degree_ + r)];
  }
  return p;
}

double SplinePredictor::next_parameter() const {
  return 1.0 + 1.0 / static_cast<double>(params_.size() - 1);
}

}  // namespace whisker
