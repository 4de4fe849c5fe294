#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "whisker/error.hpp"
#include "whisker/spline.hpp"

using namespace whisker;

namespace {

std::vector<Vec2> line_points(int n, const Vec2& start, const Vec2& step) {
  std::vector<Vec2> v;
  for (int i = 0; i < n; ++i) v.push_back(start + i * step);
  return v;
}

std::vector<Vec2> arc_points(int n, double radius, double a0, double da) {
  std::vector<Vec2> v;
  for (int i = 0; i < n; ++i) v.push_back(radius * Vec2{std::cos(a0 + i * da), std::sin(a0 + i * da)});
  return v;
}

}  // namespace

TEST(Centripetal, MatchesSquareRootChordOracle) {
  const std::vector<Vec2> pts{{0, 0}, {4, 0}, {4, 1}, {13, 1}};
  const auto u = centripetal_parameters(pts);
  const double total = 2 + 1 + 3;
  ASSERT_EQ(u.size(), 4u);
  EXPECT_DOUBLE_EQ(u[0], 0.0);
  EXPECT_NEAR(u[1], 2 / total, 1e-15);
  EXPECT_NEAR(u[2], 3 / total, 1e-15);
  EXPECT_DOUBLE_EQ(u[3], 1.0);
}

TEST(Spline, CollinearGivesExactLinearExtrapolation) {
  const Vec2 step{1.7, -0.4};
  const auto pts = line_points(5, {3, 2}, step);
  const auto sp = SplinePredictor::fit(pts);
  const Vec2 next = sp.extrapolate_next();
  EXPECT_LT((next - (pts.back() + step)).norm(), 1e-6);
  // Every evaluated point stays on the line.
  for (double u = -0.2; u <= 1.3; u += 0.05) {
    EXPECT_NEAR(cross(sp.evaluate(u) - pts.front(), step.normalized()), 0.0, 1e-9);
  }
}

TEST(Spline, ParametersStrictlyIncreasing) {
  const auto sp = SplinePredictor::fit(arc_points(7, 80, 0.1, 0.05));
  const auto& u = sp.parameters();
  EXPECT_EQ(u.front(), 0.0);
  EXPECT_EQ(u.back(), 1.0);
  for (std::size_t i = 1; i < u.size(); ++i) EXPECT_GT(u[i], u[i - 1]);
}

TEST(Spline, CircleArcInterpolation) {
  const auto pts = arc_points(5, 80, -0.3, 0.04);
  const auto sp = SplinePredictor::fit(pts);
  const auto& u = sp.parameters();
  for (std::size_t i = 0; i < pts.size(); ++i) EXPECT_LT((sp.evaluate(u[i]) - pts[i]).norm(), 1e-9);
  for (std::size_t i = 0; i + 1 < u.size(); ++i) {
    EXPECT_LT(std::abs(sp.evaluate(0.5 * (u[i] + u[i + 1])).norm() - 80), 0.1);
  }
  // The prediction is near the circle, about one spacing beyond the last point.
  const Vec2 next = sp.extrapolate_next();
  EXPECT_LT(std::abs(next.norm() - 80), 0.5);
  const Vec2 expected = 80 * Vec2{std::cos(-0.3 + 5 * 0.04), std::sin(-0.3 + 5 * 0.04)};
  EXPECT_LT((next - expected).norm(), 0.5);
}

TEST(Spline, RandomPointsInterpolatedExactly) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> d(1, 5), a(-0.8, 0.8);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Vec2> pts{{0, 0}};
    double heading = 0;
    for (int i = 1; i < 6; ++i) {
      heading += a(rng);
      pts.push_back(pts.back() + d(rng) * Vec2{std::cos(heading), std::sin(heading)});
    }
    for (int deg = 1; deg <= 3; ++deg) {
      const auto sp = SplinePredictor::fit(pts, deg);
      for (std::size_t i = 0; i < pts.size(); ++i) {
        EXPECT_LT((sp.evaluate(sp.parameters()[i]) - pts[i]).norm(), 1e-9);
      }
    }
  }
}

TEST(Spline, NextParameterFormula) {
  for (int n = 4; n <= 12; ++n) {
    const auto sp = SplinePredictor::fit(line_points(n, {0, 0}, {1, 0}));
    EXPECT_DOUBLE_EQ(sp.next_parameter(), 1.0 + 1.0 / (n - 1)) << n;
  }
  EXPECT_DOUBLE_EQ(SplinePredictor::fit(line_points(5, {0, 0}, {1, 1})).next_parameter(), 1.25);
}

TEST(Spline, BadInputs) {
  try {
    SplinePredictor::fit(line_points(3, {0, 0}, {1, 0}), 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kInvalidArgument);
  }
  try {
    SplinePredictor::fit({{0, 0}, {1, 0}, {1, 0}, {2, 0}}, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kDegenerateInput);
  }
  EXPECT_THROW(SplinePredictor::fit(line_points(5, {0, 0}, {1, 0}), 0), Error);
}
