#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "whisker/contour.hpp"
#include "whisker/error.hpp"
#include "whisker/whisker_model.hpp"

using namespace whisker;

namespace {

// RK4 on x' = cos(phi), y' = sin(phi), phi' = k.
Vec2 integrate_arc(double k, double s, int steps = 2000) {
  double x = 0, y = 0, phi = 0;
  const double h = s / steps;
  for (int i = 0; i < steps; ++i) {
    auto f = [&](double ph) { return Vec2{std::cos(ph), std::sin(ph)}; };
    const Vec2 k1 = f(phi);
    const Vec2 k2 = f(phi + 0.5 * h * k);
    const Vec2 k3 = f(phi + 0.5 * h * k);
    const Vec2 k4 = f(phi + h * k);
    const Vec2 d = (k1 + 2 * k2 + 2 * k3 + k4) * (h / 6);
    x += d.x();
    y += d.y();
    phi += h * k;
  }
  return {x, y};
}

double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Wall x = a in the world, solid on x > a.
Contour wall_at(double a) { return Contour(ContourSpec{OpenPolyline{{{a, 200}, {a, -200}}, 1.0}, {}}); }

double min_clearance(const Pose2D& pose, const Contour& c, double k, double L, int n) {
  double m = 1e300;
  for (int i = 0; i <= n; ++i) m = std::min(m, c.signed_distance(to_world(pose, arc_point(k, L * i / n))));
  return m;
}

}  // namespace

TEST(ArcPoint, StraightShaft) {
  const Vec2 p = arc_point(0.0, 75);
  EXPECT_NEAR(p.x(), 75, 1e-12);
  EXPECT_NEAR(p.y(), 0, 1e-12);
}

TEST(ArcPoint, QuarterCircle) {
  const double L = 75;
  const Vec2 p = arc_point(kPi / (2 * L), L);
  EXPECT_NEAR(p.x(), 2 * L / kPi, 1e-12);
  EXPECT_NEAR(p.y(), 2 * L / kPi, 1e-12);
}

TEST(ArcPoint, MatchesNumericIntegration) {
  const Vec2 p = arc_point(0.005, 75);
  const Vec2 q = integrate_arc(0.005, 75);
  EXPECT_LT((p - q).norm(), 1e-9);
  const Vec2 t = arc_tangent(0.005, 75);
  EXPECT_NEAR(t.x(), std::cos(0.375), 1e-12);
  EXPECT_NEAR(t.y(), std::sin(0.375), 1e-12);
}

TEST(ArcPoint, SmallCurvatureSeriesLimit) {
  for (double s = 0; s <= 75; s += 2.5) {
    // Leading terms of the series: x = s, y = k s^2 / 2.
    EXPECT_LT((arc_point(1e-8, s) - Vec2{s, 0.5e-8 * s * s}).norm(), 1e-10);
  }
}

TEST(CurvatureFromContact, Examples) {
  EXPECT_NEAR(curvature_from_contact({50, 0}), 0.0, 1e-15);
  EXPECT_NEAR(curvature_from_contact({50, 10}), 20.0 / 2600.0, 1e-15);
  EXPECT_NEAR(curvature_from_contact({0, 20}), 0.1, 1e-15);
  // The arc through (50, 10) passes there at some s.
  const double k = 20.0 / 2600.0;
  const double s = bisect([&](double t) { return arc_point(k, t).x() - 50; }, 0, 75);
  EXPECT_NEAR(arc_point(k, s).y(), 10, 1e-9);
  EXPECT_NEAR(arc_length_to_contact({50, 10}), s, 1e-9);
}

TEST(CurvatureFromContact, InvertsArcPoint) {
  for (double k : {1e-4, 0.0023, 0.01, 0.02}) {
    for (double s : {1.0, 20.0, 47.5, 75.0}) {
      EXPECT_NEAR(curvature_from_contact(arc_point(k, s)), k, 1e-12) << k << " " << s;
    }
  }
}

TEST(CurvatureFromContact, RootIsDegenerate) {
  try {
    curvature_from_contact({0, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kDegenerateInput);
  }
}

TEST(Measurement, TransducerExamples) {
  const WhiskerParams p;
  EXPECT_DOUBLE_EQ(measurement_from_curvature(0.0, p).z, -8300.0);
  EXPECT_NEAR(measurement_from_curvature(0.0023, p).z, -8760.0, 1e-9);
  EXPECT_NEAR(measurement_from_curvature(p.curvature_max, p).z, -8300.0 - 2e5 * 0.02, 1e-9);
  EXPECT_NEAR(curvature_from_measurement(-8760.0, p), 0.0023, 1e-15);
}

TEST(Measurement, StrictlyDecreasing) {
  const WhiskerParams p;
  double prev = measurement_from_curvature(0, p).z;
  for (int i = 1; i <= 200; ++i) {
    const double z = measurement_from_curvature(p.curvature_max * i / 200, p).z;
    EXPECT_LT(z, prev);
    prev = z;
  }
}

TEST(Measurement, SeededNoise) {
  const WhiskerParams p;
  NoiseSource a(5), b(5);
  double sum = 0, sum2 = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double za = measurement_from_curvature(0.001, p, &a).z;
    EXPECT_EQ(za, measurement_from_curvature(0.001, p, &b).z);
    const double e = za - measurement_from_curvature(0.001, p).z;
    sum += e;
    sum2 += e * e;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.1);
  EXPECT_NEAR(std::sqrt(sum2 / n), 3.0, 0.1);
}

TEST(ArcField, LevelSetIsTheArc) {
  const WhiskerParams p;
  const ArcMeasurementField f(p);
  for (double k : {0.001, 0.005, 0.015}) {
    for (double s : {10.0, 40.0, 75.0}) {
      EXPECT_NEAR(f.value(arc_point(k, s)), p.static_offset - p.measurement_gain * k, 1e-6);
    }
  }
}

TEST(SolveContact, FreeWhisker) {
  const WhiskerParams p;
  const auto st = solve_contact(Pose2D{}, wall_at(200), p);
  EXPECT_EQ(st.contact_kind, ContactKind::kNone);
  EXPECT_EQ(st.curvature, 0.0);
  EXPECT_FALSE(st.contact_point_world.has_value());
}

// Head-on wall: the tip touches x = a when sin(kL)/k = a.
TEST(SolveContact, HeadOnWallTipContact) {
  const WhiskerParams p;
  const double L = p.shaft_length;
  for (double a : {72.0, 65.0, 55.0}) {
    const auto st = solve_contact(Pose2D{}, wall_at(a), p);
    const double k = bisect([&](double kk) { return std::sin(kk * L) / kk - a; }, 1e-9, kPi / (2 * L));
    EXPECT_EQ(st.contact_kind, ContactKind::kTip) << a;
    EXPECT_NEAR(st.curvature, k, 1e-6) << a;
    ASSERT_TRUE(st.contact_point_world.has_value());
    EXPECT_NEAR(st.contact_point_world->x(), a, 1e-3);
  }
}

TEST(SolveContact, CurvatureIsMinimal) {
  const WhiskerParams p;
  for (double tilt : {0.0, 0.3}) {
    for (double a : {74.0, 66.0, 58.0, 52.0}) {
      const Pose2D pose{0, 0, tilt};
      const Contour c = wall_at(a * std::cos(tilt));
      WhiskerState st;
      try {
        st = solve_contact(pose, c, p);
      } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::kUnresolvableContact);
        continue;
      }
      if (st.contact_kind == ContactKind::kNone) continue;
      EXPECT_GE(min_clearance(pose, c, st.curvature, p.shaft_length, p.arc_samples), -1e-6);
      EXPECT_LT(min_clearance(pose, c, st.curvature - 1e-6, p.shaft_length, p.arc_samples), 0.0);
    }
  }
}

// With the base turned toward the bending side the contact slides off the
// tip onto the shaft once the wall is close enough.
TEST(SolveContact, TangentialTransition) {
  const WhiskerParams p;
  const Pose2D pose{0, 0, 0.3};
  bool seen_tip = false, seen_tangential = false;
  for (double a = 72; a > 20; a -= 0.5) {
    WhiskerState st;
    try {
      st = solve_contact(pose, wall_at(a), p);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::kUnresolvableContact);
      break;
    }
    if (st.contact_kind == ContactKind::kTip) {
      EXPECT_FALSE(seen_tangential) << "tip contact after tangential at a=" << a;
      seen_tip = true;
    }
    if (st.contact_kind == ContactKind::kTangential) seen_tangential = true;
  }
  EXPECT_TRUE(seen_tip);
  EXPECT_TRUE(seen_tangential);
}

TEST(SolveContact, PenetrationAtCurvatureMaxThrows) {
  const WhiskerParams p;
  try {
    solve_contact(Pose2D{}, wall_at(10), p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kUnresolvableContact);
  }
}

TEST(WhiskerParams, ValidateRejectsBadValues) {
  WhiskerParams p;
  p.shaft_length = -1;
  EXPECT_THROW(p.validate(), Error);
  p = {};
  p.noise_std = -1;
  EXPECT_THROW(p.validate(), Error);
}
