#include <gtest/gtest.h>

#include <algorithm>
#include <cstdio>

#include "whisker/sim_harness.hpp"
#include "whisker/tip_localization.hpp"

using namespace whisker;

// Noiseless tip contact at p* = arc_point(k, L): the characterized model
// should return p* within 0.2 mm over the curvatures the loop actually uses
// (collision threshold up to curvature_max). The fitted quintic surface
// cannot follow the 1/r pinch of the level sets near the root, so the traced
// tip lands about 0.27 mm short; this test documents that gap.
TEST(TipEndToEnd, WithinTwoTenthsMillimetre) {
  const WhiskerParams p;
  const CalibrationBundle b = run_calibration(p, CalibrationSettings{}, 1, true);
  const double k_lo = 300.0 / p.measurement_gain;
  double worst = 0;
  for (int i = 0; i <= 100; ++i) {
    const double k = k_lo + (p.curvature_max - k_lo) * i / 100;
    const double z = p.static_offset - p.measurement_gain * k;
    if (!b.characterized.in_range(z)) continue;
    const Vec2 truth = arc_point(k, p.shaft_length);
    worst = std::max(worst, (tip_from_measurement(b.characterized, z).position - truth).norm());
  }
  std::printf("worst end-to-end tip error: %.3f mm\n", worst);
  EXPECT_LT(worst, 0.2);
}
