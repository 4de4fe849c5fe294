#include <benchmark/benchmark.h>

#include "whisker/active_control.hpp"
#include "whisker/contour.hpp"
#include "whisker/sim_harness.hpp"
#include "whisker/tip_localization.hpp"
#include "whisker/whisker_model.hpp"

namespace {

using namespace whisker;

const CalibrationBundle& bundle() {
  static const CalibrationBundle b = run_calibration(WhiskerParams{}, CalibrationSettings{}, 1, true);
  return b;
}

void BM_TipFromMeasurement(benchmark::State& state) {
  const CharacterizedModel& m = bundle().characterized;
  double z = m.z_min;
  const double dz = (m.z_max - m.z_min) / 997.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tip_from_measurement(m, z));
    z += dz;
    if (z > m.z_max) z = m.z_min;
  }
}
BENCHMARK(BM_TipFromMeasurement);

// Full level-set trace on the fitted surface, the expensive path the
// characterized model replaces.
void BM_TraceTipPoly(benchmark::State& state) {
  const PolyModel& poly = bundle().fit.model;
  for (auto _ : state) {
    benchmark::DoNotOptimize(trace_tip(poly, -8760.0, 75.0));
  }
}
BENCHMARK(BM_TraceTipPoly)->Unit(benchmark::kMillisecond);

void BM_SolveContact(benchmark::State& state) {
  const Contour wall(ContourSpec{OpenPolyline{{Vec2{60.0, 100.0}, Vec2{60.0, -100.0}}, 1.0}, Pose2D{}});
  const WhiskerParams params;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_contact(Pose2D{0.0, 0.0, 0.1}, wall, params));
  }
}
BENCHMARK(BM_SolveContact)->Unit(benchmark::kMicrosecond);

void BM_ControlStep(benchmark::State& state) {
  const CharacterizedModel& m = bundle().characterized;
  ControlConfig cfg;
  ControlState cs(cfg, m);
  Pose2D pose{0.0, 0.0, 0.0};
  long i = 0;
  for (auto _ : state) {
    const double z = -8760.0 + 20.0 * ((i++ % 7) - 3);
    benchmark::DoNotOptimize(control_step(z, pose, cs, 1.0 / 30.0));
  }
}
BENCHMARK(BM_ControlStep);

}  // namespace

BENCHMARK_MAIN();
