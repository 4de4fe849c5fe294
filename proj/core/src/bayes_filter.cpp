#include "whisker/bayes_filter.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "whisker/error.hpp"

namespace whisker {

FilterState init_filter(const Vec2& first_tip, const Vec2& process_noise) {
  FilterState s;
  s.mean = first_tip;
  s.variance = Vec2::Constant(kInitialVariance);
  s.process_noise = process_noise;
  s.initialized = true;
  s.predicted = false;
  return s;
}

FilterState predict(const FilterState& state) {
  if (!state.initialized) throw Error(Errc::kUninitialized, "predict: filter not initialized");
  FilterState s = state;
  s.variance += s.process_noise;
  s.predicted = true;
  return s;
}

FilterState update(const FilterState& state, const Vec2& measurement, const Vec2& noise, Vec2* gain) {
  if (!state.initialized) throw Error(Errc::kUninitialized, "update: filter not initialized");
  if (!state.predicted) throw Error(Errc::kPrecondition, "update: predict() must precede update()");
  if (!(noise.x() > 0.0 && noise.y() > 0.0)) {
    throw Error(Errc::kInvalidArgument, fmt::format("update: R must be positive, got ({}, {})", noise.x(), noise.y()));
  }
  FilterState s = state;
  Vec2 k;
  for (int axis = 0; axis < 2; ++axis) {
    const double prior = state.variance[axis];
    k[axis] = std::isinf(noise[axis]) ? 0.0 : prior / (prior + noise[axis]);
    s.mean[axis] = state.mean[axis] + k[axis] * (measurement[axis] - state.mean[axis]);
    s.variance[axis] = (1.0 - k[axis]) * prior;
  }
  s.predicted = false;
  if (gain != nullptr) *gain = k;
  return s;
}

NoiseWindow::NoiseWindow(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ < 2) throw Error(Errc::kInvalidArgument, "noise window needs capacity >= 2");
}

void NoiseWindow::push(const Vec2& tip) {
  if (points_.size() == capacity_) points_.pop_front();
  points_.push_back(tip);
}

Vec2 estimate_R(const NoiseWindow& window) {
  if (!window.full()) {
    throw Error(Errc::kWindowNotFull,
                fmt::format("estimate_R: window has {} of {} points", window.size(), window.capacity()));
  }
  const auto& pts = window.points();
  const double n = static_cast<double>(pts.size());
  Vec2 mean = Vec2::Zero();
  for (const auto& p : pts) mean += p;
  mean /= n;
  Vec2 var = Vec2::Zero();
  for (const auto& p : pts) var += (p - mean).cwiseAbs2();
  var /= (n - 1.0);
  return var.cwiseMax(kVarianceFloor);
}

}  // namespace whisker
