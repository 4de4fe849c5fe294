#pragma once

#include <cstddef>
#include <deque>
#include <vector>

#include "whisker/geometry.hpp"

namespace whisker {

inline constexpr double kDefaultProcessNoise = 1e-5;
inline constexpr double kInitialVariance = 10.0;
inline constexpr double kVarianceFloor = 1e-6;

/// Constant-state Kalman filter over the base-frame tip position, run as two
/// independent scalar filters (x and y). Variances are per axis, mm^2.
struct FilterState {
  Vec2 mean = Vec2::Zero();
  Vec2 variance = Vec2::Constant(kInitialVariance);
  Vec2 process_noise = Vec2::Constant(kDefaultProcessNoise);
  bool initialized = false;
  /// Set by predict(), cleared by update().
  bool predicted = false;
};

/// Prior centred on the first tip with variance 10 on both axes.
FilterState init_filter(const Vec2& first_tip, const Vec2& process_noise = Vec2::Constant(kDefaultProcessNoise));

/// x^- = x ; P^- = P + Q. Throws Error(kUninitialized).
FilterState predict(const FilterState& state);

/// Per axis: K = P^-/(P^- + R), x = x^- + K(z - x^-), P = (1 - K)P^-.
/// Throws Error(kUninitialized), Error(kPrecondition) without a preceding
/// predict, Error(kInvalidArgument) for R <= 0. `gain` receives K when given.
FilterState update(const FilterState& state, const Vec2& measurement, const Vec2& noise, Vec2* gain = nullptr);

/// Ring buffer of the most recent raw tip estimates.
class NoiseWindow {
 public:
  explicit NoiseWindow(std::size_t capacity = 10);

  void push(const Vec2& tip);
  void clear() { points_.clear(); }
  bool full() const { return points_.size() == capacity_; }
  std::size_t size() const { return points_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Vec2& back() const { return points_.back(); }
  const std::deque<Vec2>& points() const { return points_; }

 private:
  std::size_t capacity_;
  std::deque<Vec2> points_;
};

/// Per-axis unbiased sample variance of a full window, floored at 1e-6.
/// Throws Error(kWindowNotFull) while the window is still filling.
Vec2 estimate_R(const NoiseWindow& window);

/// One filtering iteration, kept for CSV export.
struct FilterTraceRow {
  long step = 0;
  Vec2 prior_mean = Vec2::Zero();
  Vec2 prior_variance = Vec2::Zero();
  Vec2 measurement = Vec2::Zero();
  Vec2 noise = Vec2::Zero();
  Vec2 gain = Vec2::Zero();
  Vec2 posterior_mean = Vec2::Zero();
  Vec2 posterior_variance = Vec2::Zero();
};

}  // namespace whisker
