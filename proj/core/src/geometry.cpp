#include "whisker/geometry.hpp"

#include <cmath>

namespace whisker {

double normalize_angle(double angle) {
  double a = std::remainder(angle, 2.0 * kPi);  // [-pi, pi]
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

double angle_difference(double to, double from) { return normalize_angle(to - from); }

Vec2 rotate(const Vec2& v, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
}

Vec2 to_world(const Pose2D& pose, const Vec2& p_local) {
  return pose.position + rotate(p_local, pose.heading);
}

Vec2 to_local(const Pose2D& pose, const Vec2& p_world) {
  return rotate(p_world - pose.position, -pose.heading);
}

Pose2D compose(const Pose2D& outer, const Pose2D& inner) {
  return {to_world(outer, inner.position), outer.heading + inner.heading};
}

}  // namespace whisker
