#pragma once

#include <Eigen/Core>

namespace whisker {

/// 2-vector in millimetres. Frames are implied by usage: "world" for scenario
/// coordinates, "base" for the whisker-base (sensor) frame.
using Vec2 = Eigen::Vector2d;

inline constexpr double kPi = 3.14159265358979323846;

/// Wraps an angle into (-pi, pi].
double normalize_angle(double angle);

/// Signed smallest rotation taking `from` onto `to`, in (-pi, pi].
double angle_difference(double to, double from);

inline double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

/// Counter-clockwise perpendicular.
inline Vec2 left_normal(const Vec2& d) { return {-d.y(), d.x()}; }

/// Sensor pose: position of the whisker base and heading of its forward (+X)
/// axis relative to world X.
struct Pose2D {
  Vec2 position = Vec2::Zero();
  double heading = 0.0;

  Pose2D() = default;
  Pose2D(const Vec2& p, double theta) : position(p), heading(normalize_angle(theta)) {}
  Pose2D(double x, double y, double theta) : Pose2D(Vec2{x, y}, theta) {}
};

Vec2 rotate(const Vec2& v, double angle);
Vec2 to_world(const Pose2D& pose, const Vec2& p_local);
Vec2 to_local(const Pose2D& pose, const Vec2& p_world);

/// Composition: `inner` expressed in the frame of `outer`, returned in world.
Pose2D compose(const Pose2D& outer, const Pose2D& inner);

}  // namespace whisker
