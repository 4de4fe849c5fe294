#pragma once

#include <variant>
#include <vector>

#include "whisker/geometry.hpp"

namespace whisker {

struct Circle {
  double radius = 80.0;
};

/// Outer width/height; corners are quarter discs of `corner_radius`.
struct RoundedRectangle {
  double width = 160.0;
  double height = 160.0;
  double corner_radius = 40.0;
};

/// Regular polygon with sharp side length `side_length`, corners filleted
/// with `corner_radius`. One flat side faces local -Y.
struct RoundedPolygon {
  int sides = 8;
  double side_length = 70.0;
  double corner_radius = 30.0;
};

/// One-sided wall. The solid lies to the left of the travel direction
/// v0 -> v1 -> ...; interior vertices are filleted, the end segments extend
/// to infinity as rays.
struct OpenPolyline {
  std::vector<Vec2> vertices;
  double fillet_radius = 5.0;
};

using ContourShape = std::variant<Circle, RoundedRectangle, RoundedPolygon, OpenPolyline>;

/// Shape in its local frame plus the placement of that frame in the world.
struct ContourSpec {
  ContourShape shape = Circle{};
  Pose2D placement{};
};

struct ClosestPointResult {
  Vec2 point = Vec2::Zero();
  /// Signed: negative inside the solid.
  double distance = 0.0;
  /// Arc-length coordinate of `point` along the boundary, measured from the
  /// path start. Outside [0, perimeter] only on the rays of an open wall.
  double arc_length = 0.0;
};

/// Validated boundary of a ContourSpec, compiled into straight segments and
/// circular arcs in world coordinates. The boundary is G1 everywhere, so the
/// side of a query point is decided by the tangent at its closest point.
class Contour {
 public:
  /// Throws Error(kInvalidArgument) when the spec violates its invariants.
  explicit Contour(ContourSpec spec);

  const ContourSpec& spec() const { return spec_; }
  bool closed() const { return closed_; }

  /// Length of the finite boundary (rays excluded).
  double perimeter() const { return perimeter_; }

  double signed_distance(const Vec2& p) const;
  ClosestPointResult closest_point(const Vec2& p) const;

  /// Boundary point at arc length s (clamped to [0, perimeter]).
  Vec2 point_at(double s) const;

  /// Unit tangent in the travel direction at arc length s.
  Vec2 tangent_at(double s) const;

 private:
  struct Primitive {
    enum class Kind { kSegment, kArc } kind = Kind::kSegment;
    // Segment.
    Vec2 a = Vec2::Zero();
    Vec2 b = Vec2::Zero();
    Vec2 dir = Vec2::UnitX();
    bool ray_before = false;
    bool ray_after = false;
    // Arc.
    Vec2 center = Vec2::Zero();
    double radius = 0.0;
    double start_angle = 0.0;
    double sweep = 0.0;
    // Shared.
    double length = 0.0;
    double s0 = 0.0;
  };

  struct Candidate {
    Vec2 point;
    Vec2 tangent;
    double distance;
    double arc_length;
  };

  Candidate nearest(const Vec2& p) const;
  static Candidate project(const Primitive& prim, const Vec2& p);

  void build_circle(const Circle& c);
  void build_convex(const std::vector<Vec2>& inner, double radius);
  void build_polyline(const OpenPolyline& w);
  void push_segment(const Vec2& a, const Vec2& b, const Vec2& dir);
  void push_arc(const Vec2& center, double radius, double start, double sweep);

  ContourSpec spec_;
  std::vector<Primitive> prims_;
  bool closed_ = true;
  double perimeter_ = 0.0;
};

inline double signed_distance(const Contour& contour, const Vec2& p) {
  return contour.signed_distance(p);
}
inline ClosestPointResult closest_point(const Contour& contour, const Vec2& p) {
  return contour.closest_point(p);
}

/// Vertices (counter-clockwise) of the inner polygon whose Minkowski sum with
/// a disc of the corner radius is the rounded shape.
std::vector<Vec2> inner_polygon(const RoundedRectangle& r);
std::vector<Vec2> inner_polygon(const RoundedPolygon& p);

}  // namespace whisker
