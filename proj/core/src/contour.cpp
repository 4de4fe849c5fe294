#include "whisker/contour.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "whisker/error.hpp"

namespace whisker {
namespace {

constexpr double kTwoPi = 2.0 * kPi;

double wrap_two_pi(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  return a;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(Errc::kInvalidArgument, "contour: " + what);
}

Vec2 unit_polar(double angle) { return {std::cos(angle), std::sin(angle)}; }

}  // namespace

std::vector<Vec2> inner_polygon(const RoundedRectangle& r) {
  const double a = 0.5 * r.width - r.corner_radius;
  const double b = 0.5 * r.height - r.corner_radius;
  return {{-a, -b}, {a, -b}, {a, b}, {-a, b}};
}

std::vector<Vec2> inner_polygon(const RoundedPolygon& p) {
  const double half = kPi / p.sides;
  const double apothem = 0.5 * p.side_length / std::tan(half) - p.corner_radius;
  const double circumradius = apothem / std::cos(half);
  std::vector<Vec2> v;
  v.reserve(p.sides);
  for (int k = 0; k < p.sides; ++k) {
    v.push_back(circumradius * unit_polar(-0.5 * kPi - half + 2.0 * half * k));
  }
  return v;
}

Contour::Contour(ContourSpec spec) : spec_(std::move(spec)) {
  require(std::isfinite(spec_.placement.position.x()) && std::isfinite(spec_.placement.position.y()) &&
              std::isfinite(spec_.placement.heading),
          "placement must be finite");

  std::visit(
      [this](const auto& shape) {
        using T = std::decay_t<decltype(shape)>;
        if constexpr (std::is_same_v<T, Circle>) {
          require(shape.radius > 0.0, "circle radius must be > 0");
          build_circle(shape);
        } else if constexpr (std::is_same_v<T, RoundedRectangle>) {
          require(shape.width > 0.0 && shape.height > 0.0, "rectangle sides must be > 0");
          require(shape.corner_radius > 0.0, "corner radius must be > 0");
          require(shape.corner_radius <= 0.5 * std::min(shape.width, shape.height) + 1e-12,
                  "corner radius exceeds half the shortest side");
          build_convex(inner_polygon(shape), shape.corner_radius);
        } else if constexpr (std::is_same_v<T, RoundedPolygon>) {
          require(shape.sides >= 3, "polygon needs at least 3 sides");
          require(shape.side_length > 0.0, "side length must be > 0");
          require(shape.corner_radius > 0.0, "corner radius must be > 0");
          require(shape.corner_radius * std::tan(kPi / shape.sides) <= 0.5 * shape.side_length + 1e-12,
                  "corner radius too large for the side length");
          build_convex(inner_polygon(shape), shape.corner_radius);
        } else {
          build_polyline(shape);
        }
      },
      spec_.shape);

  // Move every primitive from the shape frame into the world.
  const Pose2D& pose = spec_.placement;
  for (auto& prim : prims_) {
    prim.a = to_world(pose, prim.a);
    prim.b = to_world(pose, prim.b);
    prim.dir = rotate(prim.dir, pose.heading);
    prim.center = to_world(pose, prim.center);
    prim.start_angle += pose.heading;
  }
}

void Contour::push_segment(const Vec2& a, const Vec2& b, const Vec2& dir) {
  Primitive p;
  p.kind = Primitive::Kind::kSegment;
  p.a = a;
  p.b = b;
  p.dir = dir;
  p.length = (b - a).norm();
  p.s0 = perimeter_;
  perimeter_ += p.length;
  prims_.push_back(p);
}

void Contour::push_arc(const Vec2& center, double radius, double start, double sweep) {
  Primitive p;
  p.kind = Primitive::Kind::kArc;
  p.center = center;
  p.radius = radius;
  p.start_angle = start;
  p.sweep = sweep;
  p.length = radius * std::abs(sweep);
  p.s0 = perimeter_;
  perimeter_ += p.length;
  prims_.push_back(p);
}

void Contour::build_circle(const Circle& c) {
  closed_ = true;
  // Starts at local -Y so the path origin matches the polygon shapes.
  push_arc(Vec2::Zero(), c.radius, -0.5 * kPi, kTwoPi);
}

void Contour::build_convex(const std::vector<Vec2>& inner, double radius) {
  closed_ = true;
  struct Edge {
    Vec2 a, b, dir, normal;
  };
  std::vector<Edge> edges;
  const std::size_t n = inner.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = inner[i];
    const Vec2& b = inner[(i + 1) % n];
    const double len = (b - a).norm();
    if (len <= 1e-12) continue;
    const Vec2 dir = (b - a) / len;
    edges.push_back({a, b, dir, Vec2{dir.y(), -dir.x()}});
  }
  if (edges.empty()) {
    // Inner polygon collapsed to a point: a plain disc.
    push_arc(inner.front(), radius, -0.5 * kPi, kTwoPi);
    return;
  }
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Edge& e = edges[i];
    const Edge& next = edges[(i + 1) % edges.size()];
    push_segment(e.a + radius * e.normal, e.b + radius * e.normal, e.dir);
    const double start = std::atan2(e.normal.y(), e.normal.x());
    double sweep = wrap_two_pi(std::atan2(next.normal.y(), next.normal.x()) - start);
    if (sweep > 1e-12) push_arc(e.b, radius, start, sweep);
  }
}

void Contour::build_polyline(const OpenPolyline& w) {
  closed_ = false;
  const auto& v = w.vertices;
  require(v.size() >= 2, "polyline needs at least 2 vertices");
  require(w.fillet_radius > 0.0, "fillet radius must be > 0");
  for (const auto& p : v) require(std::isfinite(p.x()) && std::isfinite(p.y()), "vertices must be finite");

  const std::size_t m = v.size() - 1;  // segment count
  std::vector<Vec2> dirs(m);
  std::vector<double> lens(m);
  for (std::size_t i = 0; i < m; ++i) {
    lens[i] = (v[i + 1] - v[i]).norm();
    require(lens[i] > 1e-9, "consecutive vertices must be distinct");
    dirs[i] = (v[i + 1] - v[i]) / lens[i];
  }
  // Tangent length consumed by the fillet at each vertex (zero at the ends).
  std::vector<double> cut(v.size(), 0.0);
  std::vector<double> turn(v.size(), 0.0);
  for (std::size_t i = 1; i < m + 1 && i < v.size() - 1; ++i) {
    turn[i] = std::atan2(cross(dirs[i - 1], dirs[i]), dirs[i - 1].dot(dirs[i]));
    require(std::abs(turn[i]) < kPi - 1e-9, "polyline reverses direction");
    cut[i] = w.fillet_radius * std::tan(0.5 * std::abs(turn[i]));
  }
  for (std::size_t i = 0; i < m; ++i) {
    require(cut[i] + cut[i + 1] <= lens[i] + 1e-9, "fillet radius too large for segment " + std::to_string(i));
  }

  for (std::size_t i = 0; i < m; ++i) {
    const Vec2 a = v[i] + cut[i] * dirs[i];
    const Vec2 b = v[i + 1] - cut[i + 1] * dirs[i];
    push_segment(a, b, dirs[i]);
    if (i == 0) prims_.back().ray_before = true;
    if (i + 1 == m) {
      prims_.back().ray_after = true;
      break;
    }
    const double phi = turn[i + 1];
    if (std::abs(phi) <= 1e-12) continue;
    const double side = phi > 0.0 ? 1.0 : -1.0;
    const Vec2 center = b + side * w.fillet_radius * left_normal(dirs[i]);
    const Vec2 radial = b - center;
    push_arc(center, w.fillet_radius, std::atan2(radial.y(), radial.x()), phi);
  }
}

Contour::Candidate Contour::project(const Primitive& prim, const Vec2& p) {
  if (prim.kind == Primitive::Kind::kSegment) {
    double t = (p - prim.a).dot(prim.dir);
    if (!prim.ray_before) t = std::max(t, 0.0);
    if (!prim.ray_after) t = std::min(t, prim.length);
    const Vec2 q = prim.a + t * prim.dir;
    return {q, prim.dir, (p - q).norm(), prim.s0 + t};
  }
  const Vec2 rel = p - prim.center;
  const double phi = std::atan2(rel.y(), rel.x());
  const double orient = prim.sweep > 0.0 ? 1.0 : -1.0;
  const double span = std::abs(prim.sweep);
  double along = wrap_two_pi(orient * (phi - prim.start_angle));
  if (along > span) {
    // Outside the arc's angular span: nearer endpoint.
    const Vec2 start = prim.center + prim.radius * unit_polar(prim.start_angle);
    const Vec2 end = prim.center + prim.radius * unit_polar(prim.start_angle + prim.sweep);
    along = (p - start).squaredNorm() <= (p - end).squaredNorm() ? 0.0 : span;
  }
  const double angle = prim.start_angle + orient * along;
  const Vec2 q = prim.center + prim.radius * unit_polar(angle);
  const Vec2 tangent = orient * Vec2{-std::sin(angle), std::cos(angle)};
  return {q, tangent, (p - q).norm(), prim.s0 + along * prim.radius};
}

Contour::Candidate Contour::nearest(const Vec2& p) const {
  Candidate best{Vec2::Zero(), Vec2::UnitX(), std::numeric_limits<double>::infinity(), 0.0};
  for (const auto& prim : prims_) {
    // Cheap lower bound on the distance to this primitive.
    double bound = 0.0;
    if (prim.kind == Primitive::Kind::kArc) {
      bound = std::abs((p - prim.center).norm() - prim.radius);
    } else if (!prim.ray_before && !prim.ray_after) {
      bound = (p - 0.5 * (prim.a + prim.b)).norm() - 0.5 * prim.length;
    }
    if (bound >= best.distance) continue;
    Candidate c = project(prim, p);
    if (c.distance < best.distance) best = c;
  }
  return best;
}

double Contour::signed_distance(const Vec2& p) const {
  const Candidate c = nearest(p);
  if (c.distance == 0.0) return 0.0;
  return cross(c.tangent, p - c.point) > 0.0 ? -c.distance : c.distance;
}

ClosestPointResult Contour::closest_point(const Vec2& p) const {
  const Candidate c = nearest(p);
  double d = c.distance;
  if (d != 0.0 && cross(c.tangent, p - c.point) > 0.0) d = -d;
  return {c.point, d, c.arc_length};
}

Vec2 Contour::point_at(double s) const {
  s = std::clamp(s, 0.0, perimeter_);
  for (const auto& prim : prims_) {
    if (s > prim.s0 + prim.length && &prim != &prims_.back()) continue;
    const double local = std::clamp(s - prim.s0, 0.0, prim.length);
    if (prim.kind == Primitive::Kind::kSegment) return prim.a + local * prim.dir;
    const double orient = prim.sweep > 0.0 ? 1.0 : -1.0;
    return prim.center + prim.radius * unit_polar(prim.start_angle + orient * local / prim.radius);
  }
  return prims_.back().b;
}

Vec2 Contour::tangent_at(double s) const {
  s = std::clamp(s, 0.0, perimeter_);
  for (const auto& prim : prims_) {
    if (s > prim.s0 + prim.length && &prim != &prims_.back()) continue;
    if (prim.kind == Primitive::Kind::kSegment) return prim.dir;
    const double orient = prim.sweep > 0.0 ? 1.0 : -1.0;
    const double angle = prim.start_angle + orient * std::clamp(s - prim.s0, 0.0, prim.length) / prim.radius;
    return orient * Vec2{-std::sin(angle), std::cos(angle)};
  }
  return prims_.back().dir;
}

}  // namespace whisker
