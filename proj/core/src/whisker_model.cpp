#include "whisker/whisker_model.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "whisker/error.hpp"

namespace whisker {

void WhiskerParams::validate() const {
  auto fail = [](const std::string& what) { throw Error(Errc::kInvalidArgument, "whisker params: " + what); };
  if (!(shaft_length > 0.0)) fail("shaft_length must be > 0");
  if (!(curvature_max > 0.0)) fail("curvature_max must be > 0");
  if (!(curvature_max * shaft_length < kPi)) fail("curvature_max * shaft_length must be < pi");
  if (arc_samples < 16) fail("arc_samples must be >= 16");
  if (!(noise_std >= 0.0)) fail("noise_std must be >= 0");
  if (!std::isfinite(measurement_gain) || measurement_gain == 0.0) fail("measurement_gain must be finite, nonzero");
  if (!std::isfinite(static_offset)) fail("static_offset must be finite");
}

const char* to_string(ContactKind kind) {
  switch (kind) {
    case ContactKind::kNone: return "none";
    case ContactKind::kTip: return "tip";
    case ContactKind::kTangential: return "tangential";
  }
  return "none";
}

double NoiseSource::gaussian(double sigma) {
  if (sigma <= 0.0) return 0.0;
  std::normal_distribution<double> dist(0.0, sigma);
  return dist(engine_);
}

Vec2 arc_point(double curvature, double s) {
  const double phi = curvature * s;
  if (std::abs(phi) < 1e-6) {
    // Series of sin(phi)/k and (1 - cos(phi))/k.
    return {s * (1.0 - phi * phi / 6.0), 0.5 * s * phi * (1.0 - phi * phi / 12.0)};
  }
  return {std::sin(phi) / curvature, (1.0 - std::cos(phi)) / curvature};
}

Vec2 arc_tangent(double curvature, double s) {
  const double phi = curvature * s;
  return {std::cos(phi), std::sin(phi)};
}

double curvature_from_contact(const Vec2& contact) {
  const double r2 = contact.squaredNorm();
  if (r2 < 1e-12) throw Error(Errc::kDegenerateInput, "curvature_from_contact: contact at the root");
  return 2.0 * contact.y() / r2;
}

double arc_length_to_contact(const Vec2& contact) {
  const double k = curvature_from_contact(contact);
  if (std::abs(k) < 1e-12) return contact.norm();
  double angle = std::atan2(contact.x(), 1.0 / k - contact.y());
  if (k < 0.0) angle = std::atan2(contact.x(), contact.y() - 1.0 / k);
  if (angle < 0.0) angle += 2.0 * kPi;
  return angle / std::abs(k);
}

Measurement measurement_from_curvature(double curvature, const WhiskerParams& params, NoiseSource* noise) {
  double z = params.static_offset - params.measurement_gain * curvature;
  if (noise != nullptr) z += noise->gaussian(params.noise_std);
  return {z};
}

double curvature_from_measurement(double z, const WhiskerParams& params) {
  return (params.static_offset - z) / params.measurement_gain;
}

namespace {

struct Clearance {
  double min_distance;
  int binding_index;
};

Clearance shaft_clearance(const Pose2D& pose, const Contour& contour, const WhiskerParams& params,
                          double curvature) {
  Clearance c{std::numeric_limits<double>::infinity(), 0};
  const int n = params.arc_samples;
  for (int i = 0; i < n; ++i) {
    const double s = params.shaft_length * static_cast<double>(i) / (n - 1);
    const double d = contour.signed_distance(to_world(pose, arc_point(curvature, s)));
    // Ties go to the sample nearest the tip.
    if (d <= c.min_distance) {
      c.min_distance = d;
      c.binding_index = i;
    }
  }
  return c;
}

constexpr double kPenetrationTol = 1e-6;

/// Any sample deeper than the tolerance; scans from the tip, where
/// penetration usually starts.
bool penetrates(const Pose2D& pose, const Contour& contour, const WhiskerParams& params, double curvature) {
  const int n = params.arc_samples;
  for (int i = n - 1; i >= 0; --i) {
    const double s = params.shaft_length * static_cast<double>(i) / (n - 1);
    if (contour.signed_distance(to_world(pose, arc_point(curvature, s))) < -kPenetrationTol) return true;
  }
  return false;
}

}  // namespace

WhiskerState solve_contact(const Pose2D& pose, const Contour& contour, const WhiskerParams& params) {
  WhiskerState state;
  double curvature = 0.0;
  Clearance binding{};
  if (!penetrates(pose, contour, params, 0.0)) {
    binding = shaft_clearance(pose, contour, params, 0.0);
    if (binding.min_distance > kPenetrationTol) return state;
  } else {
    if (penetrates(pose, contour, params, params.curvature_max)) {
      throw Error(Errc::kUnresolvableContact, "solve_contact: shaft penetrates even at curvature_max");
    }
    double lo = 0.0;
    double hi = params.curvature_max;
    while (hi - lo >= 1e-9) {
      const double mid = 0.5 * (lo + hi);
      if (penetrates(pose, contour, params, mid)) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    curvature = hi;
    binding = shaft_clearance(pose, contour, params, curvature);
  }

  const int last = params.arc_samples - 1;
  const double s = params.shaft_length * static_cast<double>(binding.binding_index) / last;
  state.curvature = curvature;
  state.contact_s = s;
  state.contact_kind = binding.binding_index == last ? ContactKind::kTip : ContactKind::kTangential;
  state.contact_point_world = to_world(pose, arc_point(curvature, s));
  return state;
}

double ArcMeasurementField::value(const Vec2& p) const {
  const double r2 = p.squaredNorm();
  if (r2 == 0.0) return params_.static_offset;
  return params_.static_offset - params_.measurement_gain * 2.0 * p.y() / r2;
}

Vec2 ArcMeasurementField::gradient(const Vec2& p) const {
  const double r2 = p.squaredNorm();
  if (r2 == 0.0) return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
  const double r4 = r2 * r2;
  // d/dx (2y/r^2) = -4xy/r^4 ; d/dy (2y/r^2) = 2(x^2 - y^2)/r^4
  const double dkx = -4.0 * p.x() * p.y() / r4;
  const double dky = 2.0 * (p.x() * p.x() - p.y() * p.y()) / r4;
  return {-params_.measurement_gain * dkx, -params_.measurement_gain * dky};
}

}  // namespace whisker
