#include "whisker/tip_localization.hpp"

#include <Eigen/Dense>

namespace whisker {

void TraceConfig::validate() const {
  if (!(step_size > 0.0)) throw Error(Errc::kInvalidArgument, "trace config: step_size must be > 0");
  if (!(loss_blend > 0.0 && loss_blend <= 1.0)) {
    throw Error(Errc::kInvalidArgument, "trace config: loss_blend must be in (0, 1]");
  }
  if (max_steps && *max_steps <= 0) throw Error(Errc::kInvalidArgument, "trace config: max_steps must be > 0");
}

long TraceConfig::resolved_max_steps(double length) const {
  if (max_steps) return *max_steps;
  return static_cast<long>(std::ceil(1.5 * length / step_size));
}

ScaledPolynomial ScaledPolynomial::fit(const std::vector<double>& t, const std::vector<double>& y, int degree) {
  if (degree < 0) throw Error(Errc::kInvalidArgument, "polynomial degree must be >= 0");
  if (t.size() != y.size() || t.size() < static_cast<std::size_t>(degree + 1)) {
    throw Error(Errc::kInvalidArgument, fmt::format("need at least {} points for degree {}", degree + 1, degree));
  }
  const auto [lo, hi] = std::minmax_element(t.begin(), t.end());
  const double center = 0.5 * (*lo + *hi);
  const double half = *hi > *lo ? 0.5 * (*hi - *lo) : 1.0;

  const auto n = static_cast<Eigen::Index>(t.size());
  Eigen::MatrixXd vander(n, degree + 1);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const double u = (t[static_cast<std::size_t>(r)] - center) / half;
    double power = 1.0;
    for (int c = 0; c <= degree; ++c) {
      vander(r, c) = power;
      power *= u;
    }
    rhs(r) = y[static_cast<std::size_t>(r)];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(vander);
  if (qr.rank() < degree + 1) throw Error(Errc::kRankDeficient, "polynomial fit: rank deficient");
  const Eigen::VectorXd sol = qr.solve(rhs);
  return ScaledPolynomial(std::vector<double>(sol.data(), sol.data() + sol.size()), center, half);
}

double ScaledPolynomial::operator()(double t) const {
  const double u = (t - center_) / half_width_;
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * u + *it;
  return acc;
}

std::pair<double, double> valid_measurement_range(const PolyModel& model) {
  const double lo = model.measured_range().first;
  const double hi = model.rest_measurement();
  return {std::min(lo, hi), std::max(lo, hi)};
}

CharacterizedModel build_characterized_model(const PolyModel& model, double length, int n_samples, int degree,
                                             const TraceConfig& cfg) {
  if (n_samples < degree + 1) {
    throw Error(Errc::kInvalidArgument,
                fmt::format("characterized model: n_samples {} < degree + 1 = {}", n_samples, degree + 1));
  }
  const auto [z_lo, z_hi] = valid_measurement_range(model);
  CharacterizedModel cm;
  cm.z_min = z_lo;
  cm.z_max = z_hi;
  cm.rest_measurement = model.rest_measurement();
  cm.shaft_length = length;

  std::vector<double> xs;
  std::vector<double> ys;
  for (int i = 0; i < n_samples; ++i) {
    const double z = z_lo + (z_hi - z_lo) * static_cast<double>(i) / (n_samples - 1);
    const TipEstimate tip = trace_tip(model, z, length, cfg);
    cm.anchor_z.push_back(z);
    cm.anchor_tip.push_back(tip.position);
    xs.push_back(tip.position.x());
    ys.push_back(tip.position.y());
  }
  cm.x_of_z = ScaledPolynomial::fit(cm.anchor_z, xs, degree);
  cm.y_of_z = ScaledPolynomial::fit(cm.anchor_z, ys, degree);

  std::vector<double> px;
  std::vector<double> py;
  for (double z : cm.anchor_z) {
    px.push_back(cm.x_of_z(z));
    py.push_back(cm.y_of_z(z));
  }
  cm.x_report = fit_report(xs, px);
  cm.y_report = fit_report(ys, py);
  return cm;
}

TipEstimate tip_from_measurement(const CharacterizedModel& model, double z) {
  if (!model.in_range(z)) {
    throw Error(Errc::kOutOfRange,
                fmt::format("tip_from_measurement: z = {:.3f} outside [{:.3f}, {:.3f}]", z, model.z_min, model.z_max));
  }
  return {{model.x_of_z(z), model.y_of_z(z)}, model.shaft_length, true};
}

}  // namespace whisker
