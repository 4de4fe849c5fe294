#include "whisker/calibration.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fmt/format.h>

#include "whisker/error.hpp"

namespace whisker {

Region default_calibration_region() { return {16.0, 76.0, 1.0, 40.0}; }

namespace {

// Lattice coordinates lo, lo + step, ... up to hi (inclusive within 1e-9).
std::vector<double> lattice(double lo, double hi, double step) {
  std::vector<double> out;
  const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1;
  for (long i = 0; i < count; ++i) out.push_back(lo + step * static_cast<double>(i));
  return out;
}

// Highest lateral tip excursion over admissible curvatures.
double reach_y(const WhiskerParams& params) {
  const double turn = params.curvature_max * params.shaft_length;
  if (turn >= 0.5 * kPi) return 1.0 / params.curvature_max;
  return arc_point(params.curvature_max, params.shaft_length).y();
}

constexpr double kDomainPad = 2.0;

}  // namespace

CalibrationGrid sample_grid(const WhiskerParams& params, const Region& region, double step, std::uint64_t seed) {
  params.validate();
  if (!(step > 0.0)) throw Error(Errc::kInvalidArgument, "sample_grid: step must be > 0");
  if (!(region.x_max >= region.x_min && region.y_max >= region.y_min)) {
    throw Error(Errc::kInvalidArgument, "sample_grid: region bounds are inverted");
  }
  if (!(region.y_min > 0.0)) {
    throw Error(Errc::kInvalidArgument, "sample_grid: region must lie on the +Y side (y_min > 0)");
  }

  CalibrationGrid grid;
  grid.region = region;
  grid.step = step;
  grid.seed = seed;
  grid.rest_measurement = params.static_offset;
  grid.domain = {std::min(region.x_min, 0.0) - kDomainPad, std::max(region.x_max, params.shaft_length) + kDomainPad,
                 std::min(region.y_min, 0.0) - kDomainPad, std::max(region.y_max, reach_y(params)) + kDomainPad};

  NoiseSource noise(seed);
  for (double x : lattice(region.x_min, region.x_max, step)) {
    for (double y : lattice(region.y_min, region.y_max, step)) {
      const Vec2 c{x, y};
      if (c.squaredNorm() < 1e-12) continue;
      const double k = curvature_from_contact(c);
      if (k > params.curvature_max) continue;
      grid.samples.push_back({x, y, measurement_from_curvature(k, params, &noise).z});
    }
  }
  if (grid.samples.empty()) throw Error(Errc::kEmptyGrid, "sample_grid: region contains no reachable contact");
  return grid;
}

std::pair<int, int> PolyModel::exponents(int k) {
  int i = 0;
  while (k > kOrder - i) {
    k -= kOrder - i + 1;
    ++i;
  }
  return {i, k};
}

PolyModel::PolyModel(const Coefficients& coeffs, const Vec2& center, const Vec2& half_width, const Region& domain,
                     double rest_measurement, std::pair<double, double> measured_range)
    : coeffs_(coeffs),
      center_(center),
      half_width_(half_width),
      domain_(domain),
      rest_(rest_measurement),
      measured_range_(measured_range) {}

void PolyModel::check_domain(const Vec2& p) const {
  if (!domain_.contains(p)) {
    throw Error(Errc::kOutOfDomain, fmt::format("poly model: ({:.4f}, {:.4f}) outside domain", p.x(), p.y()));
  }
}

double PolyModel::value(const Vec2& p) const {
  check_domain(p);
  const double u = (p.x() - center_.x()) / half_width_.x();
  const double v = (p.y() - center_.y()) / half_width_.y();
  std::array<double, kOrder + 1> up{1.0}, vp{1.0};
  for (int e = 1; e <= kOrder; ++e) {
    up[e] = up[e - 1] * u;
    vp[e] = vp[e - 1] * v;
  }
  double sum = 0.0;
  int k = 0;
  for (int i = 0; i <= kOrder; ++i) {
    for (int j = 0; j <= kOrder - i; ++j) sum += coeffs_[k++] * up[i] * vp[j];
  }
  return sum;
}

Vec2 PolyModel::gradient(const Vec2& p) const {
  check_domain(p);
  const double u = (p.x() - center_.x()) / half_width_.x();
  const double v = (p.y() - center_.y()) / half_width_.y();
  std::array<double, kOrder + 1> up{1.0}, vp{1.0};
  for (int e = 1; e <= kOrder; ++e) {
    up[e] = up[e - 1] * u;
    vp[e] = vp[e - 1] * v;
  }
  double du = 0.0;
  double dv = 0.0;
  int k = 0;
  for (int i = 0; i <= kOrder; ++i) {
    for (int j = 0; j <= kOrder - i; ++j, ++k) {
      if (i > 0) du += coeffs_[k] * i * up[i - 1] * vp[j];
      if (j > 0) dv += coeffs_[k] * j * up[i] * vp[j - 1];
    }
  }
  return {du / half_width_.x(), dv / half_width_.y()};
}

FitReport fit_report(const std::vector<double>& observed, const std::vector<double>& predicted) {
  const std::size_t n = observed.size();
  double mean = 0.0;
  for (double z : observed) mean += z;
  mean /= static_cast<double>(n);
  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ss_res += (observed[i] - predicted[i]) * (observed[i] - predicted[i]);
    ss_tot += (observed[i] - mean) * (observed[i] - mean);
  }
  FitReport r;
  r.rmse = std::sqrt(ss_res / static_cast<double>(n));
  r.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
  return r;
}

PolyFit fit_poly(const CalibrationGrid& grid) {
  const auto n = static_cast<Eigen::Index>(grid.samples.size());
  if (n < PolyModel::kTerms) {
    throw Error(Errc::kInvalidArgument,
                fmt::format("fit_poly: need at least {} samples, got {}", PolyModel::kTerms, n));
  }
  Vec2 center = grid.region.center();
  Vec2 half = grid.region.half_width();
  // A degenerate region (single row or column) still gets a usable scale;
  // the rank check below rejects it.
  if (half.x() <= 0.0) half.x() = 1.0;
  if (half.y() <= 0.0) half.y() = 1.0;

  Eigen::MatrixXd design(n, PolyModel::kTerms);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& s = grid.samples[static_cast<std::size_t>(r)];
    const double u = (s.x - center.x()) / half.x();
    const double v = (s.y - center.y()) / half.y();
    for (int k = 0; k < PolyModel::kTerms; ++k) {
      const auto [i, j] = PolyModel::exponents(k);
      design(r, k) = std::pow(u, i) * std::pow(v, j);
    }
    rhs(r) = s.z;
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(1e-10);
  if (qr.rank() < PolyModel::kTerms) {
    throw Error(Errc::kRankDeficient,
                fmt::format("fit_poly: design matrix rank {} < {}", qr.rank(), PolyModel::kTerms));
  }
  const Eigen::VectorXd solution = qr.solve(rhs);

  PolyModel::Coefficients coeffs{};
  for (int k = 0; k < PolyModel::kTerms; ++k) coeffs[k] = solution(k);

  std::vector<double> observed(grid.samples.size());
  std::vector<double> predicted(grid.samples.size());
  const Eigen::VectorXd fitted = design * solution;
  double z_min = rhs.minCoeff();
  double z_max = rhs.maxCoeff();
  for (Eigen::Index r = 0; r < n; ++r) {
    observed[static_cast<std::size_t>(r)] = rhs(r);
    predicted[static_cast<std::size_t>(r)] = fitted(r);
  }

  Region domain = grid.domain;
  if (domain.x_max <= domain.x_min || domain.y_max <= domain.y_min) domain = grid.region;
  PolyFit fit{PolyModel(coeffs, center, half, domain, grid.rest_measurement, {z_min, z_max}),
              fit_report(observed, predicted)};
  return fit;
}

double eval_poly(const PolyModel& model, const Vec2& p) { return model.value(p); }
Vec2 grad_poly(const PolyModel& model, const Vec2& p) { return model.gradient(p); }

}  // namespace whisker
