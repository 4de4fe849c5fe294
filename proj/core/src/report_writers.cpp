#include "whisker/report_writers.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>

#include "whisker/error.hpp"

namespace whisker {

namespace {

std::string num(double v) {
  if (!std::isfinite(v)) return "nan";
  return fmt::format("{:.6f}", v);
}

std::string opt_xy(const std::optional<Vec2>& p) {
  if (!p) return ",";
  return num(p->x()) + "," + num(p->y());
}

struct Box {
  double x0, x1, y0, y1;
};

/// Maps data coordinates into an SVG viewport with a uniform or independent
/// scale.
class Frame {
 public:
  Frame(Box data, double width, double height, double margin, bool uniform)
      : data_(data), width_(width), height_(height), margin_(margin) {
    sx_ = (width_ - 2 * margin_) / std::max(1e-9, data_.x1 - data_.x0);
    sy_ = (height_ - 2 * margin_) / std::max(1e-9, data_.y1 - data_.y0);
    if (uniform) sx_ = sy_ = std::min(sx_, sy_);
  }
  double x(double v) const { return margin_ + (v - data_.x0) * sx_; }
  double y(double v) const { return height_ - margin_ - (v - data_.y0) * sy_; }

 private:
  Box data_;
  double width_, height_, margin_;
  double sx_ = 1.0, sy_ = 1.0;
};

std::string svg_open(double w, double h) {
  return fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\">\n"
      "<rect width=\"{0}\" height=\"{1}\" fill=\"white\"/>\n",
      w, h);
}

}  // namespace

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::string trial_csv(const TrialRecord& record) {
  std::string out =
      "tick,time,x,y,heading,z,curvature,contact,collision,raw_x,raw_y,filtered_x,filtered_y,keypoint,theta,v_x,v_y\n";
  for (const auto& t : record.ticks) {
    out += fmt::format("{},{},{},{},{},{},{:.9f},{},{},{},{},{},{},{},{}\n", t.tick, num(t.time),
                       num(t.pose.position.x()), num(t.pose.position.y()), num(t.pose.heading), num(t.z),
                       t.curvature, to_string(t.contact_kind), t.collision ? 1 : 0, opt_xy(t.raw_tip),
                       opt_xy(t.filtered_tip), t.keypoint ? 1 : 0, num(t.command.target_orientation),
                       num(t.command.v_x), num(t.command.v_y));
  }
  return out;
}

std::string filter_trace_csv(const std::vector<FilterTraceRow>& rows) {
  std::string out =
      "step,prior_x,prior_y,prior_var_x,prior_var_y,meas_x,meas_y,r_x,r_y,k_x,k_y,post_x,post_y,post_var_x,"
      "post_var_y\n";
  auto e = [](double v) { return fmt::format("{:.9e}", v); };
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.step, num(r.prior_mean.x()),
                       num(r.prior_mean.y()), e(r.prior_variance.x()), e(r.prior_variance.y()),
                       num(r.measurement.x()), num(r.measurement.y()), e(r.noise.x()), e(r.noise.y()),
                       e(r.gain.x()), e(r.gain.y()), num(r.posterior_mean.x()), num(r.posterior_mean.y()),
                       e(r.posterior_variance.x()), e(r.posterior_variance.y()));
  }
  return out;
}

std::string sweep_csv(const std::vector<SweepTrial>& trials) {
  std::string out = "distance,mean,std,max,slip,points,failed\n";
  for (const auto& t : trials) {
    out += fmt::format("{},{},{},{},{},{},{}\n", num(t.distance), num(t.metrics.mean_abs_error),
                       num(t.metrics.std_error), num(t.metrics.max_error), t.slipped ? 1 : 0, t.metrics.points,
                       t.metrics.failed ? 1 : 0);
  }
  return out;
}

std::string sweep_svg(const std::vector<SweepTrial>& trials) {
  constexpr double kW = 640, kH = 400, kM = 50;
  double top = 0.0;
  for (const auto& t : trials) {
    for (double e : t.errors) top = std::max(top, e);
  }
  top = top > 0.0 ? top * 1.1 : 1.0;
  const double n = static_cast<double>(std::max<std::size_t>(1, trials.size()));
  const Frame f({0.0, n, 0.0, top}, kW, kH, kM, false);
  std::string out = svg_open(kW, kH);
  out += fmt::format(
      "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" stroke=\"black\"/>\n"
      "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{3:.2f}\" stroke=\"black\"/>\n",
      f.x(0), f.y(0), f.x(n), f.y(top));
  for (int i = 0; i <= 4; ++i) {
    const double v = top * i / 4.0;
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"11\" text-anchor=\"end\">{:.2f}</text>\n",
                       f.x(0) - 4, f.y(v) + 4, v);
  }
  out += fmt::format("<text x=\"14\" y=\"{:.2f}\" font-size=\"12\" transform=\"rotate(-90 14 {:.2f})\">error (mm)</text>\n",
                     kH / 2, kH / 2);
  out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"12\" text-anchor=\"middle\">contact distance (mm)</text>\n",
                     kW / 2, kH - 10);
  out += "<g id=\"boxes\">\n";
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const auto& t = trials[i];
    const double c = static_cast<double>(i) + 0.5;
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"11\" text-anchor=\"middle\">{:g}</text>\n", f.x(c),
                       f.y(0) + 16, t.distance);
    if (t.errors.empty()) continue;
    const double lo = quantile(t.errors, 0.0), q1 = quantile(t.errors, 0.25), med = quantile(t.errors, 0.5);
    const double q3 = quantile(t.errors, 0.75), hi = quantile(t.errors, 1.0);
    const double half = 0.3;
    out += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"black\"/>\n",
                       f.x(c), f.y(lo), f.y(hi));
    out += fmt::format(
        "<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"{}\" stroke=\"black\"/>\n",
        f.x(c - half), f.y(q3), f.x(c + half) - f.x(c - half), std::max(0.5, f.y(q1) - f.y(q3)),
        t.slipped ? "#f4a582" : "#92c5de");
    out += fmt::format("<line x1=\"{0:.2f}\" y1=\"{2:.2f}\" x2=\"{1:.2f}\" y2=\"{2:.2f}\" stroke=\"black\" stroke-width=\"2\"/>\n",
                       f.x(c - half), f.x(c + half), f.y(med));
  }
  out += "</g>\n</svg>\n";
  return out;
}

std::string contour_overlay_svg(const Contour& contour, const TrialRecord& record) {
  constexpr double kW = 640, kH = 640, kM = 30;
  std::vector<Vec2> truth;
  const double perimeter = contour.perimeter();
  const int samples = std::max(2, static_cast<int>(std::ceil(perimeter / 0.5)));
  for (int i = 0; i <= samples; ++i) truth.push_back(contour.point_at(perimeter * i / samples));

  Box box{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  auto grow = [&](const Vec2& p) {
    box.x0 = std::min(box.x0, p.x());
    box.x1 = std::max(box.x1, p.x());
    box.y0 = std::min(box.y0, p.y());
    box.y1 = std::max(box.y1, p.y());
  };
  for (const auto& p : truth) grow(p);
  for (const auto& t : record.ticks) grow(t.pose.position);
  const Frame f(box, kW, kH, kM, true);

  std::string out = svg_open(kW, kH);
  auto polyline = [&](const std::vector<Vec2>& pts, const char* id, const char* style) {
    std::string s = fmt::format("<polyline id=\"{}\" fill=\"none\" {} points=\"", id, style);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      s += fmt::format("{}{:.2f},{:.2f}", i ? " " : "", f.x(pts[i].x()), f.y(pts[i].y()));
    }
    return s + "\"/>\n";
  };
  out += polyline(truth, "ground-truth", "stroke=\"black\" stroke-width=\"2\"");
  std::vector<Vec2> path;
  for (const auto& t : record.ticks) path.push_back(t.pose.position);
  if (!path.empty()) out += polyline(path, "sensor-path", "stroke=\"#999999\" stroke-dasharray=\"4 3\"");
  out += "<g id=\"reconstructed\" fill=\"#d6604d\">\n";
  for (const auto& p : record.reconstructed()) {
    out += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"1.2\"/>\n", f.x(p.x()), f.y(p.y()));
  }
  out += "</g>\n</svg>\n";
  return out;
}

}  // namespace whisker
