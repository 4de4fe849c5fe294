#include "whisker/serialization.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "whisker/error.hpp"

namespace whisker {

namespace {

[[noreturn]] void config_error(const std::string& msg) { throw Error(Errc::kConfig, msg); }

/// Reads keys of one JSON object, rejecting unknown keys and wrong types.
class Reader {
 public:
  Reader(const Json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) config_error(where_ + ": expected an object");
  }

  bool has(const char* key) const { return j_.contains(key); }

  const Json& raw(const char* key) {
    used_.insert(key);
    return j_.at(key);
  }

  void get(const char* key, double& out) {
    if (!take(key)) return;
    const Json& v = j_.at(key);
    if (v.is_null()) {
      out = std::numeric_limits<double>::quiet_NaN();
    } else if (v.is_number()) {
      out = v.get<double>();
    } else {
      type_error(key, "a number");
    }
  }
  void get(const char* key, int& out) {
    if (!take(key)) return;
    const Json& v = j_.at(key);
    if (!v.is_number_integer()) type_error(key, "an integer");
    out = v.get<int>();
  }
  void get(const char* key, long& out) {
    if (!take(key)) return;
    const Json& v = j_.at(key);
    if (!v.is_number_integer()) type_error(key, "an integer");
    out = v.get<long>();
  }
  void get(const char* key, std::uint64_t& out) {
    if (!take(key)) return;
    const Json& v = j_.at(key);
    if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<long long>() < 0)) {
      type_error(key, "a non-negative integer");
    }
    out = v.get<std::uint64_t>();
  }
  void get(const char* key, bool& out) {
    if (!take(key)) return;
    const Json& v = j_.at(key);
    if (!v.is_boolean()) type_error(key, "a boolean");
    out = v.get<bool>();
  }
  void get(const char* key, std::string& out) {
    if (!take(key)) return;
    const Json& v = j_.at(key);
    if (!v.is_string()) type_error(key, "a string");
    out = v.get<std::string>();
  }
  void get(const char* key, std::vector<double>& out) {
    if (!take(key)) return;
    const Json& v = j_.at(key);
    if (!v.is_array()) type_error(key, "an array of numbers");
    out.clear();
    for (const auto& e : v) {
      if (!e.is_number()) type_error(key, "an array of numbers");
      out.push_back(e.get<double>());
    }
  }
  void get(const char* key, Vec2& out) {
    if (!take(key)) return;
    out = vec_of(j_.at(key), key);
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.count(it.key())) config_error(where_ + ": unknown key '" + it.key() + "'");
    }
  }

  const std::string& where() const { return where_; }

  Vec2 vec_of(const Json& v, const std::string& key) const {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      type_error(key, "a [x, y] pair");
    }
    return {v[0].get<double>(), v[1].get<double>()};
  }

 private:
  bool take(const char* key) {
    used_.insert(key);
    return j_.contains(key);
  }
  [[noreturn]] void type_error(const std::string& key, const char* expected) const {
    config_error(where_ + "." + key + ": expected " + expected);
  }

  const Json& j_;
  std::string where_;
  std::set<std::string> used_;
};

Json vec_json(const Vec2& v) { return Json::array({v.x(), v.y()}); }

Json region_json(const Region& r) {
  return Json{{"x_min", r.x_min}, {"x_max", r.x_max}, {"y_min", r.y_min}, {"y_max", r.y_max}};
}

Region region_from(const Json& j, const std::string& where) {
  Region r;
  Reader rd(j, where);
  rd.get("x_min", r.x_min);
  rd.get("x_max", r.x_max);
  rd.get("y_min", r.y_min);
  rd.get("y_max", r.y_max);
  rd.finish();
  return r;
}

Json pose_json(const Pose2D& p) {
  return Json{{"x", p.position.x()}, {"y", p.position.y()}, {"heading", p.heading}};
}

Pose2D pose_from(const Json& j, const std::string& where) {
  Reader rd(j, where);
  double x = 0.0;
  double y = 0.0;
  double h = 0.0;
  rd.get("x", x);
  rd.get("y", y);
  rd.get("heading", h);
  rd.finish();
  return Pose2D{x, y, h};
}

void read_whisker(const Json& j, WhiskerParams& p) {
  Reader rd(j, "whisker");
  rd.get("shaft_length", p.shaft_length);
  rd.get("measurement_gain", p.measurement_gain);
  rd.get("static_offset", p.static_offset);
  rd.get("curvature_max", p.curvature_max);
  rd.get("arc_samples", p.arc_samples);
  rd.get("noise_std", p.noise_std);
  rd.finish();
}

Json trace_json(const TraceConfig& t) {
  Json j{{"step_size", t.step_size}, {"loss_blend", t.loss_blend}};
  if (t.max_steps) j["max_steps"] = *t.max_steps;
  return j;
}

void read_trace(const Json& j, TraceConfig& t) {
  Reader rd(j, "calibration.trace");
  rd.get("step_size", t.step_size);
  rd.get("loss_blend", t.loss_blend);
  if (rd.has("max_steps")) {
    long steps = 0;
    rd.get("max_steps", steps);
    t.max_steps = steps;
  }
  rd.finish();
}

Json calibration_json(const CalibrationSettings& c) {
  return Json{{"region", region_json(c.region)},
              {"step", c.step},
              {"characterized_samples", c.characterized_samples},
              {"characterized_degree", c.characterized_degree},
              {"trace", trace_json(c.trace)}};
}

void read_calibration(const Json& j, CalibrationSettings& c) {
  Reader rd(j, "calibration");
  if (rd.has("region")) c.region = region_from(rd.raw("region"), "calibration.region");
  rd.get("step", c.step);
  rd.get("characterized_samples", c.characterized_samples);
  rd.get("characterized_degree", c.characterized_degree);
  if (rd.has("trace")) read_trace(rd.raw("trace"), c.trace);
  rd.finish();
}

void read_control(const Json& j, ControlConfig& c) {
  Reader rd(j, "control");
  rd.get("collision_threshold", c.collision_threshold);
  rd.get("target_deflection", c.target_deflection);
  rd.get("total_velocity", c.total_velocity);
  rd.get("keypoint_count", c.keypoint_count);
  rd.get("keypoint_stride", c.keypoint_stride);
  rd.get("keypoint_min_spacing", c.keypoint_min_spacing);
  rd.get("spline_degree", c.spline_degree);
  if (rd.has("pid")) {
    Reader pid(rd.raw("pid"), "control.pid");
    pid.get("kp", c.pid.kp);
    pid.get("ki", c.pid.ki);
    pid.get("kd", c.pid.kd);
    pid.finish();
  }
  if (rd.has("integral_clamp")) {
    const Json& v = rd.raw("integral_clamp");
    if (v.is_null()) {
      c.integral_clamp.reset();
    } else if (v.is_number()) {
      c.integral_clamp = v.get<double>();
    } else {
      config_error("control.integral_clamp: expected a number or null");
    }
  }
  rd.get("max_turn_rate", c.max_turn_rate);
  rd.get("tangential_sign", c.tangential_sign);
  rd.get("contact_angle", c.contact_angle);
  rd.get("tool_offset", c.tool_offset);
  rd.get("reacquire_turn", c.reacquire_turn);
  rd.get("filter_window", c.filter_window);
  rd.get("process_noise", c.process_noise);
  rd.finish();
}

ContourSpec contour_from(const Json& j, const std::string& where) {
  Reader rd(j, where);
  std::string type;
  rd.get("type", type);
  ContourSpec spec;
  if (rd.has("placement")) spec.placement = pose_from(rd.raw("placement"), where + ".placement");
  if (type == "circle") {
    Circle c;
    rd.get("radius", c.radius);
    spec.shape = c;
  } else if (type == "rounded_rectangle") {
    RoundedRectangle r;
    rd.get("width", r.width);
    r.height = r.width;
    rd.get("height", r.height);
    rd.get("corner_radius", r.corner_radius);
    spec.shape = r;
  } else if (type == "rounded_polygon") {
    RoundedPolygon p;
    rd.get("sides", p.sides);
    rd.get("side_length", p.side_length);
    rd.get("corner_radius", p.corner_radius);
    spec.shape = p;
  } else if (type == "polyline") {
    OpenPolyline w;
    rd.get("fillet_radius", w.fillet_radius);
    if (!rd.has("vertices")) config_error(where + ": polyline needs 'vertices'");
    const Json& vs = rd.raw("vertices");
    if (!vs.is_array()) config_error(where + ".vertices: expected an array");
    for (const auto& v : vs) w.vertices.push_back(rd.vec_of(v, "vertices"));
    spec.shape = w;
  } else {
    config_error(where + ".type: unknown contour type '" + type + "'");
  }
  rd.finish();
  return spec;
}

void read_scenario(const Json& j, ScenarioConfig& s) {
  Reader rd(j, "scenario");
  if (rd.has("preset")) {
    std::string preset;
    rd.get("preset", preset);
    try {
      s = preset_scenario(preset);
    } catch (const Error& e) {
      config_error("scenario.preset: " + std::string(e.what()));
    }
  }
  rd.get("name", s.name);
  if (rd.has("contour")) s.contour = contour_from(rd.raw("contour"), "scenario.contour");
  if (rd.has("start")) s.start = pose_from(rd.raw("start"), "scenario.start");
  rd.get("tick_rate", s.tick_rate);
  rd.get("duration", s.duration);
  rd.get("completion_laps", s.completion_laps);
  rd.finish();
}

Json sweep_json(const SweepConfig& s) {
  return Json{{"distances", s.distances}, {"wall_tilt", s.wall_tilt}, {"speed", s.speed},
              {"travel", s.travel},       {"tick_rate", s.tick_rate}};
}

void read_sweep(const Json& j, SweepConfig& s) {
  Reader rd(j, "sweep");
  rd.get("distances", s.distances);
  rd.get("wall_tilt", s.wall_tilt);
  rd.get("speed", s.speed);
  rd.get("travel", s.travel);
  rd.get("tick_rate", s.tick_rate);
  rd.finish();
}

Json scaled_poly_json(const ScaledPolynomial& p) {
  return Json{{"coefficients", p.coefficients()}, {"center", p.center()}, {"half_width", p.half_width()}};
}

ScaledPolynomial scaled_poly_from(const Json& j, const std::string& where) {
  Reader rd(j, where);
  std::vector<double> coeffs;
  double c = 0.0;
  double h = 1.0;
  rd.get("coefficients", coeffs);
  rd.get("center", c);
  rd.get("half_width", h);
  rd.finish();
  if (coeffs.empty()) config_error(where + ": empty coefficients");
  return ScaledPolynomial(std::move(coeffs), c, h);
}

FitReport fit_report_from(const Json& j, const std::string& where) {
  FitReport r;
  Reader rd(j, where);
  rd.get("rmse", r.rmse);
  rd.get("r_squared", r.r_squared);
  rd.finish();
  return r;
}

void check_header(Reader& rd, const char* format, int version) {
  std::string got_format;
  int got_version = 0;
  rd.get("format", got_format);
  rd.get("version", got_version);
  if (got_format != format) config_error(rd.where() + ": expected format '" + format + "', got '" + got_format + "'");
  if (got_version != version) {
    config_error(rd.where() + ": unsupported version " + std::to_string(got_version));
  }
}

}  // namespace

Json to_json(const WhiskerParams& p) {
  return Json{{"shaft_length", p.shaft_length},   {"measurement_gain", p.measurement_gain},
              {"static_offset", p.static_offset}, {"curvature_max", p.curvature_max},
              {"arc_samples", p.arc_samples},     {"noise_std", p.noise_std}};
}

Json to_json(const ControlConfig& c) {
  Json j{{"collision_threshold", c.collision_threshold},
         {"target_deflection", c.target_deflection},
         {"total_velocity", c.total_velocity},
         {"keypoint_count", c.keypoint_count},
         {"keypoint_stride", c.keypoint_stride},
         {"keypoint_min_spacing", c.keypoint_min_spacing},
         {"spline_degree", c.spline_degree},
         {"pid", {{"kp", c.pid.kp}, {"ki", c.pid.ki}, {"kd", c.pid.kd}}}};
  j["integral_clamp"] = c.integral_clamp ? Json(*c.integral_clamp) : Json(nullptr);
  j["max_turn_rate"] = c.max_turn_rate;
  j["tangential_sign"] = c.tangential_sign;
  j["contact_angle"] = c.contact_angle;
  j["tool_offset"] = c.tool_offset;
  j["reacquire_turn"] = c.reacquire_turn;
  j["filter_window"] = c.filter_window;
  j["process_noise"] = c.process_noise;
  return j;
}

Json to_json(const ContourSpec& c) {
  Json j = std::visit(
      [](const auto& s) -> Json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Circle>) {
          return Json{{"type", "circle"}, {"radius", s.radius}};
        } else if constexpr (std::is_same_v<T, RoundedRectangle>) {
          return Json{{"type", "rounded_rectangle"},
                      {"width", s.width},
                      {"height", s.height},
                      {"corner_radius", s.corner_radius}};
        } else if constexpr (std::is_same_v<T, RoundedPolygon>) {
          return Json{{"type", "rounded_polygon"},
                      {"sides", s.sides},
                      {"side_length", s.side_length},
                      {"corner_radius", s.corner_radius}};
        } else {
          Json vs = Json::array();
          for (const auto& v : s.vertices) vs.push_back(vec_json(v));
          return Json{{"type", "polyline"}, {"vertices", vs}, {"fillet_radius", s.fillet_radius}};
        }
      },
      c.shape);
  j["placement"] = pose_json(c.placement);
  return j;
}

Json to_json(const FitReport& r) { return Json{{"rmse", r.rmse}, {"r_squared", r.r_squared}}; }

Json to_json(const Metrics& m) {
  return Json{{"valid", m.valid},
              {"points", m.points},
              {"mean_abs_error", m.mean_abs_error},
              {"std_error", m.std_error},
              {"max_error", m.max_error},
              {"mean_deflection", m.mean_deflection},
              {"deflection_deviation_pct", m.deflection_deviation_pct},
              {"slip_count", m.slip_count},
              {"coverage_fraction", m.coverage_fraction},
              {"max_detachment_s", m.max_detachment_s},
              {"completed", m.completed},
              {"failed", m.failed},
              {"failure", m.failure}};
}

Metrics metrics_from_json(const Json& j) {
  Metrics m;
  Reader rd(j, "metrics");
  rd.get("valid", m.valid);
  rd.get("points", m.points);
  rd.get("mean_abs_error", m.mean_abs_error);
  rd.get("std_error", m.std_error);
  rd.get("max_error", m.max_error);
  rd.get("mean_deflection", m.mean_deflection);
  rd.get("deflection_deviation_pct", m.deflection_deviation_pct);
  rd.get("slip_count", m.slip_count);
  rd.get("coverage_fraction", m.coverage_fraction);
  rd.get("max_detachment_s", m.max_detachment_s);
  rd.get("completed", m.completed);
  rd.get("failed", m.failed);
  rd.get("failure", m.failure);
  rd.finish();
  return m;
}

ScenarioConfig RunConfig::resolved_scenario() const {
  ScenarioConfig s = scenario;
  s.whisker = whisker;
  s.control = control;
  return s;
}

SweepConfig RunConfig::resolved_sweep() const {
  SweepConfig s = sweep;
  s.whisker = whisker;
  s.control = control;
  return s;
}

void RunConfig::validate() const {
  try {
    whisker.validate();
    calibration.validate();
    control.validate();
    resolved_scenario().validate();
    resolved_sweep().validate();
  } catch (const Error& e) {
    config_error(e.what());
  }
  if (output.directory.empty()) config_error("output.directory: must not be empty");
}

RunConfig run_config_from_json(const Json& j) {
  RunConfig cfg;
  Reader rd(j, "config");
  if (rd.has("version")) {
    int version = 0;
    rd.get("version", version);
    if (version != kConfigFormatVersion) config_error("config: unsupported version " + std::to_string(version));
  }
  rd.get("seed", cfg.seed);
  rd.get("noiseless", cfg.noiseless);
  if (rd.has("whisker")) read_whisker(rd.raw("whisker"), cfg.whisker);
  if (rd.has("calibration")) read_calibration(rd.raw("calibration"), cfg.calibration);
  if (rd.has("control")) read_control(rd.raw("control"), cfg.control);
  if (rd.has("scenario")) read_scenario(rd.raw("scenario"), cfg.scenario);
  if (rd.has("sweep")) read_sweep(rd.raw("sweep"), cfg.sweep);
  if (rd.has("output")) {
    Reader out(rd.raw("output"), "output");
    out.get("directory", cfg.output.directory);
    out.finish();
  }
  rd.finish();
  cfg.validate();
  return cfg;
}

Json to_json(const RunConfig& cfg) {
  const ScenarioConfig& s = cfg.scenario;
  return Json{{"version", kConfigFormatVersion},
              {"seed", cfg.seed},
              {"noiseless", cfg.noiseless},
              {"whisker", to_json(cfg.whisker)},
              {"calibration", calibration_json(cfg.calibration)},
              {"control", to_json(cfg.control)},
              {"scenario",
               {{"name", s.name},
                {"contour", to_json(s.contour)},
                {"start", pose_json(s.start)},
                {"tick_rate", s.tick_rate},
                {"duration", s.duration},
                {"completion_laps", s.completion_laps}}},
              {"sweep", sweep_json(cfg.sweep)},
              {"output", {{"directory", cfg.output.directory}}}};
}

Json grid_to_json(const CalibrationGrid& grid) {
  Json samples = Json::array();
  for (const auto& s : grid.samples) samples.push_back(Json::array({s.x, s.y, s.z}));
  return Json{{"format", "whisker-calibration-grid"},
              {"version", kGridFormatVersion},
              {"region", region_json(grid.region)},
              {"step", grid.step},
              {"domain", region_json(grid.domain)},
              {"rest_measurement", grid.rest_measurement},
              {"seed", grid.seed},
              {"samples", samples}};
}

CalibrationGrid grid_from_json(const Json& j) {
  CalibrationGrid g;
  Reader rd(j, "grid");
  check_header(rd, "whisker-calibration-grid", kGridFormatVersion);
  if (rd.has("region")) g.region = region_from(rd.raw("region"), "grid.region");
  if (rd.has("domain")) g.domain = region_from(rd.raw("domain"), "grid.domain");
  rd.get("step", g.step);
  rd.get("rest_measurement", g.rest_measurement);
  rd.get("seed", g.seed);
  if (rd.has("samples")) {
    const Json& samples = rd.raw("samples");
    if (!samples.is_array()) config_error("grid.samples: expected an array");
    for (const auto& s : samples) {
      if (!s.is_array() || s.size() != 3) config_error("grid.samples: expected [x, y, z] triples");
      for (const auto& v : s) {
        if (!v.is_number()) config_error("grid.samples: expected [x, y, z] triples");
      }
      g.samples.push_back({s[0].get<double>(), s[1].get<double>(), s[2].get<double>()});
    }
  }
  rd.finish();
  return g;
}

Json model_to_json(const ModelFile& m) {
  const PolyModel& p = m.poly;
  const CharacterizedModel& c = m.characterized;
  Json anchors = Json::array();
  for (std::size_t i = 0; i < c.anchor_z.size(); ++i) {
    anchors.push_back(Json::array({c.anchor_z[i], c.anchor_tip[i].x(), c.anchor_tip[i].y()}));
  }
  return Json{{"format", "whisker-model"},
              {"version", kModelFormatVersion},
              {"whisker", to_json(m.whisker)},
              {"poly",
               {{"order", PolyModel::kOrder},
                {"coefficients", p.coefficients()},
                {"center", vec_json(p.center())},
                {"half_width", vec_json(p.half_width())},
                {"domain", region_json(p.domain())},
                {"rest_measurement", p.rest_measurement()},
                {"measured_range", Json::array({p.measured_range().first, p.measured_range().second})},
                {"fit", to_json(m.poly_report)}}},
              {"characterized",
               {{"x_of_z", scaled_poly_json(c.x_of_z)},
                {"y_of_z", scaled_poly_json(c.y_of_z)},
                {"z_min", c.z_min},
                {"z_max", c.z_max},
                {"rest_measurement", c.rest_measurement},
                {"shaft_length", c.shaft_length},
                {"x_fit", to_json(c.x_report)},
                {"y_fit", to_json(c.y_report)},
                {"anchors", anchors}}}};
}

ModelFile model_from_json(const Json& j) {
  ModelFile m;
  Reader rd(j, "model");
  check_header(rd, "whisker-model", kModelFormatVersion);
  if (rd.has("whisker")) read_whisker(rd.raw("whisker"), m.whisker);
  if (!rd.has("poly") || !rd.has("characterized")) config_error("model: needs 'poly' and 'characterized'");
  {
    Reader p(rd.raw("poly"), "model.poly");
    int order = 0;
    p.get("order", order);
    if (order != PolyModel::kOrder) config_error("model.poly.order: expected " + std::to_string(PolyModel::kOrder));
    std::vector<double> coeffs;
    p.get("coefficients", coeffs);
    if (coeffs.size() != static_cast<std::size_t>(PolyModel::kTerms)) {
      config_error("model.poly.coefficients: expected " + std::to_string(PolyModel::kTerms) + " values");
    }
    PolyModel::Coefficients arr{};
    std::copy(coeffs.begin(), coeffs.end(), arr.begin());
    Vec2 center = Vec2::Zero();
    Vec2 half = Vec2::Ones();
    p.get("center", center);
    p.get("half_width", half);
    Region domain;
    if (p.has("domain")) domain = region_from(p.raw("domain"), "model.poly.domain");
    double rest = 0.0;
    p.get("rest_measurement", rest);
    Vec2 range = Vec2::Zero();
    p.get("measured_range", range);
    if (p.has("fit")) m.poly_report = fit_report_from(p.raw("fit"), "model.poly.fit");
    p.finish();
    m.poly = PolyModel(arr, center, half, domain, rest, {range.x(), range.y()});
  }
  {
    Reader c(rd.raw("characterized"), "model.characterized");
    CharacterizedModel& cm = m.characterized;
    if (!c.has("x_of_z") || !c.has("y_of_z")) config_error("model.characterized: needs x_of_z and y_of_z");
    cm.x_of_z = scaled_poly_from(c.raw("x_of_z"), "model.characterized.x_of_z");
    cm.y_of_z = scaled_poly_from(c.raw("y_of_z"), "model.characterized.y_of_z");
    c.get("z_min", cm.z_min);
    c.get("z_max", cm.z_max);
    c.get("rest_measurement", cm.rest_measurement);
    c.get("shaft_length", cm.shaft_length);
    if (c.has("x_fit")) cm.x_report = fit_report_from(c.raw("x_fit"), "model.characterized.x_fit");
    if (c.has("y_fit")) cm.y_report = fit_report_from(c.raw("y_fit"), "model.characterized.y_fit");
    if (c.has("anchors")) {
      const Json& anchors = c.raw("anchors");
      if (!anchors.is_array()) config_error("model.characterized.anchors: expected an array");
      for (const auto& a : anchors) {
        if (!a.is_array() || a.size() != 3) config_error("model.characterized.anchors: expected [z, x, y] triples");
        cm.anchor_z.push_back(a[0].get<double>());
        cm.anchor_tip.emplace_back(a[1].get<double>(), a[2].get<double>());
      }
    }
    c.finish();
    if (!(cm.z_min < cm.z_max)) config_error("model.characterized: z_min must be below z_max");
  }
  rd.finish();
  return m;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kIo, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return Json::parse(ss.str());
  } catch (const nlohmann::json::parse_error& e) {
    config_error("'" + path + "': " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::kIo, "cannot write '" + path + "'");
  out << text;
  out.flush();
  if (!out) throw Error(Errc::kIo, "write failed for '" + path + "'");
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace whisker
