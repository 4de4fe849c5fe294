#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fmt/format.h>
#include <ostream>

#include "whisker/contour.hpp"
#include "whisker/report_writers.hpp"
#include "whisker/scenarios.hpp"
#include "whiskersim/cli.hpp"

namespace whiskersim {

namespace fs = std::filesystem;
using whisker::Errc;
using whisker::Error;
using whisker::Json;

int exit_code_for(Errc code) { return code == Errc::kIo ? kExitIo : kExitConfig; }

whisker::RunConfig load_config(const CommonOptions& opts) {
  whisker::RunConfig cfg;
  if (!opts.config_path.empty()) cfg = whisker::run_config_from_json(whisker::read_json_file(opts.config_path));
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.noiseless) cfg.noiseless = true;
  if (opts.out) cfg.output.directory = *opts.out;
  cfg.validate();
  return cfg;
}

namespace {

RunManifest manifest_for(const std::string& command, const CommonOptions& opts, const whisker::RunConfig& cfg) {
  RunManifest m;
  m.command = command;
  m.config_path = opts.config_path;
  m.seed = cfg.seed;
  m.noiseless = cfg.noiseless;
  return m;
}

whisker::ModelFile load_model(const std::string& path, const whisker::RunConfig& cfg, std::ostream& err) {
  if (!fs::exists(path)) throw Error(Errc::kIo, "missing model file '" + path + "' (run calibrate first)");
  whisker::ModelFile mf = whisker::model_from_json(whisker::read_json_file(path));
  const auto& a = mf.whisker;
  const auto& b = cfg.whisker;
  if (a.shaft_length != b.shaft_length || a.measurement_gain != b.measurement_gain || a.static_offset != b.static_offset) {
    err << "warning: model was calibrated with different whisker parameters than the config\n";
  }
  return mf;
}

std::string model_path_or_default(const std::string& model_path, const whisker::RunConfig& cfg) {
  return model_path.empty() ? (fs::path(cfg.output.directory) / "model.json").string() : model_path;
}

std::string num(double v) { return std::isfinite(v) ? fmt::format("{:.6g}", v) : "nan"; }
std::string fixed(double v, int digits) { return std::isfinite(v) ? fmt::format("{:.{}f}", v, digits) : "nan"; }

}  // namespace

void cmd_calibrate(const CommonOptions& opts, std::ostream& out) {
  const whisker::RunConfig cfg = load_config(opts);
  const whisker::CalibrationBundle b = whisker::run_calibration(cfg.whisker, cfg.calibration, cfg.seed, cfg.noiseless);

  ArtifactWriter w(cfg.output.directory);
  w.write("grid.json", whisker::dump(whisker::grid_to_json(b.grid)));
  w.write("model.json", whisker::dump(whisker::model_to_json({b.fit.model, b.fit.report, b.characterized, cfg.whisker})));
  const Json report{{"samples", b.grid.samples.size()},
                    {"seed", cfg.seed},
                    {"noiseless", cfg.noiseless},
                    {"surface", whisker::to_json(b.fit.report)},
                    {"characterized",
                     {{"z_min", b.characterized.z_min},
                      {"z_max", b.characterized.z_max},
                      {"x_of_z", whisker::to_json(b.characterized.x_report)},
                      {"y_of_z", whisker::to_json(b.characterized.y_report)}}}};
  w.write("calibration_report.json", whisker::dump(report));
  w.finish(manifest_for("calibrate", opts, cfg), "calibrate");

  out << fmt::format("samples: {}\nR^2: {:.6f}\nRMSE: {:.4f} uT\nvalid z range: [{:.1f}, {:.1f}] uT\nwritten to {}\n",
                     b.grid.samples.size(), b.fit.report.r_squared, b.fit.report.rmse, b.characterized.z_min,
                     b.characterized.z_max, cfg.output.directory);
}

void cmd_sweep(const CommonOptions& opts, const std::string& model_path, std::ostream& out, std::ostream& err) {
  const whisker::RunConfig cfg = load_config(opts);
  const whisker::ModelFile mf = load_model(model_path_or_default(model_path, cfg), cfg, err);
  const auto trials = whisker::run_flat_sweep(cfg.resolved_sweep(), mf.characterized, cfg.seed, cfg.noiseless);

  const std::string stem = fmt::format("sweep_seed{}", cfg.seed);
  ArtifactWriter w(cfg.output.directory);
  w.write(stem + ".csv", whisker::sweep_csv(trials));
  w.write(stem + ".svg", whisker::sweep_svg(trials));
  Json rows = Json::array();
  for (const auto& t : trials) {
    rows.push_back({{"distance", t.distance}, {"slipped", t.slipped}, {"metrics", whisker::to_json(t.metrics)}});
  }
  w.write(stem + ".json", whisker::dump(Json{{"seed", cfg.seed}, {"noiseless", cfg.noiseless}, {"trials", rows}}));
  w.finish(manifest_for("sweep", opts, cfg), stem);

  out << "distance  mean_mm   std_mm    max_mm    slip\n";
  for (const auto& t : trials) {
    out << fmt::format("{:<8g}  {:<9.4f} {:<9.4f} {:<9.4f} {}{}\n", t.distance, t.metrics.mean_abs_error,
                       t.metrics.std_error, t.metrics.max_error, t.slipped ? "yes" : "no",
                       t.metrics.failed ? "  (failed: " + t.metrics.failure + ")" : "");
  }
}

void cmd_follow(const CommonOptions& opts, const std::string& scenario, const std::string& model_path,
                std::ostream& out, std::ostream& err) {
  whisker::RunConfig cfg = load_config(opts);
  if (!scenario.empty()) {
    try {
      cfg.scenario = whisker::preset_scenario(scenario);
    } catch (const Error& e) {
      throw Error(Errc::kConfig, e.what());
    }
  }
  const whisker::ModelFile mf = load_model(model_path_or_default(model_path, cfg), cfg, err);
  const whisker::ScenarioConfig sc = cfg.resolved_scenario();
  const whisker::FollowResult r = whisker::run_follow(sc, mf.characterized, cfg.seed, cfg.noiseless);
  const whisker::Contour contour(sc.contour);

  const std::string stem = fmt::format("{}_seed{}", sc.name, cfg.seed);
  ArtifactWriter w(cfg.output.directory);
  w.write(stem + ".csv", whisker::trial_csv(r.record));
  w.write(stem + "_filter.csv", whisker::filter_trace_csv(r.record.filter_trace));
  w.write(stem + ".svg", whisker::contour_overlay_svg(contour, r.record));
  w.write(stem + "_metrics.json", whisker::dump(Json{{"format", "whiskersim-metrics"},
                                                     {"version", 1},
                                                     {"scenario", sc.name},
                                                     {"seed", cfg.seed},
                                                     {"noiseless", cfg.noiseless},
                                                     {"metrics", whisker::to_json(r.metrics)}}));
  w.finish(manifest_for("follow", opts, cfg), stem);

  const auto& m = r.metrics;
  out << fmt::format("{} seed {}: {} ticks, {} contact points\n", sc.name, cfg.seed, r.record.ticks.size(), m.points);
  out << fmt::format("mean error {} mm, max {} mm, coverage {}, deflection deviation {}%, slips {}\n",
                     num(m.mean_abs_error), num(m.max_error), num(m.coverage_fraction),
                     num(m.deflection_deviation_pct), m.slip_count);
  if (m.failed) out << "trial failed: " << m.failure << "\n";
}

namespace {

struct ReportRow {
  std::string run;
  std::string scenario;
  std::uint64_t seed = 0;
  bool noiseless = false;
  whisker::Metrics metrics;
};

}  // namespace

void cmd_report(const std::vector<std::string>& run_dirs, const std::string& out_dir, std::ostream& out,
                std::ostream& err) {
  if (run_dirs.empty()) throw Error(Errc::kIo, "report: no run directories given");
  std::vector<ReportRow> rows;
  for (const auto& dir : run_dirs) {
    if (!fs::is_directory(dir)) throw Error(Errc::kIo, "missing run directory '" + dir + "'");
    std::vector<fs::path> manifests;
    for (const auto& e : fs::directory_iterator(dir)) {
      const std::string name = e.path().filename().string();
      if (name.starts_with("manifest_") && name.ends_with(".json")) manifests.push_back(e.path());
    }
    std::sort(manifests.begin(), manifests.end());
    if (manifests.empty()) throw Error(Errc::kIo, "'" + dir + "' holds no run manifest");

    for (const auto& mpath : manifests) {
      const RunManifest m = manifest_from_json(whisker::read_json_file(mpath.string()));
      for (const auto& a : m.artifacts) {
        const fs::path p = fs::path(dir) / a.path;
        if (!fs::exists(p)) throw Error(Errc::kIo, "'" + p.string() + "' listed in the manifest is missing");
        if (sha256_file(p.string()) != a.sha256) {
          err << "warning: checksum mismatch for " << p.string() << "\n";
        }
        if (!a.path.ends_with("_metrics.json")) continue;
        const Json j = whisker::read_json_file(p.string());
        ReportRow row;
        try {
          row.run = fs::path(dir).filename().string();
          row.scenario = j.at("scenario").get<std::string>();
          row.seed = j.at("seed").get<std::uint64_t>();
          row.noiseless = j.at("noiseless").get<bool>();
        } catch (const nlohmann::json::exception& e) {
          throw Error(Errc::kConfig, "'" + p.string() + "': " + e.what());
        }
        row.metrics = whisker::metrics_from_json(j.at("metrics"));
        rows.push_back(std::move(row));
      }
    }
  }
  if (rows.empty()) throw Error(Errc::kIo, "report: no completed follow runs found");

  std::string csv =
      "run,scenario,seed,noiseless,points,mean_abs_error,std_error,max_error,mean_deflection,"
      "deflection_deviation_pct,slip_count,coverage_fraction,max_detachment_s,completed,failed\n";
  std::string text = fmt::format("{:<12} {:<18} {:>6} {:>8} {:>9} {:>9} {:>9} {:>8} {:>6} {:>9}\n", "run", "scenario",
                                 "seed", "points", "mean_mm", "max_mm", "coverage", "defl_%", "slips", "status");
  for (const auto& r : rows) {
    const auto& m = r.metrics;
    csv += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.run, r.scenario, r.seed, r.noiseless ? 1 : 0,
                       m.points, num(m.mean_abs_error), num(m.std_error), num(m.max_error), num(m.mean_deflection),
                       num(m.deflection_deviation_pct), m.slip_count, num(m.coverage_fraction),
                       num(m.max_detachment_s), m.completed ? 1 : 0, m.failed ? 1 : 0);
    const std::string status = m.failed ? "failed" : (m.completed ? "complete" : "timeout");
    text += fmt::format("{:<12} {:<18} {:>6} {:>8} {:>9} {:>9} {:>9} {:>8} {:>6} {:>9}\n", r.run, r.scenario, r.seed,
                        m.points, fixed(m.mean_abs_error, 4), fixed(m.max_error, 4), fixed(m.coverage_fraction, 3),
                        fixed(m.deflection_deviation_pct, 2), m.slip_count, status);
  }
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) throw Error(Errc::kIo, "cannot create '" + out_dir + "'");
  whisker::write_text_file((fs::path(out_dir) / "report.csv").string(), csv);
  whisker::write_text_file((fs::path(out_dir) / "report.txt").string(), text);
  out << text;
}

void cmd_defaults(std::ostream& out) { out << whisker::dump(whisker::to_json(whisker::RunConfig{})); }

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Whisker tactile contour-following simulator", "whiskersim"};
  app.require_subcommand(1);

  CommonOptions common;
  std::string model_path;
  std::string scenario;
  std::vector<std::string> run_dirs;
  std::string report_out = "report";

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "JSON run config");
    sub->add_option("--seed", common.seed, "Noise seed (overrides the config)");
    sub->add_option("--out", common.out, "Output directory (overrides the config)");
    sub->add_flag("--noiseless", common.noiseless, "Disable measurement noise");
  };
  auto* calibrate = app.add_subcommand("calibrate", "Sample the calibration grid and fit the models");
  add_common(calibrate);
  auto* sweep = app.add_subcommand("sweep", "Flat-wall localization sweep over contact distances");
  add_common(sweep);
  sweep->add_option("--model", model_path, "Model file (default <out>/model.json)");
  auto* follow = app.add_subcommand("follow", "Closed-loop contour following");
  add_common(follow);
  follow->add_option("--model", model_path, "Model file (default <out>/model.json)");
  follow->add_option("--scenario", scenario, "Preset scenario (overrides the config)")
      ->check(CLI::IsMember(whisker::scenario_names()));
  auto* report = app.add_subcommand("report", "Combine follow metrics of run directories");
  report->add_option("runs", run_dirs, "Run directories")->required();
  report->add_option("--out", report_out, "Where report.csv and report.txt go");
  auto* defaults = app.add_subcommand("defaults", "Print the default config");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*calibrate) cmd_calibrate(common, out);
    else if (*sweep) cmd_sweep(common, model_path, out, err);
    else if (*follow) cmd_follow(common, scenario, model_path, out, err);
    else if (*report) cmd_report(run_dirs, report_out, out, err);
    else if (*defaults) cmd_defaults(out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}

}  // namespace whiskersim
