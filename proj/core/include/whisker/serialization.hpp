#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <string>

#include "whisker/calibration.hpp"
#include "whisker/scenarios.hpp"
#include "whisker/sim_harness.hpp"
#include "whisker/tip_localization.hpp"

namespace whisker {

using Json = nlohmann::ordered_json;

inline constexpr int kModelFormatVersion = 1;
inline constexpr int kGridFormatVersion = 1;
inline constexpr int kConfigFormatVersion = 1;

struct OutputSettings {
  std::string directory = "out";
};

/// One run document: {version, seed, noiseless, whisker, calibration,
/// control, scenario, sweep, output}. Every section is optional and defaults
/// to the built-in values.
struct RunConfig {
  std::uint64_t seed = 1;
  bool noiseless = false;
  WhiskerParams whisker;
  CalibrationSettings calibration;
  ControlConfig control;
  ScenarioConfig scenario = preset_scenario("cylinder");
  SweepConfig sweep;
  OutputSettings output;

  /// Whisker and control sections copied into the scenario and sweep.
  ScenarioConfig resolved_scenario() const;
  SweepConfig resolved_sweep() const;
  void validate() const;
};

/// Parses and validates; unknown keys, wrong types and invalid values throw
/// Error(kConfig).
RunConfig run_config_from_json(const Json& j);
Json to_json(const RunConfig& cfg);

Json to_json(const WhiskerParams& p);
Json to_json(const ControlConfig& c);
Json to_json(const ContourSpec& c);
Json to_json(const Metrics& m);
Json to_json(const FitReport& r);

/// Versioned containers. Readers throw Error(kConfig) on schema or version
/// mismatch.
Json grid_to_json(const CalibrationGrid& grid);
CalibrationGrid grid_from_json(const Json& j);

struct ModelFile {
  PolyModel poly;
  FitReport poly_report;
  CharacterizedModel characterized;
  WhiskerParams whisker;
};
Json model_to_json(const ModelFile& m);
ModelFile model_from_json(const Json& j);

Metrics metrics_from_json(const Json& j);

/// File helpers; I/O failures throw Error(kIo), parse failures Error(kConfig).
Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// Serialized form used for files: two-space indent, trailing newline.
std::string dump(const Json& j);

}  // namespace whisker
