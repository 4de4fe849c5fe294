#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "whisker/error.hpp"
#include "whisker/serialization.hpp"

namespace whiskersim {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;

/// Maps a library error onto the process exit code.
int exit_code_for(whisker::Errc code);

struct Artifact {
  /// Relative to the run directory.
  std::string path;
  std::string sha256;
};

struct RunManifest {
  std::string command;
  std::string config_path;
  std::uint64_t seed = 0;
  bool noiseless = false;
  std::string output_directory;
  std::vector<Artifact> artifacts;
};

inline constexpr int kManifestFormatVersion = 1;

whisker::Json manifest_to_json(const RunManifest& m);
/// Throws Error(kConfig) on schema mismatch.
RunManifest manifest_from_json(const whisker::Json& j);

std::string sha256_hex(std::string_view data);
/// Throws Error(kIo) when the file cannot be read.
std::string sha256_file(const std::string& path);

/// Writes files into one run directory and keeps their checksums for the
/// manifest.
class ArtifactWriter {
 public:
  /// Creates the directory. Throws Error(kIo).
  explicit ArtifactWriter(std::string directory);

  void write(const std::string& name, const std::string& text);
  /// Writes manifest_<label>.json listing everything written so far and
  /// returns its path.
  std::string finish(RunManifest manifest, const std::string& label) const;

  const std::string& directory() const { return dir_; }
  const std::vector<Artifact>& artifacts() const { return artifacts_; }

 private:
  std::string dir_;
  std::vector<Artifact> artifacts_;
};

/// Flags shared by calibrate, sweep and follow.
struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  bool noiseless = false;
};

/// Config file (or built-in defaults) with the command-line overrides
/// applied, validated. Throws Error(kConfig) or Error(kIo).
whisker::RunConfig load_config(const CommonOptions& opts);

/// The commands throw whisker::Error; run_cli turns that into exit codes.
void cmd_calibrate(const CommonOptions& opts, std::ostream& out);
void cmd_sweep(const CommonOptions& opts, const std::string& model_path, std::ostream& out, std::ostream& err);
void cmd_follow(const CommonOptions& opts, const std::string& scenario, const std::string& model_path,
                std::ostream& out, std::ostream& err);
void cmd_report(const std::vector<std::string>& run_dirs, const std::string& out_dir, std::ostream& out,
                std::ostream& err);
void cmd_defaults(std::ostream& out);

/// Full command line including argv[0]. Returns the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace whiskersim
