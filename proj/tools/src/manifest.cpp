#include <filesystem>
#include <fstream>
#include <openssl/evp.h>
#include <sstream>

#include "whiskersim/cli.hpp"

namespace whiskersim {

namespace fs = std::filesystem;
using whisker::Errc;
using whisker::Error;
using whisker::Json;

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(Errc::kIo, "sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xf]);
  }
  return hex;
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIo, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

Json manifest_to_json(const RunManifest& m) {
  Json arts = Json::array();
  for (const auto& a : m.artifacts) arts.push_back({{"path", a.path}, {"sha256", a.sha256}});
  return Json{{"format", "whiskersim-manifest"},
              {"version", kManifestFormatVersion},
              {"command", m.command},
              {"config_path", m.config_path},
              {"seed", m.seed},
              {"noiseless", m.noiseless},
              {"output_directory", m.output_directory},
              {"artifacts", arts}};
}

RunManifest manifest_from_json(const Json& j) {
  try {
    if (!j.is_object() || j.value("format", "") != "whiskersim-manifest") {
      throw Error(Errc::kConfig, "not a run manifest");
    }
    if (j.at("version").get<int>() != kManifestFormatVersion) {
      throw Error(Errc::kConfig, "unsupported manifest version");
    }
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.config_path = j.at("config_path").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.noiseless = j.at("noiseless").get<bool>();
    m.output_directory = j.at("output_directory").get<std::string>();
    for (const auto& a : j.at("artifacts")) {
      m.artifacts.push_back({a.at("path").get<std::string>(), a.at("sha256").get<std::string>()});
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kConfig, std::string("manifest: ") + e.what());
  }
}

ArtifactWriter::ArtifactWriter(std::string directory) : dir_(std::move(directory)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec || !fs::is_directory(dir_)) throw Error(Errc::kIo, "cannot create output directory '" + dir_ + "'");
}

void ArtifactWriter::write(const std::string& name, const std::string& text) {
  whisker::write_text_file((fs::path(dir_) / name).string(), text);
  artifacts_.push_back({name, sha256_hex(text)});
}

std::string ArtifactWriter::finish(RunManifest manifest, const std::string& label) const {
  manifest.output_directory = dir_;
  manifest.artifacts = artifacts_;
  const std::string path = (fs::path(dir_) / ("manifest_" + label + ".json")).string();
  whisker::write_text_file(path, whisker::dump(manifest_to_json(manifest)));
  return path;
}

}  // namespace whiskersim
