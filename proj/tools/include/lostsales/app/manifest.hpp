#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace lostsales::app {

inline constexpr const char* kArtifactVersion = "lostsales-artifacts/1";

/// Writes to a sibling temporary file and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& bytes);

std::string checksum_hex(const std::string& bytes);

class RunManifest {
 public:
  RunManifest(std::string command, std::string config_hash, std::uint64_t seed,
              std::filesystem::path out_dir);

  /// Writes `bytes` to out_dir/name and records its checksum.
  void write(const std::string& name, const std::string& bytes);
  void write_json(const std::string& name, const nlohmann::json& j);
  /// Records a file some other routine already wrote into out_dir.
  void record(const std::string& name);
  void time(const std::string& label, double seconds);

  /// Stamp added to every JSON output.
  nlohmann::json stamp() const;
  /// First line of every CSV output.
  std::string csv_comment(const std::string& schema) const;

  const std::filesystem::path& out_dir() const noexcept { return out_; }
  const std::string& config_hash() const noexcept { return config_hash_; }

  /// Writes out_dir/manifest.json.
  void finish(int exit_code);

 private:
  std::string command_;
  std::string config_hash_;
  std::uint64_t seed_;
  std::filesystem::path out_;
  nlohmann::json outputs_ = nlohmann::json::array();
  nlohmann::json timings_ = nlohmann::json::object();
};

}  // namespace lostsales::app
