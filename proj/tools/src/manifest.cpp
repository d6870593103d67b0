#include "lostsales/app/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <iterator>

#include "lostsales/error.hpp"
#include "lostsales/rng.hpp"

namespace lostsales::app {

void write_atomic(const std::filesystem::path& path, const std::string& bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::ConfigError, "cannot write '" + tmp.string() + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::ConfigError, "short write to '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

std::string checksum_hex(const std::string& bytes) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(rng::fnv1a64(bytes)));
  return buf;
}

RunManifest::RunManifest(std::string command, std::string config_hash, std::uint64_t seed,
                         std::filesystem::path out_dir)
    : command_(std::move(command)), config_hash_(std::move(config_hash)), seed_(seed), out_(std::move(out_dir)) {}

void RunManifest::write(const std::string& name, const std::string& bytes) {
  write_atomic(out_ / name, bytes);
  outputs_.push_back({{"file", name}, {"bytes", bytes.size()}, {"fnv1a64", checksum_hex(bytes)}});
}

void RunManifest::write_json(const std::string& name, const nlohmann::json& j) {
  auto stamped = j;
  stamped["run"] = stamp();
  write(name, stamped.dump(2) + "\n");
}

void RunManifest::record(const std::string& name) {
  std::ifstream in(out_ / name, std::ios::binary);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot read back '" + name + "'");
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  outputs_.push_back({{"file", name}, {"bytes", bytes.size()}, {"fnv1a64", checksum_hex(bytes)}});
}

void RunManifest::time(const std::string& label, double seconds) { timings_[label] = seconds; }

nlohmann::json RunManifest::stamp() const {
  return {{"artifact_version", kArtifactVersion}, {"command", command_}, {"config_hash", config_hash_},
          {"seed", seed_}};
}

std::string RunManifest::csv_comment(const std::string& schema) const {
  return "# " + schema + " config_hash=" + config_hash_ + " seed=" + std::to_string(seed_) + "\n";
}

void RunManifest::finish(int exit_code) {
  nlohmann::json j = stamp();
  j["exit_code"] = exit_code;
  j["outputs"] = outputs_;
  j["timings_seconds"] = timings_;
  write_atomic(out_ / "manifest.json", j.dump(2) + "\n");
}

}  // namespace lostsales::app
