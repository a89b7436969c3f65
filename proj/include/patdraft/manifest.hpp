#pragma once

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>

#include <json.hpp>

#include "patdraft/errors.hpp"
#include "patdraft/hash.hpp"

namespace patdraft {

inline std::string now_iso8601() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Reproducibility record written once per pipeline output directory.
/// Every field except the timestamps is a pure function of the command,
/// its configuration and its inputs.
struct RunManifest {
  std::string command;
  std::string config_hash;
  std::map<std::string, std::string> input_hashes;
  std::string tokenizer;
  std::map<std::string, std::string> models;
  uint64_t seed = 0;
  std::string started_at;
  std::string finished_at;
  nlohmann::json stats = nlohmann::json::object();

  void add_input(const std::string& label, const std::string& path) {
    input_hashes[label] = file_fingerprint(path);
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["command"] = command;
    j["config_hash"] = config_hash;
    j["input_hashes"] = input_hashes;
    j["tokenizer"] = tokenizer;
    j["models"] = models;
    j["seed"] = seed;
    j["started_at"] = started_at;
    j["finished_at"] = finished_at;
    j["stats"] = stats;
    return j;
  }

  void write(const std::string& out_dir) const {
    std::filesystem::create_directories(out_dir);
    std::string path = out_dir + "/manifest.json";
    std::ofstream out(path);
    if (!out) throw IoError("cannot write manifest: " + path);
    out << to_json().dump(2) << '\n';
  }
};

}  // namespace patdraft
