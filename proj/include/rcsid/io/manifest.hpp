#pragma once

// Run manifest written next to every output set: toolkit version, config
// hash, SHA-256 digests of inputs and outputs, seed and UTC timestamps.

#include <chrono>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <openssl/evp.h>

#include <json.hpp>

#include "rcsid/error.hpp"
#include "rcsid/version.hpp"

namespace rcsid::io {

inline std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw numerical_error("sha256: digest failed");
  std::ostringstream o;
  for (unsigned int i = 0; i < len; ++i) o << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return o.str();
}

inline std::string file_sha256(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw validation_error(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

inline std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream o;
  o << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return o.str();
}

struct RunManifest {
  std::string command;
  std::string config_hash;
  std::map<std::string, std::string> inputs;   // path -> sha256
  std::map<std::string, std::string> outputs;  // path -> sha256
  std::optional<std::uint64_t> seed;
  std::string started = utc_now();
  std::string finished;

  void add_input(const std::string& path) { inputs[path] = file_sha256(path); }
  void add_output(const std::string& path) { outputs[path] = file_sha256(path); }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["toolkit"] = "rcsid";
    j["version"] = version;
    j["command"] = command;
    j["config_sha256"] = config_hash;
    j["inputs"] = inputs;
    j["outputs"] = outputs;
    j["seed"] = seed ? nlohmann::json(*seed) : nlohmann::json();
    j["started_utc"] = started;
    j["finished_utc"] = finished;
    return j;
  }

  void write(const std::string& path) {
    finished = utc_now();
    std::ofstream out(path);
    if (!out) throw validation_error(path + ": cannot open file for writing");
    out << to_json().dump(2) << '\n';
  }
};

}  // namespace rcsid::io
