#pragma once

// key = value run configuration checked against a schema. Unknown keys,
// duplicates and malformed values are rejected with file:line diagnostics.

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "rcsid/error.hpp"

namespace rcsid::io {

enum class ValueType { Number, Integer, Text, NumberList };

struct ConfigKey {
  std::string name;
  ValueType type;
  std::string help;
};

class RunConfig {
 public:
  RunConfig() = default;
  RunConfig(std::string source, std::vector<ConfigKey> schema)
      : source_(std::move(source)), schema_(std::move(schema)) {}

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  double number(const std::string& key, double fallback) const {
    return has(key) ? parse_number(values_.at(key)) : fallback;
  }
  long long integer(const std::string& key, long long fallback) const {
    if (!has(key)) return fallback;
    const auto& e = values_.at(key);
    char* end = nullptr;
    errno = 0;
    const long long v = std::strtoll(e.text.c_str(), &end, 10);
    if (e.text.empty() || *end != '\0' || errno == ERANGE) fail(e, "expected an integer");
    return v;
  }
  std::string text(const std::string& key, const std::string& fallback) const {
    return has(key) ? values_.at(key).text : fallback;
  }
  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) const {
    if (!has(key)) return fallback;
    const auto& e = values_.at(key);
    std::vector<double> out;
    std::stringstream ss(e.text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_number({trim(item), e.line, e.key}));
    if (out.empty()) fail(e, "expected a comma-separated list of numbers");
    return out;
  }

  /// Canonical "key=value" lines in key order; hashed into the run manifest.
  std::string canonical() const {
    std::string s;
    for (const auto& [k, e] : values_) s += k + "=" + e.text + "\n";
    return s;
  }

  void set(const std::string& key, const std::string& value, std::size_t line = 0) {
    const ConfigKey* spec = find(key);
    if (!spec) throw validation_error(where(line) + "unknown key '" + key + "'" + known_keys());
    if (line && values_.count(key)) throw validation_error(where(line) + "duplicate key '" + key + "'");
    values_[key] = {value, line, key};
    check(values_[key], *spec);
  }

  const std::vector<ConfigKey>& schema() const { return schema_; }

 private:
  struct Entry {
    std::string text;
    std::size_t line;
    std::string key;
  };

  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
  }

  std::string where(std::size_t line) const {
    return line ? source_ + ":" + std::to_string(line) + ": " : source_ + ": ";
  }

  [[noreturn]] void fail(const Entry& e, const std::string& msg) const {
    throw validation_error(where(e.line) + "key '" + e.key + "': " + msg + " (got '" + e.text + "')");
  }

  double parse_number(const Entry& e) const {
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(e.text.c_str(), &end);
    if (e.text.empty() || *end != '\0' || errno == ERANGE) fail(e, "expected a number");
    return v;
  }

  const ConfigKey* find(const std::string& key) const {
    for (const auto& k : schema_)
      if (k.name == key) return &k;
    return nullptr;
  }

  std::string known_keys() const {
    std::string s = " (known keys:";
    for (const auto& k : schema_) s += " " + k.name;
    return s + ")";
  }

  void check(const Entry& e, const ConfigKey& spec) const {
    switch (spec.type) {
      case ValueType::Number: parse_number(e); break;
      case ValueType::Integer: (void)integer(e.key, 0); break;
      case ValueType::NumberList: (void)numbers(e.key, {}); break;
      case ValueType::Text:
        if (e.text.empty()) fail(e, "empty value");
        break;
    }
  }

  std::string source_;
  std::vector<ConfigKey> schema_;
  std::map<std::string, Entry> values_;

  friend RunConfig parse_config(std::istream&, const std::string&, std::vector<ConfigKey>);
};

/// One `key = value` per line; `#` starts a comment.
inline RunConfig parse_config(std::istream& in, const std::string& source, std::vector<ConfigKey> schema) {
  RunConfig cfg(source, std::move(schema));
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = RunConfig::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw validation_error(source + ":" + std::to_string(n) + ": expected 'key = value'");
    cfg.set(RunConfig::trim(line.substr(0, eq)), RunConfig::trim(line.substr(eq + 1)), n);
  }
  return cfg;
}

inline RunConfig read_config(const std::string& path, std::vector<ConfigKey> schema) {
  std::ifstream in(path);
  if (!in) throw validation_error(path + ": cannot open file");
  return parse_config(in, path, std::move(schema));
}

}  // namespace rcsid::io
