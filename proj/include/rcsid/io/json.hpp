#pragma once

// JSON persistence for fitted models and model databases (nlohmann::json).

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "rcsid/error.hpp"
#include "rcsid/fitting.hpp"
#include "rcsid/recognition.hpp"

namespace rcsid::io {

inline constexpr const char* database_schema = "rcsid.model-database/1";

namespace detail {

// JSON has no infinities; an unbounded support edge is written as null.
inline nlohmann::json edge(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }

template <class T>
T field(const nlohmann::json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key))
    throw validation_error(where + ": missing key '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw validation_error(where + ": key '" + std::string(key) + "' has the wrong type");
  }
}

}  // namespace detail

/// {family, params: {name: value}, k, loglik, n, support: [lo, hi], beta_scale?}
inline nlohmann::json to_json(const FittedModel& m) {
  nlohmann::json j;
  j["family"] = std::string(family_name(m.family()));
  const auto names = param_names(m.family());
  nlohmann::json p = nlohmann::json::object();
  for (std::size_t i = 0; i < names.size(); ++i) p[std::string(names[i])] = m.params()[i];
  j["params"] = p;
  j["k"] = m.k;
  j["loglik"] = m.loglik;
  j["n"] = m.n;
  const auto s = m.support();
  j["support"] = {detail::edge(s.lo), detail::edge(s.hi)};
  if (m.family() == DistributionFamily::Beta) j["beta_scale"] = m.dist.beta_scale();
  return j;
}

inline FittedModel fitted_model_from_json(const nlohmann::json& j, const std::string& where) {
  DistributionFamily f;
  try {
    f = parse_family(detail::field<std::string>(j, "family", where));
  } catch (const validation_error& e) {
    throw validation_error(where + ": " + e.what());
  }
  const auto p = j.contains("params") ? j.at("params") : nlohmann::json();
  std::vector<double> params;
  for (auto name : param_names(f)) params.push_back(detail::field<double>(p, std::string(name).c_str(), where + ".params"));
  if (p.size() != params.size())
    throw validation_error(where + ".params: unexpected parameter for " + std::string(family_name(f)));
  const double scale = j.contains("beta_scale") ? detail::field<double>(j, "beta_scale", where) : 1.0;
  try {
    return FittedModel{Distribution(f, params, scale), detail::field<int>(j, "k", where),
                       detail::field<double>(j, "loglik", where), detail::field<std::size_t>(j, "n", where)};
  } catch (const validation_error& e) {
    const std::string msg = e.what();
    if (msg.rfind(where, 0) == 0) throw;
    throw validation_error(where + ": " + msg);
  }
}

inline nlohmann::json to_json(const ModelDatabase& db) {
  nlohmann::json j;
  j["schema"] = database_schema;
  j["criterion"] = to_string(db.criterion);
  j["frequency_hz"] = db.frequency;
  j["polarization"] = to_string(db.polarization);
  nlohmann::json classes = nlohmann::json::object();
  for (const auto& [name, m] : db.classes) classes[name] = to_json(m);
  j["classes"] = classes;
  return j;
}

inline ModelDatabase database_from_json(const nlohmann::json& j, const std::string& where) {
  const auto schema = detail::field<std::string>(j, "schema", where);
  if (schema != database_schema)
    throw validation_error(where + ": schema '" + schema + "' is not supported (expected '" +
                           database_schema + "')");
  ModelDatabase db;
  try {
    db.criterion = parse_criterion(detail::field<std::string>(j, "criterion", where));
    db.polarization = parse_polarization(detail::field<std::string>(j, "polarization", where));
  } catch (const validation_error& e) {
    const std::string msg = e.what();
    throw validation_error(msg.rfind(where, 0) == 0 ? msg : where + ": " + msg);
  }
  db.frequency = detail::field<double>(j, "frequency_hz", where);
  if (!j.contains("classes") || !j.at("classes").is_object() || j.at("classes").empty())
    throw validation_error(where + ": 'classes' must be a non-empty object");
  for (const auto& [name, m] : j.at("classes").items())
    db.classes.emplace(name, fitted_model_from_json(m, where + ": classes." + name));
  return db;
}

inline std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

inline nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw validation_error(path + ": cannot open file");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw validation_error(path + ": invalid JSON: " + e.what());
  }
}

inline ModelDatabase read_database(const std::string& path) { return database_from_json(read_json(path), path); }

inline FittedModel read_fitted_model(const std::string& path) {
  return fitted_model_from_json(read_json(path), path);
}

}  // namespace rcsid::io
