#pragma once

// CSV readers and writers for signatures, sweeps and reports. Lines starting
// with '#' are comments; readers report problems as "path:line: message".

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "rcsid/error.hpp"
#include "rcsid/monte_carlo.hpp"
#include "rcsid/recognition.hpp"
#include "rcsid/signature.hpp"

namespace rcsid::io {

// Shortest text that reads back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

struct CsvRow {
  std::size_t line;
  std::vector<std::string> fields;
};

struct CsvTable {
  std::string source;
  std::vector<std::string> header;
  std::vector<CsvRow> rows;
  std::map<std::string, std::string> meta;  // from "# key=value" comments

  [[noreturn]] void fail(std::size_t line, const std::string& msg) const {
    throw validation_error(source + ":" + std::to_string(line) + ": " + msg);
  }

  double number(const CsvRow& r, std::size_t col) const {
    const std::string& s = r.fields[col];
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE)
      fail(r.line, "column '" + header[col] + "': '" + s + "' is not a number");
    return v;
  }
};

namespace detail {

inline std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  for (auto& f : out) {
    const auto b = f.find_first_not_of(" \t");
    const auto e = f.find_last_not_of(" \t");
    f = b == std::string::npos ? std::string{} : f.substr(b, e - b + 1);
  }
  return out;
}

inline std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
  return s;
}

}  // namespace detail

inline CsvTable parse_csv(std::istream& in, const std::string& source,
                          const std::vector<std::string>& expected_header) {
  CsvTable t;
  t.source = source;
  std::string line;
  std::size_t n = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq != std::string::npos) {
        auto key = detail::split(line.substr(1, eq - 1))[0];
        t.meta[key] = line.substr(eq + 1);
      }
      continue;
    }
    auto fields = detail::split(line);
    if (!have_header) {
      if (fields != expected_header)
        t.fail(n, "expected header '" + detail::join(expected_header) + "', found '" + line + "'");
      t.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != t.header.size())
      t.fail(n, "expected " + std::to_string(t.header.size()) + " fields, found " +
                    std::to_string(fields.size()));
    t.rows.push_back({n, std::move(fields)});
  }
  if (!have_header) throw validation_error(source + ": missing header '" + detail::join(expected_header) + "'");
  return t;
}

inline CsvTable read_csv(const std::string& path, const std::vector<std::string>& expected_header) {
  std::ifstream in(path);
  if (!in) throw validation_error(path + ": cannot open file");
  return parse_csv(in, path, expected_header);
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw validation_error(path + ": cannot open file for writing");
  out << text;
  if (!out) throw validation_error(path + ": write failed");
}

// ---- RcsSignature: azimuth_deg,rcs_m2 --------------------------------------

inline const std::vector<std::string> signature_header{"azimuth_deg", "rcs_m2"};

inline std::string signature_csv(const RcsSignature& s) {
  std::ostringstream o;
  if (!s.label().empty()) o << "# label=" << s.label() << '\n';
  o << "# frequency_hz=" << format_double(s.frequency()) << '\n';
  o << "# polarization=" << to_string(s.polarization()) << '\n';
  o << "azimuth_deg,rcs_m2\n";
  for (std::size_t i = 0; i < s.size(); ++i)
    o << format_double(s.azimuths()[i]) << ',' << format_double(s.rcs()[i]) << '\n';
  return o.str();
}

inline RcsSignature signature_from_table(const CsvTable& t) {
  std::vector<double> az, rcs;
  for (const auto& r : t.rows) {
    az.push_back(t.number(r, 0));
    rcs.push_back(t.number(r, 1));
    if (!(rcs.back() > 0.0) || !std::isfinite(rcs.back()))
      t.fail(r.line, "rcs_m2 must be a positive finite value");
  }
  if (t.rows.empty()) throw validation_error(t.source + ": no signature rows");
  double freq = 0.0;
  Polarization pol = Polarization::VV;
  std::string label;
  try {
    if (auto it = t.meta.find("frequency_hz"); it != t.meta.end()) freq = std::stod(it->second);
    if (auto it = t.meta.find("polarization"); it != t.meta.end()) pol = parse_polarization(it->second);
  } catch (const std::exception& e) {
    throw validation_error(t.source + ": bad metadata comment: " + e.what());
  }
  if (auto it = t.meta.find("label"); it != t.meta.end()) label = it->second;
  return RcsSignature(std::move(az), std::move(rcs), freq, pol, std::move(label));
}

inline RcsSignature read_signature(const std::string& path) {
  return signature_from_table(read_csv(path, signature_header));
}

inline void write_signature(const std::string& path, const RcsSignature& s) {
  write_text(path, signature_csv(s));
}

// ---- FrequencySweep: freq_hz,azimuth_deg,polarization,s21_real,s21_imag -----

inline const std::vector<std::string> sweep_header{"freq_hz", "azimuth_deg", "polarization",
                                                   "s21_real", "s21_imag"};

inline std::string sweep_csv(const FrequencySweep& s) {
  std::ostringstream o;
  o << detail::join(sweep_header) << '\n';
  const auto pol = to_string(s.polarization());
  for (std::size_t f = 0; f < s.n_freq(); ++f)
    for (std::size_t a = 0; a < s.n_azimuth(); ++a) {
      const auto v = s.at(f, a);
      o << format_double(s.frequencies()[f]) << ',' << format_double(s.azimuths()[a]) << ',' << pol
        << ',' << format_double(v.real()) << ',' << format_double(v.imag()) << '\n';
    }
  return o.str();
}

inline FrequencySweep sweep_from_table(const CsvTable& t) {
  if (t.rows.empty()) throw validation_error(t.source + ": no sweep rows");
  std::vector<double> freqs, az;
  std::vector<std::complex<double>> s21;
  Polarization pol{};
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& r = t.rows[i];
    const double f = t.number(r, 0), a = t.number(r, 1);
    Polarization p;
    try {
      p = parse_polarization(r.fields[2]);
    } catch (const std::exception& e) {
      t.fail(r.line, e.what());
    }
    if (i == 0) pol = p;
    if (p != pol) t.fail(r.line, "mixed polarizations in one sweep");
    if (freqs.empty() || f != freqs.back()) {
      if (!freqs.empty() && !(f > freqs.back())) t.fail(r.line, "rows must be sorted by frequency");
      if (!freqs.empty() && az.size() * freqs.size() != s21.size())
        t.fail(r.line, "frequency " + format_double(freqs.back()) + " has an incomplete azimuth set");
      freqs.push_back(f);
    }
    if (freqs.size() == 1) {
      if (!az.empty() && !(a > az.back())) t.fail(r.line, "azimuths must be strictly increasing");
      az.push_back(a);
    } else {
      const std::size_t k = s21.size() - (freqs.size() - 1) * az.size();
      if (k >= az.size() || az[k] != a)
        t.fail(r.line, "azimuth " + r.fields[1] + " does not match the azimuth axis of the first frequency");
    }
    s21.emplace_back(t.number(r, 3), t.number(r, 4));
  }
  if (az.size() * freqs.size() != s21.size())
    t.fail(t.rows.back().line, "last frequency has an incomplete azimuth set");
  return FrequencySweep(std::move(freqs), std::move(az), pol, std::move(s21));
}

inline FrequencySweep read_sweep(const std::string& path) {
  const auto t = read_csv(path, sweep_header);
  try {
    return sweep_from_table(t);
  } catch (const validation_error& e) {
    const std::string msg = e.what();
    if (msg.rfind(path, 0) == 0) throw;
    throw validation_error(path + ": " + msg);
  }
}

inline void write_sweep(const std::string& path, const FrequencySweep& s) { write_text(path, sweep_csv(s)); }

// ---- Ranking report: class,family,aic,bic,rank_aic,rank_bic,loglik,k --------

inline const std::vector<std::string> ranking_header{"class", "family", "aic",    "bic",
                                                     "rank_aic", "rank_bic", "loglik", "k"};

struct RankingRow {
  std::string cls;
  DistributionFamily family;
  double aic, bic;
  int rank_aic, rank_bic;
  double loglik;
  int k;
};

inline std::string ranking_csv(const std::map<std::string, Ranking>& rankings) {
  std::ostringstream o;
  o << detail::join(ranking_header) << '\n';
  for (const auto& [cls, r] : rankings)
    for (const auto& s : r.scores)
      o << cls << ',' << family_name(s.family) << ',' << format_double(s.aic) << ','
        << format_double(s.bic) << ',' << s.rank_aic << ',' << s.rank_bic << ','
        << format_double(s.loglik) << ',' << s.k << '\n';
  return o.str();
}

inline std::vector<RankingRow> read_ranking(const std::string& path) {
  const auto t = read_csv(path, ranking_header);
  std::vector<RankingRow> out;
  for (const auto& r : t.rows) {
    DistributionFamily f;
    try {
      f = parse_family(r.fields[1]);
    } catch (const std::exception& e) {
      t.fail(r.line, e.what());
    }
    out.push_back({r.fields[0], f, t.number(r, 2), t.number(r, 3), static_cast<int>(t.number(r, 4)),
                   static_cast<int>(t.number(r, 5)), t.number(r, 6), static_cast<int>(t.number(r, 7))});
  }
  return out;
}

// ---- Monte Carlo outputs -----------------------------------------------------

inline const std::vector<std::string> counts_header{"snr_db", "class_true", "class_pred", "count"};
inline const std::vector<std::string> accuracy_header{"snr_db", "accuracy"};

inline std::string counts_csv(const SnrSweepResult& r) {
  std::ostringstream o;
  o << detail::join(counts_header) << '\n';
  for (std::size_t s = 0; s < r.snr_grid.size(); ++s)
    for (std::size_t i = 0; i < r.true_classes.size(); ++i)
      for (std::size_t j = 0; j < r.predicted_classes.size(); ++j)
        o << format_double(r.snr_grid[s]) << ',' << r.true_classes[i] << ','
          << r.predicted_classes[j] << ',' << r.counts[s][i][j] << '\n';
  return o.str();
}

inline std::string accuracy_csv(const SnrSweepResult& r) {
  std::ostringstream o;
  o << detail::join(accuracy_header) << '\n';
  for (std::size_t s = 0; s < r.snr_grid.size(); ++s)
    o << format_double(r.snr_grid[s]) << ',' << format_double(r.accuracy[s]) << '\n';
  return o.str();
}

struct CountRow {
  double snr_db;
  std::string class_true, class_pred;
  std::size_t count;
};

inline std::vector<CountRow> read_counts(const std::string& path) {
  const auto t = read_csv(path, counts_header);
  std::vector<CountRow> out;
  for (const auto& r : t.rows) {
    const double c = t.number(r, 3);
    if (c < 0 || c != std::floor(c)) t.fail(r.line, "count must be a non-negative integer");
    out.push_back({t.number(r, 0), r.fields[1], r.fields[2], static_cast<std::size_t>(c)});
  }
  return out;
}

inline std::vector<std::pair<double, double>> read_accuracy(const std::string& path) {
  const auto t = read_csv(path, accuracy_header);
  std::vector<std::pair<double, double>> out;
  for (const auto& r : t.rows) out.emplace_back(t.number(r, 0), t.number(r, 1));
  return out;
}

// ---- Classification: class,log_likelihood,selected ---------------------------

inline const std::vector<std::string> decision_header{"class", "log_likelihood", "selected"};

inline std::string decision_csv(const ClassificationResult& c) {
  std::ostringstream o;
  o << detail::join(decision_header) << '\n';
  for (const auto& [name, ll] : c.log_likelihoods)
    o << name << ',' << format_double(ll) << ',' << (name == c.decision ? 1 : 0) << '\n';
  return o.str();
}

inline ClassificationResult read_decision(const std::string& path) {
  const auto t = read_csv(path, decision_header);
  ClassificationResult out;
  for (const auto& r : t.rows) {
    out.log_likelihoods[r.fields[0]] = t.number(r, 1);
    if (r.fields[2] == "1") out.decision = r.fields[0];
  }
  return out;
}

}  // namespace rcsid::io
