#pragma once

// Noise injection at a prescribed SNR and Monte Carlo accuracy sweeps.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include "rcsid/distributions.hpp"
#include "rcsid/error.hpp"
#include "rcsid/random.hpp"
#include "rcsid/recognition.hpp"
#include "rcsid/signature.hpp"

namespace rcsid {

struct NoiseSpec {
  double snr_db;
  std::uint64_t seed;
};

// Mean received power P = mean(sigma_i) and noise power P * 10^(-snr/10).
inline double noise_power(std::span<const double> samples_linear, double snr_db) {
  detail::require(!samples_linear.empty(), "noise_power: empty signature");
  double p = 0.0;
  for (double s : samples_linear) p += s;
  p /= static_cast<double>(samples_linear.size());
  return p * std::pow(10.0, -snr_db / 10.0);
}

inline constexpr double noisy_rcs_floor = 1e-300;

/// sigma_i' = |sqrt(sigma_i) + n_i|^2, n_i complex Gaussian with total variance
/// noise_power(sig, snr) split evenly between quadratures. An infinite SNR
/// returns the input.
inline std::vector<double> inject_noise(std::span<const double> rcs, const NoiseSpec& spec) {
  std::vector<double> out(rcs.begin(), rcs.end());
  if (std::isinf(spec.snr_db) && spec.snr_db > 0.0) return out;
  detail::require(!std::isnan(spec.snr_db), "inject_noise: SNR is NaN");
  const double s = std::sqrt(0.5 * noise_power(rcs, spec.snr_db));
  Rng rng(spec.seed);
  for (auto& v : out) {
    const double re = std::sqrt(v) + s * rng.normal();
    const double im = s * rng.normal();
    v = std::max(re * re + im * im, noisy_rcs_floor);
  }
  return out;
}

inline RcsSignature inject_noise(const RcsSignature& sig, const NoiseSpec& spec) {
  return sig.with_rcs(inject_noise(sig.rcs(), spec));
}

/// Source of clean test signatures: a model to draw from or a measured signature to replay.
using Generator = std::variant<Distribution, RcsSignature>;

// Azimuths 0 .. 360 inclusive, evenly spaced; 181 samples gives the 2-degree grid.
inline std::vector<double> full_circle_azimuths(std::size_t n) {
  std::vector<double> az(n);
  if (n == 1) return {0.0};
  for (std::size_t i = 0; i < n; ++i) az[i] = 360.0 * static_cast<double>(i) / static_cast<double>(n - 1);
  return az;
}

struct SweepOptions {
  std::vector<double> snr_grid;
  std::size_t trials = 500;
  std::size_t samples_per_trial = 181;  // model generators only
  std::optional<SectorSpec> sector;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct SnrSweepResult {
  std::vector<double> snr_grid;
  std::vector<std::string> true_classes;       // rows
  std::vector<std::string> predicted_classes;  // columns (database classes)
  std::vector<std::vector<std::vector<std::size_t>>> counts;  // [snr][row][col]
  std::vector<double> accuracy;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
};

namespace detail {

inline std::vector<double> clean_draw(const Generator& g, std::size_t n, std::uint64_t seed,
                                      std::vector<double>& azimuths) {
  if (const auto* d = std::get_if<Distribution>(&g)) {
    azimuths = full_circle_azimuths(n);
    Rng rng(seed);
    std::vector<double> out(n);
    for (auto& x : out) {
      // Linear RCS must stay positive; resample the rare non-positive draw.
      do x = d->sample(rng);
      while (!(x > 0.0));
    }
    return out;
  }
  const auto& sig = std::get<RcsSignature>(g);
  azimuths = sig.azimuths();
  return sig.rcs();
}

template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  threads = std::max(1u, threads);
  if (threads == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < n; i += threads) fn(i);
    });
}

}  // namespace detail

/// Monte Carlo accuracy versus SNR.
///
/// For each (SNR, true class, trial): draw or replay a clean signature, add
/// noise at that SNR, optionally keep only a sector, classify with
/// classify_map. The clean draw depends on (seed, class, trial) only, so every
/// SNR sees the same clean signatures; the noise depends on (seed, SNR index,
/// class, trial). Results do not depend on the thread count.
///
/// Accuracy is the mean over true classes present in the database of the
/// per-class correct rate.
inline SnrSweepResult run_snr_sweep(const ModelDatabase& db,
                                    const std::map<std::string, Generator>& generators,
                                    const SweepOptions& opt) {
  detail::require(!opt.snr_grid.empty(), "run_snr_sweep: empty SNR grid");
  detail::require(opt.trials >= 1, "run_snr_sweep: trials must be at least 1");
  detail::require(opt.samples_per_trial >= 1, "run_snr_sweep: samples per trial must be at least 1");
  detail::require(!generators.empty(), "run_snr_sweep: no generators");
  for (double s : opt.snr_grid) detail::require(!std::isnan(s), "run_snr_sweep: NaN in SNR grid");
  for (const auto& name : db.class_names())
    detail::require(generators.count(name) == 1,
                    "run_snr_sweep: no generator for database class '" + name + "'");

  SnrSweepResult out;
  out.snr_grid = opt.snr_grid;
  out.trials = opt.trials;
  out.seed = opt.seed;
  out.predicted_classes = db.class_names();
  for (const auto& [name, g] : generators) out.true_classes.push_back(name);

  const std::size_t n_snr = opt.snr_grid.size(), n_cls = out.true_classes.size();
  const std::size_t total = n_snr * n_cls * opt.trials;
  std::vector<std::uint32_t> decision(total);
  std::map<std::string, std::size_t> col_of;
  for (std::size_t c = 0; c < out.predicted_classes.size(); ++c) col_of[out.predicted_classes[c]] = c;

  std::vector<const Generator*> gens;
  for (const auto& [name, g] : generators) gens.push_back(&g);

  detail::parallel_for(total, opt.threads, [&](std::size_t idx) {
    const std::size_t trial = idx % opt.trials;
    const std::size_t cls = (idx / opt.trials) % n_cls;
    const std::size_t si = idx / (opt.trials * n_cls);
    std::vector<double> az;
    const auto clean = detail::clean_draw(*gens[cls], opt.samples_per_trial,
                                          derive_seed(opt.seed, {cls, trial}), az);
    auto noisy = inject_noise(clean, {opt.snr_grid[si], derive_seed(opt.seed, {si, cls, trial, 1})});
    if (opt.sector) {
      const auto keep = sector_indices(az, *opt.sector);
      detail::require(!keep.empty(), "run_snr_sweep: sector selects no samples");
      std::vector<double> kept;
      kept.reserve(keep.size());
      for (auto i : keep) kept.push_back(noisy[i]);
      noisy = std::move(kept);
    }
    decision[idx] = static_cast<std::uint32_t>(col_of.at(classify_map(db, noisy).decision));
  });

  out.counts.assign(n_snr, std::vector<std::vector<std::size_t>>(
                               n_cls, std::vector<std::size_t>(out.predicted_classes.size(), 0)));
  for (std::size_t idx = 0; idx < total; ++idx) {
    const std::size_t cls = (idx / opt.trials) % n_cls;
    const std::size_t si = idx / (opt.trials * n_cls);
    ++out.counts[si][cls][decision[idx]];
  }
  for (std::size_t si = 0; si < n_snr; ++si) {
    double acc = 0.0;
    std::size_t rows = 0;
    for (std::size_t r = 0; r < n_cls; ++r) {
      const auto it = col_of.find(out.true_classes[r]);
      if (it == col_of.end()) continue;
      acc += static_cast<double>(out.counts[si][r][it->second]) / static_cast<double>(opt.trials);
      ++rows;
    }
    out.accuracy.push_back(rows ? acc / static_cast<double>(rows) : 0.0);
  }
  return out;
}

inline std::size_t snr_index(const SnrSweepResult& r, double snr_db) {
  for (std::size_t i = 0; i < r.snr_grid.size(); ++i)
    if (r.snr_grid[i] == snr_db || std::abs(r.snr_grid[i] - snr_db) < 1e-9) return i;
  throw validation_error("confusion_matrix: SNR " + std::to_string(snr_db) + " dB is not in the grid");
}

/// Row-stochastic rates: rows are true classes, columns decisions.
inline std::vector<std::vector<double>> confusion_matrix(const SnrSweepResult& r, double snr_db) {
  const auto& counts = r.counts[snr_index(r, snr_db)];
  std::vector<std::vector<double>> m(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    std::size_t total = 0;
    for (auto c : counts[i]) total += c;
    m[i].resize(counts[i].size());
    for (std::size_t j = 0; j < counts[i].size(); ++j)
      m[i][j] = total ? static_cast<double>(counts[i][j]) / static_cast<double>(total) : 0.0;
  }
  return m;
}

struct HeldOutReport {
  std::string held_out_class;
  std::map<std::string, double> assignment_histogram;
  double snr_db;
};

struct HeldOutOptions {
  Criterion criterion = Criterion::AIC;
  std::vector<double> snr_grid;
  std::size_t trials = 500;
  std::size_t samples_per_trial = 181;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

/// Removes `held_out` from a full database, classifies noisy draws from its
/// own model against the remaining classes, and reports where they land.
inline std::vector<HeldOutReport> held_out_experiment(const ModelDatabase& full_db,
                                                      const std::string& held_out,
                                                      const HeldOutOptions& opt) {
  const auto it = full_db.classes.find(held_out);
  if (it == full_db.classes.end())
    throw validation_error("held_out_experiment: class '" + held_out + "' is not in the training set");
  detail::require(full_db.classes.size() >= 2, "held_out_experiment: need at least one remaining class");
  ModelDatabase db = full_db;
  db.classes.erase(held_out);

  // run_snr_sweep wants a generator per database class; only the held-out row is reported.
  std::map<std::string, Generator> gens;
  for (const auto& [name, model] : full_db.classes) gens.emplace(name, model.dist);
  const SweepOptions sw{opt.snr_grid, opt.trials, opt.samples_per_trial, std::nullopt, opt.seed, opt.threads};
  const auto result = run_snr_sweep(db, gens, sw);

  std::size_t row = 0;
  while (result.true_classes[row] != held_out) ++row;
  std::vector<HeldOutReport> out;
  for (std::size_t si = 0; si < result.snr_grid.size(); ++si) {
    HeldOutReport rep{held_out, {}, result.snr_grid[si]};
    for (std::size_t c = 0; c < result.predicted_classes.size(); ++c)
      rep.assignment_histogram[result.predicted_classes[c]] =
          static_cast<double>(result.counts[si][row][c]) / static_cast<double>(opt.trials);
    out.push_back(std::move(rep));
  }
  return out;
}

/// Same experiment from raw training samples: every class is fitted and the
/// best model under `opt.criterion` kept, then `held_out` is removed.
inline std::vector<HeldOutReport> held_out_experiment(
    const std::map<std::string, std::vector<double>>& training, const std::string& held_out,
    const HeldOutOptions& opt) {
  if (training.find(held_out) == training.end())
    throw validation_error("held_out_experiment: class '" + held_out + "' is not in the training set");
  return held_out_experiment(build_database(training, opt.criterion), held_out, opt);
}

}  // namespace rcsid
