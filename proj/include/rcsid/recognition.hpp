#pragma once

// Model selection by AIC/BIC and the equal-prior MAP classifier.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rcsid/distributions.hpp"
#include "rcsid/error.hpp"
#include "rcsid/fitting.hpp"
#include "rcsid/signature.hpp"

namespace rcsid {

enum class Criterion { AIC, BIC };

inline std::string to_string(Criterion c) { return c == Criterion::AIC ? "AIC" : "BIC"; }

inline Criterion parse_criterion(const std::string& s) {
  if (s == "AIC" || s == "aic") return Criterion::AIC;
  if (s == "BIC" || s == "bic") return Criterion::BIC;
  throw validation_error("unknown criterion '" + s + "' (expected aic or bic)");
}

inline double aic(double loglik, int k) { return -2.0 * loglik + 2.0 * k; }

inline double bic(double loglik, int k, std::size_t n) {
  detail::require(n >= 1, "bic: n must be at least 1");
  return -2.0 * loglik + k * std::log(static_cast<double>(n));
}

struct CriterionScore {
  DistributionFamily family;
  double aic;
  double bic;
  int rank_aic;
  int rank_bic;
  double loglik;
  int k;
};

struct SkippedFit {
  DistributionFamily family;
  std::string reason;
};

struct Ranking {
  std::vector<CriterionScore> scores;  // in the order families were requested
  std::vector<FittedModel> fits;       // aligned with scores
  std::vector<SkippedFit> skipped;

  const FittedModel& best(Criterion c) const {
    for (std::size_t i = 0; i < scores.size(); ++i)
      if ((c == Criterion::AIC ? scores[i].rank_aic : scores[i].rank_bic) == 1) return fits[i];
    throw validation_error("Ranking: no fitted families");
  }

  const CriterionScore* find(DistributionFamily f) const {
    for (const auto& s : scores)
      if (s.family == f) return &s;
    return nullptr;
  }
};

namespace detail {

// Rank 1 is the smallest score; equal scores fall back to family order.
inline void assign_ranks(std::vector<CriterionScore>& scores, Criterion c) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  auto value = [&](std::size_t i) { return c == Criterion::AIC ? scores[i].aic : scores[i].bic; };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (value(a) != value(b)) return value(a) < value(b);
    return static_cast<int>(scores[a].family) < static_cast<int>(scores[b].family);
  });
  for (std::size_t r = 0; r < order.size(); ++r) {
    auto& s = scores[order[r]];
    (c == Criterion::AIC ? s.rank_aic : s.rank_bic) = static_cast<int>(r) + 1;
  }
}

}  // namespace detail

/// Fits each requested family, scores AIC and BIC, and ranks them.
/// Families whose fit throws are skipped with the reason recorded.
inline Ranking rank_models(std::span<const double> samples,
                           std::span<const DistributionFamily> families = all_families) {
  Ranking out;
  for (auto f : families) {
    try {
      auto fit = fit_mle(f, samples);
      out.scores.push_back({f, aic(fit.loglik, fit.k), bic(fit.loglik, fit.k, fit.n), 0, 0,
                            fit.loglik, fit.k});
      out.fits.push_back(std::move(fit));
    } catch (const std::exception& e) {
      out.skipped.push_back({f, e.what()});
    }
  }
  if (out.scores.empty()) {
    std::string why = "rank_models: no family could be fitted";
    for (const auto& s : out.skipped) why += "; " + s.reason;
    throw numerical_error(why);
  }
  detail::assign_ranks(out.scores, Criterion::AIC);
  detail::assign_ranks(out.scores, Criterion::BIC);
  return out;
}

/// Best model per class under one criterion, all at one frequency/polarization.
struct ModelDatabase {
  std::map<std::string, FittedModel> classes;
  Criterion criterion = Criterion::AIC;
  double frequency = 0.0;
  Polarization polarization = Polarization::VV;

  std::vector<std::string> class_names() const {
    std::vector<std::string> names;
    for (const auto& [name, model] : classes) names.push_back(name);
    return names;
  }
};

struct DatabaseMetadata {
  double frequency = 0.0;
  Polarization polarization = Polarization::VV;
};

struct DatabaseBuild {
  ModelDatabase db;
  std::map<std::string, Ranking> rankings;
};

inline DatabaseBuild build_database_with_rankings(
    const std::map<std::string, std::vector<double>>& training, Criterion criterion,
    const DatabaseMetadata& meta = {},
    std::span<const DistributionFamily> families = all_families) {
  detail::require(!training.empty(), "build_database: no training classes");
  DatabaseBuild out;
  out.db.criterion = criterion;
  out.db.frequency = meta.frequency;
  out.db.polarization = meta.polarization;
  for (const auto& [name, samples] : training) {
    detail::require(samples.size() >= min_fit_samples,
                    "build_database: class '" + name + "' has " + std::to_string(samples.size()) +
                        " samples; need at least " + std::to_string(min_fit_samples));
    auto ranking = rank_models(samples, families);
    out.db.classes.emplace(name, ranking.best(criterion));
    out.rankings.emplace(name, std::move(ranking));
  }
  return out;
}

inline ModelDatabase build_database(const std::map<std::string, std::vector<double>>& training,
                                    Criterion criterion, const DatabaseMetadata& meta = {},
                                    std::span<const DistributionFamily> families = all_families) {
  return build_database_with_rankings(training, criterion, meta, families).db;
}

// Per-sample log-density floor; keeps every class score finite and comparable
// when test samples fall outside a model's support.
inline constexpr double logpdf_floor = -700.0;

inline double log_likelihood(const Distribution& model, std::span<const double> test) {
  detail::require(!test.empty(), "log_likelihood: empty test vector");
  double s = 0.0;
  for (double y : test) {
    const double lp = model.logpdf(y);
    s += (std::isnan(lp) || lp < logpdf_floor) ? logpdf_floor : lp;
  }
  return s;
}

inline double log_likelihood(const FittedModel& model, std::span<const double> test) {
  return log_likelihood(model.dist, test);
}

struct ClassificationResult {
  std::string decision;
  std::map<std::string, double> log_likelihoods;
};

/// Equal-prior MAP decision: argmax over classes of sum_i ln p(y_i | class).
/// Ties go to the lexicographically smallest class name.
inline ClassificationResult classify_map(const ModelDatabase& db, std::span<const double> test) {
  detail::require(!db.classes.empty(), "classify_map: empty database");
  detail::require(!test.empty(), "classify_map: empty test vector");
  ClassificationResult out;
  double best = neg_inf;
  for (const auto& [name, model] : db.classes) {
    const double ll = log_likelihood(model, test);
    out.log_likelihoods.emplace(name, ll);
    if (out.decision.empty() || ll > best) {
      best = ll;
      out.decision = name;
    }
  }
  return out;
}

inline ClassificationResult classify_sector(const ModelDatabase& db, const RcsSignature& sig,
                                            const SectorSpec& sector) {
  const auto sliced = sector_slice(sig, sector);
  return classify_map(db, sliced.rcs());
}

}  // namespace rcsid
