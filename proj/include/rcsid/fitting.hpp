#pragma once

// Maximum-likelihood fitting for the eleven candidate families.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "rcsid/distributions.hpp"
#include "rcsid/error.hpp"
#include "rcsid/optimize.hpp"
#include "rcsid/special.hpp"

namespace rcsid {

/// A distribution fitted to n samples, with its maximized log-likelihood.
struct FittedModel {
  Distribution dist;
  int k;          // free parameters
  double loglik;  // natural log
  std::size_t n;

  DistributionFamily family() const { return dist.family(); }
  const std::vector<double>& params() const { return dist.params(); }
  Support support() const { return dist.support(); }
};

struct GammaParams {
  double shape;
  double scale;
};

inline constexpr std::size_t min_fit_samples = 8;

// Beta fits divide the data by this multiple of the sample maximum.
inline constexpr double beta_headroom = 1.000001;

inline double total_loglik(const Distribution& d, std::span<const double> xs) {
  double s = 0.0;
  for (double x : xs) s += d.logpdf(x);
  return s;
}

namespace detail {

struct Moments {
  double mean;
  double var;  // population
  double mean_log;
};

inline Moments moments(std::span<const double> xs, bool with_log) {
  const auto n = static_cast<double>(xs.size());
  double m = 0.0;
  for (double x : xs) m += x;
  m /= n;
  double v = 0.0, ml = 0.0;
  for (double x : xs) {
    v += (x - m) * (x - m);
    if (with_log) ml += std::log(x);
  }
  return {m, v / n, with_log ? ml / n : 0.0};
}

inline void check_support(DistributionFamily f, std::span<const double> xs) {
  const std::string name(family_name(f));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double x = xs[i];
    bool ok = std::isfinite(x);
    switch (f) {
      case DistributionFamily::Normal:
      case DistributionFamily::GEV: break;
      case DistributionFamily::Exponential:
      case DistributionFamily::GeneralizedPareto: ok = ok && x >= 0.0; break;
      default: ok = ok && x > 0.0;
    }
    if (!ok)
      throw validation_error(name + ": sample " + std::to_string(i) + " (value " +
                             std::to_string(x) + ") lies outside the support");
  }
}

// Solves ln(a) - psi(a) = gap for a by Newton iteration, starting from `guess`.
inline double solve_log_digamma_gap(double gap, double guess) {
  double a = guess;
  for (int it = 0; it < 100; ++it) {
    const double f = std::log(a) - digamma(a) - gap;
    const double fp = 1.0 / a - trigamma(a);
    double next = a - f / fp;
    if (!(next > 0.0)) next = 0.5 * a;
    if (std::abs(next - a) <= 1e-14 * a) return next;
    a = next;
  }
  throw numerical_error("gamma shape equation did not converge");
}

inline FittedModel finish(Distribution d, std::span<const double> xs) {
  const double ll = total_loglik(d, xs);
  if (!std::isfinite(ll))
    throw numerical_error(std::string(family_name(d.family())) +
                          ": fitted log-likelihood is not finite");
  const int k = param_count(d.family());
  return FittedModel{std::move(d), k, ll, xs.size()};
}

}  // namespace detail

/// ln(mean) - mean(ln x); positive unless all samples are equal.
inline double gamma_log_mean_gap(std::span<const double> xs) {
  detail::require(xs.size() >= 2, "gamma fit: need at least two samples");
  detail::check_support(DistributionFamily::Gamma, xs);
  const auto m = detail::moments(xs, true);
  return std::log(m.mean) - m.mean_log;
}

/// Closed-form gamma estimate from the truncated digamma expansion.
///
/// With beta = mean/shape substituted into ln(beta) + psi(shape) = mean(ln x)
/// and psi(a) ~ ln a - 1/(2a) - 1/(12a^2), the shape solves
/// 12 s a^2 - 6 a - 1 = 0; the positive root is (3 + sqrt(9 + 12 s)) / (12 s).
inline GammaParams fit_gamma_paper(std::span<const double> xs) {
  const double s = gamma_log_mean_gap(xs);
  if (!(s > 0.0))
    throw validation_error("gamma fit: degenerate sample (all values equal, log-mean gap is 0)");
  const double shape = (3.0 + std::sqrt(9.0 + 12.0 * s)) / (12.0 * s);
  const auto m = detail::moments(xs, false);
  return {shape, m.mean / shape};
}

/// Lognormal parameters for data whose dBsm values have the given mean and spread.
inline Distribution lognormal_from_db_stats(double mean_db, double std_db) {
  detail::require(std_db > 0.0, "lognormal_from_db_stats: std must be positive");
  constexpr double db_to_ln = std::numbers::ln10 / 10.0;
  return Distribution(DistributionFamily::Lognormal, {mean_db * db_to_ln, std_db * db_to_ln});
}

namespace detail {

inline constexpr double euler_gamma = 0.5772156649015329;

// Shape xi restricted to (-1, inf): below -1 the likelihood is unbounded at the endpoint.
inline constexpr double min_tail_shape = -1.0;

inline std::vector<double> squares(std::span<const double> xs) {
  std::vector<double> sq(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) sq[i] = xs[i] * xs[i];
  return sq;
}

inline std::optional<std::vector<double>> gev_pwm(std::span<const double> xs) {
  std::vector<double> sorted(xs.begin(), xs.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  double b0 = 0.0, b1 = 0.0, b2 = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double j = static_cast<double>(i);
    b0 += sorted[i];
    b1 += j / (n - 1.0) * sorted[i];
    b2 += j * (j - 1.0) / ((n - 1.0) * (n - 2.0)) * sorted[i];
  }
  b0 /= n;
  b1 /= n;
  b2 /= n;
  const double denom = 3.0 * b2 - b0;
  if (denom == 0.0) return std::nullopt;
  // Hosking's approximation; his shape k is -xi.
  const double c = (2.0 * b1 - b0) / denom - std::numbers::ln2 / std::log(3.0);
  const double kh = 7.8590 * c + 2.9554 * c * c;
  if (!(std::abs(kh) > 1e-6 && std::abs(kh) < 0.99)) return std::nullopt;
  const double g = std::tgamma(1.0 + kh);
  const double sigma = (2.0 * b1 - b0) * kh / (g * (1.0 - std::pow(2.0, -kh)));
  if (!(sigma > 0.0)) return std::nullopt;
  return std::vector<double>{b0 + sigma * (g - 1.0) / kh, sigma, -kh};
}

inline std::vector<double> gumbel_moments(const Moments& m) {
  const double scale = std::sqrt(6.0 * m.var) / std::numbers::pi;
  return {m.mean - euler_gamma * scale, scale, 0.0};
}

inline void require_spread(const Moments& m, DistributionFamily f) {
  if (!(m.var > 0.0))
    throw validation_error(std::string(family_name(f)) + ": degenerate sample (all values equal)");
}

}  // namespace detail

/// Moment-type starting estimate for each family; fit_mle never returns a
/// log-likelihood below the one at this point.
///
/// Method of moments for most families, probability-weighted moments for GEV
/// (Gumbel moments when that estimator is undefined), log-moments for Weibull.
/// For Normal, Lognormal, Exponential and Rayleigh this is already the MLE.
inline Distribution moment_start(DistributionFamily family, std::span<const double> xs) {
  detail::require(xs.size() >= 3, std::string(family_name(family)) + ": need at least 3 samples");
  detail::check_support(family, xs);
  const auto m = detail::moments(xs, false);
  switch (family) {
    case DistributionFamily::Normal:
      detail::require_spread(m, family);
      return Distribution(family, {m.mean, std::sqrt(m.var)});
    case DistributionFamily::Lognormal: {
      std::vector<double> logs(xs.size());
      for (std::size_t i = 0; i < xs.size(); ++i) logs[i] = std::log(xs[i]);
      const auto ml = detail::moments(logs, false);
      detail::require_spread(ml, family);
      return Distribution(family, {ml.mean, std::sqrt(ml.var)});
    }
    case DistributionFamily::Exponential:
      detail::require(m.mean > 0.0, "Exponential: sample mean must be positive");
      return Distribution(family, {1.0 / m.mean});
    case DistributionFamily::Rayleigh: {
      const auto m2 = detail::moments(detail::squares(xs), false).mean;
      return Distribution(family, {std::sqrt(0.5 * m2)});
    }
    case DistributionFamily::Gamma:
      detail::require_spread(m, family);
      return Distribution(family, {m.mean * m.mean / m.var, m.var / m.mean});
    case DistributionFamily::Weibull: {
      std::vector<double> logs(xs.size());
      for (std::size_t i = 0; i < xs.size(); ++i) logs[i] = std::log(xs[i]);
      const auto ml = detail::moments(logs, false);
      detail::require_spread(ml, family);
      const double k0 = std::numbers::pi / std::sqrt(6.0 * ml.var);
      return Distribution(family, {k0, std::exp(ml.mean + detail::euler_gamma / k0)});
    }
    case DistributionFamily::Nakagami: {
      const auto sq = detail::moments(detail::squares(xs), false);
      detail::require_spread(sq, family);
      return Distribution(family, {sq.mean * sq.mean / sq.var, sq.mean});
    }
    case DistributionFamily::Beta: {
      const double scale = beta_headroom * *std::max_element(xs.begin(), xs.end());
      const double mean = m.mean / scale, var = m.var / (scale * scale);
      detail::require_spread(m, family);
      double common = mean * (1.0 - mean) / var - 1.0;
      if (!(common > 0.0)) common = 2.0;
      return Distribution(family, {mean * common, (1.0 - mean) * common}, scale);
    }
    case DistributionFamily::GEV: {
      detail::require_spread(m, family);
      if (auto p = detail::gev_pwm(xs)) return Distribution(family, *p);
      return Distribution(family, detail::gumbel_moments(m));
    }
    case DistributionFamily::GeneralizedPareto: {
      detail::require_spread(m, family);
      const double ratio = m.mean * m.mean / m.var;
      double xi = 0.5 * (1.0 - ratio);
      double sigma = 0.5 * m.mean * (ratio + 1.0);
      if (xi <= detail::min_tail_shape) xi = 0.5 * detail::min_tail_shape;
      const double xmax = *std::max_element(xs.begin(), xs.end());
      if (xi < 0.0 && xmax >= -sigma / xi) sigma = -xi * xmax * 1.01;
      return Distribution(family, {xi, sigma});
    }
    case DistributionFamily::Rician: {
      const auto sq = detail::moments(detail::squares(xs), false);
      const double m2 = sq.mean, m4 = sq.var + sq.mean * sq.mean;
      const double nu4 = 2.0 * m2 * m2 - m4;
      const double nu = nu4 > 0.0 ? std::min(std::pow(nu4, 0.25), 0.999 * std::sqrt(m2)) : 0.0;
      const double sigma = std::sqrt(0.5 * (m2 - nu * nu));
      return Distribution(family, {nu, sigma});
    }
  }
  throw validation_error("moment_start: unknown family");
}

namespace detail {

inline FittedModel fit_gamma(std::span<const double> xs) {
  const auto init = fit_gamma_paper(xs);
  const double shape = solve_log_digamma_gap(gamma_log_mean_gap(xs), init.shape);
  const double mean = moments(xs, false).mean;
  return finish(Distribution(DistributionFamily::Gamma, {shape, mean / shape}), xs);
}

inline FittedModel fit_nakagami(std::span<const double> xs) {
  const auto m = moments(squares(xs), true);
  const double s = std::log(m.mean) - m.mean_log;
  if (!(s > 0.0)) throw validation_error("Nakagami: degenerate sample (all values equal)");
  const double guess = (3.0 + std::sqrt(9.0 + 12.0 * s)) / (12.0 * s);
  const double shape = solve_log_digamma_gap(s, guess);
  return finish(Distribution(DistributionFamily::Nakagami, {shape, m.mean}), xs);
}

inline FittedModel fit_weibull(std::span<const double> xs) {
  const double xmax = *std::max_element(xs.begin(), xs.end());
  std::vector<double> lz(xs.size());
  double mean_lz = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    lz[i] = std::log(xs[i] / xmax);
    mean_lz += lz[i];
  }
  mean_lz /= static_cast<double>(xs.size());

  // Profile score in the shape k; increasing in k. Data scaled by the maximum
  // so that exp(k * lz) never overflows.
  auto score = [&](double k) {
    double sw = 0.0, swl = 0.0;
    for (double v : lz) {
      const double w = std::exp(k * v);
      sw += w;
      swl += w * v;
    }
    return swl / sw - 1.0 / k - mean_lz;
  };
  const double k0 = moment_start(DistributionFamily::Weibull, xs).param(0);
  double lo = k0, hi = k0;
  while (score(lo) > 0.0) {
    lo *= 0.5;
    if (lo < 1e-8) throw numerical_error("Weibull: could not bracket the shape");
  }
  while (score(hi) < 0.0) {
    hi *= 2.0;
    if (hi > 1e8) throw numerical_error("Weibull: could not bracket the shape");
  }
  std::uintmax_t iters = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(
      score, lo, hi, boost::math::tools::eps_tolerance<double>(50), iters);
  const double k = 0.5 * (a + b);
  double sw = 0.0;
  for (double v : lz) sw += std::exp(k * v);
  const double scale = xmax * std::pow(sw / static_cast<double>(xs.size()), 1.0 / k);
  return finish(Distribution(DistributionFamily::Weibull, {k, scale}), xs);
}

// Nelder-Mead from each start (plus one restart at its optimum); keeps the best.
inline optimize::Result multistart(const std::function<double(const std::vector<double>&)>& nll,
                                   const std::vector<std::vector<double>>& starts,
                                   const std::vector<double>& step, const std::string& family) {
  optimize::Result best{{}, pos_inf, 0, false};
  bool any_converged = false;
  for (const auto& s : starts) {
    if (!std::isfinite(nll(s))) continue;
    auto r = optimize::nelder_mead(nll, s, step);
    if (r.converged) {
      auto again = optimize::nelder_mead(nll, r.x, step);
      if (again.value <= r.value) r = std::move(again);
    }
    any_converged = any_converged || r.converged;
    if (r.value < best.value) best = std::move(r);
  }
  if (!std::isfinite(best.value))
    throw numerical_error(family + ": no starting point has a finite likelihood");
  if (!any_converged)
    throw numerical_error(family + ": optimizer did not converge within its evaluation budget");
  return best;
}

inline FittedModel fit_beta(std::span<const double> xs, const Distribution& start) {
  const double scale = start.beta_scale();
  std::vector<double> ly(xs.size()), l1y(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double y = xs[i] / scale;
    ly[i] = std::log(y);
    l1y[i] = std::log1p(-y);
  }
  double sly = 0.0, sl1y = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sly += ly[i];
    sl1y += l1y[i];
  }
  const auto n = static_cast<double>(xs.size());
  auto nll = [&](const std::vector<double>& p) {
    const double a = std::exp(p[0]), b = std::exp(p[1]);
    const double norm = log_gamma(a) + log_gamma(b) - log_gamma(a + b);
    return -((a - 1.0) * sly + (b - 1.0) * sl1y - n * norm);
  };
  const double la = std::log(start.param(0)), lb = std::log(start.param(1));
  const auto r = multistart(nll, {{la, lb}, {la - 0.7, lb - 0.7}, {la + 0.7, lb + 0.7}}, {0.3, 0.3},
                            "Beta");
  return finish(Distribution(DistributionFamily::Beta, {std::exp(r.x[0]), std::exp(r.x[1])}, scale),
                xs);
}

inline FittedModel fit_gev(std::span<const double> xs, const Distribution& start) {
  const auto gumbel = gumbel_moments(moments(xs, false));
  auto nll = [&](const std::vector<double>& p) {
    if (!(p[2] > min_tail_shape)) return pos_inf;
    return -total_loglik(Distribution(DistributionFamily::GEV, {p[0], std::exp(p[1]), p[2]}), xs);
  };
  std::vector<std::vector<double>> starts;
  for (const auto& s : {start.params(), gumbel}) {
    starts.push_back({s[0], std::log(s[1]), s[2]});
    starts.push_back({s[0], std::log(s[1]), s[2] + 0.1});
  }
  const auto r = multistart(nll, starts, {0.2 * gumbel[1], 0.2, 0.1}, "GEV");
  return finish(Distribution(DistributionFamily::GEV, {r.x[0], std::exp(r.x[1]), r.x[2]}), xs);
}

inline FittedModel fit_generalized_pareto(std::span<const double> xs, const Distribution& start) {
  const double mean = moments(xs, false).mean;
  auto nll = [&](const std::vector<double>& p) {
    if (!(p[0] > min_tail_shape)) return pos_inf;
    return -total_loglik(Distribution(DistributionFamily::GeneralizedPareto, {p[0], std::exp(p[1])}),
                         xs);
  };
  const auto r = multistart(nll,
                            {{start.param(0), std::log(start.param(1))},
                             {0.0, std::log(mean)},
                             {0.3, std::log(0.7 * mean)}},
                            {0.1, 0.2}, "GeneralizedPareto");
  return finish(Distribution(DistributionFamily::GeneralizedPareto, {r.x[0], std::exp(r.x[1])}), xs);
}

/// Rician fit by profile likelihood: for each nu the scale is maximized by a
/// bounded 1-D Brent search, and that profile is maximized over nu in
/// [0, sqrt(mean x^2)] (nu^2 + 2 sigma^2 = E[x^2]).
inline FittedModel fit_rician(std::span<const double> xs) {
  const double rms = std::sqrt(moments(squares(xs), false).mean);
  auto profile = [&](double nu) {
    std::uintmax_t it = 100;
    const auto r = boost::math::tools::brent_find_minima(
        [&](double ls) {
          return -total_loglik(Distribution(DistributionFamily::Rician, {nu, std::exp(ls)}), xs);
        },
        std::log(rms) - 12.0, std::log(rms) + 0.5, 40, it);
    return std::make_pair(std::exp(r.first), -r.second);
  };
  std::uintmax_t it = 100;
  const auto outer = boost::math::tools::brent_find_minima(
      [&](double nu) { return -profile(nu).second; }, 0.0, rms, 40, it);
  double nu = outer.first;
  auto [sigma, ll] = profile(nu);
  const auto at_zero = profile(0.0);
  if (at_zero.second > ll) {
    nu = 0.0;
    sigma = at_zero.first;
  }
  return finish(Distribution(DistributionFamily::Rician, {nu, sigma}), xs);
}

}  // namespace detail

/// Maximum-likelihood fit of `family` to linear-domain samples.
///
/// Closed form for Normal, Lognormal, Exponential and Rayleigh; 1-D root
/// finding for Weibull, Nakagami and Gamma (seeded by fit_gamma_paper); bounded
/// profile search for Rician; multistart Nelder-Mead (4000 evaluations per
/// start) for Beta, GEV and GeneralizedPareto. Beta data are divided by
/// 1.000001 x max before fitting and that factor is kept in the model.
inline FittedModel fit_mle(DistributionFamily family, std::span<const double> xs) {
  const std::string name(family_name(family));
  detail::require(xs.size() >= min_fit_samples,
                  name + ": need at least " + std::to_string(min_fit_samples) + " samples");
  const Distribution start = moment_start(family, xs);
  FittedModel fit = [&] {
    switch (family) {
      case DistributionFamily::Normal:
      case DistributionFamily::Lognormal:
      case DistributionFamily::Exponential:
      case DistributionFamily::Rayleigh: return detail::finish(start, xs);
      case DistributionFamily::Gamma: return detail::fit_gamma(xs);
      case DistributionFamily::Weibull: return detail::fit_weibull(xs);
      case DistributionFamily::Nakagami: return detail::fit_nakagami(xs);
      case DistributionFamily::Beta: return detail::fit_beta(xs, start);
      case DistributionFamily::GEV: return detail::fit_gev(xs, start);
      case DistributionFamily::GeneralizedPareto: return detail::fit_generalized_pareto(xs, start);
      case DistributionFamily::Rician: return detail::fit_rician(xs);
    }
    throw validation_error("fit_mle: unknown family");
  }();
  const double start_ll = total_loglik(start, xs);
  if (std::isfinite(start_ll) && start_ll > fit.loglik) return detail::finish(start, xs);
  return fit;
}

}  // namespace rcsid
