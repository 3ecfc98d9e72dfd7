#pragma once

// The eleven candidate RCS distributions: densities, CDFs and samplers.
//
// Parameter order per family (also the JSON key order):
//
//   Lognormal          mu, sigma            (of ln x)
//   GEV                loc, scale, shape    shape xi > 0 is Frechet-type, xi = 0 Gumbel
//   Gamma              shape, scale
//   Beta               alpha, beta          on x / beta_scale
//   GeneralizedPareto  shape, scale         location fixed at 0
//   Weibull            shape, scale
//   Nakagami           m, omega
//   Rayleigh           sigma
//   Rician             nu, sigma
//   Exponential        rate
//   Normal             mu, sigma

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "rcsid/error.hpp"
#include "rcsid/random.hpp"
#include "rcsid/special.hpp"

namespace rcsid {

enum class DistributionFamily {
  Lognormal,
  GEV,
  Gamma,
  Beta,
  GeneralizedPareto,
  Weibull,
  Nakagami,
  Rayleigh,
  Rician,
  Exponential,
  Normal,
};

inline constexpr std::array<DistributionFamily, 11> all_families{
    DistributionFamily::Lognormal, DistributionFamily::GEV,
    DistributionFamily::Gamma,     DistributionFamily::Beta,
    DistributionFamily::GeneralizedPareto, DistributionFamily::Weibull,
    DistributionFamily::Nakagami,  DistributionFamily::Rayleigh,
    DistributionFamily::Rician,    DistributionFamily::Exponential,
    DistributionFamily::Normal};

inline std::string_view family_name(DistributionFamily f) {
  switch (f) {
    case DistributionFamily::Lognormal: return "Lognormal";
    case DistributionFamily::GEV: return "GEV";
    case DistributionFamily::Gamma: return "Gamma";
    case DistributionFamily::Beta: return "Beta";
    case DistributionFamily::GeneralizedPareto: return "GeneralizedPareto";
    case DistributionFamily::Weibull: return "Weibull";
    case DistributionFamily::Nakagami: return "Nakagami";
    case DistributionFamily::Rayleigh: return "Rayleigh";
    case DistributionFamily::Rician: return "Rician";
    case DistributionFamily::Exponential: return "Exponential";
    case DistributionFamily::Normal: return "Normal";
  }
  return "?";
}

inline DistributionFamily parse_family(std::string_view name) {
  for (auto f : all_families)
    if (family_name(f) == name) return f;
  if (name == "GP" || name == "GeneralizedPareto") return DistributionFamily::GeneralizedPareto;
  throw validation_error("unknown distribution family '" + std::string(name) + "'");
}

inline std::vector<std::string_view> param_names(DistributionFamily f) {
  switch (f) {
    case DistributionFamily::Lognormal: return {"mu", "sigma"};
    case DistributionFamily::GEV: return {"loc", "scale", "shape"};
    case DistributionFamily::Gamma: return {"shape", "scale"};
    case DistributionFamily::Beta: return {"alpha", "beta"};
    case DistributionFamily::GeneralizedPareto: return {"shape", "scale"};
    case DistributionFamily::Weibull: return {"shape", "scale"};
    case DistributionFamily::Nakagami: return {"m", "omega"};
    case DistributionFamily::Rayleigh: return {"sigma"};
    case DistributionFamily::Rician: return {"nu", "sigma"};
    case DistributionFamily::Exponential: return {"rate"};
    case DistributionFamily::Normal: return {"mu", "sigma"};
  }
  return {};
}

// Free parameters counted by AIC/BIC. The Beta rescaling factor is not counted.
inline int param_count(DistributionFamily f) { return static_cast<int>(param_names(f).size()); }

struct Support {
  double lo;
  double hi;
};

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();
inline constexpr double pos_inf = std::numeric_limits<double>::infinity();

/// A family together with concrete parameter values.
class Distribution {
 public:
  Distribution(DistributionFamily family, std::vector<double> params, double beta_scale = 1.0)
      : family_(family), params_(std::move(params)), beta_scale_(beta_scale) {
    validate();
  }

  DistributionFamily family() const { return family_; }
  const std::vector<double>& params() const { return params_; }
  double param(std::size_t i) const { return params_[i]; }
  double beta_scale() const { return beta_scale_; }

  Support support() const {
    const auto& p = params_;
    switch (family_) {
      case DistributionFamily::GEV: {
        if (p[2] > 0.0) return {p[0] - p[1] / p[2], pos_inf};
        if (p[2] < 0.0) return {neg_inf, p[0] - p[1] / p[2]};
        return {neg_inf, pos_inf};
      }
      case DistributionFamily::Beta: return {0.0, beta_scale_};
      case DistributionFamily::GeneralizedPareto:
        return {0.0, p[0] < 0.0 ? -p[1] / p[0] : pos_inf};
      case DistributionFamily::Normal: return {neg_inf, pos_inf};
      default: return {0.0, pos_inf};
    }
  }

  /// Natural-log density; -infinity outside the support.
  double logpdf(double x) const {
    const auto& p = params_;
    constexpr double half_log_2pi = 0.91893853320467274178;
    switch (family_) {
      case DistributionFamily::Lognormal: {
        if (!(x > 0.0)) return neg_inf;
        const double z = (std::log(x) - p[0]) / p[1];
        return -std::log(x) - std::log(p[1]) - half_log_2pi - 0.5 * z * z;
      }
      case DistributionFamily::GEV: {
        const double z = (x - p[0]) / p[1];
        if (std::abs(p[2]) < 1e-12) return -std::log(p[1]) - z - std::exp(-z);
        const double t = 1.0 + p[2] * z;
        if (!(t > 0.0)) return neg_inf;
        const double lt = std::log(t);
        return -std::log(p[1]) - (1.0 + 1.0 / p[2]) * lt - std::exp(-lt / p[2]);
      }
      case DistributionFamily::Gamma: {
        if (!(x > 0.0)) return neg_inf;
        return (p[0] - 1.0) * std::log(x) - x / p[1] - p[0] * std::log(p[1]) - log_gamma(p[0]);
      }
      case DistributionFamily::Beta: {
        const double y = x / beta_scale_;
        if (!(y > 0.0 && y < 1.0)) return neg_inf;
        return (p[0] - 1.0) * std::log(y) + (p[1] - 1.0) * std::log1p(-y) -
               (log_gamma(p[0]) + log_gamma(p[1]) - log_gamma(p[0] + p[1])) -
               std::log(beta_scale_);
      }
      case DistributionFamily::GeneralizedPareto: {
        if (x < 0.0) return neg_inf;
        const double z = x / p[1];
        if (std::abs(p[0]) < 1e-12) return -std::log(p[1]) - z;
        const double t = 1.0 + p[0] * z;
        if (!(t > 0.0)) return neg_inf;
        return -std::log(p[1]) - (1.0 + 1.0 / p[0]) * std::log(t);
      }
      case DistributionFamily::Weibull: {
        if (!(x > 0.0)) return neg_inf;
        const double lz = std::log(x / p[1]);
        return std::log(p[0] / p[1]) + (p[0] - 1.0) * lz - std::exp(p[0] * lz);
      }
      case DistributionFamily::Nakagami: {
        if (!(x > 0.0)) return neg_inf;
        const double m = p[0], omega = p[1];
        return std::numbers::ln2 + m * std::log(m / omega) - log_gamma(m) +
               (2.0 * m - 1.0) * std::log(x) - m * x * x / omega;
      }
      case DistributionFamily::Rayleigh: {
        if (!(x > 0.0)) return neg_inf;
        const double s2 = p[0] * p[0];
        return std::log(x / s2) - x * x / (2.0 * s2);
      }
      case DistributionFamily::Rician: {
        if (!(x > 0.0)) return neg_inf;
        const double nu = p[0], s2 = p[1] * p[1];
        return std::log(x / s2) - (x * x + nu * nu) / (2.0 * s2) + log_bessel_i0(x * nu / s2);
      }
      case DistributionFamily::Exponential: {
        if (x < 0.0) return neg_inf;
        return std::log(p[0]) - p[0] * x;
      }
      case DistributionFamily::Normal: {
        const double z = (x - p[0]) / p[1];
        return -std::log(p[1]) - half_log_2pi - 0.5 * z * z;
      }
    }
    return neg_inf;
  }

  double cdf(double x) const {
    const auto& p = params_;
    switch (family_) {
      case DistributionFamily::Lognormal:
        if (!(x > 0.0)) return 0.0;
        return 0.5 * std::erfc(-(std::log(x) - p[0]) / (p[1] * std::numbers::sqrt2));
      case DistributionFamily::GEV: {
        const double z = (x - p[0]) / p[1];
        if (std::abs(p[2]) < 1e-12) return std::exp(-std::exp(-z));
        const double t = 1.0 + p[2] * z;
        if (!(t > 0.0)) return p[2] > 0.0 ? 0.0 : 1.0;
        return std::exp(-std::pow(t, -1.0 / p[2]));
      }
      case DistributionFamily::Gamma:
        if (!(x > 0.0)) return 0.0;
        return boost::math::gamma_p(p[0], x / p[1]);
      case DistributionFamily::Beta: {
        const double y = x / beta_scale_;
        if (!(y > 0.0)) return 0.0;
        if (y >= 1.0) return 1.0;
        return boost::math::ibeta(p[0], p[1], y);
      }
      case DistributionFamily::GeneralizedPareto: {
        if (!(x > 0.0)) return 0.0;
        const double z = x / p[1];
        if (std::abs(p[0]) < 1e-12) return -std::expm1(-z);
        const double t = 1.0 + p[0] * z;
        if (!(t > 0.0)) return 1.0;
        return -std::expm1(-std::log(t) / p[0]);
      }
      case DistributionFamily::Weibull:
        if (!(x > 0.0)) return 0.0;
        return -std::expm1(-std::pow(x / p[1], p[0]));
      case DistributionFamily::Nakagami:
        if (!(x > 0.0)) return 0.0;
        return boost::math::gamma_p(p[0], p[0] * x * x / p[1]);
      case DistributionFamily::Rayleigh:
        if (!(x > 0.0)) return 0.0;
        return -std::expm1(-x * x / (2.0 * p[0] * p[0]));
      case DistributionFamily::Rician: {
        if (!(x > 0.0)) return 0.0;
        const double s2 = p[1] * p[1];
        if (p[0] == 0.0) return -std::expm1(-x * x / (2.0 * s2));
        boost::math::non_central_chi_squared dist(2.0, p[0] * p[0] / s2);
        return boost::math::cdf(dist, x * x / s2);
      }
      case DistributionFamily::Exponential:
        if (!(x > 0.0)) return 0.0;
        return -std::expm1(-p[0] * x);
      case DistributionFamily::Normal:
        return 0.5 * std::erfc(-(x - p[0]) / (p[1] * std::numbers::sqrt2));
    }
    return 0.0;
  }

  double sample(Rng& rng) const {
    const auto& p = params_;
    switch (family_) {
      case DistributionFamily::Lognormal: return std::exp(p[0] + p[1] * rng.normal());
      case DistributionFamily::GEV: {
        const double e = rng.exponential();
        if (std::abs(p[2]) < 1e-12) return p[0] - p[1] * std::log(e);
        return p[0] + p[1] * std::expm1(-p[2] * std::log(e)) / p[2];
      }
      case DistributionFamily::Gamma: return p[1] * rng.gamma(p[0]);
      case DistributionFamily::Beta: {
        const double a = rng.gamma(p[0]);
        const double b = rng.gamma(p[1]);
        return beta_scale_ * a / (a + b);
      }
      case DistributionFamily::GeneralizedPareto: {
        const double e = rng.exponential();
        if (std::abs(p[0]) < 1e-12) return p[1] * e;
        return p[1] * std::expm1(p[0] * e) / p[0];
      }
      case DistributionFamily::Weibull: return p[1] * std::pow(rng.exponential(), 1.0 / p[0]);
      case DistributionFamily::Nakagami: return std::sqrt(p[1] / p[0] * rng.gamma(p[0]));
      case DistributionFamily::Rayleigh: return p[0] * std::sqrt(2.0 * rng.exponential());
      case DistributionFamily::Rician: {
        const double re = p[0] + p[1] * rng.normal();
        const double im = p[1] * rng.normal();
        return std::hypot(re, im);
      }
      case DistributionFamily::Exponential: return rng.exponential() / p[0];
      case DistributionFamily::Normal: return p[0] + p[1] * rng.normal();
    }
    return 0.0;
  }

 private:
  void validate() const {
    const std::string name(family_name(family_));
    detail::require(params_.size() == static_cast<std::size_t>(param_count(family_)),
                    name + ": expected " + std::to_string(param_count(family_)) + " parameters");
    for (double v : params_) detail::require(std::isfinite(v), name + ": parameter is not finite");
    auto positive = [&](std::size_t i) {
      detail::require(params_[i] > 0.0, name + ": parameter '" +
                                            std::string(param_names(family_)[i]) +
                                            "' must be positive");
    };
    switch (family_) {
      case DistributionFamily::Lognormal:
      case DistributionFamily::Normal: positive(1); break;
      case DistributionFamily::GEV: positive(1); break;
      case DistributionFamily::GeneralizedPareto: positive(1); break;
      case DistributionFamily::Rician:
        detail::require(params_[0] >= 0.0, name + ": parameter 'nu' must be non-negative");
        positive(1);
        break;
      case DistributionFamily::Beta:
        positive(0);
        positive(1);
        detail::require(beta_scale_ > 0.0 && std::isfinite(beta_scale_),
                        name + ": beta_scale must be positive");
        break;
      default:
        for (std::size_t i = 0; i < params_.size(); ++i) positive(i);
    }
  }

  DistributionFamily family_;
  std::vector<double> params_;
  double beta_scale_;
};

inline double logpdf(DistributionFamily f, const std::vector<double>& params, double x) {
  return Distribution(f, params).logpdf(x);
}

/// n i.i.d. draws; identical for identical (distribution, seed).
inline std::vector<double> sample(const Distribution& d, std::size_t n, std::uint64_t seed) {
  detail::require(n >= 1, "sample: n must be at least 1");
  Rng rng(seed);
  std::vector<double> out(n);
  for (auto& x : out) x = d.sample(rng);
  return out;
}

}  // namespace rcsid
