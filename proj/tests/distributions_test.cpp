#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <gtest/gtest.h>

#include "rcsid/distributions.hpp"

using namespace rcsid;
using F = DistributionFamily;

namespace {

struct Case {
  F family;
  std::vector<double> params;
  double beta_scale = 1.0;
};

std::vector<Case> cases() {
  return {{F::Lognormal, {-1.0, 0.6}},       {F::GEV, {1.0, 0.5, 0.2}},     {F::GEV, {1.0, 0.5, -0.3}},
          {F::Gamma, {2.5, 0.4}},            {F::Gamma, {0.7, 2.0}},        {F::Beta, {2.0, 3.5}},
          {F::Beta, {0.8, 1.6}, 2.5},        {F::GeneralizedPareto, {0.3, 1.2}},
          {F::GeneralizedPareto, {-0.4, 1.0}}, {F::Weibull, {1.7, 0.8}},    {F::Nakagami, {1.3, 2.0}},
          {F::Rayleigh, {0.9}},              {F::Rician, {1.5, 0.7}},       {F::Exponential, {2.2}},
          {F::Normal, {0.5, 1.3}}};
}

double integrate_pdf(const Distribution& d, double lo, double hi) {
  auto pdf = [&](double x) { return std::exp(d.logpdf(x)); };
  if (std::isfinite(lo) && std::isfinite(hi))
    return boost::math::quadrature::tanh_sinh<double>().integrate(pdf, lo, hi);
  if (std::isfinite(lo))
    return boost::math::quadrature::exp_sinh<double>().integrate(pdf, lo, std::numeric_limits<double>::infinity());
  if (std::isfinite(hi))
    return boost::math::quadrature::exp_sinh<double>().integrate(pdf, -std::numeric_limits<double>::infinity(), hi);
  return boost::math::quadrature::sinh_sinh<double>().integrate(pdf);
}

double ks_statistic(std::vector<double> xs, const Distribution& d) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double D = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double F = d.cdf(xs[i]);
    D = std::max({D, F - i / n, (i + 1) / n - F});
  }
  return D;
}

}  // namespace

TEST(Logpdf, ClosedForms) {
  EXPECT_DOUBLE_EQ(logpdf(F::Exponential, {1.0}, 0.0), 0.0);
  EXPECT_NEAR(logpdf(F::Normal, {0.0, 1.0}, 0.0), -0.91893853320467274, 1e-14);
  EXPECT_NEAR(logpdf(F::Gamma, {2.0, 3.0}, 3.0), std::log(1.0 / 3.0) - 1.0, 1e-14);
  EXPECT_NEAR(logpdf(F::Gamma, {2.0, 3.0}, 3.0), -2.09861, 1e-5);
}

TEST(Logpdf, OutsideSupportIsMinusInfinity) {
  EXPECT_EQ(logpdf(F::Gamma, {2.0, 3.0}, -1.0), neg_inf);
  EXPECT_EQ(logpdf(F::Beta, {2.0, 3.0}, 1.5), neg_inf);
  EXPECT_EQ(logpdf(F::GEV, {0.0, 1.0, 0.5}, -2.5), neg_inf);
  EXPECT_EQ(logpdf(F::GeneralizedPareto, {-0.5, 1.0}, 2.5), neg_inf);
}

TEST(Logpdf, InvalidParamsThrow) {
  EXPECT_THROW(Distribution(F::Gamma, {-1.0, 1.0}), validation_error);
  EXPECT_THROW(Distribution(F::Normal, {0.0, 0.0}), validation_error);
  EXPECT_THROW(Distribution(F::Rayleigh, {1.0, 2.0}), validation_error);
  EXPECT_THROW(Distribution(F::Beta, {1.0, 1.0}, -1.0), validation_error);
}

TEST(Logpdf, FamilyHelpers) {
  EXPECT_EQ(all_families.size(), 11u);
  for (auto f : all_families) EXPECT_EQ(parse_family(family_name(f)), f);
  EXPECT_EQ(param_count(F::Exponential), 1);
  EXPECT_EQ(param_count(F::Rayleigh), 1);
  EXPECT_EQ(param_count(F::GEV), 3);
  EXPECT_EQ(param_count(F::Gamma), 2);
  EXPECT_THROW(parse_family("Cauchy"), validation_error);
}

TEST(Density, IntegratesToOne) {
  for (const auto& c : cases()) {
    const Distribution d(c.family, c.params, c.beta_scale);
    const auto s = d.support();
    EXPECT_NEAR(integrate_pdf(d, s.lo, s.hi), 1.0, 1e-6) << family_name(c.family);
  }
}

TEST(Density, CdfMatchesIntegratedPdf) {
  for (const auto& c : cases()) {
    const Distribution d(c.family, c.params, c.beta_scale);
    const auto s = d.support();
    const auto xs = sample(d, 5, 77);
    for (double x : xs) {
      const double lo = std::isfinite(s.lo) ? s.lo : neg_inf;
      EXPECT_NEAR(d.cdf(x), integrate_pdf(d, lo, x), 1e-7) << family_name(c.family) << " x=" << x;
    }
  }
}

TEST(Sampler, KolmogorovSmirnov) {
  const double critical = 1.628 / std::sqrt(1e4);  // alpha = 0.01
  for (const auto& c : cases()) {
    const Distribution d(c.family, c.params, c.beta_scale);
    int pass = 0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) pass += ks_statistic(sample(d, 10000, seed), d) < critical;
    EXPECT_GE(pass, 4) << family_name(c.family);
  }
}

TEST(Sampler, ExponentialMean) {
  const double rate = 2.5;
  const auto xs = sample(Distribution(F::Exponential, {rate}), 1000000, 3);
  double m = 0.0;
  for (double x : xs) m += x;
  m /= static_cast<double>(xs.size());
  EXPECT_NEAR(m, 1.0 / rate, 3.0 * (1.0 / rate) / std::sqrt(1e6));
}

TEST(Sampler, Deterministic) {
  for (const auto& c : cases()) {
    const Distribution d(c.family, c.params, c.beta_scale);
    EXPECT_EQ(sample(d, 100, 42), sample(d, 100, 42));
    EXPECT_NE(sample(d, 100, 42), sample(d, 100, 43));
  }
}

TEST(Rng, DerivedSeedsDiffer) {
  EXPECT_NE(derive_seed(1, {0, 0}), derive_seed(1, {0, 1}));
  EXPECT_NE(derive_seed(1, {0, 1}), derive_seed(1, {1, 0}));
  EXPECT_EQ(derive_seed(9, {3, 4}), derive_seed(9, {3, 4}));
  Rng a(5), b(5);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(a.normal(), b.normal());
}
