#pragma once

#include <array>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

#include "rcsid/error.hpp"

namespace rcsid {

namespace detail {

// B_2, B_4, ..., B_12
inline constexpr std::array<double, 6> bernoulli_even{1.0 / 6.0,  -1.0 / 30.0, 1.0 / 42.0,
                                                     -1.0 / 30.0, 5.0 / 66.0,  -691.0 / 2730.0};

// Shift target for the asymptotic series. The first omitted term, B_14/(14 x^14),
// is about 1e-12 at x = 6 and 1e-15 at x = 10.
inline constexpr double asymptotic_threshold = 10.0;

}  // namespace detail

/// Digamma psi(x) for x > 0.
///
/// Recurs upward with psi(x) = psi(x+1) - 1/x until x >= 10, then evaluates
/// psi(x) ~ ln x - 1/(2x) - sum_{g=1..6} B_2g / (2g x^2g).
inline double digamma(double x) {
  detail::require_domain(x > 0.0 && std::isfinite(x), "digamma: argument must be positive");
  double shift = 0.0;
  while (x < detail::asymptotic_threshold) {
    shift -= 1.0 / x;
    x += 1.0;
  }
  const double inv2 = 1.0 / (x * x);
  double pow = inv2;
  double series = 0.0;
  for (std::size_t g = 1; g <= detail::bernoulli_even.size(); ++g) {
    series += detail::bernoulli_even[g - 1] / (2.0 * static_cast<double>(g)) * pow;
    pow *= inv2;
  }
  return shift + std::log(x) - 0.5 / x - series;
}

// psi'(x) ~ 1/x + 1/(2x^2) + sum B_2g / x^(2g+1), same shifting scheme as digamma.
inline double trigamma(double x) {
  detail::require_domain(x > 0.0 && std::isfinite(x), "trigamma: argument must be positive");
  double shift = 0.0;
  while (x < detail::asymptotic_threshold) {
    shift += 1.0 / (x * x);
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double pow = inv2 * inv;
  double series = 0.0;
  for (double b : detail::bernoulli_even) {
    series += b * pow;
    pow *= inv2;
  }
  return shift + inv + 0.5 * inv2 + series;
}

inline double log_gamma(double x) { return boost::math::lgamma(x); }

// ln I_0(x) for x >= 0, switching to the large-argument expansion where I_0 overflows.
inline double log_bessel_i0(double x) {
  x = std::abs(x);
  if (x < 500.0) return std::log(std::cyl_bessel_i(0.0, x));
  const double inv = 1.0 / x;
  return x - 0.5 * std::log(2.0 * std::numbers::pi * x) +
         std::log1p(inv * (0.125 + inv * (9.0 / 128.0 + inv * (225.0 / 3072.0))));
}

}  // namespace rcsid
