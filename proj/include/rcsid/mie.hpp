#pragma once

// Perfectly conducting sphere RCS, compact-range link budget and sphere calibration.

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "rcsid/error.hpp"

namespace rcsid {

inline constexpr double speed_of_light = 299792458.0;

inline double wavelength_of(double freq_hz) {
  detail::require(freq_hz > 0.0, "frequency must be positive");
  return speed_of_light / freq_hz;
}

struct Sphere {
  double radius;  // m

  explicit Sphere(double a) : radius(a) { detail::require(a > 0.0, "Sphere: radius must be positive"); }
};

enum class ScatterRegion { Rayleigh, Mie, Optical };

inline std::string to_string(ScatterRegion r) {
  switch (r) {
    case ScatterRegion::Rayleigh: return "Rayleigh";
    case ScatterRegion::Mie: return "Mie";
    case ScatterRegion::Optical: return "Optical";
  }
  return "?";
}

/// Spherical Hankel functions of the second kind h_0^(2)(x) .. h_nmax^(2)(x).
///
/// Seeds with the closed forms for n = 0, 1 and recurs upward,
/// h_{n+1} = (2n+1)/x h_n - h_{n-1}. Upward recurrence is stable here because
/// the Neumann part dominates once n exceeds x.
inline std::vector<std::complex<double>> spherical_hankel2_sequence(int nmax, double x) {
  detail::require_domain(x > 0.0, "spherical_hankel2: argument must be positive");
  detail::require(nmax >= 0, "spherical_hankel2: order must be non-negative");
  const std::complex<double> i{0.0, 1.0};
  const double s = std::sin(x), c = std::cos(x);
  std::vector<std::complex<double>> h(static_cast<std::size_t>(nmax) + 1);
  h[0] = (s + i * c) / x;
  if (nmax >= 1) {
    const double j1 = s / (x * x) - c / x;
    const double y1 = -c / (x * x) - s / x;
    h[1] = j1 - i * y1;
  }
  for (int n = 1; n < nmax; ++n)
    h[n + 1] = (2.0 * n + 1.0) / x * h[n] - h[n - 1];
  return h;
}

inline std::complex<double> spherical_hankel2(int n, double x) {
  return spherical_hankel2_sequence(n, x).back();
}

// d/dx h_n^(2)(x) = h_{n-1}(x) - (n+1)/x h_n(x); for n = 0 this is -h_1(x).
inline std::complex<double> spherical_hankel2_derivative(int n, double x) {
  const auto h = spherical_hankel2_sequence(n + 1, x);
  if (n == 0) return -h[1];
  return h[n - 1] - (n + 1.0) / x * h[n];
}

inline int mie_truncation(double ka) {
  return static_cast<int>(std::ceil(ka + 4.0 * std::cbrt(ka) + 2.0));
}

/// Exact monostatic RCS of a PEC sphere from the Riccati-Hankel series.
///
/// sigma = lambda^2/(4 pi) |sum_n (-1)^n (2n+1) / (H'_n(ka) H_n(ka))|^2 with
/// H_n(x) = x h_n^(2)(x). `extra_terms` extends the standard truncation.
inline double sphere_rcs_exact(const Sphere& s, double wavelength, int extra_terms = 0) {
  detail::require(wavelength > 0.0, "sphere_rcs_exact: wavelength must be positive");
  const double k = 2.0 * std::numbers::pi / wavelength;
  const double x = k * s.radius;
  if (x > 1e4)
    throw numerical_error("sphere_rcs_exact: ka = " + std::to_string(x) +
                          " exceeds 1e4; use sphere_rcs_approx (optical region)");
  const int nmax = mie_truncation(x) + extra_terms;
  const auto h = spherical_hankel2_sequence(nmax, x);
  std::complex<double> sum{0.0, 0.0};
  for (int n = 1; n <= nmax; ++n) {
    const std::complex<double> riccati = x * h[n];
    const std::complex<double> riccati_d = x * h[n - 1] - static_cast<double>(n) * h[n];
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    sum += sign * (2.0 * n + 1.0) / (riccati_d * riccati);
  }
  const double sigma = wavelength * wavelength / (4.0 * std::numbers::pi) * std::norm(sum);
  if (!std::isfinite(sigma) || !(sigma > 0.0))
    throw numerical_error("sphere_rcs_exact: series did not produce a finite positive value");
  return sigma;
}

inline double rayleigh_sphere_rcs(const Sphere& s, double wavelength) {
  const double ka = 2.0 * std::numbers::pi * s.radius / wavelength;
  return 9.0 * wavelength * wavelength / (4.0 * std::numbers::pi) * std::pow(ka, 6);
}

inline double optical_sphere_rcs(const Sphere& s) { return std::numbers::pi * s.radius * s.radius; }

struct RegionRcs {
  double sigma;
  ScatterRegion region;
};

// Rayleigh when 2 pi a < 0.3 lambda, optical when a > 2 lambda, exact series otherwise.
inline RegionRcs sphere_rcs_approx(const Sphere& s, double wavelength) {
  detail::require(wavelength > 0.0, "sphere_rcs_approx: wavelength must be positive");
  if (2.0 * std::numbers::pi * s.radius < 0.3 * wavelength)
    return {rayleigh_sphere_rcs(s, wavelength), ScatterRegion::Rayleigh};
  if (s.radius > 2.0 * wavelength) return {optical_sphere_rcs(s), ScatterRegion::Optical};
  return {sphere_rcs_exact(s, wavelength), ScatterRegion::Mie};
}

inline ScatterRegion classify_region(const Sphere& s, double wavelength) {
  if (2.0 * std::numbers::pi * s.radius < 0.3 * wavelength) return ScatterRegion::Rayleigh;
  if (s.radius > 2.0 * wavelength) return ScatterRegion::Optical;
  return ScatterRegion::Mie;
}

/// Offset-fed compact range parameters.
struct ChamberGeometry {
  double focal_length;      // f_L, m
  double outside_distance;  // K, m
  double tx_gain;           // linear
  double rx_gain;           // linear
  double tx_power = 1.0;    // W

  void validate() const {
    detail::require(focal_length > 0.0 && outside_distance >= 0.0 && tx_gain > 0.0 &&
                        rx_gain > 0.0 && tx_power > 0.0,
                    "ChamberGeometry: parameters must be positive");
  }
};

// R_o = f_L + K^2 / (16 f_L)
inline double principal_distance(const ChamberGeometry& g) {
  g.validate();
  return g.focal_length + g.outside_distance * g.outside_distance / (16.0 * g.focal_length);
}

struct LinkRatio {
  double ratio;   // P_rcv / P_o
  double s21_db;  // 10 log10(ratio)
};

inline LinkRatio link_power_ratio(double sigma, double wavelength, const ChamberGeometry& g) {
  detail::require(sigma > 0.0 && wavelength > 0.0, "link_power_ratio: inputs must be positive");
  const double ro = principal_distance(g);
  const double four_pi = 4.0 * std::numbers::pi;
  const double ratio = sigma * wavelength * wavelength * g.tx_gain * g.rx_gain /
                       (four_pi * four_pi * four_pi * ro * ro * ro * ro);
  return {ratio, 10.0 * std::log10(ratio)};
}

inline double fraunhofer_distance(double target_size, double wavelength) {
  detail::require(target_size > 0.0 && wavelength > 0.0,
                  "fraunhofer_distance: inputs must be positive");
  return 2.0 * target_size * target_size / wavelength;
}

/// sigma_target[i] = d_rcs[i] / s_rcs[i] * sigma_theory.
inline std::vector<double> calibrate(std::span<const double> d_rcs, std::span<const double> s_rcs,
                                     double sigma_theory) {
  detail::require(d_rcs.size() == s_rcs.size(), "calibrate: list lengths differ");
  detail::require(sigma_theory > 0.0, "calibrate: theoretical sphere RCS must be positive");
  std::vector<double> out(d_rcs.size());
  for (std::size_t i = 0; i < d_rcs.size(); ++i) {
    if (!(s_rcs[i] > 0.0))
      throw validation_error("calibrate: reference response at index " + std::to_string(i) +
                             " is not positive");
    out[i] = d_rcs[i] / s_rcs[i] * sigma_theory;
  }
  return out;
}

}  // namespace rcsid
