#pragma once

// Thin FFTW wrapper with unitary scaling (1/sqrt(n) both ways).

#include <cmath>
#include <complex>
#include <mutex>
#include <vector>

#include <fftw3.h>

namespace rcsid::fft {

namespace detail {

// FFTW's planner is not reentrant; execution on distinct arrays is.
inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

inline std::vector<std::complex<double>> transform(std::vector<std::complex<double>> data, int sign) {
  const int n = static_cast<int>(data.size());
  if (n == 0) return data;
  std::vector<std::complex<double>> out(data.size());
  auto* in_ptr = reinterpret_cast<fftw_complex*>(data.data());
  auto* out_ptr = reinterpret_cast<fftw_complex*>(out.data());
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_1d(n, in_ptr, out_ptr, sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (auto& v : out) v *= scale;
  return out;
}

}  // namespace detail

// X[k] = n^-1/2 sum_m x[m] exp(-2 pi i k m / n)
inline std::vector<std::complex<double>> forward(std::vector<std::complex<double>> x) {
  return detail::transform(std::move(x), FFTW_FORWARD);
}

// x[m] = n^-1/2 sum_k X[k] exp(+2 pi i k m / n)
inline std::vector<std::complex<double>> inverse(std::vector<std::complex<double>> x) {
  return detail::transform(std::move(x), FFTW_BACKWARD);
}

}  // namespace rcsid::fft
