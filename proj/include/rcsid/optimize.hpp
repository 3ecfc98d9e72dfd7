#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

namespace rcsid::optimize {

struct Result {
  std::vector<double> x;
  double value;
  int evaluations;
  bool converged;
};

/// Nelder-Mead simplex minimizer. Non-finite objective values are treated as +inf.
///
/// `step` sets the initial simplex edge along each axis. Stops when both the
/// spread of simplex values and the simplex diameter fall under the tolerances.
inline Result nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          std::vector<double> x0, std::vector<double> step, int max_evals = 4000,
                          double ftol = 1e-10, double xtol = 1e-9) {
  const std::size_t n = x0.size();
  constexpr double inf = std::numeric_limits<double>::infinity();
  int evals = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evals;
    const double v = f(x);
    return std::isfinite(v) ? v : inf;
  };

  std::vector<std::vector<double>> pts(n + 1, x0);
  std::vector<double> vals(n + 1);
  for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += step[i];
  for (std::size_t i = 0; i <= n; ++i) vals[i] = eval(pts[i]);

  std::vector<std::size_t> order(n + 1);
  bool converged = false;
  while (evals < max_evals) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return vals[a] < vals[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[n - 1];

    double diameter = 0.0;
    for (std::size_t i = 0; i <= n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        diameter = std::max(diameter, std::abs(pts[i][j] - pts[best][j]));
    if (std::isfinite(vals[worst]) &&
        std::abs(vals[worst] - vals[best]) <= ftol * (1.0 + std::abs(vals[best])) &&
        diameter <= xtol) {
      converged = true;
      break;
    }

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i)
      if (i != worst)
        for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[i][j] / static_cast<double>(n);

    auto along = [&](double t) {
      std::vector<double> p(n);
      for (std::size_t j = 0; j < n; ++j) p[j] = centroid[j] + t * (pts[worst][j] - centroid[j]);
      return p;
    };

    auto reflected = along(-1.0);
    const double fr = eval(reflected);
    if (fr < vals[best]) {
      auto expanded = along(-2.0);
      const double fe = eval(expanded);
      if (fe < fr) {
        pts[worst] = std::move(expanded);
        vals[worst] = fe;
      } else {
        pts[worst] = std::move(reflected);
        vals[worst] = fr;
      }
      continue;
    }
    if (fr < vals[second]) {
      pts[worst] = std::move(reflected);
      vals[worst] = fr;
      continue;
    }
    const bool outside = fr < vals[worst];
    auto contracted = along(outside ? -0.5 : 0.5);
    const double fc = eval(contracted);
    if (fc < (outside ? fr : vals[worst])) {
      pts[worst] = std::move(contracted);
      vals[worst] = fc;
      continue;
    }
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t j = 0; j < n; ++j) pts[i][j] = pts[best][j] + 0.5 * (pts[i][j] - pts[best][j]);
      vals[i] = eval(pts[i]);
    }
  }
  const auto it = std::min_element(vals.begin(), vals.end());
  const auto k = static_cast<std::size_t>(it - vals.begin());
  return {pts[k], *it, evals, converged};
}

}  // namespace rcsid::optimize
