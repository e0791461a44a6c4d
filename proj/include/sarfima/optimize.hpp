#pragma once

// Derivative-free minimization and finite-difference curvature, used by the
// CSS and GARCH quasi-likelihood fits.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace sarfima {

struct NelderMeadOptions {
  int max_iterations = 5000;
  double f_tolerance = 1e-12;  ///< relative spread of simplex values
  double x_tolerance = 1e-9;   ///< max vertex distance from the best vertex
  double initial_step = 0.05;
  int restarts = 2;  ///< fresh simplex around the optimum after convergence
};

struct MinimizeResult {
  std::vector<double> x;
  double value = std::numeric_limits<double>::infinity();
  double start_value = std::numeric_limits<double>::infinity();
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

/// Nelder-Mead with the standard coefficients (1, 2, 1/2, 1/2). Non-finite
/// objective values are treated as +infinity, which is how callers reject
/// infeasible points. The start point is the first vertex, so the returned
/// value never exceeds the value at the start.
inline MinimizeResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                  std::vector<double> start, const NelderMeadOptions& opt = {}) {
  const std::size_t n = start.size();
  MinimizeResult res;
  const auto eval = [&](const std::vector<double>& x) {
    ++res.evaluations;
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };
  res.start_value = eval(start);
  if (n == 0) {
    res.x = start;
    res.value = res.start_value;
    res.converged = true;
    return res;
  }

  std::vector<double> best = start;
  double best_value = res.start_value;
  bool converged = false;

  for (int round = 0; round <= opt.restarts; ++round) {
    std::vector<std::vector<double>> simplex(n + 1, best);
    std::vector<double> values(n + 1, best_value);
    for (std::size_t i = 0; i < n; ++i) {
      const double step = best[i] != 0.0 ? opt.initial_step * std::max(std::abs(best[i]), 1.0) : opt.initial_step;
      simplex[i + 1][i] += step;
      values[i + 1] = eval(simplex[i + 1]);
    }

    std::vector<std::size_t> order(n + 1);
    converged = false;
    while (res.iterations < opt.max_iterations) {
      ++res.iterations;
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
      const std::size_t lo = order.front(), hi = order.back(), second = order[n - 1];

      double spread = std::abs(values[hi] - values[lo]);
      double size = 0.0;
      for (std::size_t i = 0; i <= n; ++i)
        for (std::size_t k = 0; k < n; ++k) size = std::max(size, std::abs(simplex[i][k] - simplex[lo][k]));
      if (std::isfinite(values[hi]) &&
          spread <= opt.f_tolerance * (std::abs(values[lo]) + 1e-300) + 1e-300 && size <= opt.x_tolerance) {
        converged = true;
        break;
      }
      if (size <= 1e-15 * (1.0 + std::abs(simplex[lo][0]))) {  // collapsed
        converged = std::isfinite(values[lo]);
        break;
      }

      std::vector<double> centroid(n, 0.0);
      for (std::size_t i = 0; i <= n; ++i) {
        if (i == hi) continue;
        for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k] / static_cast<double>(n);
      }
      const auto along = [&](double t) {
        std::vector<double> p(n);
        for (std::size_t k = 0; k < n; ++k) p[k] = centroid[k] + t * (simplex[hi][k] - centroid[k]);
        return p;
      };

      auto reflected = along(-1.0);
      const double fr = eval(reflected);
      if (fr < values[lo]) {
        auto expanded = along(-2.0);
        const double fe = eval(expanded);
        if (fe < fr) {
          simplex[hi] = std::move(expanded);
          values[hi] = fe;
        } else {
          simplex[hi] = std::move(reflected);
          values[hi] = fr;
        }
        continue;
      }
      if (fr < values[second]) {
        simplex[hi] = std::move(reflected);
        values[hi] = fr;
        continue;
      }
      const bool outside = fr < values[hi];
      auto contracted = along(outside ? -0.5 : 0.5);
      const double fc = eval(contracted);
      if (fc < (outside ? fr : values[hi])) {
        simplex[hi] = std::move(contracted);
        values[hi] = fc;
        continue;
      }
      for (std::size_t i = 0; i <= n; ++i) {
        if (i == lo) continue;
        for (std::size_t k = 0; k < n; ++k) simplex[i][k] = simplex[lo][k] + 0.5 * (simplex[i][k] - simplex[lo][k]);
        values[i] = eval(simplex[i]);
      }
    }

    const auto it = std::min_element(values.begin(), values.end());
    const auto idx = static_cast<std::size_t>(it - values.begin());
    const bool improved = *it < best_value;
    if (*it <= best_value) {
      best_value = *it;
      best = simplex[idx];
    }
    if (!converged) break;
    // A restart that finds nothing better confirms the optimum.
    if (round > 0 && !improved) break;
  }

  res.x = std::move(best);
  res.value = best_value;
  res.converged = converged;
  return res;
}

/// Central-difference Hessian. Step for coordinate i is
/// rel_step * max(|x_i|, floor_scale).
inline Eigen::MatrixXd numerical_hessian(const std::function<double(const std::vector<double>&)>& f,
                                         const std::vector<double>& x, double rel_step = 1e-4,
                                         double floor_scale = 1e-2) {
  const std::size_t n = x.size();
  Eigen::MatrixXd H(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::vector<double> h(n);
  for (std::size_t i = 0; i < n; ++i) h[i] = rel_step * std::max(std::abs(x[i]), floor_scale);
  const double f0 = f(x);
  auto shifted = [&](std::size_t i, double di, std::size_t j, double dj) {
    auto p = x;
    p[i] += di;
    p[j] += dj;
    return f(p);
  };
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    H(ii, ii) = (shifted(i, h[i], i, 0.0) - 2.0 * f0 + shifted(i, -h[i], i, 0.0)) / (h[i] * h[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      const double v = (shifted(i, h[i], j, h[j]) - shifted(i, h[i], j, -h[j]) - shifted(i, -h[i], j, h[j]) +
                        shifted(i, -h[i], j, -h[j])) /
                       (4.0 * h[i] * h[j]);
      H(ii, jj) = v;
      H(jj, ii) = v;
    }
  }
  return H;
}

/// sqrt(diag(H^{-1})) when H is positive definite; NaN entries otherwise.
inline std::vector<double> standard_errors_from_hessian(const Eigen::MatrixXd& H) {
  const auto n = static_cast<std::size_t>(H.rows());
  std::vector<double> se(n, std::numeric_limits<double>::quiet_NaN());
  if (n == 0 || !H.allFinite()) return se;
  Eigen::LLT<Eigen::MatrixXd> llt(H);
  if (llt.info() != Eigen::Success) return se;
  const Eigen::MatrixXd cov = llt.solve(Eigen::MatrixXd::Identity(H.rows(), H.cols()));
  for (std::size_t i = 0; i < n; ++i) {
    const double v = cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
    if (v > 0.0) se[i] = std::sqrt(v);
  }
  return se;
}

}  // namespace sarfima
