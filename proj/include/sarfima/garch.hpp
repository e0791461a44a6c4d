#pragma once

/** @file
 * GARCH(r, m) conditional variances, Gaussian quasi-maximum likelihood and
 * the ARCH Lagrange-multiplier test.
 *
 * The variance recursion is
 *   h_t = alpha0 + sum_i alpha_i eps_{t-i}^2 + sum_j beta_j h_{t-j},
 * with every pre-sample eps^2 and h set to a backcast value (the sample
 * variance of the residuals when fitting).
 */

#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sarfima/core.hpp"
#include "sarfima/diagnose.hpp"
#include "sarfima/optimize.hpp"

namespace sarfima {

struct GarchOrders {
  int r = 1;  ///< GARCH (lagged h) terms
  int m = 1;  ///< ARCH (lagged eps^2) terms
  bool operator==(const GarchOrders&) const = default;
};

struct GarchFit {
  GarchParams params;
  std::vector<double> standard_errors;  ///< order: alpha0, alpha_1..m, beta_1..r
  std::vector<double> cond_variances;
  std::vector<double> std_residuals;
  double loglik = 0.0;
  double loglik_start = 0.0;
  double backcast = 0.0;
  bool stationarity_violated = false;
  int iterations = 0;
};

inline double sample_variance(std::span<const double> x) {
  const double m = detail::mean_of(x);
  double acc = 0.0;
  for (double v : x) acc += (v - m) * (v - m);
  return x.empty() ? 0.0 : acc / static_cast<double>(x.size());
}

/// Conditional variances for the whole sample.
inline std::vector<double> garch_variances(std::span<const double> eps, const GarchParams& g, double backcast) {
  const std::size_t n = eps.size();
  std::vector<double> h(n);
  for (std::size_t t = 0; t < n; ++t) {
    double v = g.alpha0;
    for (std::size_t i = 1; i <= g.alpha.size(); ++i) v += g.alpha[i - 1] * (t >= i ? eps[t - i] * eps[t - i] : backcast);
    for (std::size_t j = 1; j <= g.beta.size(); ++j) v += g.beta[j - 1] * (t >= j ? h[t - j] : backcast);
    h[t] = v;
  }
  return h;
}

/// Gaussian log-likelihood -0.5 sum [log 2pi + log h_t + eps_t^2 / h_t];
/// -infinity if any h_t is not positive.
inline double garch_loglik(std::span<const double> eps, const GarchParams& g, double backcast) {
  const auto h = garch_variances(eps, g, backcast);
  double acc = 0.0;
  for (std::size_t t = 0; t < eps.size(); ++t) {
    if (!(h[t] > 0.0) || !std::isfinite(h[t])) return -std::numeric_limits<double>::infinity();
    acc += std::log(h[t]) + eps[t] * eps[t] / h[t];
  }
  return -0.5 * (acc + static_cast<double>(eps.size()) * std::log(2.0 * std::numbers::pi));
}

namespace detail {

inline std::vector<double> pack_garch(const GarchParams& g) {
  std::vector<double> v{g.alpha0};
  v.insert(v.end(), g.alpha.begin(), g.alpha.end());
  v.insert(v.end(), g.beta.begin(), g.beta.end());
  return v;
}

inline GarchParams unpack_garch(std::span<const double> v, const GarchOrders& o) {
  GarchParams g;
  g.alpha0 = v[0];
  g.alpha.assign(v.begin() + 1, v.begin() + 1 + o.m);
  g.beta.assign(v.begin() + 1 + o.m, v.begin() + 1 + o.m + o.r);
  return g;
}

}  // namespace detail

/// Quasi-MLE over log-transformed parameters (keeps every coefficient
/// positive). Start: alpha0 = 0.1 var, alpha = 0.05 / m, beta = 0.90 / r.
/// The stationarity sum is checked after the fit and reported, not imposed.
inline GarchFit fit_garch(std::span<const double> eps, GarchOrders orders = {}, NelderMeadOptions options = {}) {
  if (orders.r < 0 || orders.m < 1) throw DataError("GARCH orders need m >= 1 and r >= 0");
  if (eps.size() < 50) throw DataError("GARCH fit needs at least 50 residuals");
  const double var = sample_variance(eps);
  if (!(var > 0.0)) throw DataError("degenerate residuals (zero variance)");

  GarchParams start;
  start.alpha0 = 0.1 * var;
  start.alpha.assign(static_cast<std::size_t>(orders.m), 0.05 / orders.m);
  start.beta.assign(static_cast<std::size_t>(orders.r), 0.90 / std::max(orders.r, 1));
  if (orders.r == 0) start.alpha0 = 0.5 * var;

  auto start_log = detail::pack_garch(start);
  for (double& v : start_log) v = std::log(v);

  const auto objective = [&](const std::vector<double>& logv) {
    std::vector<double> v(logv.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::exp(logv[i]);
    return -garch_loglik(eps, detail::unpack_garch(v, orders), var);
  };
  options.initial_step = 0.1;
  options.x_tolerance = 1e-7;
  const auto res = nelder_mead(objective, start_log, options);
  std::vector<double> natural(res.x.size());
  for (std::size_t i = 0; i < natural.size(); ++i) natural[i] = std::exp(res.x[i]);
  if (!res.converged)
    throw ConvergenceError("GARCH optimizer did not converge after " + std::to_string(res.iterations) +
                               " iterations (best -loglik " + std::to_string(res.value) + ")",
                           natural, res.value);

  GarchFit fit;
  fit.params = detail::unpack_garch(natural, orders);
  fit.backcast = var;
  fit.loglik = -res.value;
  fit.loglik_start = -res.start_value;
  fit.iterations = res.iterations;
  fit.stationarity_violated = !(fit.params.persistence() < 1.0);
  fit.cond_variances = garch_variances(eps, fit.params, var);
  fit.std_residuals.resize(eps.size());
  for (std::size_t t = 0; t < eps.size(); ++t) fit.std_residuals[t] = eps[t] / std::sqrt(fit.cond_variances[t]);

  const auto neg_loglik = [&](const std::vector<double>& v) {
    return -garch_loglik(eps, detail::unpack_garch(v, orders), var);
  };
  fit.standard_errors = standard_errors_from_hessian(numerical_hessian(neg_loglik, natural, 1e-4, 1e-2));
  return fit;
}

/// Engle's LM test: regress eps_t^2 on a constant and eps_{t-1..t-lags}^2;
/// statistic = (n - lags) R^2, chi-square with `lags` degrees of freedom.
inline TestResult arch_lm_test(std::span<const double> eps, int lags = 7) {
  if (lags < 1) throw DataError("ARCH-LM lag must be >= 1");
  if (eps.size() <= static_cast<std::size_t>(lags) + 1) throw DataError("series too short for ARCH-LM test");
  const auto L = static_cast<std::size_t>(lags);
  const auto rows = static_cast<Eigen::Index>(eps.size() - L);
  Eigen::MatrixXd X(rows, lags + 1);
  Eigen::VectorXd y(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const std::size_t t = static_cast<std::size_t>(r) + L;
    y(r) = eps[t] * eps[t];
    X(r, 0) = 1.0;
    for (std::size_t k = 1; k <= L; ++k) X(r, static_cast<Eigen::Index>(k)) = eps[t - k] * eps[t - k];
  }
  const double ybar = y.mean();
  const double sst = (y.array() - ybar).square().sum();
  if (!(sst > 1e-300 * static_cast<double>(rows)) || sst <= 1e-24 * ybar * ybar * static_cast<double>(rows))
    return {0.0, 1.0, lags};
  const Eigen::VectorXd beta = X.colPivHouseholderQr().solve(y);
  const double ssr = (y - X * beta).squaredNorm();
  const double r2 = std::clamp(1.0 - ssr / sst, 0.0, 1.0);
  const double stat = static_cast<double>(rows) * r2;
  return {stat, chi_square_sf(stat, lags), lags};
}

}  // namespace sarfima
