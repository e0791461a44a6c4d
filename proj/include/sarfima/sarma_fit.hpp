#pragma once

// Conditional-sum-of-squares fit of a multiplicative SARMA model to the
// fractionally filtered series.

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "sarfima/core.hpp"
#include "sarfima/optimize.hpp"

namespace sarfima {

struct SarmaOrders {
  int p = 0;
  int q = 1;
  int P = 0;
  int Q = 1;

  int count() const noexcept { return p + q + P + Q; }
  bool operator==(const SarmaOrders&) const = default;
};

struct SarmaFit {
  SarmaParams params;
  std::vector<double> standard_errors;  ///< order: phi, Phi, theta, Theta
  std::vector<double> residuals;        ///< eps_t for t = first_index .. n-1
  std::size_t first_index = 0;          ///< AR conditioning offset p + sP
  double css = 0.0;
  double aic = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Packs (phi, Phi, theta, Theta) into one vector and back.
inline std::vector<double> pack_sarma(const SarmaParams& p) {
  std::vector<double> v;
  v.insert(v.end(), p.phi.begin(), p.phi.end());
  v.insert(v.end(), p.Phi.begin(), p.Phi.end());
  v.insert(v.end(), p.theta.begin(), p.theta.end());
  v.insert(v.end(), p.Theta.begin(), p.Theta.end());
  return v;
}

inline SarmaParams unpack_sarma(std::span<const double> v, const SarmaOrders& o, double sigma2 = 1.0) {
  SarmaParams p;
  auto it = v.begin();
  p.phi.assign(it, it + o.p);
  it += o.p;
  p.Phi.assign(it, it + o.P);
  it += o.P;
  p.theta.assign(it, it + o.q);
  it += o.q;
  p.Theta.assign(it, it + o.Q);
  p.sigma2_eps = sigma2;
  return p;
}

/// Innovations of Phi(B^s)phi(B) u_t = Theta(B^s)theta(B) eps_t computed
/// recursively from t0 = p + sP on, with pre-sample innovations zero.
inline std::vector<double> css_residuals(std::span<const double> u, const SarmaParams& params, int season) {
  const auto ar = ar_polynomial(params, season);
  const auto ma = ma_polynomial(params, season);
  const std::size_t t0 = ar.size() - 1;
  if (u.size() <= t0) return {};
  std::vector<double> e(u.size() - t0, 0.0);
  for (std::size_t t = t0; t < u.size(); ++t) {
    double acc = 0.0;
    for (std::size_t k = 0; k < ar.size(); ++k) acc += ar[k] * u[t - k];
    const std::size_t i = t - t0;
    for (std::size_t k = 1; k < ma.size() && k <= i; ++k) acc -= ma[k] * e[i - k];
    e[i] = acc;
  }
  return e;
}

inline double css_objective(std::span<const double> u, const SarmaParams& params, int season) {
  double acc = 0.0;
  for (double e : css_residuals(u, params, season)) acc += e * e;
  return acc;
}

/// CSS estimate from the origin. Iterates whose AR or MA polynomial has a
/// root in the closed unit disk are rejected. sigma^2 = CSS / n_used and
/// standard errors come from the numerical Hessian of the profile Gaussian
/// negative log-likelihood (n/2) log(CSS / n).
inline SarmaFit fit_sarma(std::span<const double> u, const SarmaOrders& orders, int season,
                          NelderMeadOptions options = {}) {
  for (int o : {orders.p, orders.q, orders.P, orders.Q})
    if (o < 0 || o > 2) throw DataError("SARMA orders must each lie in 0..2");
  if (season < 1) throw DataError("season length must be >= 1");
  const std::size_t t0 = static_cast<std::size_t>(orders.p + season * orders.P);
  if (u.size() < t0 + 10 + static_cast<std::size_t>(orders.count()))
    throw DataError("series too short for the requested SARMA orders");

  const auto feasible = [&](const SarmaParams& p) {
    return polynomial_roots_check(p.phi, 1) && polynomial_roots_check(p.Phi, season) &&
           polynomial_roots_check(p.theta, 1) && polynomial_roots_check(p.Theta, season);
  };
  const auto objective = [&](const std::vector<double>& v) {
    const auto p = unpack_sarma(v, orders);
    if (!feasible(p)) return std::numeric_limits<double>::infinity();
    return css_objective(u, p, season);
  };

  options.initial_step = 0.1;
  const auto res = nelder_mead(objective, std::vector<double>(static_cast<std::size_t>(orders.count()), 0.0), options);
  if (!res.converged) throw ConvergenceError("CSS optimizer did not converge", res.x, res.value);

  SarmaFit fit;
  fit.iterations = res.iterations;
  fit.converged = true;
  fit.params = unpack_sarma(res.x, orders);
  fit.residuals = css_residuals(u, fit.params, season);
  fit.first_index = t0;
  fit.css = res.value;
  const auto n_used = static_cast<double>(fit.residuals.size());
  fit.params.sigma2_eps = fit.css / n_used;
  fit.aic = n_used * std::log(fit.params.sigma2_eps) + 2.0 * (orders.count() + 1);

  if (orders.count() > 0) {
    const auto profile = [&](const std::vector<double>& v) {
      const auto p = unpack_sarma(v, orders);
      return 0.5 * n_used * std::log(css_objective(u, p, season) / n_used);
    };
    fit.standard_errors = standard_errors_from_hessian(numerical_hessian(profile, res.x, 1e-3, 0.1));
  }
  return fit;
}

}  // namespace sarfima
