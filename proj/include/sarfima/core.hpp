#pragma once

/** @file
 * Domain types shared by every module: the observed series, the memory
 * vector, SARMA and GARCH parameter blocks, and the full seasonal
 * fractionally integrated model with conditionally heteroscedastic
 * innovations.
 *
 * Lag polynomials follow the minus-sign convention
 * \f$ \phi(z) = 1 - \phi_1 z - \dots - \phi_p z^p \f$ throughout, and the
 * seasonal factors are polynomials in \f$ z^s \f$.
 */

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sarfima/error.hpp"

namespace sarfima {

using Date = std::chrono::year_month_day;

/// Observed series with its season length and an optional calendar index.
/// Values are finite and the index, when present, is strictly increasing.
class TimeSeries {
 public:
  TimeSeries() = default;

  explicit TimeSeries(std::vector<double> values, int season = 1,
                      std::optional<std::vector<Date>> index = std::nullopt)
      : values_(std::move(values)), season_(season), index_(std::move(index)) {
    if (season_ < 1) throw DataError("season length must be >= 1");
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i]))
        throw DataError("non-finite value at position " + std::to_string(i));
    }
    if (index_) {
      if (index_->size() != values_.size())
        throw DataError("date index length differs from value count");
      for (std::size_t i = 1; i < index_->size(); ++i) {
        if (!((*index_)[i - 1] < (*index_)[i]))
          throw DataError("date index not strictly increasing at position " + std::to_string(i));
      }
    }
  }

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  int season() const noexcept { return season_; }
  const std::optional<std::vector<Date>>& index() const noexcept { return index_; }
  double operator[](std::size_t i) const { return values_[i]; }

  /// Leading `count` observations (keeps season and index).
  TimeSeries head(std::size_t count) const {
    count = std::min(count, values_.size());
    std::vector<double> v(values_.begin(), values_.begin() + static_cast<std::ptrdiff_t>(count));
    std::optional<std::vector<Date>> idx;
    if (index_) idx.emplace(index_->begin(), index_->begin() + static_cast<std::ptrdiff_t>(count));
    return TimeSeries(std::move(v), season_, std::move(idx));
  }

  double mean() const {
    double acc = 0.0;
    for (double v : values_) acc += v;
    return values_.empty() ? 0.0 : acc / static_cast<double>(values_.size());
  }

 private:
  std::vector<double> values_;
  int season_ = 1;
  std::optional<std::vector<Date>> index_;
};

/// Throws unless the series is long enough for estimation (n >= 2s).
inline void require_estimable(const TimeSeries& series) {
  const auto need = static_cast<std::size_t>(std::max(2 * series.season(), 2));
  if (series.size() < need)
    throw DataError("series too short: need at least " + std::to_string(need) +
                    " observations (2 seasons), got " + std::to_string(series.size()));
}

/// Long-run order d, seasonal order D and season length s.
struct MemoryVector {
  double d = 0.0;
  double D = 0.0;
  int s = 1;

  /// |d + D| < 1/2 and |D| < 1/2.
  bool stationary_invertible() const noexcept {
    return std::abs(d + D) < 0.5 && std::abs(D) < 0.5;
  }
  MemoryVector negated() const noexcept { return {-d, -D, s}; }
};

struct SarmaParams {
  std::vector<double> phi;
  std::vector<double> Phi;
  std::vector<double> theta;
  std::vector<double> Theta;
  double sigma2_eps = 1.0;

  std::size_t count() const noexcept { return phi.size() + Phi.size() + theta.size() + Theta.size(); }
};

struct GarchParams {
  double alpha0 = 1.0;
  std::vector<double> alpha;  ///< ARCH terms, length m
  std::vector<double> beta;   ///< GARCH terms, length r

  double persistence() const noexcept {
    double acc = 0.0;
    for (double a : alpha) acc += a;
    for (double b : beta) acc += b;
    return acc;
  }
  /// alpha0 / (1 - sum alpha - sum beta); infinite outside the stationary region.
  double unconditional_variance() const noexcept {
    const double gap = 1.0 - persistence();
    return gap > 0.0 ? alpha0 / gap : std::numeric_limits<double>::infinity();
  }
};

struct SarfimaGarchModel {
  double mu = 0.0;
  MemoryVector memory;
  SarmaParams sarma;
  std::optional<GarchParams> garch;

  /// Variance of the white-noise innovations: the GARCH unconditional
  /// variance when present, otherwise sigma2_eps.
  double innovation_variance() const noexcept {
    return garch ? garch->unconditional_variance() : sarma.sigma2_eps;
  }
};

// ---------------------------------------------------------------------------
// Lag polynomials

/// Full coefficient vector of 1 - c_1 z^k - c_2 z^{2k} - ... (entry 0 is 1).
inline std::vector<double> lag_polynomial(std::span<const double> coeffs, int stride) {
  std::vector<double> out(coeffs.size() * static_cast<std::size_t>(stride) + 1, 0.0);
  out[0] = 1.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) out[(i + 1) * static_cast<std::size_t>(stride)] = -coeffs[i];
  return out;
}

inline std::vector<double> multiply_polynomials(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

/// Phi(z^s) phi(z), expanded.
inline std::vector<double> ar_polynomial(const SarmaParams& p, int s) {
  return multiply_polynomials(lag_polynomial(p.phi, 1), lag_polynomial(p.Phi, s));
}

/// Theta(z^s) theta(z), expanded.
inline std::vector<double> ma_polynomial(const SarmaParams& p, int s) {
  return multiply_polynomials(lag_polynomial(p.theta, 1), lag_polynomial(p.Theta, s));
}

inline constexpr double kRootTolerance = 1e-10;

/// True iff every root of 1 - c_1 z^k - c_2 z^{2k} - ... has modulus
/// greater than 1 + 1e-10. An all-zero (or empty) coefficient list is the
/// constant polynomial and passes.
///
/// Works in w = z^k: the eigenvalues of the companion matrix built from c
/// are the reciprocal roots 1/w, and |z| = |w|^{1/k}.
inline bool polynomial_roots_check(std::span<const double> coeffs, int seasonal_stride = 1) {
  if (seasonal_stride < 1) throw DataError("seasonal stride must be >= 1");
  for (double c : coeffs)
    if (!std::isfinite(c)) return false;
  std::size_t degree = coeffs.size();
  while (degree > 0 && coeffs[degree - 1] == 0.0) --degree;
  if (degree == 0) return true;

  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(degree),
                                                    static_cast<Eigen::Index>(degree));
  for (std::size_t j = 0; j < degree; ++j) companion(0, static_cast<Eigen::Index>(j)) = coeffs[j];
  for (std::size_t i = 1; i < degree; ++i)
    companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;

  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  if (solver.info() != Eigen::Success) return false;
  const double bound = std::pow(1.0 + kRootTolerance, -static_cast<double>(seasonal_stride));
  for (const auto& lambda : solver.eigenvalues())
    if (std::abs(lambda) >= bound) return false;
  return true;
}

/// Every violated condition of the model; empty means valid. Never throws.
inline std::vector<Violation> validate_model(const SarfimaGarchModel& m) {
  std::vector<Violation> out;
  const auto all_finite = [](std::span<const double> xs) {
    return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
  };

  if (!std::isfinite(m.mu)) out.push_back({"mean.finite", "mean is not finite"});
  if (m.memory.s < 1) out.push_back({"memory.season", "season length < 1"});
  if (!std::isfinite(m.memory.d) || !std::isfinite(m.memory.D)) {
    out.push_back({"memory.finite", "memory parameters not finite"});
  } else {
    if (!(std::abs(m.memory.d + m.memory.D) < 0.5)) out.push_back({"memory.sum", "|d+D| >= 1/2"});
    if (!(std::abs(m.memory.D) < 0.5)) out.push_back({"memory.seasonal", "|D| >= 1/2"});
  }

  const int s = std::max(m.memory.s, 1);
  const auto& sp = m.sarma;
  if (!all_finite(sp.phi) || !all_finite(sp.Phi) || !all_finite(sp.theta) || !all_finite(sp.Theta)) {
    out.push_back({"sarma.finite", "SARMA coefficients not finite"});
  } else {
    if (!polynomial_roots_check(sp.phi, 1) || !polynomial_roots_check(sp.Phi, s))
      out.push_back({"sarma.causal", "AR polynomial Phi(z^s)phi(z) has a root on or inside the unit circle"});
    if (!polynomial_roots_check(sp.theta, 1) || !polynomial_roots_check(sp.Theta, s))
      out.push_back({"sarma.invertible", "MA polynomial Theta(z^s)theta(z) has a root on or inside the unit circle"});
  }
  if (!(sp.sigma2_eps > 0.0) || !std::isfinite(sp.sigma2_eps))
    out.push_back({"sarma.sigma2", "innovation variance must be positive and finite"});

  if (m.garch) {
    const auto& g = *m.garch;
    if (!(g.alpha0 > 0.0) || !std::isfinite(g.alpha0)) out.push_back({"garch.alpha0", "alpha0 must be > 0"});
    if (!std::all_of(g.alpha.begin(), g.alpha.end(), [](double a) { return a >= 0.0 && std::isfinite(a); }))
      out.push_back({"garch.alpha", "ARCH coefficients must be >= 0"});
    if (!std::all_of(g.beta.begin(), g.beta.end(), [](double b) { return b >= 0.0 && std::isfinite(b); }))
      out.push_back({"garch.beta", "GARCH coefficients must be >= 0"});
    if (!(g.persistence() < 1.0))
      out.push_back({"garch.stationarity", "GARCH stationarity sum >= 1"});
  }
  return out;
}

/// Conditions needed for the AR(infinity) inversion used in prediction:
/// everything in validate_model except non-stationarity on the upper side
/// (d + D >= 1/2 or D >= 1/2) and a GARCH persistence sum >= 1. The
/// fractional filter stays well defined there; it only loses stationarity.
inline std::vector<Violation> inversion_violations(const SarfimaGarchModel& m) {
  auto all = validate_model(m);
  const bool upper_only = m.memory.d + m.memory.D > -0.5 && m.memory.D > -0.5 && m.memory.d + m.memory.D < 1.5 &&
                          m.memory.D < 1.5;
  std::erase_if(all, [&](const Violation& v) {
    if (v.code == "garch.stationarity") return true;
    return upper_only && (v.code == "memory.sum" || v.code == "memory.seasonal");
  });
  return all;
}

inline void require_valid(const SarfimaGarchModel& m) {
  auto violations = validate_model(m);
  if (!violations.empty()) throw ModelError(std::move(violations));
}

/// Builds a model, throwing ModelError listing every violated condition.
inline SarfimaGarchModel make_model(double mu, MemoryVector memory, SarmaParams sarma,
                                    std::optional<GarchParams> garch = std::nullopt) {
  SarfimaGarchModel m{mu, memory, std::move(sarma), std::move(garch)};
  require_valid(m);
  return m;
}

}  // namespace sarfima
