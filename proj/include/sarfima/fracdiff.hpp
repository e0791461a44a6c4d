#pragma once

/** @file
 * Fractional and seasonal-fractional difference coefficients, truncated
 * causal filtering, and the MA and AR expansions of the full model.
 *
 * Coefficients are always produced by recursion or convolution. The
 * Gamma-ratio closed form has poles at the non-positive integers and
 * overflows for large lags, so it is only used as a test oracle.
 */

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sarfima/core.hpp"

namespace sarfima {

/// Coefficients of (1 - B)^x up to lag N:
/// pi_0 = 1, pi_l = pi_{l-1} (l - 1 - x) / l.
inline std::vector<double> pi_coefficients(double x, int N) {
  if (N < 0) throw DataError("coefficient count must be non-negative");
  if (!(x > -1.0)) throw DataError("fractional order must exceed -1");
  std::vector<double> out(static_cast<std::size_t>(N) + 1);
  out[0] = 1.0;
  for (int l = 1; l <= N; ++l)
    out[static_cast<std::size_t>(l)] = out[static_cast<std::size_t>(l - 1)] * (l - 1 - x) / l;
  return out;
}

struct FilterCoefficients {
  std::vector<double> values;  ///< psi*_0 .. psi*_N
  MemoryVector memory;

  int length() const noexcept { return static_cast<int>(values.size()) - 1; }
};

/// Coefficients of (1 - B)^d (1 - B^s)^D up to lag N:
/// psi*_j = sum_{i=0}^{floor(j/s)} pi^(s)_i pi_{j - i s}.
inline FilterCoefficients psi_star(const MemoryVector& memory, int N) {
  if (memory.s < 1) throw DataError("season length must be >= 1");
  const auto s = static_cast<std::size_t>(memory.s);
  const auto longrun = pi_coefficients(memory.d, N);
  const auto seasonal = pi_coefficients(memory.D, N / memory.s);
  FilterCoefficients out{std::vector<double>(static_cast<std::size_t>(N) + 1, 0.0), memory};
  for (std::size_t j = 0; j < out.values.size(); ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i * s <= j; ++i) acc += seasonal[i] * longrun[j - i * s];
    out.values[j] = acc;
  }
  return out;
}

/// First N+1 coefficients of the product of two power series.
inline std::vector<double> convolve_truncated(std::span<const double> a, std::span<const double> b, std::size_t N) {
  std::vector<double> out(N + 1, 0.0);
  for (std::size_t i = 0; i < a.size() && i <= N; ++i) {
    if (a[i] == 0.0) continue;
    for (std::size_t j = 0; j < b.size() && i + j <= N; ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

/// First N+1 coefficients of num(z) / den(z); requires den[0] == 1.
inline std::vector<double> divide_series(std::span<const double> num, std::span<const double> den, std::size_t N) {
  if (den.empty() || den[0] != 1.0) throw DataError("series division needs a monic denominator");
  std::vector<double> out(N + 1, 0.0);
  for (std::size_t j = 0; j <= N; ++j) {
    double acc = j < num.size() ? num[j] : 0.0;
    const std::size_t kmax = std::min(j, den.size() - 1);
    for (std::size_t k = 1; k <= kmax; ++k) acc -= den[k] * out[j - k];
    out[j] = acc;
  }
  return out;
}

/// y_t = sum_{j=0}^{min(t, L)} c_j x_{t-j}, where L = coeffs.size() - 1.
inline std::vector<double> causal_filter(std::span<const double> coeffs, std::span<const double> x) {
  std::vector<double> y(x.size(), 0.0);
  for (std::size_t t = 0; t < x.size(); ++t) {
    const std::size_t jmax = std::min(t, coeffs.size() - 1);
    double acc = 0.0;
    for (std::size_t j = 0; j <= jmax; ++j) acc += coeffs[j] * x[t - j];
    y[t] = acc;
  }
  return y;
}

/// U_t = sum_{j=0}^{min(t, L)} psi*_j (x_{t-j} - mean). The sum is truncated
/// at the available history; `max_lag` caps L further (default: full history).
/// Output has the input's length; early values use few terms and callers
/// decide how much of the prefix to discard.
inline std::vector<double> apply_filter(std::span<const double> x, const MemoryVector& memory, double mean,
                                        std::optional<int> max_lag = std::nullopt) {
  if (x.empty()) return {};
  int L = static_cast<int>(x.size()) - 1;
  if (max_lag) {
    if (*max_lag < 0) throw DataError("filter truncation must be non-negative");
    L = std::min(L, *max_lag);
  }
  if (memory.d == 0.0 && memory.D == 0.0) {
    std::vector<double> out(x.begin(), x.end());
    for (double& v : out) v -= mean;
    return out;
  }
  const auto psi = psi_star(memory, L);
  std::vector<double> centered(x.begin(), x.end());
  for (double& v : centered) v -= mean;
  return causal_filter(psi.values, centered);
}

inline TimeSeries apply_filter(const TimeSeries& series, const MemoryVector& memory, double mean,
                               std::optional<int> max_lag = std::nullopt) {
  return TimeSeries(apply_filter(series.values(), memory, mean, max_lag), series.season(), series.index());
}

/// Coefficients of X_t on eps_{t-j}, j = 0..N: the SARMA transfer function
/// Theta(z^s)theta(z) / (Phi(z^s)phi(z)) times (1-z)^{-d} (1-z^s)^{-D}.
inline std::vector<double> ma_expansion(const SarfimaGarchModel& model, int N) {
  require_valid(model);
  if (N < 0) throw DataError("coefficient count must be non-negative");
  const auto n = static_cast<std::size_t>(N);
  const int s = model.memory.s;
  const auto sarma = divide_series(ma_polynomial(model.sarma, s), ar_polynomial(model.sarma, s), n);
  const auto integ = psi_star(model.memory.negated(), N);
  return convolve_truncated(sarma, integ.values, n);
}

/// AR(infinity) coefficients: eps_t = sum_j c_j (X_{t-j} - mu), j = 0..N,
/// i.e. psi*(d, D) times Phi(z^s)phi(z) / (Theta(z^s)theta(z)). Defined
/// whenever the model is invertible; stationarity is not required.
inline std::vector<double> ar_expansion(const SarfimaGarchModel& model, int N) {
  if (auto v = inversion_violations(model); !v.empty()) throw ModelError(std::move(v));
  if (N < 0) throw DataError("coefficient count must be non-negative");
  const auto n = static_cast<std::size_t>(N);
  const int s = model.memory.s;
  const auto sarma = divide_series(ar_polynomial(model.sarma, s), ma_polynomial(model.sarma, s), n);
  const auto diff = psi_star(model.memory, N);
  return convolve_truncated(diff.values, sarma, n);
}

}  // namespace sarfima
