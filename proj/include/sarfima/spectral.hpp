#pragma once

// Raw periodogram, sample ACF/PACF and the model-implied spectral density.

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include "sarfima/core.hpp"

namespace sarfima {

/// Fourier frequencies 2*pi*j/n for j = 1..floor((n-1)/2) and I(w_j).
struct PeriodogramSet {
  std::vector<double> frequencies;
  std::vector<double> ordinates;
  std::size_t n = 0;  ///< length of the series it came from
};

namespace detail {

inline double mean_of(std::span<const double> x) {
  double acc = 0.0;
  for (double v : x) acc += v;
  return x.empty() ? 0.0 : acc / static_cast<double>(x.size());
}

}  // namespace detail

/// I(w_j) = |sum_t x_t exp(i w_j t)|^2 / (2 pi n), evaluated by direct
/// summation over an exact twiddle table (index j*t mod n).
inline PeriodogramSet periodogram(std::span<const double> x, bool demean = true) {
  const std::size_t n = x.size();
  if (n < 2) throw DataError("series too short for periodogram (need n >= 2)");
  const double center = demean ? detail::mean_of(x) : 0.0;

  std::vector<double> cosines(n), sines(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    cosines[k] = std::cos(angle);
    sines[k] = std::sin(angle);
  }
  std::vector<double> centered(n);
  for (std::size_t t = 0; t < n; ++t) centered[t] = x[t] - center;

  const std::size_t count = (n - 1) / 2;
  PeriodogramSet out;
  out.n = n;
  out.frequencies.resize(count);
  out.ordinates.resize(count);
  const double scale = 1.0 / (2.0 * std::numbers::pi * static_cast<double>(n));
  for (std::size_t j = 1; j <= count; ++j) {
    double re = 0.0, im = 0.0;
    std::size_t phase = j;  // j * t mod n with t starting at 1
    for (std::size_t t = 0; t < n; ++t) {
      re += centered[t] * cosines[phase];
      im += centered[t] * sines[phase];
      phase += j;
      if (phase >= n) phase -= n;
    }
    out.frequencies[j - 1] = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
    out.ordinates[j - 1] = (re * re + im * im) * scale;
  }
  return out;
}

inline PeriodogramSet periodogram(const TimeSeries& series, bool demean = true) {
  return periodogram(series.values(), demean);
}

/// rho(1..max_lag). rho(0) = 1 is implied and not returned.
inline std::vector<double> sample_acf(std::span<const double> x, int max_lag) {
  const auto n = x.size();
  if (max_lag < 0) throw DataError("max_lag must be non-negative");
  if (static_cast<std::size_t>(max_lag) >= n) throw DataError("max_lag must be smaller than the series length");
  const double m = detail::mean_of(x);
  double denom = 0.0;
  for (double v : x) denom += (v - m) * (v - m);
  if (!(denom > 0.0)) throw DataError("zero variance");
  std::vector<double> out(static_cast<std::size_t>(max_lag));
  for (std::size_t k = 1; k <= out.size(); ++k) {
    double acc = 0.0;
    for (std::size_t t = 0; t + k < n; ++t) acc += (x[t] - m) * (x[t + k] - m);
    out[k - 1] = acc / denom;
  }
  return out;
}

inline std::vector<double> sample_acf(const TimeSeries& s, int max_lag) { return sample_acf(s.values(), max_lag); }

/// Durbin-Levinson on the sample ACF. Entry k-1 is the lag-k partial
/// autocorrelation.
inline std::vector<double> sample_pacf(std::span<const double> x, int max_lag) {
  const auto rho = sample_acf(x, max_lag);
  const auto L = rho.size();
  std::vector<double> pacf(L), prev(L + 1, 0.0), cur(L + 1, 0.0);
  double v = 1.0;
  for (std::size_t k = 1; k <= L; ++k) {
    double num = rho[k - 1];
    for (std::size_t j = 1; j < k; ++j) num -= prev[j] * rho[k - j - 1];
    const double a = v > 0.0 ? num / v : 0.0;
    cur[k] = a;
    for (std::size_t j = 1; j < k; ++j) cur[j] = prev[j] - a * prev[k - j];
    v *= (1.0 - a * a);
    pacf[k - 1] = a;
    prev = cur;
  }
  return pacf;
}

inline std::vector<double> sample_pacf(const TimeSeries& s, int max_lag) { return sample_pacf(s.values(), max_lag); }

namespace detail {

/// |sum_k c_k exp(-i k omega)|^2 for a full polynomial coefficient vector.
inline double transfer_gain(std::span<const double> poly, double omega) {
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t k = 0; k < poly.size(); ++k)
    acc += poly[k] * std::polar(1.0, -static_cast<double>(k) * omega);
  return std::norm(acc);
}

}  // namespace detail

/// f_X(w) = f_U(w) [2 sin(s w / 2)]^{-2D} [2 sin(w / 2)]^{-2d}, with f_U the
/// SARMA spectral density. The sine factors enter squared, so the value is
/// defined (and even, 2*pi periodic) for every real w away from the poles.
inline double spectral_density(const SarfimaGarchModel& model, double omega) {
  if (!std::isfinite(omega)) throw DataError("frequency must be finite");
  const auto& mem = model.memory;
  const int s = std::max(mem.s, 1);
  const double seasonal = 2.0 * std::sin(s * omega / 2.0);
  const double longrun = 2.0 * std::sin(omega / 2.0);
  constexpr double kPole = 1e-12;
  if (mem.D > 0.0 && std::abs(seasonal) < kPole)
    throw NumericalError("spectral density unbounded at seasonal frequency");
  if (mem.d > 0.0 && std::abs(longrun) < kPole)
    throw NumericalError("spectral density unbounded at frequency zero");

  const auto ar = ar_polynomial(model.sarma, s);
  const auto ma = ma_polynomial(model.sarma, s);
  const double f_u = model.innovation_variance() / (2.0 * std::numbers::pi) *
                     detail::transfer_gain(ma, omega) / detail::transfer_gain(ar, omega);
  return f_u * std::pow(seasonal * seasonal, -mem.D) * std::pow(longrun * longrun, -mem.d);
}

}  // namespace sarfima
