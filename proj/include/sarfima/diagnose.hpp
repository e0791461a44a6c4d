#pragma once

// Residual diagnostics: moment summary, portmanteau tests and Jarque-Bera.
//
// Portmanteau degrees of freedom equal the lag; they are not reduced by the
// number of fitted parameters.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "sarfima/error.hpp"
#include "sarfima/spectral.hpp"

namespace sarfima {

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  int df = 0;
};

struct MomentSummary {
  double mean = 0.0;
  double std_dev = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
};

struct DiagnosticsReport {
  MomentSummary moments;
  TestResult ljung_box;
  TestResult box_pierce;
  TestResult jarque_bera;
  int lag = 8;
  std::vector<double> acf_of_squares;  ///< lags 1..lag of the squared series
};

/// Upper-tail chi-square probability, clamped into [0, 1].
inline double chi_square_sf(double statistic, int df) {
  if (df < 1) throw DataError("chi-square needs df >= 1");
  if (!(statistic > 0.0)) return 1.0;
  if (!std::isfinite(statistic)) return 0.0;
  const boost::math::chi_squared dist(df);
  return std::clamp(boost::math::cdf(boost::math::complement(dist, statistic)), 0.0, 1.0);
}

/// Central moments averaged over n: skew = m3/m2^1.5, excess kurt = m4/m2^2 - 3.
/// std_dev is sqrt(m2).
inline MomentSummary moments_summary(std::span<const double> x) {
  const auto n = static_cast<double>(x.size());
  if (x.size() < 4) throw DataError("moment summary needs at least 4 values");
  MomentSummary out;
  out.mean = detail::mean_of(x);
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double e = v - out.mean;
    const double e2 = e * e;
    m2 += e2;
    m3 += e2 * e;
    m4 += e2 * e2;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  if (!(m2 > 0.0)) throw DataError("zero variance");
  out.std_dev = std::sqrt(m2);
  out.skewness = m3 / std::pow(m2, 1.5);
  out.excess_kurtosis = m4 / (m2 * m2) - 3.0;
  return out;
}

inline TestResult ljung_box(std::span<const double> x, int lag) {
  if (lag < 1) throw DataError("portmanteau lag must be >= 1");
  const auto rho = sample_acf(x, lag);
  const auto n = static_cast<double>(x.size());
  double q = 0.0;
  for (int k = 1; k <= lag; ++k) q += rho[static_cast<std::size_t>(k - 1)] * rho[static_cast<std::size_t>(k - 1)] / (n - k);
  q *= n * (n + 2.0);
  return {q, chi_square_sf(q, lag), lag};
}

inline TestResult box_pierce(std::span<const double> x, int lag) {
  if (lag < 1) throw DataError("portmanteau lag must be >= 1");
  const auto rho = sample_acf(x, lag);
  double q = 0.0;
  for (double r : rho) q += r * r;
  q *= static_cast<double>(x.size());
  return {q, chi_square_sf(q, lag), lag};
}

/// JB = (n/6)(S^2 + K^2/4) from skewness and excess kurtosis.
inline TestResult jarque_bera_from_moments(double skewness, double excess_kurtosis, std::size_t n) {
  const double jb = static_cast<double>(n) / 6.0 * (skewness * skewness + excess_kurtosis * excess_kurtosis / 4.0);
  return {jb, chi_square_sf(jb, 2), 2};
}

inline TestResult jarque_bera(std::span<const double> x) {
  if (x.size() < 8) throw DataError("Jarque-Bera needs at least 8 values");
  const auto m = moments_summary(x);
  return jarque_bera_from_moments(m.skewness, m.excess_kurtosis, x.size());
}

inline DiagnosticsReport run_diagnostics(std::span<const double> x, int lag = 8) {
  DiagnosticsReport out;
  out.lag = lag;
  out.moments = moments_summary(x);
  out.ljung_box = ljung_box(x, lag);
  out.box_pierce = box_pierce(x, lag);
  out.jarque_bera = jarque_bera(x);
  std::vector<double> squares(x.begin(), x.end());
  for (double& v : squares) v *= v;
  try {
    out.acf_of_squares = sample_acf(squares, lag);
  } catch (const DataError&) {
    out.acf_of_squares.assign(static_cast<std::size_t>(lag), 0.0);  // constant squares
  }
  return out;
}

}  // namespace sarfima
