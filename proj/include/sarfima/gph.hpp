#pragma once

/** @file
 * Log-periodogram (GPH-type) regression for the long-run and seasonal
 * memory orders.
 *
 * The regression is
 *   log I(w_j) = a0 - D log[2 sin(s w_j / 2)]^2 - d log[2 sin(w_j / 2)]^2 + u_j
 * over a set of Fourier ordinates chosen by OrdinateScheme. Standard errors
 * use the OLS covariance with the error variance fixed at pi^2/6 (the
 * variance of a log-exponential variate); no bias correction is applied.
 */

#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sarfima/core.hpp"
#include "sarfima/spectral.hpp"

namespace sarfima {

enum class OrdinateScheme {
  near_zero,           ///< j = 1..M
  zero_plus_seasonal,  ///< j = 1..M plus M ordinates above each harmonic 2*pi*k/s
};

inline const char* to_string(OrdinateScheme s) {
  return s == OrdinateScheme::near_zero ? "near-zero" : "zero-plus-seasonal";
}

inline OrdinateScheme ordinate_scheme_from_string(const std::string& name) {
  if (name == "near-zero") return OrdinateScheme::near_zero;
  if (name == "zero-plus-seasonal") return OrdinateScheme::zero_plus_seasonal;
  throw DataError("unknown ordinate scheme '" + name + "'");
}

/// Default chosen from the Monte Carlo identification study (see README):
/// near-zero ordinates alone cannot separate d from D because both
/// regressors behave like log w^2 close to the origin.
inline constexpr OrdinateScheme kDefaultOrdinateScheme = OrdinateScheme::zero_plus_seasonal;

struct GphEstimate {
  double d_hat = 0.0;
  double D_hat = 0.0;
  double sd_d = 0.0;
  double sd_D = 0.0;
  int M = 0;
  double alpha = std::numeric_limits<double>::quiet_NaN();  ///< NaN when M was given directly
  OrdinateScheme ordinate_scheme = OrdinateScheme::near_zero;
  int ordinates_used = 0;
  double intercept = 0.0;
  double condition_number = 0.0;
};

/// M = floor( ((n - s)/2 - 1)^alpha / s ).
inline int bandwidth(int n, int s, double alpha) {
  if (s < 1 || n <= s) throw DataError("bandwidth needs n > s >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DataError("bandwidth exponent must lie in (0, 1)");
  const double base = (n - s) / 2.0 - 1.0;
  if (!(base > 0.0)) throw DataError("bandwidth too small");
  const int M = static_cast<int>(std::floor(std::pow(base, alpha) / s));
  if (M < 2) throw DataError("bandwidth too small (M = " + std::to_string(M) + ")");
  return M;
}

namespace detail {

inline std::vector<std::size_t> gph_ordinates(std::size_t n, int s, int M, OrdinateScheme scheme) {
  const std::size_t count = (n - 1) / 2;
  if (static_cast<std::size_t>(M) > count)
    throw DataError("bandwidth M = " + std::to_string(M) + " exceeds the available ordinates");
  std::set<std::size_t> chosen;
  for (std::size_t j = 1; j <= static_cast<std::size_t>(M); ++j) chosen.insert(j);
  if (scheme == OrdinateScheme::zero_plus_seasonal) {
    for (int k = 1; k <= s / 2; ++k) {
      // harmonic sits at j = k n / s; take the M ordinates strictly above it,
      // or strictly below when it is the Nyquist harmonic.
      const std::size_t kn = static_cast<std::size_t>(k) * n;
      const std::size_t floor_h = kn / static_cast<std::size_t>(s);
      const bool on_grid = kn % static_cast<std::size_t>(s) == 0;
      const bool above = floor_h + static_cast<std::size_t>(M) <= count;
      for (std::size_t i = 1; i <= static_cast<std::size_t>(M); ++i) {
        std::size_t j;
        if (above) {
          j = floor_h + i;
        } else {
          const std::size_t ceil_h = on_grid ? floor_h : floor_h + 1;
          if (ceil_h < i + 1) throw DataError("bandwidth too large for the seasonal harmonics");
          j = ceil_h - i;
        }
        if (!chosen.insert(j).second)
          throw DataError("bandwidth M = " + std::to_string(M) + " makes seasonal ordinate blocks overlap");
      }
    }
  }
  return {chosen.begin(), chosen.end()};
}

}  // namespace detail

inline GphEstimate gph_seasonal(const TimeSeries& series, int M, OrdinateScheme scheme = kDefaultOrdinateScheme,
                                bool demean = true) {
  if (M < 3) throw DataError("GPH regression needs M >= 3");
  const int s = series.season();
  const std::size_t n = series.size();
  if (n < 8) throw DataError("series too short for GPH regression");
  const auto pg = periodogram(series.values(), demean);
  const auto js = detail::gph_ordinates(n, s, M, scheme);

  const auto rows = static_cast<Eigen::Index>(js.size());
  Eigen::MatrixXd X(rows, 3);
  Eigen::VectorXd y(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const std::size_t j = js[static_cast<std::size_t>(r)];
    const double w = pg.frequencies[j - 1];
    const double ord = pg.ordinates[j - 1];
    const double seasonal = 2.0 * std::sin(s * w / 2.0);
    const double longrun = 2.0 * std::sin(w / 2.0);
    if (std::abs(seasonal) < 1e-12)
      throw DataError("ordinate j = " + std::to_string(j) + " falls on a seasonal frequency");
    if (!(ord > 0.0)) throw DataError("zero periodogram ordinate at j = " + std::to_string(j));
    X(r, 0) = 1.0;
    X(r, 1) = -std::log(seasonal * seasonal);
    X(r, 2) = -std::log(longrun * longrun);
    y(r) = std::log(ord);
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(X);
  const auto& sv = svd.singularValues();
  const double cond = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
  if (!(cond < 1e10)) {
    std::ostringstream msg;
    msg << "singular GPH regression matrix (condition number " << cond << ")";
    throw NumericalError(msg.str());
  }

  const Eigen::Matrix3d xtx = X.transpose() * X;
  const Eigen::Vector3d beta = xtx.ldlt().solve(X.transpose() * y);
  const Eigen::Matrix3d cov = (std::numbers::pi * std::numbers::pi / 6.0) * xtx.inverse();

  GphEstimate out;
  out.intercept = beta(0);
  out.D_hat = beta(1);
  out.d_hat = beta(2);
  out.sd_D = std::sqrt(cov(1, 1));
  out.sd_d = std::sqrt(cov(2, 2));
  out.M = M;
  out.ordinate_scheme = scheme;
  out.ordinates_used = static_cast<int>(rows);
  out.condition_number = cond;
  return out;
}

/// Bandwidth from the exponent rule, then the regression.
inline GphEstimate gph_seasonal_alpha(const TimeSeries& series, double alpha,
                                      OrdinateScheme scheme = kDefaultOrdinateScheme, bool demean = true) {
  auto est = gph_seasonal(series, bandwidth(static_cast<int>(series.size()), series.season(), alpha), scheme, demean);
  est.alpha = alpha;
  return est;
}

}  // namespace sarfima
