#pragma once

// One-step-ahead prediction with homoscedastic and GARCH interval bands, and
// the percentage-error / coverage evaluation of a forecast window.

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "sarfima/core.hpp"
#include "sarfima/fracdiff.hpp"

namespace sarfima {

/// Half-open range of positions [begin, end) into a series.
struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const noexcept { return end > begin ? end - begin : 0; }
};

/// Last innovations and conditional variances before a forecast origin,
/// most recent first. Seeds the variance recursion over the window.
struct GarchState {
  std::vector<double> eps2;
  std::vector<double> h;
};

struct ForecastOptions {
  double level = 0.95;
  bool student_t = false;  ///< t quantile (scaled to unit variance) instead of Gaussian
  double t_df = 5.0;
  std::optional<GarchState> garch_seed;
};

struct ForecastSeries {
  std::size_t first_index = 0;
  std::vector<double> point;
  std::vector<double> h;
  std::vector<double> lower_homosc, upper_homosc;
  std::vector<double> lower_garch, upper_garch;
  double level = 0.95;
  double quantile = 0.0;
  double sigma2 = 0.0;  ///< homoscedastic innovation variance
  bool nonstationary = false;  ///< model outside the stationary region (still invertible)

  std::size_t size() const noexcept { return point.size(); }
};

struct ForecastEvaluation {
  double mpe = 0.0;    ///< percent, actual minus forecast over actual
  double mape = 0.0;   ///< percent
  double cpgfi = 0.0;  ///< percent of actuals inside the GARCH band
  double cphfi = 0.0;  ///< percent of actuals inside the homoscedastic band
};

/// Two-sided interval multiplier for the given coverage level.
inline double interval_quantile(double level, bool student_t = false, double df = 5.0) {
  if (!(level > 0.0 && level < 1.0)) throw DataError("interval level must lie in (0, 1)");
  const double p = (1.0 + level) / 2.0;
  if (!student_t) return boost::math::quantile(boost::math::normal(), p);
  if (!(df > 2.0)) throw DataError("t quantile needs df > 2");
  return boost::math::quantile(boost::math::students_t(df), p) * std::sqrt((df - 2.0) / df);
}

/// Smallest admissible forecast origin: two seasons of history.
inline std::size_t minimum_history(int season) { return static_cast<std::size_t>(std::max(2 * season, 2)); }

/// Rolling-origin one-step forecasts with frozen parameters. The model must
/// be invertible (see inversion_violations); a fitted model just outside
/// the stationary region is accepted and flagged. For each t in
/// the range, X^_t = mu - sum_{j=1}^{t} c_j (X_{t-j} - mu) where c are the
/// AR(infinity) coefficients of the full model, truncated at the available
/// history. eps^_t = X_t - X^_t drives h_{t+1}. Without a seed the variance
/// recursion runs from the start of the history, pre-sample values set to
/// the unconditional variance.
inline ForecastSeries one_step_forecasts(const SarfimaGarchModel& model, const TimeSeries& history,
                                         IndexRange range, const ForecastOptions& opt = {}) {
  if (auto v = inversion_violations(model); !v.empty()) throw ModelError(std::move(v));
  const std::size_t min_hist = minimum_history(model.memory.s);
  if (range.begin < min_hist)
    throw DataError("forecast range starts at " + std::to_string(range.begin) + ", before the minimum history of " +
                    std::to_string(min_hist) + " observations");
  if (range.end > history.size() || range.size() == 0)
    throw DataError("forecast range does not fit inside the series");

  const auto x = history.values();
  const double mu = model.mu;
  const auto coeffs = ar_expansion(model, static_cast<int>(range.end) - 1);

  const bool need_all = model.garch && !opt.garch_seed;
  const std::size_t from = need_all ? 0 : range.begin;
  std::vector<double> point(range.end, 0.0), resid(range.end, 0.0);
  for (std::size_t t = from; t < range.end; ++t) {
    double acc = 0.0;
    for (std::size_t j = 1; j <= t; ++j) acc += coeffs[j] * (x[t - j] - mu);
    point[t] = mu - acc;
    resid[t] = x[t] - point[t];
  }

  ForecastSeries out;
  out.first_index = range.begin;
  out.level = opt.level;
  out.quantile = interval_quantile(opt.level, opt.student_t, opt.t_df);
  out.sigma2 = model.sarma.sigma2_eps;
  out.nonstationary = !validate_model(model).empty();
  out.point.assign(point.begin() + static_cast<std::ptrdiff_t>(range.begin), point.end());

  std::vector<double> h(range.end, model.sarma.sigma2_eps);
  if (model.garch) {
    const auto& g = *model.garch;
    const double fill = std::isfinite(g.unconditional_variance()) ? g.unconditional_variance() : model.sarma.sigma2_eps;
    const auto eps2_before = [&](std::size_t t, std::size_t lag) {
      if (t >= from + lag) return resid[t - lag] * resid[t - lag];
      if (opt.garch_seed) {
        const std::size_t back = from + lag - t - 1;  // 0 = most recent pre-range value
        if (back < opt.garch_seed->eps2.size()) return opt.garch_seed->eps2[back];
      }
      return fill;
    };
    const auto h_before = [&](std::size_t t, std::size_t lag) {
      if (t >= from + lag) return h[t - lag];
      if (opt.garch_seed) {
        const std::size_t back = from + lag - t - 1;
        if (back < opt.garch_seed->h.size()) return opt.garch_seed->h[back];
      }
      return fill;
    };
    for (std::size_t t = from; t < range.end; ++t) {
      double v = g.alpha0;
      for (std::size_t i = 1; i <= g.alpha.size(); ++i) v += g.alpha[i - 1] * eps2_before(t, i);
      for (std::size_t j = 1; j <= g.beta.size(); ++j) v += g.beta[j - 1] * h_before(t, j);
      h[t] = v;
    }
  }
  out.h.assign(h.begin() + static_cast<std::ptrdiff_t>(range.begin), h.end());

  const double homo = out.quantile * std::sqrt(out.sigma2);
  for (std::size_t i = 0; i < out.point.size(); ++i) {
    const double p = out.point[i];
    const double half = out.quantile * std::sqrt(out.h[i]);
    out.lower_homosc.push_back(p - homo);
    out.upper_homosc.push_back(p + homo);
    out.lower_garch.push_back(p - half);
    out.upper_garch.push_back(p + half);
  }
  return out;
}

/// MPE, MAPE and band coverage (bounds inclusive), all in percent.
inline ForecastEvaluation evaluate_forecasts(std::span<const double> actual, const ForecastSeries& f) {
  if (actual.size() != f.size()) throw DataError("actual and forecast lengths differ");
  if (actual.empty()) throw DataError("nothing to evaluate");
  ForecastEvaluation ev;
  std::size_t in_g = 0, in_h = 0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const double a = actual[i];
    if (a == 0.0) throw DataError("actual value is zero at index " + std::to_string(f.first_index + i));
    const double rel = (a - f.point[i]) / a;
    ev.mpe += rel;
    ev.mape += std::abs(rel);
    if (a >= f.lower_garch[i] && a <= f.upper_garch[i]) ++in_g;
    if (a >= f.lower_homosc[i] && a <= f.upper_homosc[i]) ++in_h;
  }
  const auto n = static_cast<double>(actual.size());
  ev.mpe *= 100.0 / n;
  ev.mape *= 100.0 / n;
  ev.cpgfi = 100.0 * static_cast<double>(in_g) / n;
  ev.cphfi = 100.0 * static_cast<double>(in_h) / n;
  return ev;
}

}  // namespace sarfima
