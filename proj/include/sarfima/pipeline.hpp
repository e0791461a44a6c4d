#pragma once

/** @file
 * Two-step estimation pipeline:
 *
 *   gph -> filter -> burn-in -> sarma -> residuals -> arch-lm -> garch -> diagnostics
 *
 * The memory orders come from the log-periodogram regression, the series is
 * fractionally filtered with them, a SARMA model is fitted to the filtered
 * series by CSS, and a GARCH model is fitted to its residuals when the ARCH
 * test rejects homoscedasticity (or when forced).
 */

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sarfima/core.hpp"
#include "sarfima/diagnose.hpp"
#include "sarfima/forecast.hpp"
#include "sarfima/fracdiff.hpp"
#include "sarfima/garch.hpp"
#include "sarfima/gph.hpp"
#include "sarfima/sarma_fit.hpp"

namespace sarfima {

enum class GarchMode { gated, force, off };

inline const char* to_string(GarchMode m) {
  switch (m) {
    case GarchMode::gated: return "gated";
    case GarchMode::force: return "force";
    case GarchMode::off: return "off";
  }
  return "gated";
}

inline GarchMode garch_mode_from_string(const std::string& s) {
  if (s == "gated") return GarchMode::gated;
  if (s == "force") return GarchMode::force;
  if (s == "off") return GarchMode::off;
  throw DataError("unknown GARCH mode '" + s + "'");
}

struct PipelineConfig {
  double alpha = 0.78;
  OrdinateScheme scheme = kDefaultOrdinateScheme;
  SarmaOrders sarma{0, 1, 0, 1};
  GarchOrders garch{1, 1};
  int arch_lm_lag = 7;
  double gate_level = 0.05;
  GarchMode garch_mode = GarchMode::gated;
  int burn_in = -1;            ///< negative: max(50, 2 s)
  int filter_truncation = -1;  ///< negative: full available history
  int portmanteau_lag = 8;
  std::vector<SarmaOrders> aic_candidates;  ///< extra orders to report AIC for
};

inline int resolved_burn_in(const PipelineConfig& c, int season) {
  return c.burn_in >= 0 ? c.burn_in : std::max(50, 2 * season);
}

struct AicEntry {
  SarmaOrders orders;
  double aic = std::numeric_limits<double>::quiet_NaN();
  std::string error;  ///< empty when the fit succeeded
};

struct FitReport {
  PipelineConfig config;
  SarfimaGarchModel model;
  GphEstimate gph;
  std::size_t n = 0;
  int season = 1;
  double sample_mean = 0.0;
  int burn_in = 0;

  std::vector<double> filtered;  ///< U^_t over the full sample
  std::vector<double> sarma_se;
  double css = 0.0;
  double aic = 0.0;
  std::vector<AicEntry> aic_candidates;

  std::size_t residual_offset = 0;  ///< series position of residuals[0]
  std::vector<double> residuals;
  std::vector<double> std_residuals;
  std::vector<double> cond_variances;

  TestResult arch_lm;
  bool garch_fitted = false;
  std::string garch_decision;
  std::vector<double> garch_se;
  double loglik_garch = std::numeric_limits<double>::quiet_NaN();
  bool garch_stationarity_violated = false;

  DiagnosticsReport diagnostics;
  std::vector<Violation> violations;  ///< of the fitted model
  std::vector<std::string> stages;    ///< completed stages, in order
};

namespace detail {

template <class F>
auto run_stage(FitReport& report, const char* name, F&& body) {
  try {
    if constexpr (std::is_void_v<decltype(body())>) {
      body();
      report.stages.emplace_back(name);
    } else {
      auto r = body();
      report.stages.emplace_back(name);
      return r;
    }
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(name, e);
  }
}

}  // namespace detail

inline FitReport fit_pipeline(const TimeSeries& series, const PipelineConfig& config = {}) {
  require_estimable(series);
  FitReport rep;
  rep.config = config;
  rep.n = series.size();
  rep.season = series.season();
  rep.sample_mean = series.mean();
  const int s = series.season();

  rep.gph = detail::run_stage(rep, "gph", [&] { return gph_seasonal_alpha(series, config.alpha, config.scheme); });
  const MemoryVector memory{rep.gph.d_hat, rep.gph.D_hat, s};

  rep.filtered = detail::run_stage(rep, "filter", [&] {
    std::optional<int> trunc;
    if (config.filter_truncation >= 0) trunc = config.filter_truncation;
    return apply_filter(series.values(), memory, rep.sample_mean, trunc);
  });

  rep.burn_in = resolved_burn_in(config, s);
  detail::run_stage(rep, "burn-in", [&] {
    if (static_cast<std::size_t>(rep.burn_in) + 60 > rep.n)
      throw DataError("burn-in of " + std::to_string(rep.burn_in) + " leaves too few observations");
  });
  const std::span<const double> u(rep.filtered.data() + rep.burn_in, rep.filtered.size() - static_cast<std::size_t>(rep.burn_in));

  const auto sarma = detail::run_stage(rep, "sarma", [&] { return fit_sarma(u, config.sarma, s); });
  rep.sarma_se = sarma.standard_errors;
  rep.css = sarma.css;
  rep.aic = sarma.aic;
  for (const auto& cand : config.aic_candidates) {
    AicEntry entry{cand};
    try {
      entry.aic = fit_sarma(u, cand, s).aic;
    } catch (const Error& e) {
      entry.error = e.what();
    }
    rep.aic_candidates.push_back(entry);
  }

  detail::run_stage(rep, "residuals", [&] {
    rep.residuals = sarma.residuals;
    rep.residual_offset = static_cast<std::size_t>(rep.burn_in) + sarma.first_index;
  });

  rep.model.mu = rep.sample_mean;
  rep.model.memory = memory;
  rep.model.sarma = sarma.params;

  rep.arch_lm = detail::run_stage(rep, "arch-lm", [&] { return arch_lm_test(rep.residuals, config.arch_lm_lag); });

  const bool rejects = rep.arch_lm.p_value < config.gate_level;
  bool do_garch = false;
  switch (config.garch_mode) {
    case GarchMode::off: rep.garch_decision = "disabled"; break;
    case GarchMode::force: rep.garch_decision = "forced"; do_garch = true; break;
    case GarchMode::gated:
      do_garch = rejects;
      rep.garch_decision = rejects ? "ARCH-LM rejects homoscedasticity" : "ARCH-LM does not reject homoscedasticity";
      break;
  }

  if (do_garch) {
    const auto g = detail::run_stage(rep, "garch", [&] { return fit_garch(rep.residuals, config.garch); });
    rep.garch_fitted = true;
    rep.model.garch = g.params;
    rep.garch_se = g.standard_errors;
    rep.loglik_garch = g.loglik;
    rep.garch_stationarity_violated = g.stationarity_violated;
    rep.cond_variances = g.cond_variances;
    rep.std_residuals = g.std_residuals;
  } else {
    const double s2 = sarma.params.sigma2_eps;
    rep.cond_variances.assign(rep.residuals.size(), s2);
    rep.std_residuals = rep.residuals;
    for (double& e : rep.std_residuals) e /= std::sqrt(s2);
  }

  rep.diagnostics = detail::run_stage(rep, "diagnostics", [&] { return run_diagnostics(rep.std_residuals, config.portmanteau_lag); });
  rep.violations = validate_model(rep.model);
  return rep;
}

/// Innovation and variance history at the end of the fitted sample, most
/// recent first; seeds forecasting from the next observation.
inline GarchState final_garch_state(const FitReport& rep) {
  GarchState st;
  if (!rep.model.garch) return st;
  const auto m = rep.model.garch->alpha.size();
  const auto r = rep.model.garch->beta.size();
  for (std::size_t i = 0; i < m && i < rep.residuals.size(); ++i) {
    const double e = rep.residuals[rep.residuals.size() - 1 - i];
    st.eps2.push_back(e * e);
  }
  for (std::size_t j = 0; j < r && j < rep.cond_variances.size(); ++j)
    st.h.push_back(rep.cond_variances[rep.cond_variances.size() - 1 - j]);
  return st;
}

/// One-step forecasts over `range`, refitting the pipeline on all data
/// before each block of `refit_every` origins. refit_every <= 0 fits once on
/// the data before the range and freezes the parameters.
inline ForecastSeries rolling_forecasts(const TimeSeries& series, const PipelineConfig& config, IndexRange range,
                                        int refit_every, ForecastOptions options = {}) {
  if (range.end > series.size() || range.size() == 0) throw DataError("forecast range does not fit inside the series");
  const std::size_t block = refit_every > 0 ? static_cast<std::size_t>(refit_every) : range.size();
  ForecastSeries out;
  out.first_index = range.begin;
  out.level = options.level;
  for (std::size_t b = range.begin; b < range.end; b += block) {
    const auto fit = fit_pipeline(series.head(b), config);
    options.garch_seed = final_garch_state(fit);
    const auto part = one_step_forecasts(fit.model, series, {b, std::min(b + block, range.end)}, options);
    out.quantile = part.quantile;
    out.sigma2 = part.sigma2;
    const auto append = [](std::vector<double>& dst, const std::vector<double>& src) {
      dst.insert(dst.end(), src.begin(), src.end());
    };
    append(out.point, part.point);
    append(out.h, part.h);
    append(out.lower_homosc, part.lower_homosc);
    append(out.upper_homosc, part.upper_homosc);
    append(out.lower_garch, part.lower_garch);
    append(out.upper_garch, part.upper_garch);
  }
  return out;
}

}  // namespace sarfima
