#pragma once

/** @file
 * Monte Carlo replication studies: estimator calibration, test size and
 * forecast-interval coverage.
 *
 * Replication k always uses seed derive_seed(master, k), so results do not
 * depend on the number of worker threads.
 */

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "sarfima/diagnose.hpp"
#include "sarfima/forecast.hpp"
#include "sarfima/garch.hpp"
#include "sarfima/gph.hpp"
#include "sarfima/pipeline.hpp"
#include "sarfima/simulate.hpp"

namespace sarfima {

/// Runs f(k, derive_seed(master, k)) for k = 0..reps-1 on up to `jobs`
/// threads and returns the results in replication order.
template <class R, class F>
std::vector<R> replicate(int reps, std::uint64_t master_seed, int jobs, F&& f) {
  std::vector<R> out(static_cast<std::size_t>(std::max(reps, 0)));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int k = next++; k < reps; k = next++) {
      try {
        out[static_cast<std::size_t>(k)] = f(k, derive_seed(master_seed, static_cast<std::uint64_t>(k)));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int threads = std::clamp(jobs, 1, std::max(reps, 1));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

inline double median_of(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

struct MeanAndError {
  double mean = 0.0;
  double mc_error = 0.0;  ///< standard error of the mean
};

inline MeanAndError mean_and_error(const std::vector<double>& v) {
  MeanAndError r;
  if (v.empty()) return r;
  for (double x : v) r.mean += x;
  r.mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - r.mean) * (x - r.mean);
  if (v.size() > 1) r.mc_error = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  return r;
}

/// Parameter point of the calibration studies: weekly season on daily data,
/// SMA(1)x(1)_7 short memory and a persistent GARCH(1,1).
inline SarfimaGarchModel reference_model() {
  SarfimaGarchModel m;
  m.mu = 43.81;
  m.memory = {0.2606, 0.2223, 7};
  m.sarma.theta = {0.1417};
  m.sarma.Theta = {-0.1092};
  m.garch = GarchParams{1.6464, {0.0677}, {0.9205}};
  m.sarma.sigma2_eps = m.garch->unconditional_variance();
  return m;
}

// ---------------------------------------------------------------------------

struct GphStudy {
  int M = 0;
  MeanAndError d;
  MeanAndError D;
  std::vector<double> d_hats, D_hats;
};

inline GphStudy gph_study(const SarfimaGarchModel& model, int n, double alpha, OrdinateScheme scheme, int reps,
                          std::uint64_t seed, int jobs = 1) {
  GphStudy out;
  out.M = bandwidth(n, model.memory.s, alpha);
  const auto est = replicate<GphEstimate>(reps, seed, jobs, [&](int, std::uint64_t s) {
    const auto x = simulate(model, {n, -1, s, {}});
    return gph_seasonal(x, out.M, scheme);
  });
  for (const auto& e : est) {
    out.d_hats.push_back(e.d_hat);
    out.D_hats.push_back(e.D_hat);
  }
  out.d = mean_and_error(out.d_hats);
  out.D = mean_and_error(out.D_hats);
  return out;
}

struct GarchRecoveryStudy {
  double fraction_within = 0.0;  ///< both |alpha1 err| and |beta1 err| inside tolerance
  std::vector<GarchParams> estimates;
  int failures = 0;  ///< fits that threw
};

/// GARCH(1,1) paths of length n (zero mean, no memory), refitted by QMLE.
inline GarchRecoveryStudy garch_recovery_study(const GarchParams& truth, int n, int reps, std::uint64_t seed,
                                               double tol_alpha, double tol_beta, int jobs = 1) {
  SarfimaGarchModel m;
  m.garch = truth;
  m.sarma.sigma2_eps = truth.unconditional_variance();
  struct One {
    bool ok = false;
    GarchParams est;
  };
  const auto runs = replicate<One>(reps, seed, jobs, [&](int, std::uint64_t s) {
    const auto x = simulate(m, {n, 1000, s, {}});
    try {
      return One{true, fit_garch(x.values()).params};
    } catch (const NumericalError&) {
      return One{};
    }
  });
  GarchRecoveryStudy out;
  int hits = 0;
  for (const auto& r : runs) {
    if (!r.ok) {
      ++out.failures;
      continue;
    }
    out.estimates.push_back(r.est);
    if (std::abs(r.est.alpha[0] - truth.alpha[0]) < tol_alpha && std::abs(r.est.beta[0] - truth.beta[0]) < tol_beta)
      ++hits;
  }
  out.fraction_within = reps > 0 ? static_cast<double>(hits) / reps : 0.0;
  return out;
}

struct SizeStudy {
  double arch_lm = 0.0;  ///< rejection rates at the nominal level
  double ljung_box = 0.0;
  double jarque_bera = 0.0;
  double box_pierce = 0.0;
};

/// Rejection rates of the residual tests on iid N(0,1) samples.
inline SizeStudy size_study(int n, int reps, std::uint64_t seed, double level = 0.05, int arch_lag = 7,
                            int portmanteau_lag = 8, int jobs = 1) {
  struct Rejections {
    int lm = 0, lb = 0, jb = 0, bp = 0;
  };
  const auto runs = replicate<Rejections>(reps, seed, jobs, [&](int, std::uint64_t s) {
    Rng rng(s);
    std::vector<double> x(static_cast<std::size_t>(n));
    for (double& v : x) v = rng.normal();
    Rejections r;
    r.lm = arch_lm_test(x, arch_lag).p_value < level;
    r.lb = ljung_box(x, portmanteau_lag).p_value < level;
    r.bp = box_pierce(x, portmanteau_lag).p_value < level;
    r.jb = jarque_bera(x).p_value < level;
    return r;
  });
  SizeStudy out;
  for (const auto& r : runs) {
    out.arch_lm += r.lm;
    out.ljung_box += r.lb;
    out.jarque_bera += r.jb;
    out.box_pierce += r.bp;
  }
  const double k = reps > 0 ? reps : 1;
  out.arch_lm /= k;
  out.ljung_box /= k;
  out.jarque_bera /= k;
  out.box_pierce /= k;
  return out;
}

struct CoverageRun {
  bool ok = false;
  std::string error;  ///< pipeline or forecast failure, when !ok
  ForecastEvaluation eval;
  SarfimaGarchModel fitted;
  bool garch_fitted = false;
};

struct CoverageStudy {
  double median_cpgfi = 0.0;
  double median_cphfi = 0.0;
  double median_mpe = 0.0;
  double median_mape = 0.0;
  int failures = 0;  ///< runs excluded from the medians
  std::vector<CoverageRun> runs;
};

/// Simulate n_fit + holdout points, fit the pipeline on the first n_fit,
/// forecast the holdout one step ahead with frozen parameters. Runs whose
/// fit or forecast fails are kept with their error and left out of the
/// medians.
inline CoverageStudy coverage_study(const SarfimaGarchModel& model, int n_fit, int holdout, const PipelineConfig& config,
                                    int reps, std::uint64_t seed, double level = 0.95, int jobs = 1) {
  const auto runs = replicate<CoverageRun>(reps, seed, jobs, [&](int, std::uint64_t s) {
    const auto x = simulate(model, {n_fit + holdout, -1, s, {}});
    CoverageRun run;
    try {
      const auto fit = fit_pipeline(x.head(static_cast<std::size_t>(n_fit)), config);
      ForecastOptions opt;
      opt.level = level;
      opt.garch_seed = final_garch_state(fit);
      const IndexRange range{static_cast<std::size_t>(n_fit), static_cast<std::size_t>(n_fit + holdout)};
      const auto fc = one_step_forecasts(fit.model, x, range, opt);
      run.eval = evaluate_forecasts(x.values().subspan(range.begin, range.size()), fc);
      run.fitted = fit.model;
      run.garch_fitted = fit.garch_fitted;
      run.ok = true;
    } catch (const Error& e) {
      run.error = e.what();
    }
    return run;
  });
  CoverageStudy out;
  std::vector<double> g, h, mpe, mape;
  for (const auto& r : runs) {
    if (!r.ok) {
      ++out.failures;
      continue;
    }
    g.push_back(r.eval.cpgfi);
    h.push_back(r.eval.cphfi);
    mpe.push_back(r.eval.mpe);
    mape.push_back(r.eval.mape);
  }
  out.median_cpgfi = median_of(g);
  out.median_cphfi = median_of(h);
  out.median_mpe = median_of(mpe);
  out.median_mape = median_of(mape);
  out.runs = runs;
  return out;
}

}  // namespace sarfima
