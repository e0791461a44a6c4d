// Simulate a weekly-seasonal long-memory series with GARCH noise, fit the
// staged pipeline on all but the last 233 days and score one-step forecasts.

#include <cstdio>

#include "sarfima/sarfima.hpp"

int main() {
  using namespace sarfima;
  const auto truth = reference_model();
  const auto series = simulate(truth, {1836, -1, 7, {}});

  const std::size_t n_fit = 1603;
  const auto fit = fit_pipeline(series.head(n_fit));
  const auto& m = fit.model;
  std::printf("M = %d\n", fit.gph.M);
  std::printf("d      %8.4f (truth %.4f)\n", m.memory.d, truth.memory.d);
  std::printf("D      %8.4f (truth %.4f)\n", m.memory.D, truth.memory.D);
  std::printf("theta  %8.4f (truth %.4f)\n", m.sarma.theta[0], truth.sarma.theta[0]);
  std::printf("Theta  %8.4f (truth %.4f)\n", m.sarma.Theta[0], truth.sarma.Theta[0]);
  std::printf("ARCH-LM p = %.3g, GARCH: %s\n", fit.arch_lm.p_value, fit.garch_decision.c_str());
  if (m.garch)
    std::printf("alpha0 %.4f alpha1 %.4f beta1 %.4f\n", m.garch->alpha0, m.garch->alpha[0], m.garch->beta[0]);

  ForecastOptions opt;
  opt.garch_seed = final_garch_state(fit);
  const IndexRange window{n_fit, series.size()};
  const auto fc = one_step_forecasts(m, series, window, opt);
  const auto ev = evaluate_forecasts(series.values().subspan(window.begin, window.size()), fc);
  std::printf("MPE %.2f%%  MAPE %.2f%%  CPGFI %.2f%%  CPHFI %.2f%%\n", ev.mpe, ev.mape, ev.cpgfi, ev.cphfi);
}
