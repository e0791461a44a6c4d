// Compare the model spectral density with the averaged periodogram of
// simulated paths, then undo the fractional filter.

#include <cmath>
#include <cstdio>
#include <numbers>

#include "sarfima/sarfima.hpp"

int main() {
  using namespace sarfima;
  SarfimaGarchModel m;
  m.memory = {0.2, 0.15, 7};
  m.sarma.theta = {0.3};

  const int n = 1024, reps = 40;
  std::vector<double> avg;
  for (int k = 0; k < reps; ++k) {
    const auto pg = periodogram(simulate(m, {n, -1, derive_seed(11, k), {}}));
    if (avg.empty()) avg.assign(pg.ordinates.size(), 0.0);
    for (std::size_t j = 0; j < avg.size(); ++j) avg[j] += pg.ordinates[j] / reps;
  }
  std::printf("%10s %12s %12s\n", "omega", "density", "periodogram");
  for (std::size_t j = 4; j < avg.size(); j += 48) {
    const double w = 2.0 * std::numbers::pi * static_cast<double>(j + 1) / n;
    std::printf("%10.4f %12.5f %12.5f\n", w, spectral_density(m, w), avg[j]);
  }

  const auto x = simulate(m, {n, -1, 5, {}});
  const auto u = apply_filter(x.values(), m.memory, 0.0);
  const auto back = apply_filter(u, m.memory.negated(), 0.0);
  double worst = 0.0;
  for (std::size_t t = 0; t < back.size(); ++t) worst = std::max(worst, std::abs(back[t] - x[t]));
  std::printf("round trip max error %.3g\n", worst);
}
