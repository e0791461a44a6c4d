// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails, except those listed with
// --known-failure N (still reported as FAIL). Oracles below are written
// independently of the library code they check.

#include <chrono>
#include <cmath>
#include <algorithm>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "sarfima/sarfima.hpp"

using namespace sarfima;

namespace {

constexpr std::uint64_t kMasterSeed = 2026;

int jobs() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

std::vector<int> failed;

void verdict(int id, bool pass, const std::string& what) {
  std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", id, what.c_str());
  std::fflush(stdout);
  if (!pass) failed.push_back(id);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Coefficient of B^l in (1 - B)^x via Gamma(l - x) / (Gamma(l + 1) Gamma(-x)).
double gamma_ratio_coefficient(double x, int l) {
  const auto sign = [](double z) {
    if (z > 0.0) return 1.0;
    return static_cast<int>(std::ceil(-z)) % 2 ? -1.0 : 1.0;
  };
  const double z = l - x;
  const double lg = std::lgamma(z) - std::lgamma(l + 1.0) - std::lgamma(-x);
  return sign(z) * sign(-x) * std::exp(lg);
}

// |sum_t x_t e^{i w t}|^2 / (2 pi n) with t from 1, complex arithmetic.
double direct_ordinate(const std::vector<double>& x, std::size_t j) {
  const double n = static_cast<double>(x.size());
  const double w = 2.0 * std::numbers::pi * static_cast<double>(j) / n;
  std::complex<double> acc = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) acc += x[t] * std::polar(1.0, w * static_cast<double>(t + 1));
  return std::norm(acc) / (2.0 * std::numbers::pi * n);
}

void bandwidth_table() {
  const double alphas[] = {0.98, 0.96, 0.94, 0.92, 0.90, 0.88, 0.86, 0.84, 0.82, 0.80, 0.78, 0.76};
  const int expect[] = {99, 87, 76, 66, 58, 51, 44, 39, 34, 29, 26, 22};
  std::string got;
  bool ok = true;
  for (int i = 0; i < 12; ++i) {
    const int m = bandwidth(1603, 7, alphas[i]);
    ok = ok && m == expect[i];
    got += (i ? "," : "") + std::to_string(m);
  }
  verdict(1, ok, "bandwidth(1603, 7, alpha) = {" + got + "}");
}

void psi_anchor() {
  const auto psi = psi_star({0.2606, 0.2223, 7}, 1603).values;
  // The anchor is the 1603rd coefficient (lag 1602); lag 1603 is printed alongside.
  const double target = 1.340581e-5;
  const double rel = std::abs(psi[1602] - target) / target;
  verdict(2, rel < 1e-4,
          fmt("psi*[1602] = %.7e (relative error %.2e vs 1.340581e-5), psi*[1603] = %.4e", psi[1602], rel, psi[1603]));
}

void convolution_oracle() {
  std::mt19937_64 gen(kMasterSeed);
  std::uniform_real_distribution<double> u(-0.45, 0.45);
  const int N = 200, s = 7;
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    double d, D;
    do {
      d = u(gen);
      D = u(gen);
    } while (d + D >= 0.49 || d == 0.0 || D == 0.0);
    std::vector<double> a(N + 1), b(N + 1, 0.0), prod(N + 1, 0.0);
    for (int l = 0; l <= N; ++l) a[l] = gamma_ratio_coefficient(d, l);
    for (int l = 0; l * s <= N; ++l) b[l * s] = gamma_ratio_coefficient(D, l);
    for (int i = 0; i <= N; ++i)
      for (int j = 0; i + j <= N; ++j) prod[i + j] += a[i] * b[j];
    const auto psi = psi_star({d, D, s}, N).values;
    for (int j = 0; j <= N; ++j) worst = std::max(worst, std::abs(psi[j] - prod[j]));
  }
  verdict(3, worst < 1e-12, fmt("max |psi* - brute-force product| = %.2e over 20 (d, D) pairs, N = 200", worst));
}

void filter_round_trip() {
  double worst = 0.0;
  int k = 0;
  for (const auto [d, D] : {std::pair{0.2, 0.1}, std::pair{0.3, 0.15}}) {
    SarfimaGarchModel m;
    m.memory = {d, D, 7};
    const auto x = simulate(m, {2000, -1, derive_seed(kMasterSeed, 300 + k++), {}});
    const double mean = x.mean();
    const auto u = apply_filter(x.values(), m.memory, mean);
    const auto back = apply_filter(u, m.memory.negated(), 0.0);
    for (std::size_t t = 1000; t < 2000; ++t) worst = std::max(worst, std::abs(back[t] - (x[t] - mean)));
  }
  verdict(4, worst < 1e-6, fmt("max abs round-trip error on the last 1000 points = %.2e", worst));
}

void parseval() {
  std::mt19937_64 gen(kMasterSeed + 5);
  std::normal_distribution<double> z;
  const std::size_t sizes[] = {64, 127, 256};
  double worst = 0.0, worst_dft = 0.0;
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = sizes[k % 3];
    std::vector<double> x(n);
    for (double& v : x) v = 5.0 + 2.0 * z(gen);
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    std::vector<double> c(n);
    double var = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      c[t] = x[t] - mean;
      var += c[t] * c[t];
    }
    var /= static_cast<double>(n);

    const auto pg = periodogram(x);
    double half = 0.0;
    for (std::size_t j = 0; j < pg.ordinates.size(); ++j) {
      half += pg.ordinates[j];
      const double ref = direct_ordinate(c, j + 1);
      worst_dft = std::max(worst_dft, std::abs(pg.ordinates[j] - ref) / std::max(ref, 1e-300));
    }
    double total = 4.0 * std::numbers::pi / static_cast<double>(n) * half;
    if (n % 2 == 0) total += 2.0 * std::numbers::pi / static_cast<double>(n) * direct_ordinate(c, n / 2);
    worst = std::max(worst, std::abs(total - var) / var);
  }
  verdict(5, worst < 1e-10,
          fmt("max relative Parseval error = %.2e over 100 series (max ordinate deviation from direct DFT %.1e)", worst,
              worst_dft));
}

void gph_calibration() {
  SarfimaGarchModel m;
  m.memory = {0.2, 0.2, 7};
  const auto alt = gph_study(m, 2048, 0.78, kDefaultOrdinateScheme, 200, derive_seed(kMasterSeed, 6), jobs());
  SarfimaGarchModel null_model;
  null_model.memory = {0.0, 0.0, 7};
  const auto null = gph_study(null_model, 2048, 0.78, kDefaultOrdinateScheme, 200, derive_seed(kMasterSeed, 60), jobs());
  const bool ok = std::abs(alt.d.mean - 0.2) <= 0.05 && std::abs(alt.D.mean - 0.2) <= 0.07 &&
                  std::abs(null.d.mean) <= 2.0 * null.d.mc_error && std::abs(null.D.mean) <= 2.0 * null.D.mc_error;
  verdict(6, ok,
          fmt("scheme %s, M = %d: mean d = %.4f, mean D = %.4f; null mean d = %.4f (MC SE %.4f), null mean D = %.4f "
              "(MC SE %.4f)",
              to_string(kDefaultOrdinateScheme), alt.M, alt.d.mean, alt.D.mean, null.d.mean, null.d.mc_error,
              null.D.mean, null.D.mc_error));
}

void garch_recovery() {
  const GarchParams truth{1.6464, {0.0677}, {0.9205}};
  const auto st = garch_recovery_study(truth, 10000, 100, derive_seed(kMasterSeed, 7), 0.03, 0.05, jobs());
  verdict(7, st.fraction_within >= 0.90,
          fmt("%.0f%% of 100 fits within tolerance (%d fits failed)", 100.0 * st.fraction_within, st.failures));
}

void test_sizes() {
  const auto st = size_study(1603, 1000, derive_seed(kMasterSeed, 8), 0.05, 7, 8, jobs());
  const auto near = [](double r) { return std::abs(r - 0.05) <= 0.02; };
  verdict(8, near(st.arch_lm) && near(st.ljung_box) && near(st.jarque_bera),
          fmt("rejection rates at 5%%: ARCH-LM %.3f, Ljung-Box(8) %.3f, Jarque-Bera %.3f", st.arch_lm, st.ljung_box,
              st.jarque_bera));
}

void coverage() {
  const auto st = coverage_study(reference_model(), 1603, 233, {}, 50, derive_seed(kMasterSeed, 9), 0.95, jobs());
  double mean_g = 0.0, mean_h = 0.0;
  int ok_runs = 0;
  for (const auto& r : st.runs) {
    if (!r.ok) continue;
    mean_g += r.eval.cpgfi;
    mean_h += r.eval.cphfi;
    ++ok_runs;
  }
  if (ok_runs) {
    mean_g /= ok_runs;
    mean_h /= ok_runs;
  }
  const bool ok = ok_runs > 0 && std::abs(st.median_cpgfi - 95.0) <= 3.0 && st.median_cphfi < st.median_cpgfi;
  verdict(9, ok,
          fmt("median CPGFI %.2f%%, median CPHFI %.2f%% (means %.2f%% vs %.2f%%, %d of 50 runs failed)",
              st.median_cpgfi, st.median_cphfi, mean_g, mean_h, st.failures));
}

void jarque_bera_plugin() {
  const auto jb = jarque_bera_from_moments(0.4277, 0.8718, 1603);
  verdict(10, std::abs(jb.statistic - 99.6) < 0.05 && jb.p_value < 1e-4,
          fmt("JB = %.3f, p = %.3e", jb.statistic, jb.p_value));
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> known;
  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i]) == "--known-failure" && i + 1 < argc) {
      known.push_back(std::atoi(argv[++i]));
    } else {
      std::fprintf(stderr, "usage: %s [--known-failure N]...\n", argv[0]);
      return 2;
    }
  }
  const auto start = std::chrono::steady_clock::now();
  const std::pair<const char*, void (*)()> checks[] = {
      {"bandwidth table", bandwidth_table}, {"psi* anchor", psi_anchor},
      {"convolution oracle", convolution_oracle}, {"filter round trip", filter_round_trip},
      {"Parseval", parseval}, {"GPH calibration", gph_calibration},
      {"GARCH recovery", garch_recovery}, {"test sizes", test_sizes},
      {"coverage", coverage}, {"Jarque-Bera plug-in", jarque_bera_plugin}};
  int id = 0;
  for (const auto& [name, fn] : checks) {
    ++id;
    try {
      fn();
    } catch (const std::exception& e) {
      verdict(id, false, std::string(name) + " threw: " + e.what());
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  int unexpected = 0;
  for (int id : failed) unexpected += std::find(known.begin(), known.end(), id) == known.end();
  std::printf("%zu of 10 criteria failed, %d not listed as known failures (%.0f s)\n", failed.size(), unexpected, secs);
  return unexpected == 0 ? 0 : 1;
}
