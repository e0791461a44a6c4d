#pragma once

/** @file
 * Sample paths of the seasonal fractionally integrated model with GARCH
 * innovations, built with inverse filters:
 *
 *  1. standardized innovations z_t (Gaussian, or Student-t scaled to unit
 *     variance);
 *  2. eps_t = sqrt(h_t) z_t with the GARCH recursion seeded at the
 *     unconditional variance (or eps_t = sigma z_t without GARCH);
 *  3. the SARMA recursion Phi(B^s)phi(B) U_t = Theta(B^s)theta(B) eps_t;
 *  4. X_t = sum_j psi*_j(-d, -D) U_{t-j} over the full generated history;
 *  5. add mu and drop the burn-in prefix.
 *
 * Randomness comes from std::mt19937_64, whose output sequence is fixed by
 * the C++ standard. Uniforms take the top 53 bits; normals use the
 * Box-Muller transform; gamma variates use Marsaglia-Tsang. None of the
 * implementation-defined std distributions are used, so a seed reproduces
 * the same path on every conforming toolchain.
 */

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "sarfima/core.hpp"
#include "sarfima/fracdiff.hpp"

namespace sarfima {

inline constexpr const char* kGeneratorName = "mt19937_64+box-muller+marsaglia-tsang";
inline constexpr int kGeneratorVersion = 1;

/// splitmix64 finalizer applied to master + stream * golden gamma. Used to
/// give each Monte Carlo replication its own seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + (stream + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on (0, 1), never exactly 0 or 1.
  double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double a = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  /// Gamma(shape, 1).
  double gamma(double shape) {
    if (shape < 1.0) return gamma(shape + 1.0) * std::pow(uniform(), 1.0 / shape);
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  /// Student-t with nu degrees of freedom (not rescaled).
  double student_t(double nu) { return normal() / std::sqrt(2.0 * gamma(nu / 2.0) / nu); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

enum class InnovationKind { gaussian, student_t };

struct InnovationSpec {
  InnovationKind kind = InnovationKind::gaussian;
  double nu = 5.0;  ///< Student-t degrees of freedom, must exceed 2
};

struct SimulationOptions {
  int n = 1000;
  int burn_in = -1;  ///< negative: max(1000, 20 s)
  std::uint64_t seed = 1;
  InnovationSpec innovation;
};

inline int default_burn_in(int season) { return std::max(1000, 20 * season); }

/// Unit-variance standardized innovation draws.
inline std::vector<double> standardized_innovations(Rng& rng, std::size_t count, const InnovationSpec& spec) {
  std::vector<double> z(count);
  if (spec.kind == InnovationKind::gaussian) {
    for (double& v : z) v = rng.normal();
  } else {
    if (!(spec.nu > 2.0)) throw DataError("Student-t innovations need nu > 2");
    const double scale = std::sqrt((spec.nu - 2.0) / spec.nu);
    for (double& v : z) v = rng.student_t(spec.nu) * scale;
  }
  return z;
}

inline TimeSeries simulate(const SarfimaGarchModel& model, const SimulationOptions& opt) {
  require_valid(model);
  if (opt.n < 1) throw DataError("simulation length must be positive");
  const int s = model.memory.s;
  const int burn = opt.burn_in < 0 ? default_burn_in(s) : opt.burn_in;
  const auto total = static_cast<std::size_t>(opt.n) + static_cast<std::size_t>(burn);

  Rng rng(opt.seed);
  const auto z = standardized_innovations(rng, total, opt.innovation);

  std::vector<double> eps(total);
  if (model.garch) {
    const auto& g = *model.garch;
    const double h0 = g.unconditional_variance();
    std::vector<double> h(total);
    for (std::size_t t = 0; t < total; ++t) {
      double v = g.alpha0;
      for (std::size_t i = 1; i <= g.alpha.size(); ++i) v += g.alpha[i - 1] * (t >= i ? eps[t - i] * eps[t - i] : h0);
      for (std::size_t j = 1; j <= g.beta.size(); ++j) v += g.beta[j - 1] * (t >= j ? h[t - j] : h0);
      h[t] = v;
      eps[t] = std::sqrt(v) * z[t];
    }
  } else {
    const double sigma = std::sqrt(model.sarma.sigma2_eps);
    for (std::size_t t = 0; t < total; ++t) eps[t] = sigma * z[t];
  }

  const auto ar = ar_polynomial(model.sarma, s);
  const auto ma = ma_polynomial(model.sarma, s);
  std::vector<double> u(total);
  for (std::size_t t = 0; t < total; ++t) {
    double acc = eps[t];
    for (std::size_t k = 1; k < ma.size() && k <= t; ++k) acc += ma[k] * eps[t - k];
    for (std::size_t k = 1; k < ar.size() && k <= t; ++k) acc -= ar[k] * u[t - k];
    u[t] = acc;
  }

  std::vector<double> x;
  if (model.memory.d == 0.0 && model.memory.D == 0.0) {
    x = std::move(u);
  } else {
    const auto inverse = psi_star(model.memory.negated(), static_cast<int>(total) - 1);
    x = causal_filter(inverse.values, u);
  }
  std::vector<double> out(x.begin() + burn, x.end());
  for (double& v : out) v += model.mu;
  return TimeSeries(std::move(out), s);
}

}  // namespace sarfima
