#include <catch_amalgamated.hpp>

#include <cmath>

#include "sarfima/forecast.hpp"
#include "sarfima/simulate.hpp"

using namespace sarfima;
using Catch::Approx;

namespace {

SarfimaGarchModel fitted_point() {
  SarfimaGarchModel m;
  m.mu = 43.81;
  m.memory = {0.2606, 0.2223, 7};
  m.sarma.theta = {0.1417};
  m.sarma.Theta = {-0.1092};
  m.garch = GarchParams{1.6464, {0.0677}, {0.9205}};
  m.sarma.sigma2_eps = m.garch->unconditional_variance();
  return m;
}

ForecastSeries fixed_band(std::vector<double> point, double half) {
  ForecastSeries f;
  f.point = point;
  for (double p : point) {
    f.lower_homosc.push_back(p - half);
    f.upper_homosc.push_back(p + half);
    f.lower_garch.push_back(p - 2.0 * half);
    f.upper_garch.push_back(p + 2.0 * half);
    f.h.push_back(1.0);
  }
  return f;
}

}  // namespace

TEST_CASE("interval quantiles", "[forecast]") {
  CHECK(interval_quantile(0.95) == Approx(1.959963984540054));
  CHECK(interval_quantile(0.90) == Approx(1.6448536269514722));
  // Unit-variance t: scaled by sqrt((df - 2) / df).
  CHECK(interval_quantile(0.95, true, 5.0) == Approx(2.5705818366147395 * std::sqrt(3.0 / 5.0)));
  CHECK_THROWS_AS(interval_quantile(1.0), DataError);
  CHECK_THROWS_AS(interval_quantile(0.95, true, 2.0), DataError);
}

TEST_CASE("white-noise model forecasts its mean", "[forecast]") {
  SarfimaGarchModel m;
  m.mu = 5.0;
  m.sarma.sigma2_eps = 4.0;
  const auto x = simulate(m, {60, 0, 3, {}});
  const auto f = one_step_forecasts(m, x, {20, 60});
  REQUIRE(f.size() == 40);
  for (std::size_t i = 0; i < f.size(); ++i) {
    CHECK(f.point[i] == 5.0);
    CHECK(f.upper_homosc[i] - f.lower_homosc[i] == Approx(2.0 * 1.959963984540054 * 2.0));
    CHECK(f.upper_garch[i] - f.lower_garch[i] == Approx(2.0 * 1.959963984540054 * 2.0));
  }
  CHECK_FALSE(f.nonstationary);
}

TEST_CASE("GARCH band collapses without ARCH and GARCH terms", "[forecast]") {
  auto m = fitted_point();
  m.garch = GarchParams{m.sarma.sigma2_eps, {0.0}, {0.0}};
  const auto x = simulate(fitted_point(), {300, -1, 4, {}});
  const auto f = one_step_forecasts(m, x, {100, 300});
  for (std::size_t i = 0; i < f.size(); ++i) {
    CHECK(f.lower_garch[i] == Approx(f.lower_homosc[i]));
    CHECK(f.upper_garch[i] == Approx(f.upper_homosc[i]));
  }
}

TEST_CASE("AR(inf) predictor agrees with the innovations recursion", "[forecast][oracle]") {
  auto m = fitted_point();
  m.garch.reset();
  const auto x = simulate(m, {500, -1, 21, {}});
  const auto f = one_step_forecasts(m, x, {14, 500});
  // eps_t = X_t - mu - sum_{j>=1} psi_j eps_{t-j} with pre-sample eps = 0.
  const auto psi = ma_expansion(m, 499);
  std::vector<double> eps(500);
  for (std::size_t t = 0; t < 500; ++t) {
    double acc = x[t] - m.mu;
    for (std::size_t j = 1; j <= t; ++j) acc -= psi[j] * eps[t - j];
    eps[t] = acc;
    if (t >= 14) CHECK(f.point[t - 14] == Approx(x[t] - eps[t]).margin(1e-6));
  }
}

TEST_CASE("GARCH variance recursion follows realised errors", "[forecast]") {
  const auto m = fitted_point();
  const auto x = simulate(m, {400, -1, 5, {}});
  ForecastOptions opt;
  opt.garch_seed = GarchState{{9.0}, {150.0}};
  const auto f = one_step_forecasts(m, x, {300, 400}, opt);
  const auto& g = *m.garch;
  CHECK(f.h[0] == Approx(g.alpha0 + g.alpha[0] * 9.0 + g.beta[0] * 150.0));
  for (std::size_t i = 1; i < f.size(); ++i) {
    const double e = x[300 + i - 1] - f.point[i - 1];
    CHECK(f.h[i] == Approx(g.alpha0 + g.alpha[0] * e * e + g.beta[0] * f.h[i - 1]));
  }
  const double z = f.quantile;
  for (std::size_t i = 0; i < f.size(); ++i) {
    CHECK(f.upper_garch[i] - f.point[i] == Approx(z * std::sqrt(f.h[i])));
    CHECK(f.lower_garch[i] < f.point[i]);
    CHECK(f.point[i] < f.upper_homosc[i]);
  }
}

TEST_CASE("GARCH band widens with the last squared error", "[forecast][property]") {
  const auto m = fitted_point();
  const auto x = simulate(m, {200, -1, 6, {}});
  double prev = 0.0;
  for (double e2 : {0.0, 1.0, 10.0, 100.0}) {
    ForecastOptions opt;
    opt.garch_seed = GarchState{{e2}, {120.0}};
    const auto f = one_step_forecasts(m, x, {150, 151}, opt);
    const double width = f.upper_garch[0] - f.lower_garch[0];
    CHECK(width > prev);
    prev = width;
  }
}

TEST_CASE("raising the level widens bands and never lowers coverage", "[forecast][property]") {
  const auto m = fitted_point();
  const auto x = simulate(m, {600, -1, 7, {}});
  const IndexRange range{400, 600};
  const auto actual = x.values().subspan(400, 200);
  ForecastEvaluation prev{};
  double prev_width = 0.0;
  for (double level : {0.5, 0.8, 0.9, 0.95, 0.99}) {
    ForecastOptions opt;
    opt.level = level;
    const auto f = one_step_forecasts(m, x, range, opt);
    const auto ev = evaluate_forecasts(actual, f);
    CHECK(f.upper_homosc[0] - f.lower_homosc[0] > prev_width);
    CHECK(ev.cpgfi >= prev.cpgfi);
    CHECK(ev.cphfi >= prev.cphfi);
    prev = ev;
    prev_width = f.upper_homosc[0] - f.lower_homosc[0];
  }
}

TEST_CASE("forecast range checks", "[forecast]") {
  const auto m = fitted_point();
  const auto x = simulate(m, {100, -1, 8, {}});
  CHECK_THROWS_AS(one_step_forecasts(m, x, {13, 20}), DataError);
  CHECK_NOTHROW(one_step_forecasts(m, x, {14, 20}));
  CHECK_THROWS_AS(one_step_forecasts(m, x, {90, 101}), DataError);
  CHECK_THROWS_AS(one_step_forecasts(m, x, {50, 50}), DataError);
  auto bad = m;
  bad.sarma.theta = {1.2};
  CHECK_THROWS_AS(one_step_forecasts(bad, x, {20, 30}), ModelError);
  auto edge = m;
  edge.memory = {0.3, 0.25, 7};
  const auto f = one_step_forecasts(edge, x, {20, 30});
  CHECK(f.nonstationary);
}

TEST_CASE("evaluation metrics", "[forecast]") {
  const std::vector<double> actual{10.0, 20.0, 40.0};
  const auto exact = evaluate_forecasts(actual, fixed_band(actual, 1.0));
  CHECK(exact.mpe == 0.0);
  CHECK(exact.mape == 0.0);
  CHECK(exact.cpgfi == 100.0);
  CHECK(exact.cphfi == 100.0);

  const auto low = evaluate_forecasts(actual, fixed_band({9.0, 18.0, 36.0}, 1.0));
  CHECK(low.mpe == Approx(10.0));
  CHECK(low.mape == Approx(10.0));
  // Bounds are inclusive: 10 sits on the homoscedastic upper bound, 20 on the GARCH one.
  CHECK(low.cphfi == Approx(100.0 / 3.0));
  CHECK(low.cpgfi == Approx(200.0 / 3.0));

  const auto high = evaluate_forecasts(actual, fixed_band({11.0, 22.0, 44.0}, 0.5));
  CHECK(high.mpe == Approx(-10.0));
  CHECK(high.mape == Approx(10.0));
  CHECK(high.cphfi == 0.0);
}

TEST_CASE("evaluation is scale invariant", "[forecast][property]") {
  const std::vector<double> actual{3.0, -4.0, 5.5, 7.0};
  auto f = fixed_band({2.5, -3.0, 6.0, 7.5}, 0.6);
  const auto base = evaluate_forecasts(actual, f);
  for (double c : {0.01, 2.0, 1000.0}) {
    std::vector<double> a2;
    for (double a : actual) a2.push_back(a * c);
    auto g = f;
    for (auto* v : {&g.point, &g.lower_homosc, &g.upper_homosc, &g.lower_garch, &g.upper_garch})
      for (double& x : *v) x *= c;
    const auto ev = evaluate_forecasts(a2, g);
    CHECK(ev.mpe == Approx(base.mpe).epsilon(1e-12));
    CHECK(ev.mape == Approx(base.mape).epsilon(1e-12));
    CHECK(ev.cpgfi == base.cpgfi);
    CHECK(ev.cphfi == base.cphfi);
  }
}

TEST_CASE("evaluation input checks", "[forecast]") {
  const std::vector<double> actual{1.0, 0.0, 2.0};
  auto f = fixed_band({1.0, 1.0, 1.0}, 1.0);
  f.first_index = 100;
  CHECK_THROWS_WITH(evaluate_forecasts(actual, f), Catch::Matchers::ContainsSubstring("index 101"));
  CHECK_THROWS_AS(evaluate_forecasts(std::vector<double>{1.0}, f), DataError);
}
