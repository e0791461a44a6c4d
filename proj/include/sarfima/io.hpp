#pragma once

/** @file
 * File formats.
 *
 * Series CSV: a header row naming the columns, comma separated, UTF-8.
 * Column `value` (decimal) is required; column `date` (ISO-8601
 * YYYY-MM-DD) is optional. Other columns are ignored. Missing or
 * non-numeric values are rejected with the offending row and column.
 *
 * JSON: models, pipeline configuration, fit reports, diagnostics and
 * forecast evaluations, via nlohmann::json. Non-finite numbers are written
 * as null and read back as NaN.
 */

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <json.hpp>

#include "sarfima/core.hpp"
#include "sarfima/diagnose.hpp"
#include "sarfima/forecast.hpp"
#include "sarfima/pipeline.hpp"

namespace sarfima::io {

using nlohmann::json;

/// Malformed input file. `row` is the 1-based line number (header = 1),
/// 0 when the problem is not tied to a row.
class ParseError : public DataError {
 public:
  ParseError(const std::string& what, std::size_t row = 0, std::string column = {})
      : DataError(row ? "row " + std::to_string(row) + (column.empty() ? "" : ", column '" + column + "'") + ": " + what
                      : what),
        row_(row),
        column_(std::move(column)) {}
  std::size_t row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

// ---------------------------------------------------------------------------
// text helpers

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

inline std::optional<Date> parse_date(std::string_view s) {
  s = trim(s);
  int y = 0;
  unsigned m = 0, d = 0;
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  const auto num = [&](std::size_t pos, std::size_t len, auto& out) {
    const auto [p, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, out);
    return ec == std::errc() && p == s.data() + pos + len;
  };
  if (!num(0, 4, y) || !num(5, 2, m) || !num(8, 2, d)) return std::nullopt;
  const Date date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!date.ok()) return std::nullopt;
  return date;
}

inline std::string format_date(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()), static_cast<unsigned>(d.month()),
                static_cast<unsigned>(d.day()));
  return buf;
}

/// Shortest round-trip decimal form; "NA" for non-finite values.
inline std::string format_number(double v) {
  if (!std::isfinite(v)) return "NA";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

// ---------------------------------------------------------------------------
// CSV

inline TimeSeries read_series_csv(std::istream& in, int season) {
  std::string line;
  std::size_t row = 0;
  if (!std::getline(in, line)) throw ParseError("empty input: missing header row");
  ++row;
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto header = split(line, ',');
  std::optional<std::size_t> value_col, date_col;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "value") value_col = i;
    if (header[i] == "date") date_col = i;
  }
  if (!value_col) throw ParseError("header has no 'value' column", 1);

  std::vector<double> values;
  std::vector<Date> dates;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != header.size())
      throw ParseError("expected " + std::to_string(header.size()) + " columns, found " + std::to_string(cells.size()),
                       row);
    const auto cell = cells[*value_col];
    if (cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan")
      throw ParseError("missing value", row, "value");
    const auto v = parse_double(cell);
    if (!v) throw ParseError("not a number: '" + std::string(cell) + "'", row, "value");
    if (!std::isfinite(*v)) throw ParseError("non-finite value", row, "value");
    values.push_back(*v);
    if (date_col) {
      const auto d = parse_date(cells[*date_col]);
      if (!d) throw ParseError("invalid ISO-8601 date '" + std::string(cells[*date_col]) + "'", row, "date");
      if (!dates.empty() && !(dates.back() < *d)) throw ParseError("dates not strictly increasing", row, "date");
      dates.push_back(*d);
    }
  }
  std::optional<std::vector<Date>> index;
  if (date_col) index = std::move(dates);
  return TimeSeries(std::move(values), season, std::move(index));
}

inline TimeSeries read_series_csv(const std::string& path, int season) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return read_series_csv(in, season);
}

inline void write_series_csv(std::ostream& out, const TimeSeries& series) {
  const auto& idx = series.index();
  out << (idx ? "date,value\n" : "value\n");
  for (std::size_t t = 0; t < series.size(); ++t) {
    if (idx) out << format_date((*idx)[t]) << ',';
    out << format_number(series[t]) << '\n';
  }
}

// ---------------------------------------------------------------------------
// JSON

inline json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json numbers(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

inline double get_number(const json& j, const char* key, double fallback = std::numeric_limits<double>::quiet_NaN()) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return j.at(key).get<double>();
}

inline std::vector<double> get_numbers(const json& j, const char* key) {
  std::vector<double> out;
  if (!j.contains(key)) return out;
  for (const auto& v : j.at(key)) out.push_back(v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>());
  return out;
}

inline json to_json(const SarfimaGarchModel& m) {
  json j;
  j["mu"] = number(m.mu);
  j["memory"] = {{"d", number(m.memory.d)}, {"D", number(m.memory.D)}, {"s", m.memory.s}};
  j["sarma"] = {{"phi", numbers(m.sarma.phi)},     {"Phi", numbers(m.sarma.Phi)},
                {"theta", numbers(m.sarma.theta)}, {"Theta", numbers(m.sarma.Theta)},
                {"sigma2_eps", number(m.sarma.sigma2_eps)}};
  if (m.garch) {
    j["garch"] = {{"alpha0", number(m.garch->alpha0)}, {"alpha", numbers(m.garch->alpha)}, {"beta", numbers(m.garch->beta)}};
  } else {
    j["garch"] = nullptr;
  }
  return j;
}

inline SarfimaGarchModel model_from_json(const json& j) {
  try {
    SarfimaGarchModel m;
    m.mu = get_number(j, "mu", 0.0);
    const auto& mem = j.at("memory");
    m.memory = {get_number(mem, "d", 0.0), get_number(mem, "D", 0.0), mem.value("s", 1)};
    if (j.contains("sarma")) {
      const auto& s = j.at("sarma");
      m.sarma.phi = get_numbers(s, "phi");
      m.sarma.Phi = get_numbers(s, "Phi");
      m.sarma.theta = get_numbers(s, "theta");
      m.sarma.Theta = get_numbers(s, "Theta");
      m.sarma.sigma2_eps = get_number(s, "sigma2_eps", 1.0);
    }
    if (j.contains("garch") && !j.at("garch").is_null()) {
      const auto& g = j.at("garch");
      m.garch = GarchParams{get_number(g, "alpha0"), get_numbers(g, "alpha"), get_numbers(g, "beta")};
    }
    return m;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed model JSON: ") + e.what());
  }
}

inline json orders_json(const SarmaOrders& o) { return {{"p", o.p}, {"q", o.q}, {"P", o.P}, {"Q", o.Q}}; }

inline SarmaOrders orders_from_json(const json& j) {
  return {j.value("p", 0), j.value("q", 0), j.value("P", 0), j.value("Q", 0)};
}

inline json to_json(const PipelineConfig& c) {
  json cands = json::array();
  for (const auto& o : c.aic_candidates) cands.push_back(orders_json(o));
  return {{"alpha", c.alpha},
          {"scheme", to_string(c.scheme)},
          {"sarma_orders", orders_json(c.sarma)},
          {"garch_orders", {{"r", c.garch.r}, {"m", c.garch.m}}},
          {"arch_lm_lag", c.arch_lm_lag},
          {"gate_level", c.gate_level},
          {"garch_mode", to_string(c.garch_mode)},
          {"burn_in", c.burn_in},
          {"filter_truncation", c.filter_truncation},
          {"portmanteau_lag", c.portmanteau_lag},
          {"aic_candidates", cands}};
}

inline PipelineConfig config_from_json(const json& j) {
  PipelineConfig c;
  try {
    c.alpha = j.value("alpha", c.alpha);
    if (j.contains("scheme")) c.scheme = ordinate_scheme_from_string(j.at("scheme").get<std::string>());
    if (j.contains("sarma_orders")) c.sarma = orders_from_json(j.at("sarma_orders"));
    if (j.contains("garch_orders")) c.garch = {j.at("garch_orders").value("r", 1), j.at("garch_orders").value("m", 1)};
    c.arch_lm_lag = j.value("arch_lm_lag", c.arch_lm_lag);
    c.gate_level = j.value("gate_level", c.gate_level);
    if (j.contains("garch_mode")) c.garch_mode = garch_mode_from_string(j.at("garch_mode").get<std::string>());
    c.burn_in = j.value("burn_in", c.burn_in);
    c.filter_truncation = j.value("filter_truncation", c.filter_truncation);
    c.portmanteau_lag = j.value("portmanteau_lag", c.portmanteau_lag);
    if (j.contains("aic_candidates"))
      for (const auto& o : j.at("aic_candidates")) c.aic_candidates.push_back(orders_from_json(o));
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed config JSON: ") + e.what());
  }
  return c;
}

inline json to_json(const TestResult& t, bool with_lag = false) {
  json j = {{"statistic", number(t.statistic)}, {"p_value", number(t.p_value)}, {"df", t.df}};
  if (with_lag) j["lag"] = t.df;
  return j;
}

/// Moment table followed by the normality and non-correlation tests.
inline json to_json(const DiagnosticsReport& d) {
  return {{"moments",
           {{"mean", number(d.moments.mean)},
            {"std_dev", number(d.moments.std_dev)},
            {"skewness", number(d.moments.skewness)},
            {"excess_kurtosis", number(d.moments.excess_kurtosis)}}},
          {"normality", {{"jarque_bera", to_json(d.jarque_bera)}}},
          {"non_correlation", {{"box_pierce", to_json(d.box_pierce, true)}, {"ljung_box", to_json(d.ljung_box, true)}}},
          {"acf_of_squares", numbers(d.acf_of_squares)},
          {"conventions",
           {{"kurtosis", "excess (m4/m2^2 - 3)"},
            {"portmanteau_df", "equal to lag, not reduced by fitted parameter count"}}}};
}

inline json to_json(const GphEstimate& g) {
  return {{"d_hat", number(g.d_hat)},
          {"D_hat", number(g.D_hat)},
          {"sd_d", number(g.sd_d)},
          {"sd_D", number(g.sd_D)},
          {"M", g.M},
          {"alpha", number(g.alpha)},
          {"ordinate_scheme", to_string(g.ordinate_scheme)},
          {"ordinates_used", g.ordinates_used},
          {"intercept", number(g.intercept)},
          {"condition_number", number(g.condition_number)}};
}

inline json to_json(const ForecastEvaluation& e) {
  return {{"mpe", number(e.mpe)}, {"mape", number(e.mape)}, {"cpgfi", number(e.cpgfi)}, {"cphfi", number(e.cphfi)}};
}

namespace detail {

inline json parameter_row(const std::string& name, double est, double sd) {
  const double t = sd > 0.0 ? est / sd : std::numeric_limits<double>::quiet_NaN();
  double p = std::numeric_limits<double>::quiet_NaN();
  if (std::isfinite(t)) p = 2.0 * boost::math::cdf(boost::math::complement(boost::math::normal(), std::abs(t)));
  return {{"name", name}, {"estimate", number(est)}, {"sd", number(sd)}, {"t", number(t)}, {"p_value", number(p)}};
}

inline double at_or_nan(const std::vector<double>& v, std::size_t i) {
  return i < v.size() ? v[i] : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace detail

/// Parameter table: estimate, standard error, t statistic and two-sided
/// normal p-value for d, D, the SARMA and the GARCH coefficients.
inline json parameter_table(const FitReport& r) {
  json rows = json::array();
  rows.push_back(detail::parameter_row("d", r.gph.d_hat, r.gph.sd_d));
  rows.push_back(detail::parameter_row("D", r.gph.D_hat, r.gph.sd_D));
  std::size_t k = 0;
  const auto add = [&](const char* base, const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i, ++k)
      rows.push_back(detail::parameter_row(values.size() == 1 ? std::string(base) : std::string(base) + "_" + std::to_string(i + 1),
                                           values[i], detail::at_or_nan(r.sarma_se, k)));
  };
  add("phi", r.model.sarma.phi);
  add("Phi", r.model.sarma.Phi);
  add("theta", r.model.sarma.theta);
  add("Theta", r.model.sarma.Theta);
  if (r.model.garch) {
    const auto& g = *r.model.garch;
    rows.push_back(detail::parameter_row("alpha0", g.alpha0, detail::at_or_nan(r.garch_se, 0)));
    for (std::size_t i = 0; i < g.alpha.size(); ++i)
      rows.push_back(detail::parameter_row("alpha" + std::to_string(i + 1), g.alpha[i], detail::at_or_nan(r.garch_se, 1 + i)));
    for (std::size_t j = 0; j < g.beta.size(); ++j)
      rows.push_back(detail::parameter_row("beta" + std::to_string(j + 1), g.beta[j],
                                           detail::at_or_nan(r.garch_se, 1 + g.alpha.size() + j)));
  }
  return rows;
}

inline json to_json(const FitReport& r) {
  json j;
  j["format"] = "sarfima-fit-report";
  j["format_version"] = 1;
  j["config"] = to_json(r.config);
  j["series"] = {{"n", r.n}, {"season", r.season}, {"mean", number(r.sample_mean)}};
  j["model"] = to_json(r.model);
  j["parameters"] = parameter_table(r);

  json violations = json::array();
  for (const auto& v : r.violations) violations.push_back({{"code", v.code}, {"message", v.message}});
  j["violations"] = violations;

  json cands = json::array();
  for (const auto& c : r.aic_candidates)
    cands.push_back({{"orders", orders_json(c.orders)}, {"aic", number(c.aic)}, {"error", c.error}});

  json stages = json::array();
  for (const auto& name : r.stages) {
    json st = {{"stage", name}};
    if (name == "gph") {
      st["inputs"] = {{"n", r.n}, {"season", r.season}, {"alpha", r.config.alpha}, {"scheme", to_string(r.config.scheme)}};
      st["outputs"] = to_json(r.gph);
    } else if (name == "filter") {
      st["inputs"] = {{"d", number(r.gph.d_hat)},
                      {"D", number(r.gph.D_hat)},
                      {"mean", number(r.sample_mean)},
                      {"truncation", r.config.filter_truncation < 0 ? json("full") : json(r.config.filter_truncation)}};
      st["outputs"] = {{"length", r.filtered.size()}};
    } else if (name == "burn-in") {
      st["outputs"] = {{"discarded", r.burn_in}, {"remaining", r.filtered.size() - std::min<std::size_t>(r.filtered.size(), static_cast<std::size_t>(r.burn_in))}};
    } else if (name == "sarma") {
      st["inputs"] = {{"orders", orders_json(r.config.sarma)}, {"method", "conditional sum of squares"}};
      st["outputs"] = {{"css", number(r.css)},
                       {"sigma2_eps", number(r.model.sarma.sigma2_eps)},
                       {"aic", number(r.aic)},
                       {"standard_errors", numbers(r.sarma_se)},
                       {"aic_candidates", cands}};
    } else if (name == "residuals") {
      st["outputs"] = {{"count", r.residuals.size()}, {"first_index", r.residual_offset}};
    } else if (name == "arch-lm") {
      st["inputs"] = {{"lags", r.config.arch_lm_lag}};
      st["outputs"] = to_json(r.arch_lm);
    } else if (name == "garch") {
      st["inputs"] = {{"orders", {{"r", r.config.garch.r}, {"m", r.config.garch.m}}}, {"method", "Gaussian QMLE"}};
      st["outputs"] = {{"loglik", number(r.loglik_garch)},
                       {"standard_errors", numbers(r.garch_se)},
                       {"stationarity_violated", r.garch_stationarity_violated}};
    } else if (name == "diagnostics") {
      st["inputs"] = {{"lag", r.config.portmanteau_lag}, {"series", "standardized residuals"}};
    }
    stages.push_back(st);
  }
  j["stages"] = stages;
  j["arch_lm"] = to_json(r.arch_lm);
  j["garch_fitted"] = r.garch_fitted;
  j["garch_decision"] = r.garch_decision;
  j["loglik_garch"] = number(r.loglik_garch);
  j["diagnostics"] = to_json(r.diagnostics);

  const auto st = final_garch_state(r);
  j["final_state"] = {{"index", r.n == 0 ? 0 : r.n - 1},
                      {"eps2", numbers(st.eps2)},
                      {"h", numbers(st.h)},
                      {"residual", r.residuals.empty() ? json(nullptr) : number(r.residuals.back())},
                      {"cond_variance", r.cond_variances.empty() ? json(nullptr) : number(r.cond_variances.back())}};
  return j;
}

/// Model section of either a full fit report or a bare {"model": ...} /
/// model object.
inline SarfimaGarchModel model_from_report(const json& j) {
  if (j.contains("model")) return model_from_json(j.at("model"));
  return model_from_json(j);
}

inline json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError("invalid JSON in '" + path + "': " + e.what());
  }
}

}  // namespace sarfima::io
