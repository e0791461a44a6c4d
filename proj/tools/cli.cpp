#include "cli.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sarfima/io.hpp"
#include "sarfima/sarfima.hpp"

namespace sarfima::cli {
namespace {

using io::json;
namespace fs = std::filesystem;

constexpr const char* kToolVersion = "1.0.0";

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorKind::usage, what) {}
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  if (io::trim(text).empty()) return out;
  for (auto part : io::split(text, ',')) out.emplace_back(part);
  return out;
}

std::vector<double> parse_doubles(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  for (const auto& part : split_list(text)) {
    const auto v = io::parse_double(part);
    if (!v || !std::isfinite(*v)) throw UsageError(flag + ": not a number: '" + part + "'");
    out.push_back(*v);
  }
  return out;
}

std::vector<int> parse_ints(const std::string& text, std::size_t expected, const std::string& flag) {
  std::vector<int> out;
  for (const auto& part : split_list(text)) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc() || ptr != part.data() + part.size()) throw UsageError(flag + ": not an integer: '" + part + "'");
    out.push_back(v);
  }
  if (out.size() != expected)
    throw UsageError(flag + ": expected " + std::to_string(expected) + " comma-separated integers");
  return out;
}

SarmaOrders parse_orders(const std::string& text, const std::string& flag) {
  const auto v = parse_ints(text, 4, flag);
  return {v[0], v[1], v[2], v[3]};
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Shared state of one invocation: where outputs go and how to describe them.
struct Context {
  std::string output_dir = ".";
  std::vector<std::string> arguments;
  std::ostream* out = nullptr;

  fs::path path(const std::string& name) const { return fs::path(output_dir) / name; }

  void write(const fs::path& file, const std::string& content) const {
    if (file.has_parent_path()) fs::create_directories(file.parent_path());
    std::ofstream f(file, std::ios::binary);
    if (!f) throw DataError("cannot write '" + file.string() + "'");
    f << content;
    if (!f) throw DataError("failed writing '" + file.string() + "'");
  }

  /// Writes `content` to `file` and a `<file>.meta.json` sidecar holding
  /// everything that may differ between otherwise identical runs.
  void write_with_meta(const fs::path& file, const std::string& content, json extra = json::object()) const {
    write(file, content);
    json meta = {{"tool", "sarfima"},
                 {"tool_version", kToolVersion},
                 {"created_utc", utc_timestamp()},
                 {"arguments", arguments},
                 {"generator", {{"name", kGeneratorName}, {"version", kGeneratorVersion}}}};
    for (auto& [k, v] : extra.items()) meta[k] = v;
    write(fs::path(file.string() + ".meta.json"), meta.dump(2) + "\n");
  }
};

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// fit

struct FitArgs {
  std::string input;
  int season = 7;
  double alpha = 0.78;
  std::string scheme = to_string(kDefaultOrdinateScheme);
  std::string sarma = "0,1,0,1";
  std::string garch = "1,1";
  int arch_lm_lag = 7;
  double gate = 0.05;
  std::string garch_mode = "gated";
  int burn_in = -1;
  int truncation = -1;
  int lag = 8;
  std::vector<std::string> aic;
  int holdout = 0;
};

PipelineConfig build_config(const FitArgs& a) {
  PipelineConfig c;
  c.alpha = a.alpha;
  try {
    c.scheme = ordinate_scheme_from_string(a.scheme);
    c.garch_mode = garch_mode_from_string(a.garch_mode);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  c.sarma = parse_orders(a.sarma, "--sarma");
  const auto g = parse_ints(a.garch, 2, "--garch");
  c.garch = {g[0], g[1]};
  c.arch_lm_lag = a.arch_lm_lag;
  c.gate_level = a.gate;
  c.burn_in = a.burn_in;
  c.filter_truncation = a.truncation;
  c.portmanteau_lag = a.lag;
  for (const auto& spec : a.aic) c.aic_candidates.push_back(parse_orders(spec, "--aic-candidate"));
  return c;
}

std::string fit_table(const TimeSeries& series, const FitReport& rep) {
  std::ostringstream os;
  const auto& idx = series.index();
  os << "t" << (idx ? "\tdate" : "") << "\tvalue\tfiltered\tresidual\th\tstd_residual\n";
  const auto burn = static_cast<std::size_t>(rep.burn_in);
  for (std::size_t t = 0; t < series.size(); ++t) {
    os << t;
    if (idx) os << '\t' << io::format_date((*idx)[t]);
    os << '\t' << io::format_number(series[t]);
    os << '\t' << (t >= burn ? io::format_number(rep.filtered[t]) : "NA");
    if (t >= rep.residual_offset && t - rep.residual_offset < rep.residuals.size()) {
      const std::size_t k = t - rep.residual_offset;
      os << '\t' << io::format_number(rep.residuals[k]) << '\t' << io::format_number(rep.cond_variances[k]) << '\t'
         << io::format_number(rep.std_residuals[k]);
    } else {
      os << "\tNA\tNA\tNA";
    }
    os << '\n';
  }
  return os.str();
}

void cmd_fit(const Context& ctx, const FitArgs& a) {
  const auto config = build_config(a);
  auto series = io::read_series_csv(a.input, a.season);
  if (a.holdout < 0) throw UsageError("--holdout must be non-negative");
  if (static_cast<std::size_t>(a.holdout) >= series.size())
    throw DataError("holdout " + std::to_string(a.holdout) + " exceeds series length " + std::to_string(series.size()));
  series = series.head(series.size() - static_cast<std::size_t>(a.holdout));

  const auto rep = fit_pipeline(series, config);
  auto j = io::to_json(rep);
  j["series"]["holdout_excluded"] = a.holdout;
  if (series.index()) {
    j["series"]["first_date"] = io::format_date(series.index()->front());
    j["series"]["last_date"] = io::format_date(series.index()->back());
  }
  ctx.write_with_meta(ctx.path("fit_report.json"), dump(j), {{"input", a.input}});
  ctx.write(ctx.path("fit_table.tsv"), fit_table(series, rep));

  auto& out = *ctx.out;
  out << "M = " << rep.gph.M << ", n = " << rep.n << ", garch: " << rep.garch_decision << "\n";
  out << "parameter\testimate\tsd\tt\tp_value\n";
  for (const auto& row : j["parameters"]) {
    const auto cell = [](const json& v) { return v.is_null() ? std::string("NA") : io::format_number(v.get<double>()); };
    out << row["name"].get<std::string>() << '\t' << cell(row["estimate"]) << '\t' << cell(row["sd"]) << '\t'
        << cell(row["t"]) << '\t' << cell(row["p_value"]) << '\n';
  }
  for (const auto& v : rep.violations) out << "warning: fitted model [" << v.code << "] " << v.message << "\n";
}

// ---------------------------------------------------------------------------
// forecast

struct ForecastArgs {
  std::string report;
  std::string input;
  int holdout = -1;
  std::string range;
  double level = 0.95;
  double t_df = 0.0;
  int refit_every = 0;
};

std::size_t resolve_position(const TimeSeries& series, std::string_view text) {
  if (const auto d = io::parse_date(text)) {
    if (!series.index()) throw DataError("--range uses dates but the series has no date column");
    const auto& idx = *series.index();
    const auto it = std::lower_bound(idx.begin(), idx.end(), *d);
    if (it == idx.end() || *it != *d) throw DataError("date " + std::string(text) + " not in the series");
    return static_cast<std::size_t>(it - idx.begin());
  }
  std::size_t pos = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), pos);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw UsageError("--range endpoints must be ISO dates or 0-based positions, got '" + std::string(text) + "'");
  return pos;
}

IndexRange forecast_range(const TimeSeries& series, const ForecastArgs& a) {
  const std::size_t n = series.size();
  if (!a.range.empty()) {
    const auto colon = a.range.find(':');
    if (colon == std::string::npos) throw UsageError("--range expects START:END (inclusive)");
    const auto b = resolve_position(series, io::trim(std::string_view(a.range).substr(0, colon)));
    const auto e = resolve_position(series, io::trim(std::string_view(a.range).substr(colon + 1)));
    if (e < b) throw DataError("--range end precedes its start");
    if (e >= n) throw DataError("--range end lies beyond the series (length " + std::to_string(n) + ")");
    return {b, e + 1};
  }
  if (a.holdout <= 0) throw UsageError("--holdout must be positive");
  if (static_cast<std::size_t>(a.holdout) >= n)
    throw DataError("holdout " + std::to_string(a.holdout) + " exceeds series length " + std::to_string(n));
  return {n - static_cast<std::size_t>(a.holdout), n};
}

std::string forecast_table(const TimeSeries& series, const ForecastSeries& f) {
  std::ostringstream os;
  const auto& idx = series.index();
  os << "t" << (idx ? "\tdate" : "")
     << "\tactual\tpoint\tlower_homosc\tupper_homosc\tlower_garch\tupper_garch\th\n";
  for (std::size_t i = 0; i < f.size(); ++i) {
    const std::size_t t = f.first_index + i;
    os << t;
    if (idx) os << '\t' << io::format_date((*idx)[t]);
    for (double v : {series[t], f.point[i], f.lower_homosc[i], f.upper_homosc[i], f.lower_garch[i], f.upper_garch[i], f.h[i]})
      os << '\t' << io::format_number(v);
    os << '\n';
  }
  return os.str();
}

void cmd_forecast(const Context& ctx, const ForecastArgs& a) {
  const auto report = io::read_json(a.report);
  const auto model = io::model_from_report(report);
  const auto series = io::read_series_csv(a.input, model.memory.s);
  const auto range = forecast_range(series, a);

  ForecastOptions opt;
  opt.level = a.level;
  if (a.t_df > 0.0) {
    opt.student_t = true;
    opt.t_df = a.t_df;
  }

  ForecastSeries fc;
  if (a.refit_every > 0) {
    if (!report.contains("config")) throw DataError("--refit-every needs a fit report with an embedded config");
    fc = rolling_forecasts(series, io::config_from_json(report.at("config")), range, a.refit_every, opt);
  } else {
    // The fitted sample ends right before the window: continue its variance recursion.
    if (model.garch && report.contains("final_state") && report.contains("series") &&
        report["series"].value("n", std::size_t{0}) == range.begin) {
      const auto& st = report.at("final_state");
      opt.garch_seed = GarchState{io::get_numbers(st, "eps2"), io::get_numbers(st, "h")};
    }
    fc = one_step_forecasts(model, series, range, opt);
  }
  const auto ev = evaluate_forecasts(series.values().subspan(range.begin, range.size()), fc);

  json j = io::to_json(ev);
  j["level"] = fc.level;
  j["quantile"] = fc.quantile;
  j["interval_distribution"] = opt.student_t ? "student-t" : "gaussian";
  j["count"] = fc.size();
  j["first_index"] = range.begin;
  j["last_index"] = range.end - 1;
  if (series.index()) {
    j["first_date"] = io::format_date((*series.index())[range.begin]);
    j["last_date"] = io::format_date((*series.index())[range.end - 1]);
  }
  j["refit_every"] = a.refit_every;
  j["garch_seeded_from_report"] = opt.garch_seed.has_value();
  j["nonstationary_model"] = fc.nonstationary;

  ctx.write(ctx.path("forecast.tsv"), forecast_table(series, fc));
  ctx.write_with_meta(ctx.path("evaluation.json"), dump(j), {{"report", a.report}, {"input", a.input}});
  *ctx.out << dump(j);
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string model_path;
  double mu = 0.0, d = 0.0, D = 0.0;
  int season = 7;
  std::string phi, Phi, theta, Theta;
  double sigma2 = -1.0;
  double alpha0 = -1.0;
  std::string arch = "", beta = "";
  int n = 1000;
  int burn_in = -1;
  std::uint64_t seed = 1;
  std::string innovation = "gaussian";
  double nu = 5.0;
  std::string start_date;
  std::string output;
};

SarfimaGarchModel simulate_model(const SimulateArgs& a) {
  if (!a.model_path.empty()) return io::model_from_report(io::read_json(a.model_path));
  SarfimaGarchModel m;
  m.mu = a.mu;
  m.memory = {a.d, a.D, a.season};
  m.sarma.phi = parse_doubles(a.phi, "--phi");
  m.sarma.Phi = parse_doubles(a.Phi, "--Phi");
  m.sarma.theta = parse_doubles(a.theta, "--theta");
  m.sarma.Theta = parse_doubles(a.Theta, "--Theta");
  if (a.alpha0 >= 0.0) m.garch = GarchParams{a.alpha0, parse_doubles(a.arch, "--arch"), parse_doubles(a.beta, "--beta")};
  if (a.sigma2 > 0.0) {
    m.sarma.sigma2_eps = a.sigma2;
  } else if (m.garch && std::isfinite(m.garch->unconditional_variance())) {
    m.sarma.sigma2_eps = m.garch->unconditional_variance();
  }
  return m;
}

void cmd_simulate(const Context& ctx, const SimulateArgs& a) {
  const auto model = simulate_model(a);
  SimulationOptions opt;
  opt.n = a.n;
  opt.burn_in = a.burn_in;
  opt.seed = a.seed;
  if (a.innovation == "t" || a.innovation == "student-t") {
    opt.innovation = {InnovationKind::student_t, a.nu};
  } else if (a.innovation != "gaussian") {
    throw UsageError("--innovation must be gaussian or student-t");
  }
  auto series = simulate(model, opt);
  if (!a.start_date.empty()) {
    const auto start = io::parse_date(a.start_date);
    if (!start) throw UsageError("--start-date must be YYYY-MM-DD");
    std::vector<Date> idx;
    const std::chrono::sys_days first{*start};
    for (std::size_t t = 0; t < series.size(); ++t) idx.emplace_back(first + std::chrono::days{static_cast<int>(t)});
    series = TimeSeries(std::vector<double>(series.values().begin(), series.values().end()), series.season(), idx);
  }
  std::ostringstream os;
  io::write_series_csv(os, series);
  const fs::path file = a.output.empty() ? ctx.path("simulated.csv") : fs::path(a.output);
  ctx.write_with_meta(file, os.str(),
                      {{"seed", a.seed},
                       {"n", a.n},
                       {"burn_in", a.burn_in < 0 ? default_burn_in(model.memory.s) : a.burn_in},
                       {"innovation", opt.innovation.kind == InnovationKind::gaussian ? "gaussian" : "student-t"},
                       {"nu", opt.innovation.nu},
                       {"model", io::to_json(model)}});
  *ctx.out << "wrote " << file.string() << " (" << series.size() << " values)\n";
}

// ---------------------------------------------------------------------------
// diagnose, spectrum

void cmd_diagnose(const Context& ctx, const std::string& input, int lag) {
  const auto series = io::read_series_csv(input, 1);
  auto j = io::to_json(run_diagnostics(series.values(), lag));
  j["n"] = series.size();
  j["lag"] = lag;
  ctx.write_with_meta(ctx.path("diagnostics.json"), dump(j), {{"input", input}});
  *ctx.out << dump(j);
}

void cmd_spectrum(const Context& ctx, const std::string& input, int max_lag, bool no_demean) {
  const auto series = io::read_series_csv(input, 1);
  const auto pg = periodogram(series.values(), !no_demean);
  std::ostringstream ps;
  ps << "j\tomega\tperiodogram\n";
  for (std::size_t k = 0; k < pg.frequencies.size(); ++k)
    ps << k + 1 << '\t' << io::format_number(pg.frequencies[k]) << '\t' << io::format_number(pg.ordinates[k]) << '\n';

  const int lags = max_lag > 0 ? max_lag : static_cast<int>(std::min<std::size_t>(50, series.size() - 1));
  const auto acf = sample_acf(series.values(), lags);
  const auto pacf = sample_pacf(series.values(), lags);
  std::ostringstream as;
  as << "lag\tacf\tpacf\n";
  for (std::size_t k = 0; k < acf.size(); ++k)
    as << k + 1 << '\t' << io::format_number(acf[k]) << '\t' << io::format_number(pacf[k]) << '\n';

  ctx.write_with_meta(ctx.path("periodogram.tsv"), ps.str(), {{"input", input}});
  ctx.write(ctx.path("acf.tsv"), as.str());
  *ctx.out << "wrote periodogram.tsv (" << pg.frequencies.size() << " ordinates) and acf.tsv (" << acf.size()
           << " lags)\n";
}

// ---------------------------------------------------------------------------
// calibrate

struct CalibrateArgs {
  std::string study;
  int reps = 0;
  std::uint64_t seed = 1;
  int jobs = 1;
  int length = 0;
  int holdout = 233;
  double alpha = 0.78;
  std::string scheme = to_string(kDefaultOrdinateScheme);
  bool null_model = false;
  double level = 0.95;
};

json mean_json(const MeanAndError& m) { return {{"mean", m.mean}, {"mc_error", m.mc_error}}; }

void cmd_calibrate(const Context& ctx, const CalibrateArgs& a) {
  json j = {{"study", a.study}, {"seed", a.seed}};
  const auto reps_or = [&](int fallback) { return a.reps > 0 ? a.reps : fallback; };
  const auto n_or = [&](int fallback) { return a.length > 0 ? a.length : fallback; };
  if (a.study == "gph") {
    SarfimaGarchModel m;
    m.memory = a.null_model ? MemoryVector{0.0, 0.0, 7} : MemoryVector{0.2, 0.2, 7};
    OrdinateScheme scheme;
    try {
      scheme = ordinate_scheme_from_string(a.scheme);
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    const int n = n_or(2048), reps = reps_or(200);
    const auto r = gph_study(m, n, a.alpha, scheme, reps, a.seed, a.jobs);
    j.update({{"n", n}, {"reps", reps}, {"d_true", m.memory.d}, {"D_true", m.memory.D}, {"scheme", to_string(scheme)},
              {"alpha", a.alpha}, {"M", r.M}, {"d_hat", mean_json(r.d)}, {"D_hat", mean_json(r.D)}});
  } else if (a.study == "garch") {
    const auto truth = *reference_model().garch;
    const int n = n_or(10000), reps = reps_or(100);
    const auto r = garch_recovery_study(truth, n, reps, a.seed, 0.03, 0.05, a.jobs);
    j.update({{"n", n}, {"reps", reps}, {"fraction_within_tolerance", r.fraction_within}, {"failures", r.failures},
              {"tolerance", {{"alpha1", 0.03}, {"beta1", 0.05}}}});
  } else if (a.study == "size") {
    const int n = n_or(1603), reps = reps_or(1000);
    const auto r = size_study(n, reps, a.seed, 1.0 - a.level, 7, 8, a.jobs);
    j.update({{"n", n}, {"reps", reps}, {"nominal", 1.0 - a.level},
              {"rejection_rate",
               {{"arch_lm", r.arch_lm}, {"ljung_box", r.ljung_box}, {"box_pierce", r.box_pierce}, {"jarque_bera", r.jarque_bera}}}});
  } else if (a.study == "coverage") {
    const int n = n_or(1603), reps = reps_or(50);
    const auto r = coverage_study(reference_model(), n, a.holdout, PipelineConfig{}, reps, a.seed, a.level, a.jobs);
    j.update({{"n_fit", n}, {"holdout", a.holdout}, {"reps", reps}, {"level", a.level}, {"failures", r.failures},
              {"median", {{"cpgfi", r.median_cpgfi}, {"cphfi", r.median_cphfi}, {"mpe", r.median_mpe}, {"mape", r.median_mape}}}});
  } else {
    throw UsageError("unknown study '" + a.study + "' (expected gph, garch, size or coverage)");
  }
  ctx.write_with_meta(ctx.path("calibration_" + a.study + ".json"), dump(j), {{"jobs", a.jobs}});
  *ctx.out << dump(j);
}

// ---------------------------------------------------------------------------

int report_error(std::ostream& err, ErrorKind kind, const std::string& message, json extra = json::object()) {
  json e = {{"kind", to_string(kind)}, {"exit_code", static_cast<int>(kind)}, {"message", message}};
  for (auto& [k, v] : extra.items()) e[k] = v;
  err << json{{"error", e}}.dump() << "\n";
  return static_cast<int>(kind);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"SARFIMA-GARCH estimation, forecasting and simulation"};
  app.require_subcommand(1);
  Context ctx;
  ctx.out = &out;
  for (int i = 1; i < argc; ++i) ctx.arguments.emplace_back(argv[i]);

  const auto add_output_dir = [&](CLI::App* sub) {
    sub->add_option("--output-dir", ctx.output_dir, "Directory for output files")->capture_default_str();
  };

  std::function<void()> action;

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Estimate the model on a series CSV");
  fit_cmd->add_option("input", fit.input, "Series CSV (columns: value, optional date)")->required();
  fit_cmd->add_option("-s,--season", fit.season, "Season length")->capture_default_str()->check(CLI::PositiveNumber);
  fit_cmd->add_option("--alpha", fit.alpha, "Bandwidth exponent")->capture_default_str()->check(CLI::Range(0.0, 1.0));
  fit_cmd->add_option("--scheme", fit.scheme, "GPH ordinate scheme: zero-plus-seasonal or near-zero")->capture_default_str();
  fit_cmd->add_option("--sarma", fit.sarma, "SARMA orders p,q,P,Q")->capture_default_str();
  fit_cmd->add_option("--garch", fit.garch, "GARCH orders r,m")->capture_default_str();
  fit_cmd->add_option("--arch-lm-lag", fit.arch_lm_lag, "ARCH-LM lags")->capture_default_str()->check(CLI::PositiveNumber);
  fit_cmd->add_option("--gate", fit.gate, "ARCH-LM significance level gating the GARCH stage")->capture_default_str();
  fit_cmd->add_option("--garch-mode", fit.garch_mode, "gated, force or off")->capture_default_str();
  fit_cmd->add_option("--burn-in", fit.burn_in, "Filtered values discarded (default max(50, 2s))");
  fit_cmd->add_option("--truncation", fit.truncation, "Filter truncation lag (default: full history)");
  fit_cmd->add_option("--lag", fit.lag, "Portmanteau lag")->capture_default_str()->check(CLI::PositiveNumber);
  fit_cmd->add_option("--aic-candidate", fit.aic, "Extra SARMA orders p,q,P,Q to report AIC for (repeatable)");
  fit_cmd->add_option("--holdout", fit.holdout, "Exclude the last N observations from the fit")->capture_default_str();
  add_output_dir(fit_cmd);
  fit_cmd->callback([&] { action = [&] { cmd_fit(ctx, fit); }; });

  ForecastArgs fc;
  auto* fc_cmd = app.add_subcommand("forecast", "One-step-ahead forecasts and interval evaluation");
  fc_cmd->add_option("--report", fc.report, "Fit report JSON (or a bare model JSON)")->required();
  fc_cmd->add_option("--input", fc.input, "Series CSV")->required();
  auto* holdout_opt = fc_cmd->add_option("--holdout", fc.holdout, "Forecast the last N observations");
  auto* range_opt = fc_cmd->add_option("--range", fc.range, "START:END, ISO dates or 0-based positions, inclusive");
  holdout_opt->excludes(range_opt);
  fc_cmd->add_option("--level", fc.level, "Interval coverage level")->capture_default_str();
  fc_cmd->add_option("--t-df", fc.t_df, "Use unit-variance Student-t quantiles with this many degrees of freedom");
  fc_cmd->add_option("--refit-every", fc.refit_every, "Re-estimate every K origins (0: frozen parameters)")
      ->capture_default_str();
  add_output_dir(fc_cmd);
  fc_cmd->callback([&] {
    if (holdout_opt->count() + range_opt->count() == 0) throw CLI::RequiredError("--holdout or --range");
    action = [&] { cmd_forecast(ctx, fc); };
  });

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Simulate a sample path to a series CSV");
  auto* model_opt = sim_cmd->add_option("--model", sim.model_path, "Model JSON or fit report");
  const auto model_flag = [&](const std::string& name, auto& target, const std::string& help) {
    sim_cmd->add_option(name, target, help)->excludes(model_opt);
  };
  model_flag("--mu", sim.mu, "Mean");
  model_flag("--d", sim.d, "Long-run memory");
  model_flag("--D", sim.D, "Seasonal memory");
  model_flag("-s,--season", sim.season, "Season length (default 7)");
  model_flag("--phi", sim.phi, "AR coefficients, comma separated");
  model_flag("--Phi", sim.Phi, "Seasonal AR coefficients");
  model_flag("--theta", sim.theta, "MA coefficients");
  model_flag("--Theta", sim.Theta, "Seasonal MA coefficients");
  model_flag("--sigma2", sim.sigma2, "Innovation variance (default 1, or the GARCH unconditional variance)");
  model_flag("--alpha0", sim.alpha0, "GARCH constant; enables GARCH innovations");
  model_flag("--arch", sim.arch, "GARCH alpha coefficients");
  model_flag("--beta", sim.beta, "GARCH beta coefficients");
  sim_cmd->add_option("-n,--length", sim.n, "Output length")->capture_default_str();
  sim_cmd->add_option("--burn-in", sim.burn_in, "Discarded prefix (default max(1000, 20s))");
  sim_cmd->add_option("--seed", sim.seed, "Random seed")->capture_default_str();
  sim_cmd->add_option("--innovation", sim.innovation, "gaussian or student-t")->capture_default_str();
  sim_cmd->add_option("--nu", sim.nu, "Student-t degrees of freedom")->capture_default_str();
  sim_cmd->add_option("--start-date", sim.start_date, "Attach a daily date column starting here");
  sim_cmd->add_option("-o,--output", sim.output, "Output CSV (default <output-dir>/simulated.csv)");
  add_output_dir(sim_cmd);
  sim_cmd->callback([&] { action = [&] { cmd_simulate(ctx, sim); }; });

  std::string diag_input;
  int diag_lag = 8;
  auto* diag_cmd = app.add_subcommand("diagnose", "Moments, normality and portmanteau tests of a series");
  diag_cmd->add_option("input", diag_input, "Series or residual CSV")->required();
  diag_cmd->add_option("--lag", diag_lag, "Portmanteau lag")->capture_default_str()->check(CLI::PositiveNumber);
  add_output_dir(diag_cmd);
  diag_cmd->callback([&] { action = [&] { cmd_diagnose(ctx, diag_input, diag_lag); }; });

  std::string spec_input;
  int spec_lag = 0;
  bool spec_raw = false;
  auto* spec_cmd = app.add_subcommand("spectrum", "Periodogram and sample ACF/PACF tables");
  spec_cmd->add_option("input", spec_input, "Series CSV")->required();
  spec_cmd->add_option("--max-lag", spec_lag, "ACF/PACF lags (default min(50, n-1))");
  spec_cmd->add_flag("--no-demean", spec_raw, "Do not subtract the sample mean before the periodogram");
  add_output_dir(spec_cmd);
  spec_cmd->callback([&] { action = [&] { cmd_spectrum(ctx, spec_input, spec_lag, spec_raw); }; });

  CalibrateArgs cal;
  auto* cal_cmd = app.add_subcommand("calibrate", "Monte Carlo calibration studies");
  cal_cmd->add_option("study", cal.study, "gph, garch, size or coverage")->required();
  cal_cmd->add_option("--reps", cal.reps, "Replications (default per study)");
  cal_cmd->add_option("--seed", cal.seed, "Master seed")->capture_default_str();
  cal_cmd->add_option("--jobs", cal.jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  cal_cmd->add_option("-n,--length", cal.length, "Series length (default per study)");
  cal_cmd->add_option("--holdout", cal.holdout, "Coverage study holdout")->capture_default_str();
  cal_cmd->add_option("--alpha", cal.alpha, "GPH bandwidth exponent")->capture_default_str();
  cal_cmd->add_option("--scheme", cal.scheme, "GPH ordinate scheme")->capture_default_str();
  cal_cmd->add_flag("--null", cal.null_model, "GPH study at white noise (d = D = 0)");
  cal_cmd->add_option("--level", cal.level, "Interval level; size study tests at 1 - level")->capture_default_str();
  add_output_dir(cal_cmd);
  cal_cmd->callback([&] { action = [&] { cmd_calibrate(ctx, cal); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    return report_error(err, ErrorKind::usage, e.what());
  }

  try {
    if (action) action();
    return 0;
  } catch (const io::ParseError& e) {
    json extra = json::object();
    if (e.row()) extra["row"] = e.row();
    if (!e.column().empty()) extra["column"] = e.column();
    return report_error(err, e.kind(), e.what(), extra);
  } catch (const ModelError& e) {
    json vs = json::array();
    for (const auto& v : e.violations()) vs.push_back({{"code", v.code}, {"message", v.message}});
    return report_error(err, e.kind(), e.what(), {{"violations", vs}});
  } catch (const StageError& e) {
    return report_error(err, e.kind(), e.what(), {{"stage", e.stage()}});
  } catch (const Error& e) {
    return report_error(err, e.kind(), e.what());
  } catch (const fs::filesystem_error& e) {
    return report_error(err, ErrorKind::data, e.what());
  } catch (const std::exception& e) {
    return report_error(err, ErrorKind::numerical, std::string("unexpected failure: ") + e.what());
  }
}

}  // namespace sarfima::cli
