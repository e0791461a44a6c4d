#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "sarfima/io.hpp"
#include "sarfima/simulate.hpp"
#include "sarfima/studies.hpp"

using namespace sarfima;
using io::ParseError;

namespace {

TimeSeries parse(const std::string& text, int season = 7) {
  std::istringstream in(text);
  return io::read_series_csv(in, season);
}

ParseError parse_error(const std::string& text) {
  try {
    parse(text);
  } catch (const ParseError& e) {
    return e;
  }
  FAIL("input parsed without error");
  return ParseError("unreachable");
}

}  // namespace

TEST_CASE("CSV with and without a date column", "[io]") {
  const auto a = parse("value\n1.5\n-2\n3e2\n");
  CHECK(a.size() == 3);
  CHECK(a[2] == 300.0);
  CHECK_FALSE(a.index().has_value());
  CHECK(a.season() == 7);

  const auto b = parse("date,value,comment\n2024-01-30,1,x\n2024-01-31,2,y\n2024-02-01,3,z\n");
  REQUIRE(b.index().has_value());
  CHECK(io::format_date((*b.index())[2]) == "2024-02-01");
  CHECK(b[1] == 2.0);
}

TEST_CASE("CSV tolerates a byte-order mark, blanks and CRLF", "[io]") {
  const auto x = parse("\xEF\xBB\xBFvalue\r\n 4 \r\n\r\n5\r\n");
  REQUIRE(x.size() == 2);
  CHECK(x[0] == 4.0);
  CHECK(x[1] == 5.0);
}

TEST_CASE("CSV errors name the row and column", "[io]") {
  auto e = parse_error("date,value\n2024-01-01,1\n2024-01-02,\n");
  CHECK(e.row() == 3);
  CHECK(e.column() == "value");
  CHECK(std::string(e.what()).find("row 3, column 'value': missing value") != std::string::npos);

  e = parse_error("value\n1\nNA\n");
  CHECK(e.row() == 3);
  e = parse_error("value\n1\n2\nabc\n");
  CHECK(e.row() == 4);
  CHECK(std::string(e.what()).find("not a number") != std::string::npos);
  e = parse_error("date,value\n2024-01-02,1\n2024-01-01,2\n");
  CHECK(e.column() == "date");
  CHECK(std::string(e.what()).find("strictly increasing") != std::string::npos);
  e = parse_error("date,value\n2024-13-01,1\n");
  CHECK(e.column() == "date");
  e = parse_error("date,value\n2024-01-01\n");
  CHECK(e.row() == 2);
  e = parse_error("x,y\n1,2\n");
  CHECK(e.row() == 1);
  CHECK_THROWS_AS(parse(""), ParseError);
  CHECK_THROWS_AS(io::read_series_csv(std::string("/nonexistent/file.csv"), 7), ParseError);
}

TEST_CASE("CSV write then read reproduces the series", "[io]") {
  const auto x = simulate(reference_model(), {300, -1, 3, {}});
  std::vector<Date> idx;
  for (int i = 0; i < 300; ++i)
    idx.push_back(std::chrono::sys_days{std::chrono::year{2020} / 1 / 1} + std::chrono::days{i});
  const TimeSeries dated(std::vector<double>(x.values().begin(), x.values().end()), 7, idx);
  for (const auto* s : {&x, &dated}) {
    std::ostringstream out;
    io::write_series_csv(out, *s);
    const auto back = parse(out.str());
    REQUIRE(back.size() == s->size());
    for (std::size_t i = 0; i < s->size(); ++i) REQUIRE(back[i] == (*s)[i]);
    CHECK(back.index().has_value() == s->index().has_value());
  }
}

TEST_CASE("numbers format in shortest round-trip form", "[io]") {
  CHECK(io::format_number(0.1) == "0.1");
  CHECK(io::format_number(std::nan("")) == "NA");
  CHECK(io::number(INFINITY).is_null());
  CHECK(io::get_number(nlohmann::json{{"a", nullptr}}, "a", 2.0) == 2.0);
  CHECK(std::isnan(io::get_numbers(nlohmann::json::parse(R"({"a": [1, null]})"), "a")[1]));
}

TEST_CASE("model JSON round trip", "[io]") {
  auto m = reference_model();
  m.sarma.phi = {0.3, -0.1};
  m.sarma.Phi = {0.2};
  const auto back = io::model_from_json(nlohmann::json::parse(io::to_json(m).dump()));
  CHECK(back.mu == m.mu);
  CHECK(back.memory.d == m.memory.d);
  CHECK(back.memory.D == m.memory.D);
  CHECK(back.memory.s == m.memory.s);
  CHECK(back.sarma.phi == m.sarma.phi);
  CHECK(back.sarma.Phi == m.sarma.Phi);
  CHECK(back.sarma.theta == m.sarma.theta);
  CHECK(back.sarma.Theta == m.sarma.Theta);
  CHECK(back.sarma.sigma2_eps == m.sarma.sigma2_eps);
  REQUIRE(back.garch.has_value());
  CHECK(back.garch->alpha0 == m.garch->alpha0);
  CHECK(back.garch->beta == m.garch->beta);

  m.garch.reset();
  const auto j = io::to_json(m);
  CHECK(j.at("garch").is_null());
  CHECK_FALSE(io::model_from_json(j).garch.has_value());
  CHECK_THROWS_AS(io::model_from_json(nlohmann::json::parse(R"({"mu": "x", "memory": {"d": 0, "D": 0, "s": 1}})")), ParseError);
}

TEST_CASE("config JSON round trip", "[io]") {
  PipelineConfig c;
  c.alpha = 0.7;
  c.scheme = OrdinateScheme::near_zero;
  c.sarma = {1, 0, 1, 1};
  c.garch_mode = GarchMode::force;
  c.burn_in = 99;
  c.aic_candidates = {{0, 0, 0, 0}};
  const auto back = io::config_from_json(io::to_json(c));
  CHECK(back.alpha == 0.7);
  CHECK(back.scheme == OrdinateScheme::near_zero);
  CHECK(back.sarma.p == 1);
  CHECK(back.sarma.Q == 1);
  CHECK(back.garch_mode == GarchMode::force);
  CHECK(back.burn_in == 99);
  CHECK(back.aic_candidates.size() == 1);
}

TEST_CASE("fit report JSON carries parameters and reloads its model", "[io]") {
  PipelineConfig cfg;
  cfg.garch_mode = GarchMode::force;
  const auto rep = fit_pipeline(simulate(reference_model(), {1603, -1, 8, {}}), cfg);
  const auto j = nlohmann::json::parse(io::to_json(rep).dump());
  CHECK(j.at("format") == "sarfima-fit-report");
  const auto& params = j.at("parameters");
  REQUIRE(params.size() == 7);
  std::vector<std::string> names;
  for (const auto& row : params) {
    names.push_back(row.at("name"));
    CHECK(row.at("sd").is_number());
  }
  CHECK(names == std::vector<std::string>{"d", "D", "theta", "Theta", "alpha0", "alpha1", "beta1"});
  const double t = params[0].at("t");
  CHECK(t == Catch::Approx(rep.gph.d_hat / rep.gph.sd_d));
  CHECK(j.at("stages").size() == rep.stages.size());
  CHECK(j.at("final_state").at("h").size() == 1);

  const auto m = io::model_from_report(j);
  CHECK(m.mu == rep.model.mu);
  CHECK(m.memory.d == rep.model.memory.d);
  CHECK(m.garch->beta == rep.model.garch->beta);
  CHECK(io::config_from_json(j.at("config")).garch_mode == GarchMode::force);
}
