#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "sarfima/io.hpp"
#include "sarfima/simulate.hpp"
#include "sarfima/studies.hpp"

using namespace sarfima;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = 0;
  std::string out, err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "sarfima");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("sarfima_cli_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  std::string operator/(const std::string& name) const { return (path_ / name).string(); }
  std::string str() const { return path_.string(); }

 private:
  fs::path path_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

json load(const std::string& path) { return json::parse(slurp(path)); }

void write_file(const std::string& path, const std::string& content) {
  std::ofstream(path, std::ios::binary) << content;
}

/// Reference-model path with a daily date column.
std::string write_reference_csv(const TempDir& dir, int n, std::uint64_t seed) {
  const auto x = simulate(reference_model(), {n, -1, seed, {}});
  std::vector<Date> idx;
  for (int i = 0; i < n; ++i) idx.push_back(std::chrono::sys_days{std::chrono::year{2019} / 1 / 1} + std::chrono::days{i});
  const TimeSeries dated(std::vector<double>(x.values().begin(), x.values().end()), 7, idx);
  std::ostringstream os;
  io::write_series_csv(os, dated);
  const auto path = dir / "series.csv";
  write_file(path, os.str());
  return path;
}

std::vector<std::vector<std::string>> read_tsv(const std::string& path) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(path));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, '\t')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("fit writes a report with standard errors for every parameter", "[cli]") {
  TempDir dir;
  const auto csv = write_reference_csv(dir, 1836, 31);
  const auto r = run_cli({"fit", csv, "--season", "7", "--alpha", "0.78", "--holdout", "233", "--garch-mode", "force",
                          "--output-dir", dir.str()});
  INFO(r.err);
  REQUIRE(r.code == 0);
  const auto rep = load(dir / "fit_report.json");
  CHECK(rep.at("series").at("n") == 1603);
  CHECK(rep.at("stages")[0].at("outputs").at("M") == 26);
  REQUIRE(rep.at("parameters").size() == 7);
  for (const auto& row : rep.at("parameters")) {
    CHECK(row.at("sd").is_number());
    CHECK(row.at("p_value").is_number());
  }
  CHECK(r.out.find("theta") != std::string::npos);
  const auto meta = load(dir / "fit_report.json.meta.json");
  CHECK(meta.at("generator").at("name") == kGeneratorName);
  CHECK(meta.contains("created_utc"));

  const auto table = read_tsv(dir / "fit_table.tsv");
  REQUIRE(table.size() == 1604);
  CHECK(table[0][0] == "t");
  CHECK(table[0][1] == "date");
  CHECK(table[1][3] == "NA");  // filtered value inside the burn-in
}

TEST_CASE("fit output feeds forecast unchanged", "[cli]") {
  TempDir dir;
  const auto csv = write_reference_csv(dir, 1836, 32);
  REQUIRE(run_cli({"fit", csv, "--holdout", "233", "--output-dir", dir.str()}).code == 0);
  const auto r = run_cli({"forecast", "--report", dir / "fit_report.json", "--input", csv, "--holdout", "233",
                          "--output-dir", dir.str()});
  INFO(r.err);
  REQUIRE(r.code == 0);
  const auto ev = load(dir / "evaluation.json");
  for (const char* key : {"mpe", "mape", "cpgfi", "cphfi"}) CHECK(ev.at(key).is_number());
  CHECK(ev.at("count") == 233);
  CHECK(ev.at("first_index") == 1603);
  CHECK(ev.at("garch_seeded_from_report").is_boolean());
  CHECK(json::parse(r.out) == ev);

  // Coverage recomputed from the written table matches the summary exactly.
  const auto rows = read_tsv(dir / "forecast.tsv");
  REQUIRE(rows.size() == 234);
  REQUIRE(rows[0][2] == "actual");
  int in_g = 0, in_h = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto num = [&](int c) { return *io::parse_double(rows[i][static_cast<std::size_t>(c)]); };
    const double a = num(2);
    in_h += a >= num(4) && a <= num(5);
    in_g += a >= num(6) && a <= num(7);
  }
  CHECK(ev.at("cpgfi").get<double>() == 100.0 * in_g / 233.0);
  CHECK(ev.at("cphfi").get<double>() == 100.0 * in_h / 233.0);

  const auto ranged = run_cli({"forecast", "--report", dir / "fit_report.json", "--input", csv, "--range",
                               "2023-05-23:2023-05-24", "--output-dir", dir / "ranged"});
  INFO(ranged.err);
  REQUIRE(ranged.code == 0);
  CHECK(load(dir / "ranged/evaluation.json").at("count") == 2);
}

TEST_CASE("a perfect self-forecast has zero percentage error", "[cli]") {
  TempDir dir;
  std::string csv = "value\n";
  for (int i = 0; i < 60; ++i) csv += "5\n";
  write_file(dir / "constant.csv", csv);
  SarfimaGarchModel m;
  m.mu = 5.0;
  m.memory.s = 7;
  write_file(dir / "model.json", io::to_json(m).dump());
  const auto r = run_cli({"forecast", "--report", dir / "model.json", "--input", dir / "constant.csv", "--holdout",
                          "20", "--output-dir", dir.str()});
  INFO(r.err);
  REQUIRE(r.code == 0);
  const auto ev = load(dir / "evaluation.json");
  CHECK(ev.at("mpe") == 0.0);
  CHECK(ev.at("mape") == 0.0);
  CHECK(ev.at("cpgfi") == 100.0);
  CHECK(ev.at("cphfi") == 100.0);
}

TEST_CASE("reruns produce byte-identical primary outputs", "[cli]") {
  TempDir dir;
  const auto csv = write_reference_csv(dir, 700, 33);
  write_file(dir / "model.json", io::to_json(reference_model()).dump());
  for (const char* sub : {"a", "b"}) {
    REQUIRE(run_cli({"fit", csv, "--output-dir", dir / sub}).code == 0);
    REQUIRE(run_cli({"simulate", "--model", dir / "model.json", "-n", "300", "--seed", "5",
                     "--output-dir", dir / sub})
                .code == 0);
  }
  for (const char* file : {"fit_report.json", "fit_table.tsv", "simulated.csv"})
    CHECK(slurp(dir / (std::string("a/") + file)) == slurp(dir / (std::string("b/") + file)));
}

TEST_CASE("simulate, diagnose and spectrum write their tables", "[cli]") {
  TempDir dir;
  auto r = run_cli({"simulate", "--d", "0.2", "--D", "0.1", "--theta", "0.3", "--alpha0", "0.1", "--arch", "0.1",
                    "--beta", "0.8", "-n", "400", "--seed", "9", "--start-date", "2024-01-01", "-o", dir / "sim.csv"});
  INFO(r.err);
  REQUIRE(r.code == 0);
  const auto sim = io::read_series_csv(dir / "sim.csv", 7);
  CHECK(sim.size() == 400);
  CHECK(sim.index().has_value());
  const auto meta = load(dir / "sim.csv.meta.json");
  CHECK(meta.at("seed") == 9);
  CHECK(meta.at("generator").at("version") == kGeneratorVersion);

  r = run_cli({"diagnose", dir / "sim.csv", "--lag", "8", "--output-dir", dir.str()});
  REQUIRE(r.code == 0);
  const auto diag = load(dir / "diagnostics.json");
  CHECK(diag.at("non_correlation").at("ljung_box").at("lag") == 8);
  CHECK(diag.at("normality").at("jarque_bera").at("p_value").is_number());

  r = run_cli({"spectrum", dir / "sim.csv", "--max-lag", "21", "--output-dir", dir.str()});
  REQUIRE(r.code == 0);
  CHECK(read_tsv(dir / "periodogram.tsv").size() == 1 + 199);
  CHECK(read_tsv(dir / "acf.tsv").size() == 1 + 21);

  r = run_cli({"simulate", "--model", dir / "x.json", "--d", "0.1"});
  CHECK(r.code == 1);
}

TEST_CASE("calibrate writes a study summary", "[cli]") {
  TempDir dir;
  const auto r = run_cli({"calibrate", "size", "--reps", "20", "-n", "300", "--output-dir", dir.str()});
  INFO(r.err);
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir / "calibration_size.json"));
}

TEST_CASE("errors map to exit codes with a JSON description", "[cli]") {
  TempDir dir;
  write_file(dir / "gap.csv", "date,value\n2024-01-01,1\n2024-01-02,\n2024-01-03,3\n");
  auto r = run_cli({"fit", dir / "gap.csv", "--output-dir", dir.str()});
  CHECK(r.code == 2);
  const auto e = json::parse(r.err).at("error");
  CHECK(e.at("row") == 3);
  CHECK(e.at("column") == "value");
  CHECK(e.at("message").get<std::string>().find("row 3") != std::string::npos);

  CHECK(run_cli({}).code == 1);
  CHECK(run_cli({"fit"}).code == 1);
  CHECK(run_cli({"fit", dir / "gap.csv", "--sarma", "1,2"}).code == 1);
  CHECK(run_cli({"fit", dir / "gap.csv", "--bogus"}).code == 1);
  CHECK(run_cli({"--help"}).code == 0);

  const auto csv = write_reference_csv(dir, 200, 34);
  SarfimaGarchModel m;
  m.memory.s = 7;
  write_file(dir / "model.json", io::to_json(m).dump());
  r = run_cli({"forecast", "--report", dir / "model.json", "--input", csv, "--holdout", "500", "--output-dir", dir.str()});
  CHECK(r.code == 2);
  CHECK(json::parse(r.err).at("error").at("message").get<std::string>().find("holdout") != std::string::npos);
  CHECK(run_cli({"forecast", "--report", dir / "model.json", "--input", csv, "--holdout", "5", "--range", "1:2"}).code ==
        1);

  m.memory.d = 0.6;
  m.memory.D = 0.1;
  m.sarma.theta = {1.5};
  write_file(dir / "bad.json", io::to_json(m).dump());
  r = run_cli({"forecast", "--report", dir / "bad.json", "--input", csv, "--holdout", "5", "--output-dir", dir.str()});
  CHECK(r.code != 0);
  CHECK(json::parse(r.err).at("error").contains("violations"));
}
