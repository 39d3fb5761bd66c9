#include <doctest.h>
#include <fmt/format.h>

#include <filesystem>
#include <iostream>
#include <sstream>

#include "commands.hpp"
#include "varhsmm/csv.hpp"
#include "varhsmm/decode.hpp"
#include "varhsmm/model_json.hpp"
#include "varhsmm/simulate.hpp"

using namespace varhsmm;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "varhsmm");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream captured;
  std::streambuf* old_err = std::cerr.rdbuf(captured.rdbuf());
  std::streambuf* old_out = std::cout.rdbuf(captured.rdbuf());
  const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data());
  std::cerr.rdbuf(old_err);
  std::cout.rdbuf(old_out);
  return {code, captured.str()};
}

fs::path workdir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "varhsmm_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ModelParams two_state_model() {
  ModelParams p = make_default_params({2, 2, 1, 8});
  p.initial << 0.5, 0.5;
  p.transition << 0, 1, 1, 0;
  p.duration.setConstant(1.0 / 8);
  p.intercept[1] << 5, -5;
  p.ar[0][0] << 0.4, 0, 0, 0.2;
  return p;
}

fs::path write_two_state_model(const fs::path& dir) {
  write_model(dir / "truth.json", {2, 2, 1, 8}, two_state_model());
  return dir / "truth.json";
}

std::string s(const fs::path& p) { return p.string(); }

}  // namespace

TEST_CASE("simulate writes series, states and a manifest") {
  const fs::path dir = workdir("simulate");
  const fs::path model = write_two_state_model(dir);
  CHECK(run({"simulate", "--model", s(model), "-T", "500", "--seed", "3", "--out", s(dir / "a")}).code == 0);
  CHECK(read_csv(dir / "a" / "series.csv").values.rows() == 500);
  CHECK(read_csv(dir / "a" / "series.csv").header == std::vector<std::string>{"y1", "y2"});
  CHECK(fs::exists(dir / "a" / "states.csv"));
  CHECK(fs::exists(dir / "a" / "manifest.json"));
  CHECK(parse_model(read_text(dir / "a" / "model.json")).spec == ModelSpec{2, 2, 1, 8});

  CHECK(run({"simulate", "--model", s(model), "-T", "500", "--seed", "3", "--out", s(dir / "b")}).code == 0);
  CHECK(read_text(dir / "a" / "series.csv") == read_text(dir / "b" / "series.csv"));
}

TEST_CASE("bad model files") {
  const fs::path dir = workdir("badmodel");
  write_text_atomic(dir / "broken.json", "{\"spec\": {\"M\": 2, \"d\": 2, \"p\": 1, \"D\": 8}, \"delta\": [0.5, 0.5]}");
  Run r = run({"simulate", "--model", s(dir / "broken.json"), "-T", "10", "--out", s(dir / "o")});
  CHECK(r.code == 2);
  CHECK(r.err.find("'Q'") != std::string::npos);
  write_text_atomic(dir / "syntax.json", "{ not json");
  CHECK(run({"simulate", "--model", s(dir / "syntax.json"), "-T", "10", "--out", s(dir / "o")}).code == 2);
  CHECK(run({"simulate", "--model", s(dir / "missing.json"), "-T", "10", "--out", s(dir / "o")}).code == 1);
  CHECK(run({"simulate", "--bogus"}).code == 2);
  CHECK(run({}).code == 2);
}

TEST_CASE("fit, decode and forecast consume each other's files") {
  const fs::path dir = workdir("pipeline");
  const fs::path model = write_two_state_model(dir);
  REQUIRE(run({"simulate", "--model", s(model), "-T", "500", "--seed", "5", "--out", s(dir / "sim")}).code == 0);
  const fs::path series = dir / "sim" / "series.csv";

  Run r = run({"--strict", "fit", "--data", s(series), "-M", "2", "-p", "1", "-D", "8", "--lambda-sigma", "0.01",
               "--lambda-a", "0.1", "--max-iter", "500", "--out", s(dir / "fit")});
  CHECK(r.code == 0);
  const auto report = nlohmann::json::parse(read_text(dir / "fit" / "fit_report.json"));
  CHECK(report["converged"] == true);
  CHECK(read_csv(dir / "fit" / "trace.csv").values.rows() >= 2);

  REQUIRE(run({"decode", "--data", s(series), "--model", s(dir / "fit" / "model.json"), "--out", s(dir / "dec")}).code ==
          0);
  const Matrix decoded = read_csv(dir / "dec" / "states.csv").values;
  const Matrix truth = read_csv(dir / "sim" / "states.csv").values;
  std::vector<int> e, t;
  for (Eigen::Index i = 0; i < decoded.rows(); ++i) {
    e.push_back(static_cast<int>(decoded(i, 0)) - 1);
    t.push_back(static_cast<int>(truth(i, 0)) - 1);
  }
  CHECK(match_states(e, t, 2).misclassification <= 0.05);
  CHECK(read_csv(dir / "dec" / "segments.csv").header == std::vector<std::string>{"state", "start", "duration"});

  REQUIRE(run({"forecast", "--data", s(series), "--model", s(dir / "fit" / "model.json"), "--horizon", "100", "--out",
               s(dir / "fc")})
              .code == 0);
  const Matrix fc = read_csv(dir / "fc" / "forecasts.csv").values;
  CHECK(fc.rows() == 100);
  const Matrix actual = read_csv(series).values.bottomRows(100);
  const auto fc_report = nlohmann::json::parse(read_text(dir / "fc" / "forecast_report.json"));
  CHECK(fc_report["msfe"].get<double>() == doctest::Approx(msfe(fc.rightCols(2), actual)).epsilon(1e-12));

  CHECK(run({"forecast", "--data", s(series), "--model", s(dir / "fit" / "model.json"), "--horizon", "500", "--out",
             s(dir / "fc2")})
            .code == 2);
}

TEST_CASE("strict mode and non-convergence") {
  const fs::path dir = workdir("strict");
  const fs::path model = write_two_state_model(dir);
  REQUIRE(run({"simulate", "--model", s(model), "-T", "200", "--seed", "6", "--out", s(dir / "sim")}).code == 0);
  const std::vector<std::string> base{"fit", "--data", s(dir / "sim" / "series.csv"), "-M", "2", "-p", "1", "-D", "8",
                                      "--max-iter", "1", "--tol", "1e-14", "--out", s(dir / "fit")};
  CHECK(run(base).code == 0);
  auto strict = base;
  strict.insert(strict.begin(), "--strict");
  CHECK(run(strict).code == 3);
  CHECK(nlohmann::json::parse(read_text(dir / "fit" / "fit_report.json"))["converged"] == false);
}

TEST_CASE("malformed data and dimension mismatch exit with 2") {
  const fs::path dir = workdir("baddata");
  write_text_atomic(dir / "bad.csv", "y1,y2\n1,2\n3,x\n");
  Run r = run({"fit", "--data", s(dir / "bad.csv"), "-M", "1", "-p", "0", "-D", "1", "--out", s(dir / "o")});
  CHECK(r.code == 2);
  CHECK(r.err.find("row 2, column 2") != std::string::npos);

  const fs::path model = write_two_state_model(dir);
  write_text_atomic(dir / "three.csv", "a,b,c\n1,2,3\n4,5,6\n");
  CHECK(run({"decode", "--data", s(dir / "three.csv"), "--model", s(model), "--out", s(dir / "o")}).code == 2);
}

TEST_CASE("cross-validated fit writes the full surface") {
  const fs::path dir = workdir("cv");
  std::string csv = "y1\n";
  for (int t = 0; t < 60; ++t) csv += fmt::format("{}\n", std::sin(0.7 * t) + 0.1 * std::cos(3.1 * t));
  write_text_atomic(dir / "data.csv", csv);
  REQUIRE(run({"--threads", "2", "fit", "--data", s(dir / "data.csv"), "-M", "1", "-p", "1", "-D", "1", "--cv",
               "--out", s(dir / "fit")})
              .code == 0);
  const CsvTable surface = read_csv(dir / "fit" / "cv_surface.csv");
  CHECK(surface.values.rows() == 225);
  CHECK(surface.header == std::vector<std::string>{"lambda_sigma", "lambda_a", "msfe", "converged"});
  const auto summary = nlohmann::json::parse(read_text(dir / "fit" / "cv_summary.json"));
  CHECK(summary["best_msfe"].get<double>() == doctest::Approx(surface.values.col(2).minCoeff()));
}

TEST_CASE("constant series with a one-state model forecasts the constant") {
  const fs::path dir = workdir("constant");
  std::string csv = "a,b\n";
  for (int t = 0; t < 30; ++t) csv += "2.5,-1\n";
  write_text_atomic(dir / "data.csv", csv);
  REQUIRE(run({"fit", "--data", s(dir / "data.csv"), "-M", "1", "-p", "0", "-D", "1", "--out", s(dir / "fit")}).code ==
          0);
  REQUIRE(run({"forecast", "--data", s(dir / "data.csv"), "--model", s(dir / "fit" / "model.json"), "--horizon", "10",
               "--out", s(dir / "fc")})
              .code == 0);
  CHECK(nlohmann::json::parse(read_text(dir / "fc" / "forecast_report.json"))["msfe"].get<double>() < 1e-20);
  REQUIRE(run({"decode", "--data", s(dir / "data.csv"), "--model", s(dir / "fit" / "model.json"), "--out",
               s(dir / "dec")})
              .code == 0);
  CHECK((read_csv(dir / "dec" / "states.csv").values.array() == 1.0).all());
}

TEST_CASE("returns and correlate") {
  const fs::path dir = workdir("returns");
  std::string csv = "AAA,BBB\n";
  for (int t = 0; t < 504; ++t) csv += fmt::format("{},{}\n", 100.0 + std::sin(0.1 * t), 50.0 + 0.01 * t);
  write_text_atomic(dir / "prices.csv", csv);
  REQUIRE(run({"returns", "--prices", s(dir / "prices.csv"), "--out", s(dir / "r")}).code == 0);
  const CsvTable returns = read_csv(dir / "r" / "returns.csv");
  CHECK(returns.values.rows() == 503);
  CHECK(returns.header == std::vector<std::string>{"AAA", "BBB"});

  REQUIRE(run({"correlate", "--data", s(dir / "r" / "returns.csv"), "--lag", "1", "--out", s(dir / "c")}).code == 0);
  CHECK(read_csv(dir / "c" / "corr.csv").values.rows() == 2);
  CHECK(read_csv(dir / "c" / "significant.csv").header == returns.header);

  write_text_atomic(dir / "zero.csv", "p\n1\n0\n2\n");
  Run r = run({"returns", "--prices", s(dir / "zero.csv"), "--out", s(dir / "z")});
  CHECK(r.code == 2);
  CHECK(r.err.find("row 2, column 1") != std::string::npos);
}

TEST_CASE("compare ranks candidates") {
  const fs::path dir = workdir("compare");
  const fs::path model = write_two_state_model(dir);
  REQUIRE(run({"simulate", "--model", s(model), "-T", "200", "--seed", "8", "--out", s(dir / "sim")}).code == 0);
  REQUIRE(run({"compare", "--data", s(dir / "sim" / "series.csv"), "--candidate", "2,1,8", "--candidate", "2,0,8,plain",
               "--grid-sigma", "0.01", "--grid-a", "0.1,1", "--out", s(dir / "cmp")})
              .code == 0);
  const std::string table = read_text(dir / "cmp" / "comparison.csv");
  CHECK(table.rfind("rank,model,", 0) == 0);
  CHECK(std::count(table.begin(), table.end(), '\n') == 3);
  CHECK(run({"compare", "--data", s(dir / "sim" / "series.csv"), "--candidate", "2,1", "--out", s(dir / "x")}).code ==
        2);
}
