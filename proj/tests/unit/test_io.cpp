#include <doctest.h>

#include <filesystem>

#include "support/instances.hpp"
#include "varhsmm/csv.hpp"
#include "varhsmm/errors.hpp"
#include "varhsmm/manifest.hpp"
#include "varhsmm/model_json.hpp"

using namespace varhsmm;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "varhsmm_io_tests";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("CSV round trip preserves every double") {
  Rng rng(1);
  CsvTable table{{"a", "b", "c"}, testing_support::random_series(rng, 20, 3)};
  table.values(0, 0) = 1e-300;
  table.values(1, 1) = -0.1;
  const CsvTable back = parse_csv(to_csv(table));
  CHECK(back.header == table.header);
  CHECK(back.values == table.values);

  const fs::path path = scratch("round.csv");
  write_csv(path, table);
  CHECK(read_csv(path).values == table.values);
  CHECK_FALSE(fs::exists(path.string() + ".tmp"));
}

TEST_CASE("CSV errors name the row and column") {
  try {
    parse_csv("x,y\n1,2\n3,abc\n");
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("row 2, column 2") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_csv("x,y\n1\n"), ValidationError);
  CHECK_THROWS_AS(parse_csv(""), ValidationError);
  CHECK_THROWS_AS(parse_csv("x\nnan\n"), ValidationError);
  CHECK_THROWS_AS(read_csv(scratch("does_not_exist.csv")), IoError);
  CHECK(parse_csv("x,y\r\n1,2\r\n\n").values.rows() == 1);
}

TEST_CASE("model JSON round trip") {
  Rng rng(2);
  const ModelSpec spec{3, 2, 2, 4};
  const ModelParams p = testing_support::random_params(spec, rng);
  const StoredModel back = parse_model(dump_model(spec, p));
  CHECK(back.spec == spec);
  CHECK(back.params.initial == p.initial);
  CHECK(back.params.transition == p.transition);
  CHECK(back.params.duration == p.duration);
  for (int j = 0; j < 3; ++j) {
    CHECK(back.params.intercept[j] == p.intercept[j]);
    CHECK(back.params.covariance[j] == p.covariance[j]);
    CHECK(back.params.ar[j][1] == p.ar[j][1]);
  }
  const auto doc = nlohmann::ordered_json::parse(dump_model(spec, p));
  CHECK(doc["A"].size() == 3);
  CHECK(doc["A"][0].size() == 2);
  CHECK(doc["Sigma"][1][0].size() == 2);
  CHECK(doc["spec"]["D"] == 4);
}

TEST_CASE("model JSON errors name the field") {
  Rng rng(3);
  const ModelSpec spec{2, 2, 1, 3};
  auto doc = model_to_json(spec, testing_support::random_params(spec, rng));
  const auto expect_message = [](const nlohmann::ordered_json& d, const std::string& text) {
    try {
      model_from_json(d);
      FAIL("expected a validation error");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find(text) != std::string::npos);
    }
  };
  auto missing = doc;
  missing.erase("Q");
  expect_message(missing, "'Q'");
  auto wrong = doc;
  wrong["Sigma"][1][0] = {1.0};
  expect_message(wrong, "Sigma[1][0]");
  auto text = doc;
  text["spec"]["M"] = "two";
  expect_message(text, "spec.M");
  auto diag = doc;
  diag["Q"][0][0] = 0.5;
  expect_message(diag, "nonzero diagonal");
  CHECK_THROWS_AS(parse_model("{\"spec\": "), ValidationError);
}

TEST_CASE("SHA-256 and manifests") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  const fs::path input = scratch("in.txt");
  write_text_atomic(input, "abc");
  RunManifest m;
  m.command = "fit";
  m.seed = 9;
  m.add_input(input);
  const auto doc = m.to_json();
  CHECK(doc["inputs"][input.string()]["sha256"] == sha256_hex("abc"));
  CHECK(doc["rng"]["seed"] == 9);
  CHECK(doc.dump() == m.to_json().dump());
}
