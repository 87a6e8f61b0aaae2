#include "support.hpp"

#include <algorithm>
#include <json.hpp>
#include <sstream>

#include "qerd/suites.hpp"

using namespace qerd;

namespace {

SuiteConfig small_erdelyi(unsigned jobs) {
  SuiteConfig cfg;
  cfg.suite = "erdelyi";
  cfg.precision = 40;
  cfg.jobs = jobs;
  cfg.grids["erdelyi"] = {{"q", "0.3"},       {"n", "0..1"},       {"m", "0..1"},
                          {"nu", "0, 1"},      {"sigma", "0.3"},    {"z", "0.7, 0.5@pi/3"},
                          {"complex_nu", "none"}};
  return cfg;
}

}  // namespace

TEST_SUITE("suites") {

TEST_CASE("list splitting and ranges") {
  CHECK(split_list("0..3") == std::vector<std::string>{"0", "1", "2", "3"});
  CHECK(split_list("-2..0, 5") == std::vector<std::string>{"-2", "-1", "0", "5"});
  CHECK(split_list(" 0.3 ,q^2,1+0.5i ") == std::vector<std::string>{"0.3", "q^2", "1+0.5i"});
  CHECK_THROWS_AS(split_list("3..1"), ConfigError);
}

TEST_CASE("value syntax") {
  QContext ctx("0.5", 30, "1e-15");
  WorkingPrecision wp(ctx);
  CHECK_CLOSE(parse_value("0.25", ctx), Complex(Real("0.25")), "1e-40");
  CHECK_CLOSE(parse_value("q", ctx), Complex(Real("0.5")), "1e-40");
  CHECK_CLOSE(parse_value("q^3", ctx), Complex(Real("0.125")), "1e-40");
  CHECK_CLOSE(parse_value("q^-1", ctx), Complex(Real(2)), "1e-40");
  CHECK_CLOSE(parse_value("1-0.5i", ctx), Complex(Real(1), Real("-0.5")), "1e-40");
  CHECK_CLOSE(parse_value("2i", ctx), Complex(Real(0), Real(2)), "1e-40");
  Complex polar = parse_value("2@pi/3", ctx);
  CHECK_CLOSE(polar, Complex(Real(1), hp::sqrt(Real(3))), "1e-40");
  CHECK_CLOSE(parse_value("1@pi", ctx), Complex(Real(-1)), "1e-40");
  CHECK_THROWS_AS(parse_value("abc", ctx), ConfigError);
  CHECK_THROWS_AS(parse_value("1@", ctx), ConfigError);
}

TEST_CASE("config file parsing") {
  std::istringstream good(
      "suite = erdelyi\nprecision = 40\ntolerance = 1e-25\njobs = 2\n"
      "[erdelyi]\nn = 0..1\nz = 0.7\n");
  SuiteConfig cfg = parse_config(good);
  CHECK(cfg.suite == "erdelyi");
  CHECK(cfg.precision == 40);
  CHECK(cfg.tolerance == std::optional<std::string>("1e-25"));
  CHECK(cfg.jobs == 2);
  CHECK(cfg.grids["erdelyi"]["n"] == "0..1");

  std::istringstream unknown("colour = red\n");
  CHECK_THROWS_AS(parse_config(unknown), ConfigError);
  std::istringstream broken("[erdelyi\nn = 1\n");
  CHECK_THROWS_AS(parse_config(broken), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/qerd.ini"), ConfigError);
}

TEST_CASE("validation") {
  SuiteConfig cfg = small_erdelyi(1);
  CHECK_NOTHROW(validate(cfg));
  SuiteConfig guard = cfg;
  guard.precision = 50;
  guard.tolerance = "1e-60";  // needs more than 50 digits
  CHECK_THROWS_AS(validate(guard), ConfigError);
  SuiteConfig name = cfg;
  name.suite = "nonsense";
  CHECK_THROWS_AS(validate(name), ConfigError);
  SuiteConfig axis = cfg;
  axis.grids["erdelyi"]["colour"] = "red";
  CHECK_THROWS_AS(validate(axis), ConfigError);
  SuiteConfig value = cfg;
  value.grids["erdelyi"]["n"] = "x";
  CHECK_THROWS_AS(validate(value), ConfigError);
  CHECK(std::find(suite_names().begin(), suite_names().end(), "classical-limit") != suite_names().end());
}

TEST_CASE("reports do not depend on the number of workers") {
  VerificationReport one = run_suite(small_erdelyi(1));
  VerificationReport four = run_suite(small_erdelyi(4));
  CHECK(one.to_json() == four.to_json());
  CHECK(one.exit_code() == 0);
  CHECK(one.count(CaseStatus::pass) == one.cases.size());
  CHECK(one.cases.front().key == "erdelyi/000000");

  auto doc = nlohmann::json::parse(one.to_json());
  const auto& cases = doc.at("cases");
  REQUIRE(cases.size() == one.cases.size());
  std::vector<std::string> keys;
  for (const auto& [k, v] : cases[0].items()) keys.push_back(k);
  for (const auto& c : cases) {
    std::vector<std::string> these;
    for (const auto& [k, v] : c.items()) these.push_back(k);
    CHECK(these == keys);
  }
  CHECK(doc.at("precision") == 40);
}

TEST_CASE("failures and truncation map to exit codes") {
  SuiteConfig fail;
  fail.suite = "classical-limit";
  fail.precision = 30;
  fail.grids["classical-limit"] = {{"n", "0"}, {"m", "0"}, {"nu", "0"}, {"q_fine", "0.99"},
                                   {"q_coarse", "0.9"}, {"gap_limit", "1e-12"}};
  VerificationReport f = run_suite(fail);
  CHECK(f.count(CaseStatus::fail) == 1);
  CHECK(f.exit_code() == 1);

  SuiteConfig trunc;
  trunc.suite = "qbessel-orthogonality";
  trunc.grids["qbessel-orthogonality"] = {{"q", "0.5"}, {"n", "0"}, {"m", "0"}, {"l", "0"}, {"window", "4"}};
  VerificationReport t = run_suite(trunc);
  CHECK(t.count(CaseStatus::truncation) == 1);
  CHECK(t.exit_code() == 3);

  // a failure outranks truncation
  VerificationReport both = t;
  both.cases.push_back(f.cases.front());
  CHECK(both.exit_code() == 1);
}

}  // TEST_SUITE
