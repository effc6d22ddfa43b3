#include <doctest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include <json.hpp>

#include "cmpp/errors.hpp"
#include "cmpp/report.hpp"
#include "cmpp/runner.hpp"
#include "cmpp/scenario.hpp"

namespace scenario = cmpp::scenario;
namespace report = cmpp::report;

namespace {

const char* kMinimal = R"sc(# comment
name = "tiny"
[params]
c = 1
d = "c + 1"
[base]
claim = "gamma(rate=d, shape=2)"   ; trailing comment
mixing = "beta(2, 1)"
[verify]
pairs = [[0.25, 0.5], [0.5, 1]]
thetas = [0.1, 0.2]
)sc";

std::size_t error_line(const std::string& text) {
  try {
    scenario::load(text);
  } catch (const cmpp::ScenarioError& e) {
    return e.line();
  }
  return std::numeric_limits<std::size_t>::max();
}

}  // namespace

TEST_SUITE("scenario") {
  TEST_CASE("document syntax") {
    const auto doc = scenario::parse_document(kMinimal);
    REQUIRE(doc.size() == 4);
    CHECK(doc[0].name.empty());
    CHECK(doc[1].name == "params");
    CHECK(doc[2].entries[0].key == "claim");
    CHECK(doc[2].entries[0].line == 7);
    CHECK(doc[2].entries[0].value.text == "gamma(rate=d, shape=2)");
    const auto& pairs = doc[3].entries[0].value;
    REQUIRE(pairs.kind == scenario::Value::Kind::List);
    REQUIRE(pairs.items.size() == 2);
    CHECK(pairs.items[1].items[0].number == 0.5);
    const auto quoted = scenario::parse_document("[annotations]\n\"p(Q)\" = 810\n");
    CHECK(quoted[1].entries[0].key == "p(Q)");
  }

  TEST_CASE("loading") {
    const auto s = scenario::load(kMinimal);
    CHECK(s.name == "tiny");
    CHECK(s.pairs.size() == 2);
    CHECK(s.verify_thetas == std::vector<double>{0.1, 0.2});
    CHECK(s.line_of("base.mixing") == 8);
    const auto params = scenario::bind_params(s);
    CHECK(params.at("d") == 2.0);
    CHECK(scenario::bind_params(s, {{"c", 3.0}}).at("d") == 4.0);
  }

  TEST_CASE("errors name the line") {
    CHECK(error_line("name = \"a\"\n[base]\nclaim = \"exp(rate=1)\"\nmixing = oops\n") == 4);
    CHECK(error_line("name = \"a\"\n[base\n") == 2);
    CHECK(error_line("name = \"a\"\n[nonsense]\nx = 1\n") == 2);
    CHECK(error_line("name = \"a\"\n\n[mc]\npaths = 1.5\n") == 4);
    CHECK(error_line("name = \"a\"\n[verify]\npairs = [[1, 2\n") == 3);
    CHECK(error_line("name = \"a\"\n[base]\nclaim = \"unterminated\n") == 3);
    CHECK_THROWS_AS(scenario::load("[base]\nclaim = \"exp(rate=1)\"\n"), cmpp::ScenarioError);
  }

  TEST_CASE("build errors point at the key") {
    const std::string text = std::string(kMinimal) + "[change]\nalpha = \"ln(theta\"\n";
    const auto s = scenario::load(text);
    try {
      cmpp::runner::build(cmpp::runner::apply(s, {}));
      FAIL("expected a scenario error");
    } catch (const cmpp::ScenarioError& e) {
      CHECK(e.line() == 13);
    }
  }

  TEST_CASE("builtins") {
    const auto names = scenario::builtin_names();
    CHECK(names.size() == 5);
    for (const auto& n : names) {
      CAPTURE(n);
      const auto s = scenario::resolve(n);
      CHECK(s.name == n);
      CHECK(s.seed == 20190521);
      CHECK(s.paths == 100000);
      CHECK_NOTHROW(cmpp::runner::build(cmpp::runner::apply(s, {})));
    }
    CHECK_THROWS_AS(scenario::resolve("no-such-scenario"), cmpp::ScenarioError);
  }

  TEST_CASE("overrides") {
    cmpp::runner::Overrides o;
    o.seed = 7;
    o.paths = 500;
    o.params["c"] = 2.0;
    const auto e = cmpp::runner::apply(scenario::resolve("example-6.3"), o);
    CHECK(e.scenario.seed == 7);
    CHECK(e.scenario.paths == 500);
    CHECK(e.params.at("c") == 2.0);
    cmpp::runner::Overrides few;
    few.paths = 50;
    CHECK_THROWS_AS(cmpp::runner::apply(scenario::resolve("example-6.3"), few), cmpp::ScenarioError);
  }
}

TEST_SUITE("report") {
  TEST_CASE("number formatting") {
    CHECK(report::format_double(0.1) == "0.10000000000000001");
    CHECK(report::format_double(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(report::format_double(-std::numeric_limits<double>::infinity()) == "-inf");
    CHECK(report::format_double(std::nan("")) == "nan");
  }

  TEST_CASE("csv") {
    std::ostringstream empty;
    report::write_csv(empty, {});
    CHECK(empty.str() == std::string(report::kCsvHeader) + "\n");

    report::Row r;
    r.scenario = "s";
    r.job = "premium";
    r.quantity = "cond14 | theta=0.5";
    r.estimate = 2.5;
    r.verdict = "pass";
    r.seed = 3;
    r.detail = "a \"quoted\", detail";
    std::ostringstream out;
    report::write_csv(out, {r});
    CHECK(out.str() == std::string(report::kCsvHeader) +
                           "\ns,premium,cond14 | theta=0.5,2.5,,,,pass,3,\"a \"\"quoted\"\", detail\"\n");
  }

  TEST_CASE("json lines round trip exactly") {
    report::Row r;
    r.scenario = "s";
    r.job = "simulate";
    r.quantity = "E_P[S_T]";
    r.estimate = 5.0123456789012345;
    r.std_error = 1.0 / 3.0;
    r.oracle = std::numeric_limits<double>::infinity();
    r.seed = 20190521;
    std::ostringstream out;
    report::write_json_lines(out, {r, r});
    std::istringstream in(out.str());
    std::string line;
    int count = 0;
    while (std::getline(in, line)) {
      const auto j = nlohmann::json::parse(line);
      CHECK(j["estimate"].get<double>() == *r.estimate);
      CHECK(j["stderr"].get<double>() == *r.std_error);
      CHECK(j["oracle"].get<std::string>() == "inf");
      CHECK(j["paper_value"].is_null());
      CHECK(j["seed"].get<std::uint64_t>() == r.seed);
      ++count;
    }
    CHECK(count == 2);
  }

  TEST_CASE("random doubles survive printing") {
    std::mt19937_64 gen(17);
    std::vector<report::Row> rows;
    for (int i = 0; i < 2000; ++i) {
      double v;
      do {
        const std::uint64_t bits = gen();
        std::memcpy(&v, &bits, sizeof v);
      } while (!std::isfinite(v));
      report::Row r;
      r.estimate = v;
      r.oracle = std::ldexp(static_cast<double>(gen() >> 11), -53);
      rows.push_back(r);
    }
    std::ostringstream out;
    report::write_json_lines(out, rows);
    std::istringstream in(out.str());
    std::string line;
    for (const auto& r : rows) {
      REQUIRE(std::getline(in, line));
      const auto j = nlohmann::json::parse(line);
      CHECK(j["estimate"].get<double>() == *r.estimate);
      CHECK(j["oracle"].get<double>() == *r.oracle);
    }
  }
}
