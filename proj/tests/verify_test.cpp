#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "cmpp/premium.hpp"
#include "cmpp/sim.hpp"
#include "cmpp/stats.hpp"
#include "cmpp/verify.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace fixture;
namespace sim = cmpp::sim;
namespace verify = cmpp::verify;
using verify::Verdict;

namespace {

double count_at_1(const sim::Path& p, double t) { return static_cast<double>(sim::count_at(p, t)); }

}  // namespace

TEST_SUITE("verify") {
  TEST_CASE("constant functional") {
    const auto base = gamma_mixed_base();
    const auto r = verify::mc_estimate([](const sim::Path&, double) { return 1.0; }, base, nullptr, sim::BaseP{}, 1.0,
                                       1000, 1, 1.0);
    CHECK(r.estimate == 1.0);
    CHECK(r.std_error == 0.0);
    CHECK(r.verdict == Verdict::Pass);
    CHECK_THROWS_AS(verify::mc_estimate(count_at_1, base, nullptr, sim::BaseP{}, 1.0, 99, 1), std::invalid_argument);
  }

  TEST_CASE("base measure moments") {
    const auto base = gamma_mixed_base();
    const auto n1 = verify::mc_estimate(count_at_1, base, nullptr, sim::BaseP{}, 1.0, 100000, 20190521, 1.0);
    CHECK(n1.verdict == Verdict::Pass);
    CHECK(n1.ci_low <= n1.estimate);
    CHECK(n1.estimate <= n1.ci_high);
    const auto s1 = verify::mc_estimate([](const sim::Path& p, double t) { return sim::aggregate_at(p, t); }, base,
                                        nullptr, sim::BaseP{}, 1.0, 100000, 20190521, 5.0);
    CHECK(s1.verdict == Verdict::Pass);
  }

  TEST_CASE("report verdicts") {
    CHECK(verify::make_report(1.0, 0.1, 100, 1.29).verdict == Verdict::Pass);
    CHECK(verify::make_report(1.0, 0.1, 100, 1.31).verdict == Verdict::Fail);
    CHECK(verify::make_report(1.0, 0.0, 100, 1.0).verdict == Verdict::Pass);
    CHECK(verify::make_report(1.0, 0.0, 100, 1.001).verdict == Verdict::Fail);
    CHECK(verify::make_report(1.0, 0.1, 100).verdict == Verdict::Inconclusive);
  }

  TEST_CASE("mixed count pmf") {
    // Gamma(2, 2) mixing: P(N_1 = n) = 4 (n + 1) / 3^(n + 2).
    const auto pmf = verify::mixed_count_pmf(gamma_mixed_base(), 1.0, 30);
    double total = 0.0;
    for (std::size_t n = 0; n < pmf.size(); ++n) {
      CHECK(pmf[n] == doctest::Approx(4.0 * (n + 1.0) / std::pow(3.0, n + 2.0)).epsilon(1e-10));
      total += pmf[n];
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
  }

  TEST_CASE("indicator of no claims reweights correctly") {
    const auto base = gamma_mixed_base();
    const auto d = derive(base, squaring_change());
    const double oracle_value =
        oracle::simpson([](double th) { return std::exp(-th * th) * oracle::gamma_pdf(th, 3, 4); }, 0.0, 40.0);
    const auto res = verify::check_reweighting({[](const sim::Path& p, double t) { return sim::count_at(p, t) == 0 ? 1.0 : 0.0; }},
                                               d, std::nullopt, 1.0, 100000, 20190521);
    REQUIRE(res.size() == 1);
    CHECK(res[0].verdict == Verdict::Pass);
    CHECK(std::abs(res[0].direct.estimate - oracle_value) <= 3.0 * res[0].direct.std_error);
    CHECK(std::abs(res[0].weighted.estimate - oracle_value) <= 3.0 * res[0].weighted.std_error);
  }

  TEST_CASE("reweighting works in both directions") {
    const auto base = gamma_mixed_base();
    const auto d = derive(base, cmpp::premium::esscher_change(0.05, base));
    const std::vector<verify::PathFunctional> fs = {
        [](const sim::Path&, double) { return 1.0; }, count_at_1,
        [](const sim::Path& p, double t) { return sim::aggregate_at(p, t); }};
    for (auto dir : {verify::Direction::PToQ, verify::Direction::QToP}) {
      const auto res = verify::check_reweighting(fs, d, std::nullopt, 1.0, 50000, 3, dir);
      REQUIRE(res.size() == 3);
      for (const auto& r : res) CHECK(r.verdict == Verdict::Pass);
      CHECK(res[0].direct.estimate == 1.0);
    }
    for (double th : {0.5, 2.0}) {
      const auto res = verify::check_reweighting(fs, d, th, 1.0, 50000, 4);
      for (const auto& r : res) CHECK(r.verdict == Verdict::Pass);
    }
  }

  TEST_CASE("weight second moments") {
    const auto base = gamma_mixed_base();
    const auto d = derive(base, squaring_change());
    // Given theta, E[M~^2] = exp(t (2 theta^3 - 2 theta^2 + theta)) for this change.
    for (double th : {0.5, 1.0, 2.0})
      CHECK(verify::weight_second_moment(d, th, 1.0) ==
            doctest::Approx(std::exp(2.0 * th * th * th - 2.0 * th * th + th)).epsilon(1e-8));
    CHECK(std::isinf(verify::weight_second_moment(d, std::nullopt, 1.0)));
    const auto did = derive(base, MeasureChange::identity());
    CHECK(verify::weight_second_moment(did, std::nullopt, 1.0) == doctest::Approx(1.0));
  }

  TEST_CASE("constant process is a martingale") {
    const auto base = gamma_mixed_base();
    const auto table = verify::check_martingale(verify::ConstantProcess{7.0}, base, nullptr, sim::BaseP{},
                                                {{0.5, 1.0}, {1.0, 2.0}}, {}, 1000, 2);
    CHECK(table.verdict == Verdict::Pass);
    for (const auto& c : table.cells) {
      CHECK(c.estimate == 0.0);
      CHECK(c.std_error == 0.0);
    }
  }

  TEST_CASE("base surplus is a martingale under the base measure") {
    const auto base = gamma_mixed_base();
    const auto table = verify::check_martingale(verify::YBaseProcess{}, base, nullptr, sim::BaseP{},
                                                {{0.5, 1.0}, {1.0, 2.0}}, {}, 50000, 8);
    CHECK(table.verdict == Verdict::Pass);
    CHECK(table.z_critical == doctest::Approx(cmpp::stats::bonferroni_z(0.01, table.cells.size())));
  }

  TEST_CASE("log density drift is never positive under P") {
    const auto base62 = gamma_mixed_base();
    const auto base63 = beta_mixed_base(1.0);
    const std::vector<DerivedModel> models = {
        derive(base62, squaring_change()),
        derive(base62, cmpp::premium::esscher_change(0.05, base62)),
        derive(base62, cmpp::premium::expected_value_change(std::log(2.0))),
        derive(base62, cmpp::premium::expected_value_change(-0.5)),
        derive(base63, uniformising_change(1.0)),
    };
    for (const auto& d : models) {
      for (double th : {0.1, 0.5, 0.9}) {
        CHECK(verify::log_density_drift(d, th, false) <= 1e-14);
        CHECK(verify::log_density_drift(d, th, true) >= -1e-14);
      }
    }
    const double c = std::log(2.0);
    CHECK(verify::log_density_drift(models[2], 1.0, false) == doctest::Approx(c - 1.0).epsilon(1e-14));
    CHECK(verify::log_density_drift(models[2], 1.0, true) == doctest::Approx(2.0 * c - 1.0).epsilon(1e-14));
  }

  TEST_CASE("identity change never drifts") {
    const auto base = gamma_mixed_base();
    const auto d = derive(base, MeasureChange::identity());
    for (const auto& row : verify::singularity_probe(d, 1.0, {10.0, 50.0}, 1000, 1)) {
      CHECK(row.drift == 0.0);
      CHECK(row.q05 == 0.0);
      CHECK(row.q95 == 0.0);
      CHECK(row.fraction_below == 0.0);
    }
  }

  TEST_CASE("degeneracy centering removes the mean") {
    const auto base = gamma_mixed_base();
    const auto d = derive(base, squaring_change());
    const auto rep = verify::degeneracy_test(d, 20000, 5);
    CHECK_FALSE(rep.predicted_degenerate);
    bool saw_whole = false;
    for (const auto& c : rep.cells) {
      if (std::holds_alternative<verify::WholeSpace>(c.event)) {
        saw_whole = true;
        CHECK(c.oracle == 0.0);
        CHECK(std::abs(c.z) < 4.0);
      }
    }
    CHECK(saw_whole);
  }

  TEST_CASE("events") {
    const sim::Path p{1.2, {0.3, 0.9}, {2.0, 7.0}, 2.0};
    CHECK(verify::occurs(verify::CountAtMost{0.5, 1}, p));
    CHECK_FALSE(verify::occurs(verify::CountAtMost{1.0, 1}, p));
    CHECK(verify::occurs(verify::AggregateAtMost{1.0, 9.0}, p));
    CHECK_FALSE(verify::occurs(verify::AggregateAtMost{1.0, 8.9}, p));
    CHECK(verify::occurs(verify::ThetaIn{1.0, 1.2}, p));
    CHECK_FALSE(verify::occurs(verify::ThetaIn{1.2, 3.0}, p));
    CHECK(verify::occurs(verify::WholeSpace{}, p));
  }
}
