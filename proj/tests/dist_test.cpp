#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "cmpp/dist.hpp"
#include "cmpp/errors.hpp"
#include "cmpp/rng.hpp"
#include "cmpp/stats.hpp"
#include "oracles.hpp"

using cmpp::dist::Distribution;
namespace dist = cmpp::dist;

TEST_SUITE("dist") {
  TEST_CASE("moments") {
    const auto claim = Distribution::exponential(0.2);
    CHECK(dist::moment(claim, 1) == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(dist::moment(claim, 2) == doctest::Approx(50.0).epsilon(1e-12));
    CHECK(dist::moment(claim, 3) == doctest::Approx(750.0).epsilon(1e-12));
    CHECK(dist::moment(Distribution::degenerate(1.7), 3) == doctest::Approx(1.7 * 1.7 * 1.7));
    CHECK(dist::moment(Distribution::beta(2, 1), 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(dist::moment(Distribution::gamma(2, 2), 1) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(dist::variance(Distribution::gamma(3, 4)) == doctest::Approx(4.0 / 9.0).epsilon(1e-14));
    CHECK(dist::mean(Distribution::poisson(2.5)) == 2.5);
  }

  TEST_CASE("moment generating functions") {
    for (double c : {0.5, 1.0, 2.0}) {
      const auto claim = Distribution::gamma(c + 1.0, 2.0);
      CHECK(dist::mgf(claim, c) == doctest::Approx((c + 1.0) * (c + 1.0)).epsilon(1e-12));
      for (double th = 0.05; th < 1.0; th += 0.1) {
        const double r = (c + 1.0) / (c + 1.0 + th);
        CHECK(dist::mgf(claim, -th) == doctest::Approx(r * r).epsilon(1e-12));
      }
    }
    CHECK(dist::mgf(Distribution::beta(2, 1), 0.0) == 1.0);
    CHECK(dist::mgf(Distribution::exponential(1.0), 0.5) == doctest::Approx(2.0).epsilon(1e-12));
    const double numeric = oracle::simpson([](double x) { return std::exp(0.5 * x) * std::exp(-x); }, 0.0, 80.0);
    CHECK(dist::mgf(Distribution::exponential(1.0), 0.5) == doctest::Approx(numeric).epsilon(1e-9));
    CHECK_THROWS_AS(dist::mgf(Distribution::exponential(0.2), 0.2), cmpp::OutsideConvergenceStrip);
    CHECK_THROWS_AS(dist::mgf(Distribution::gamma(1.0, 2.0), 3.0), cmpp::OutsideConvergenceStrip);
  }

  TEST_CASE("densities, cdfs and quantiles") {
    CHECK(dist::density(Distribution::gamma(2, 2), 1.0) == doctest::Approx(4.0 * std::exp(-2.0)).epsilon(1e-14));
    CHECK(dist::density(Distribution::uniform(0, 1), 0.3) == 1.0);
    CHECK(dist::density(Distribution::exponential(0.2), -1.0) == 0.0);
    CHECK(dist::density(Distribution::poisson(2.0), 3.0) == doctest::Approx(oracle::poisson_pmf(3, 2.0)));
    CHECK(dist::cdf(Distribution::uniform(0, 1), 0.3) == doctest::Approx(0.3));
    CHECK(dist::cdf(Distribution::exponential(0.2), 5.0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-14));
    CHECK(dist::quantile(Distribution::degenerate(2.0), 0.5) == 2.0);
    for (double p : {0.01, 0.3, 0.5, 0.9, 0.999}) {
      for (const auto& d : {Distribution::gamma(3, 4), Distribution::beta(2, 1), Distribution::exponential(0.2)})
        CHECK(dist::cdf(d, dist::quantile(d, p)) == doctest::Approx(p).epsilon(1e-10));
    }
    CHECK_THROWS_AS(dist::quantile(Distribution::gamma(2, 2), 1.0), std::invalid_argument);
  }

  TEST_CASE("factories reject bad parameters") {
    CHECK_THROWS_AS(Distribution::exponential(0.0), std::invalid_argument);
    CHECK_THROWS_AS(Distribution::gamma(-1.0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(Distribution::uniform(1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(Distribution::beta(0.0, 1.0), std::invalid_argument);
  }

  TEST_CASE("literals") {
    const auto d = dist::parse_literal("gamma(rate=c+1, shape=2)", {{"c", 1.0}});
    REQUIRE(d.get_if<dist::Gamma>());
    CHECK(d.get_if<dist::Gamma>()->rate == 2.0);
    CHECK(d.get_if<dist::Gamma>()->shape == 2.0);
    CHECK(dist::parse_literal("exp(rate=0.2)").get_if<dist::Exponential>()->rate == 0.2);
    CHECK(dist::parse_literal("beta(2, 1)").get_if<dist::Beta>()->a == 2.0);
    for (const auto& lit : {"gamma(rate=3, shape=4)", "uniform(0, 1)", "degenerate(1)", "exp(rate=0.2)", "beta(2, 1)"}) {
      const auto once = dist::parse_literal(lit);
      CHECK(dist::parse_literal(once.literal()).literal() == once.literal());
    }
    CHECK_THROWS(dist::parse_literal("gamma(rate=1)"));
    CHECK_THROWS(dist::parse_literal("cauchy(0, 1)"));
  }

  TEST_CASE("sampling") {
    SUBCASE("degenerate") {
      cmpp::RngStream rng(7);
      for (int i = 0; i < 100; ++i) CHECK(dist::sample(Distribution::degenerate(1.25), rng) == 1.25);
    }
    SUBCASE("gamma matches its cdf") {
      cmpp::RngStream rng(20190521, 5);
      std::vector<double> xs(100000);
      for (auto& x : xs) x = dist::sample(Distribution::gamma(2, 2), rng);
      // Gamma(rate 2, shape 2): 1 - e^{-2x}(1 + 2x).
      const double d = cmpp::stats::ks_statistic(xs, [](double x) { return 1.0 - std::exp(-2.0 * x) * (1.0 + 2.0 * x); });
      CHECK(d < cmpp::stats::ks_critical(xs.size(), 0.001));
    }
    SUBCASE("exponential mean") {
      cmpp::RngStream rng(20190521, 6);
      std::vector<double> xs(1000000);
      for (auto& x : xs) x = dist::sample(Distribution::exponential(0.2), rng);
      const auto s = cmpp::stats::summarize(xs);
      CHECK(std::abs(s.mean - 5.0) <= 3.0 * s.std_error);
    }
  }

  TEST_CASE("generic tilt") {
    const auto base = Distribution::exponential(0.2);
    const auto t = dist::tilt(base, cmpp::expr::RealFn::parse("ln(x/5)"));
    REQUIRE(t.tilted());
    CHECK(t.tilted()->normalizer == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(dist::mean(t) == doctest::Approx(10.0).epsilon(1e-9));
    // The tilt equals Gamma(rate 0.2, shape 2).
    for (double x : {0.5, 3.0, 10.0, 40.0})
      CHECK(dist::density(t, x) == doctest::Approx(oracle::gamma_pdf(x, 0.2, 2.0)).epsilon(1e-10));
    for (double p : {0.05, 0.5, 0.95})
      CHECK(dist::cdf(t, dist::quantile(t, p)) == doctest::Approx(p).epsilon(1e-8));
    cmpp::RngStream rng(3);
    std::vector<double> xs(20000);
    for (auto& x : xs) x = dist::sample(t, rng);
    CHECK(cmpp::stats::ks_statistic(xs, [](double x) { return 1.0 - std::exp(-0.2 * x) * (1.0 + 0.2 * x); }) <
          cmpp::stats::ks_critical(xs.size(), 0.001));

    CHECK_THROWS_AS(dist::tilt(base, cmpp::expr::RealFn::parse("ln(x)")), std::invalid_argument);
    CHECK_THROWS_AS(dist::tilt(base, cmpp::expr::RealFn::parse("x")), cmpp::DivergentIntegral);
  }

  TEST_CASE("expectations") {
    const auto mix = Distribution::gamma(3, 4);
    const double second = oracle::simpson([](double t) { return t * t * oracle::gamma_pdf(t, 3, 4); }, 0.0, 60.0);
    CHECK(dist::expect(mix, [](double t) { return t * t; }) == doctest::Approx(second).epsilon(1e-9));
    CHECK(dist::expect(mix, [](double t) { return t * t; }) == doctest::Approx(20.0 / 9.0).epsilon(1e-10));
    CHECK(dist::expect(Distribution::poisson(2.0), [](double k) { return k * k; }) == doctest::Approx(6.0).epsilon(1e-12));
    const double below = dist::expect(mix, [](double) { return 1.0; }, {{}, -dist::kInf, 1.0});
    CHECK(below == doctest::Approx(dist::cdf(mix, 1.0)).epsilon(1e-10));
    CHECK_THROWS_AS(dist::expect(Distribution::exponential(0.2), [](double x) { return std::exp(x); }),
                    cmpp::DivergentIntegral);
  }
}
