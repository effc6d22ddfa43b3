#include <doctest.h>

#include <cmath>
#include <utility>
#include <vector>

#include "cmpp/errors.hpp"
#include "cmpp/premium.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace fixture;
namespace premium = cmpp::premium;

TEST_SUITE("premium") {
  TEST_CASE("squaring change") {
    const auto base = gamma_mixed_base();
    const auto d = derive(base, squaring_change());
    const auto q = premium::premium_density(base, &d);
    const double second = oracle::simpson([](double t) { return t * t * oracle::gamma_pdf(t, 3, 4); }, 0.0, 60.0);
    CHECK(q.p_base == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(q.p_derived == doctest::Approx(10.0 * second).epsilon(1e-9));
    CHECK(q.p_derived_check == doctest::Approx(q.p_derived).epsilon(1e-8));
    CHECK(q.method == premium::Method::ClosedForm);
    for (double th : {0.3, 1.0, 2.5}) {
      CHECK(q.per_theta_derived(th) == doctest::Approx(10.0 * th * th).epsilon(1e-12));
      CHECK(q.per_theta_base(th) == doctest::Approx(5.0 * th).epsilon(1e-12));
    }
    CHECK(q.per_theta_derived.print() == "10*theta^2");
    CHECK(q.cond13.holds);
  }

  TEST_CASE("per-theta loading flips at one half") {
    const auto base = gamma_mixed_base();
    const auto d = derive(base, squaring_change());
    CHECK(premium::check_condition_14(0.6, d).holds);
    CHECK_FALSE(premium::check_condition_14(0.4, d).holds);
    CHECK(premium::check_condition_14(0.5 + 1e-6, d).holds);
    CHECK_FALSE(premium::check_condition_14(0.5 - 1e-6, d).holds);
    CHECK_FALSE(premium::check_condition_14(0.5, d).holds);
    CHECK(premium::check_condition_14(0.6, base, squaring_change()).holds ==
          premium::check_condition_14(0.6, d).holds);
  }

  TEST_CASE("identity change adds no loading") {
    const auto base = gamma_mixed_base();
    const auto d = derive(base, MeasureChange::identity());
    const auto q = premium::premium_density(base, &d);
    CHECK(q.p_derived == doctest::Approx(q.p_base).epsilon(1e-12));
    CHECK_FALSE(q.cond13.holds);
    const auto plain = premium::premium_density(base, nullptr);
    CHECK(plain.p_derived == plain.p_base);
  }

  TEST_CASE("uniformising change") {
    for (double c : {0.5, 1.0, 2.0, 5.0}) {
      CAPTURE(c);
      CHECK(premium::j_integral(c) == doctest::Approx(oracle::j_numeric(c)).epsilon(1e-8));
      CHECK(premium::j_integral(c) == doctest::Approx(oracle::j_closed(c)).epsilon(1e-14));
      const auto base = beta_mixed_base(c);
      const auto d = derive(base, uniformising_change(c));
      const auto q = premium::premium_density(base, &d);
      CHECK(q.p_derived == doctest::Approx(2.0 * (c + 1.0) * (c + 1.0) * oracle::j_numeric(c)).epsilon(1e-8));
      CHECK(q.p_derived_check == doctest::Approx(q.p_derived).epsilon(1e-8));
    }
    CHECK_THROWS_AS(premium::j_integral(0.0), cmpp::AssumptionViolated);
    CHECK_THROWS_AS(premium::j_integral(-1.0), cmpp::AssumptionViolated);
  }

  TEST_CASE("uniformising change at c = 1") {
    const auto base = beta_mixed_base(1.0);
    const auto d = derive(base, uniformising_change(1.0));
    const auto q = premium::premium_density(base, &d);
    CHECK(q.cond13.holds);
    CHECK(premium::premium_schedule(q, 0.0, 1.0) == doctest::Approx(8.0 * oracle::j_numeric(1.0)).epsilon(1e-8));
    CHECK(premium::premium_schedule(q, 1.0, 1.0) == 0.0);
    CHECK_THROWS_AS(premium::premium_schedule(q, 2.0, 1.0), cmpp::BadInterval);
    CHECK_THROWS_AS(premium::premium_schedule(q, -0.1, 1.0), cmpp::BadInterval);
    // Per theta the loading holds everywhere on (0, 1): theta^2 - 4 theta - 4 < 0 there.
    for (int i = 1; i <= 100; ++i) {
      const double th = (i - 0.5) / 100.0;
      const double lhs = th * 1.0;  // E_P[X] = 2/(c+1) = 1
      const double r = 2.0 / (2.0 + th);
      const double rhs = th * (1.0 + th) * r * r * 2.0;
      const auto v = premium::check_condition_14(th, d);
      CHECK(v.holds == (lhs < rhs));
      CHECK(v.holds == (th * th - 4.0 * th - 4.0 < 0.0));
    }
  }

  TEST_CASE("Esscher change") {
    const auto base = gamma_mixed_base();
    const double mean = 5.0;
    double previous = 0.0;
    for (double c : {0.01, 0.05, 0.1, 0.15}) {
      CAPTURE(c);
      const auto change = premium::esscher_change(c, base);
      const auto r = cmpp::model::validate_change(base, change, 2);
      CHECK(std::abs(r.gamma_norm - 1.0) <= 1e-10);
      const auto d = cmpp::model::derive_q_model(base, change, r);
      CHECK(d.g(1.7) == doctest::Approx(1.7).epsilon(1e-15));
      const auto q = premium::premium_density(base, &d);
      CHECK(q.p_derived > previous);
      previous = q.p_derived;
      // Exponential claims with rate 0.2: E[e^{cX}] = 0.2/(0.2-c), E[X e^{cX}] = 0.2/(0.2-c)^2.
      const bool expected = mean * 0.2 / (0.2 - c) < 0.2 / ((0.2 - c) * (0.2 - c));
      CHECK(premium::check_condition_14(1.0, d).holds == expected);
      CHECK(q.p_derived == doctest::Approx(1.0 / (0.2 - c)).epsilon(1e-10));
    }
    CHECK_THROWS_AS(premium::esscher_change(0.2, base), cmpp::OutsideConvergenceStrip);
  }

  TEST_CASE("expected-value change") {
    const auto base = gamma_mixed_base();
    for (double c : {-0.3, 0.0, std::log(2.0), 1.0}) {
      CAPTURE(c);
      const auto d = derive(base, premium::expected_value_change(c));
      const auto q = premium::premium_density(base, &d);
      CHECK(q.p_derived / q.p_base == doctest::Approx(std::exp(c)).epsilon(1e-12));
      for (double th : {0.2, 1.0, 3.0}) CHECK(premium::check_condition_14(th, d).holds == (c > 0.0));
    }
  }

  TEST_CASE("per-theta premiums integrate to the total") {
    const auto base62 = gamma_mixed_base();
    const auto base63 = beta_mixed_base(1.0);
    const std::vector<std::pair<const BaseModel*, MeasureChange>> cases = {
        {&base62, squaring_change()},
        {&base62, premium::esscher_change(0.05, base62)},
        {&base62, premium::expected_value_change(std::log(2.0))},
        {&base63, uniformising_change(1.0)},
    };
    for (const auto& [base, change] : cases) {
      const auto d = derive(*base, change);
      const auto q = premium::premium_density(*base, &d);
      const double total = cmpp::dist::expect(d.q_mixing, [&](double th) { return q.per_theta_derived(th); });
      CHECK(total == doctest::Approx(q.p_derived).epsilon(1e-8));
      const double base_total = cmpp::dist::expect(base->mixing_law(), [&](double th) { return q.per_theta_base(th); });
      CHECK(base_total == doctest::Approx(q.p_base).epsilon(1e-8));
    }
  }

  TEST_CASE("Esscher loading grows with c for each theta") {
    const auto base = gamma_mixed_base();
    for (double th : {0.3, 1.0, 2.0}) {
      double previous = 0.0;
      for (double c = 0.0; c < 0.19; c += 0.02) {
        const auto d = derive(base, premium::esscher_change(c, base));
        const double v = premium::premium_density(base, &d).per_theta_derived(th);
        CHECK(v >= previous);
        previous = v;
      }
    }
  }
}
