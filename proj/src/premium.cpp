#include "cmpp/premium.hpp"

#include <cmath>
#include <limits>

#include "cmpp/errors.hpp"

namespace cmpp::premium {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

expr::RealFn scaled(double factor, const expr::RealFn& f) {
  if (factor == 1.0) return f;
  const auto& root = f.root();
  if (root->kind == expr::Node::Kind::Mul && root->lhs->kind == expr::Node::Kind::Number)
    return expr::RealFn(expr::binary(expr::Node::Kind::Mul, expr::number(factor * root->lhs->value), root->rhs),
                        f.params());
  return expr::RealFn(expr::binary(expr::Node::Kind::Mul, expr::number(factor), f.root()), f.params());
}

double q_claim_mean(const model::DerivedModel& d) {
  return d.claim_in_catalog ? dist::mean(d.q_claim) : d.tilted_claim_mean;
}

ConditionVerdict strict_increase(double lower, double upper) {
  ConditionVerdict v;
  v.lower = lower;
  v.upper = upper;
  v.margin = upper - lower;
  v.holds = lower < upper && std::isfinite(upper);
  return v;
}

}  // namespace

PremiumQuote premium_density(const model::BaseModel& base, const model::DerivedModel* derived) {
  PremiumQuote q;
  const dist::Distribution& mixing = base.mixing_law();
  q.p_base = dist::expect(mixing, [&](double th) { return base.rate(th); }) * base.claim_mean();
  q.per_theta_base = scaled(base.claim_mean(), base.rate_fn());

  if (!derived) {
    q.p_derived = q.p_derived_check = q.p_base;
    q.per_theta_derived = q.per_theta_base;
    q.method = Method::Quadrature;
    q.cond13 = strict_increase(q.p_base, q.p_derived);
    return q;
  }

  const double claim_mean = q_claim_mean(*derived);
  q.method = derived->claim_in_catalog && derived->mixing_in_catalog ? Method::ClosedForm : Method::Quadrature;
  q.per_theta_derived = scaled(claim_mean, derived->g);
  try {
    q.p_derived = dist::expect(derived->q_mixing, [&](double th) { return derived->g(th); }) * claim_mean;
  } catch (const DivergentIntegral&) {
    q.p_derived = kInf;
  }
  try {
    const auto& xi = derived->change->xi();
    q.p_derived_check =
        dist::expect(mixing, [&](double th) { return xi(th) * derived->g(th); }) * derived->tilted_claim_mean;
  } catch (const DivergentIntegral&) {
    q.p_derived_check = kInf;
  }
  q.cond13 = check_condition_13(q);
  return q;
}

double premium_schedule(const PremiumQuote& quote, double t, double T) {
  if (!(t >= 0.0 && t <= T)) throw BadInterval("premium schedule needs 0 <= t <= T");
  return (T - t) * quote.p_derived;
}

ConditionVerdict check_condition_13(const PremiumQuote& quote) { return strict_increase(quote.p_base, quote.p_derived); }

ConditionVerdict check_condition_14(double theta, const model::DerivedModel& derived) {
  const double lower = derived.base->rate(theta) * derived.base->claim_mean();
  const double upper = derived.g(theta) * q_claim_mean(derived);
  return strict_increase(lower, upper);
}

ConditionVerdict check_condition_14(double theta, const model::BaseModel& base, const model::MeasureChange& change) {
  const double lower = base.rate(theta) * base.claim_mean();
  double upper = kInf;
  try {
    upper = model::derive_g(change, base.rate_fn())(theta) * model::tilted_claim_mean(base, change);
  } catch (const DivergentIntegral&) {
  }
  return strict_increase(lower, upper);
}

model::MeasureChange esscher_change(double c, const model::BaseModel& base, const expr::RealFn& xi) {
  const double k = std::log(dist::mgf(base.claim_law(), c));
  auto gamma = expr::RealFn::parse("c*x - k", {{"c", c}, {"k", k}});
  return model::MeasureChange(expr::RealFn::constant(0.0), std::move(gamma), xi);
}

model::MeasureChange expected_value_change(double c, const expr::RealFn& xi) {
  return model::MeasureChange(expr::RealFn::constant(c), expr::RealFn::constant(0.0), xi);
}

double j_integral(double c) {
  if (!(c > 0.0)) throw AssumptionViolated("J(c) needs c > 0");
  const double lhs = c + 3.0;
  const double rhs = (c + 2.0) * (c + 2.0) * std::log((c + 2.0) / (c + 1.0));
  if (!(lhs > rhs)) throw AssumptionViolated("J(c) needs c + 3 > (c+2)^2 ln((c+2)/(c+1))");
  return (c + 3.0) / (c + 2.0) + (c + 2.0) * std::log((c + 1.0) / (c + 2.0));
}

}  // namespace cmpp::premium
