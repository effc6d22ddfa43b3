#pragma once

#include "cmpp/expr.hpp"
#include "cmpp/model.hpp"

namespace cmpp::premium {

enum class Method { ClosedForm, Quadrature };

// Strict increase of the premium density: lower < upper < inf.
struct ConditionVerdict {
  bool holds = false;
  double lower = 0.0;
  double upper = 0.0;
  double margin = 0.0;  // upper - lower
};

struct PremiumQuote {
  double p_base = 0.0;     // E_P[h(Theta)] E_P[X]
  double p_derived = 0.0;  // E_Q[g(Theta)] E_Q[X]; +inf when it diverges
  // E_P[xi(Theta) g(Theta)] * E_P[X exp(gamma(X))], recomputed over the base laws.
  double p_derived_check = 0.0;
  expr::RealFn per_theta_base;     // theta -> h(theta) E_P[X]
  expr::RealFn per_theta_derived;  // theta -> g(theta) E_Q[X]
  ConditionVerdict cond13;
  Method method = Method::Quadrature;
};

// With no derived model the quote describes P alone (p_derived = p_base).
PremiumQuote premium_density(const model::BaseModel& base, const model::DerivedModel* derived);

// (T - t) p(Q); throws BadInterval unless 0 <= t <= T.
double premium_schedule(const PremiumQuote& quote, double t, double T);

// E_P[S_t] < E_Q[S_t] < inf. Both sides are linear in t, so t = 1 decides.
ConditionVerdict check_condition_13(const PremiumQuote& quote);

// p(P_theta) < p(Q_theta) < inf.
ConditionVerdict check_condition_14(double theta, const model::DerivedModel& derived);
ConditionVerdict check_condition_14(double theta, const model::BaseModel& base, const model::MeasureChange& change);

// gamma(x) = c x - k with k = ln E_P[exp(c X)] bound as a parameter; alpha = 0.
// Throws OutsideConvergenceStrip.
model::MeasureChange esscher_change(double c, const model::BaseModel& base,
                                    const expr::RealFn& xi = expr::RealFn::constant(1.0));

// alpha = c, gamma = 0.
model::MeasureChange expected_value_change(double c, const expr::RealFn& xi = expr::RealFn::constant(1.0));

// (c+3)/(c+2) + (c+2) ln((c+1)/(c+2)), the integral over (0,1) of
// theta (c+theta) / (c+1+theta)^2. Throws AssumptionViolated unless
// c > 0 and c + 3 > (c+2)^2 ln((c+2)/(c+1)).
double j_integral(double c);

}  // namespace cmpp::premium
