#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cmpp/dist.hpp"
#include "cmpp/expr.hpp"

namespace cmpp::model {

// Claim law P_X, mixing law P_Theta and intensity function h (identity by
// default). Conditionally on Theta = theta, claims arrive as a Poisson process
// with rate h(theta).
class BaseModel {
 public:
  BaseModel(dist::Distribution claim_law, dist::Distribution mixing_law,
            expr::RealFn rate_fn = expr::RealFn::identity("theta"));

  const dist::Distribution& claim_law() const noexcept { return claim_law_; }
  const dist::Distribution& mixing_law() const noexcept { return mixing_law_; }
  const expr::RealFn& rate_fn() const noexcept { return rate_fn_; }
  bool rate_is_identity() const;

  double rate(double theta) const { return rate_fn_(theta); }
  double claim_mean() const noexcept { return claim_mean_; }

 private:
  dist::Distribution claim_law_;
  dist::Distribution mixing_law_;
  expr::RealFn rate_fn_;
  double claim_mean_;
};

// beta(x, theta) = alpha(theta) + gamma(x) together with the mixing density xi.
class MeasureChange {
 public:
  MeasureChange(expr::RealFn alpha, expr::RealFn gamma, expr::RealFn xi);
  static MeasureChange identity();

  const expr::RealFn& alpha() const noexcept { return alpha_; }
  const expr::RealFn& gamma() const noexcept { return gamma_; }
  const expr::RealFn& xi() const noexcept { return xi_; }

  // Printed expressions and bindings; ties a validation report to its change.
  std::string fingerprint() const;

 private:
  expr::RealFn alpha_;
  expr::RealFn gamma_;
  expr::RealFn xi_;
};

struct AdmissibilityReport {
  double gamma_norm = 0.0;  // E_P[exp(gamma(X))]
  double xi_norm = 0.0;     // E_P[xi(Theta)]
  bool xi_positive = false;
  int level_requested = 1;
  int level_achieved = 0;  // 0 when neither level holds
  // E_P[X^l exp(gamma(X))] and E_P[xi(Theta) g(Theta)^l] for l = 1, 2;
  // +inf when the integral diverges.
  double claim_gate[2] = {0.0, 0.0};
  double mixing_gate[2] = {0.0, 0.0};
  bool pass = false;
  std::vector<std::string> failures;
  std::string fingerprint;
};

// Normalisation tolerance for gamma_norm and xi_norm.
inline constexpr double kNormTolerance = 1e-8;

AdmissibilityReport validate_change(const BaseModel& base, const MeasureChange& change, int level);

// g(theta) = h(theta) exp(alpha(theta)); with h the identity this is
// theta * exp(alpha(theta)). Simplified to a monomial form when alpha is of
// the shape a*ln(theta) + b*theta + c.
expr::RealFn derive_g(const MeasureChange& change,
                      const expr::RealFn& rate_fn = expr::RealFn::identity("theta"));

struct DerivedModel {
  expr::RealFn g;
  dist::Distribution q_claim;
  dist::Distribution q_mixing;
  std::shared_ptr<const BaseModel> base;
  std::shared_ptr<const MeasureChange> change;
  int level = 1;
  bool claim_in_catalog = false;
  bool mixing_in_catalog = false;
  double tilted_claim_mean = 0.0;  // E_P[X exp(gamma(X))], i.e. E_Q[X]
};

// Throws NotValidated unless `report` is a passing report for this change.
DerivedModel derive_q_model(const BaseModel& base, const MeasureChange& change,
                            const AdmissibilityReport& report);

// Closure rules: the tilt of `base` by exp(a ln v + b v + c) when it stays in
// the catalog. Gamma/Exponential absorb both coefficients, Beta absorbs the
// log coefficient, Uniform and Degenerate only the constant. Does not check
// normalisation.
std::optional<dist::Distribution> closed_form_tilt(const dist::Distribution& base,
                                                   const expr::AffineLogForm& form);

// ln(xi) as an expression, for tilting the mixing law.
expr::RealFn log_of(const expr::RealFn& f);

// E_P[X exp(gamma(X))] by quadrature over the base claim law.
double tilted_claim_mean(const BaseModel& base, const MeasureChange& change);

}  // namespace cmpp::model
