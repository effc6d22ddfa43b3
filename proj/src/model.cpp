#include "cmpp/model.hpp"

#include <cmath>
#include <stdexcept>

#include "cmpp/errors.hpp"

namespace cmpp::model {

namespace {

void require_role(const expr::RealFn& f, const char* var, const char* what) {
  const auto v = f.variable();
  if (v && *v != var)
    throw std::invalid_argument(std::string(what) + " must be a function of " + var + ", got " + *v);
}

void require_positive_support(const dist::Distribution& d, const char* what) {
  if (d.get_if<dist::Poisson>())
    throw std::invalid_argument(std::string(what) + " must be concentrated on (0, inf)");
  if (d.support().lo < 0.0)
    throw std::invalid_argument(std::string(what) + " must be concentrated on (0, inf)");
}

std::vector<double> support_grid(const dist::Distribution& d, int points) {
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) grid.push_back(dist::quantile(d, (i + 0.5) / points));
  return grid;
}

std::string fingerprint_of(const BaseModel& base, const MeasureChange& change) {
  return base.claim_law().literal() + "|" + base.mixing_law().literal() + "|" + base.rate_fn().print() + "|" +
         change.fingerprint();
}

// Tilted law in catalog form when a closure rule applies and agrees with the
// generic density product on a grid; otherwise the generic tilt.
std::pair<dist::Distribution, bool> tilt_law(const dist::Distribution& base, const expr::RealFn& log_weight,
                                             std::optional<expr::AffineLogForm> form) {
  if (form) {
    if (auto closed = closed_form_tilt(base, *form)) {
      bool agrees = true;
      if (!base.is_discrete()) {
        for (double x : support_grid(base, 64)) {
          const double expected = std::exp(log_weight(x)) * dist::density(base, x);
          const double got = dist::density(*closed, x);
          if (std::abs(got - expected) > 1e-9 * std::max(1.0, std::abs(expected))) {
            agrees = false;
            break;
          }
        }
      }
      if (agrees) return {*closed, true};
    }
  }
  if (base.is_discrete()) {
    // Degenerate laws are closed under any weight that is one at the atom,
    // which validation has already established.
    if (base.get_if<dist::Degenerate>()) return {base, true};
    throw std::invalid_argument("cannot tilt a discrete law without a closure rule");
  }
  return {dist::tilt(base, log_weight), false};
}

}  // namespace

BaseModel::BaseModel(dist::Distribution claim_law, dist::Distribution mixing_law, expr::RealFn rate_fn)
    : claim_law_(std::move(claim_law)), mixing_law_(std::move(mixing_law)), rate_fn_(std::move(rate_fn)) {
  require_positive_support(claim_law_, "claim law");
  require_positive_support(mixing_law_, "mixing law");
  require_role(rate_fn_, "theta", "rate function h");
  for (double theta : support_grid(mixing_law_, 64)) {
    if (!(rate_fn_(theta) > 0.0))
      throw std::invalid_argument("rate function h must be positive on the mixing support");
  }
  claim_mean_ = dist::moment(claim_law_, 1);
}

bool BaseModel::rate_is_identity() const {
  return expr::structurally_equal(*rate_fn_.root(), *expr::variable("theta"));
}

MeasureChange::MeasureChange(expr::RealFn alpha, expr::RealFn gamma, expr::RealFn xi)
    : alpha_(std::move(alpha)), gamma_(std::move(gamma)), xi_(std::move(xi)) {
  require_role(alpha_, "theta", "alpha");
  require_role(gamma_, "x", "gamma");
  require_role(xi_, "theta", "xi");
}

MeasureChange MeasureChange::identity() {
  return MeasureChange(expr::RealFn::constant(0.0), expr::RealFn::constant(0.0), expr::RealFn::constant(1.0));
}

std::string MeasureChange::fingerprint() const {
  std::string out = "alpha=" + alpha_.print() + ";gamma=" + gamma_.print() + ";xi=" + xi_.print();
  for (const auto* f : {&alpha_, &gamma_, &xi_}) {
    for (const auto& [name, value] : f->params()) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", value);
      out += ";" + name + "=" + buf;
    }
  }
  return out;
}

AdmissibilityReport validate_change(const BaseModel& base, const MeasureChange& change, int level) {
  if (level != 1 && level != 2) throw std::invalid_argument("level must be 1 or 2");
  AdmissibilityReport r;
  r.level_requested = level;
  r.fingerprint = fingerprint_of(base, change);

  const auto& claim = base.claim_law();
  const auto& mixing = base.mixing_law();
  const auto gamma = [&](double x) { return change.gamma()(x); };

  auto guarded = [&](const char* label, auto&& compute) {
    try {
      return compute();
    } catch (const DivergentIntegral& e) {
      r.failures.push_back(std::string(label) + ": DivergentIntegral (" + e.what() + ")");
      return dist::kInf;
    }
  };

  r.gamma_norm = guarded("gamma_norm", [&] {
    return dist::expect(claim, [](double) { return 1.0; }, {gamma});
  });

  bool nonpositive_seen = false;
  r.xi_norm = guarded("xi_norm", [&] {
    return dist::expect(mixing, [&](double theta) {
      const double v = change.xi()(theta);
      // Deep-tail nodes may underflow to 0; only a sign change counts here.
      if (!(v >= 0.0)) nonpositive_seen = true;
      return v;
    });
  });
  r.xi_positive = !nonpositive_seen;
  for (double theta : support_grid(mixing, 256)) {
    if (!(change.xi()(theta) > 0.0)) r.xi_positive = false;
  }

  const expr::RealFn g = derive_g(change, base.rate_fn());
  for (int l = 1; l <= 2; ++l) {
    const std::string suffix = std::to_string(l);
    r.claim_gate[l - 1] = guarded(("claim_gate_" + suffix).c_str(), [&] {
      return dist::expect(claim, [l](double x) { return std::pow(x, l); }, {gamma});
    });
    r.mixing_gate[l - 1] = guarded(("mixing_gate_" + suffix).c_str(), [&] {
      return dist::expect(mixing, [&](double theta) { return change.xi()(theta) * std::pow(g(theta), l); });
    });
  }

  const bool norms_ok = std::abs(r.gamma_norm - 1.0) <= kNormTolerance &&
                        std::abs(r.xi_norm - 1.0) <= kNormTolerance && r.xi_positive;
  if (std::isfinite(r.gamma_norm) && std::abs(r.gamma_norm - 1.0) > kNormTolerance)
    r.failures.push_back("gamma_norm is not 1");
  if (std::isfinite(r.xi_norm) && std::abs(r.xi_norm - 1.0) > kNormTolerance)
    r.failures.push_back("xi_norm is not 1");
  if (!r.xi_positive) r.failures.push_back("xi is not positive on the mixing support");

  if (norms_ok) {
    for (int l = 2; l >= 1; --l) {
      if (std::isfinite(r.claim_gate[l - 1]) && std::isfinite(r.mixing_gate[l - 1])) {
        r.level_achieved = l;
        break;
      }
    }
  }
  r.pass = norms_ok && r.level_achieved >= level;
  if (norms_ok && !r.pass) r.failures.push_back("moment gates fail at level " + std::to_string(level));
  return r;
}

expr::RealFn derive_g(const MeasureChange& change, const expr::RealFn& rate_fn) {
  using expr::Node;
  const bool identity_rate = expr::structurally_equal(*rate_fn.root(), *expr::variable("theta"));
  if (identity_rate) {
    if (auto form = expr::affine_log_form(change.alpha())) {
      const double coef = std::exp(form->constant);
      const double power = 1.0 + form->log_coef;
      expr::NodePtr term;
      if (power != 0.0) {
        term = power == 1.0 ? expr::variable("theta")
                            : expr::binary(Node::Kind::Pow, expr::variable("theta"), expr::number(power));
      }
      if (coef != 1.0 || !term) {
        term = term ? expr::binary(Node::Kind::Mul, expr::number(coef), term) : expr::number(coef);
      }
      if (form->linear_coef != 0.0) {
        expr::NodePtr arg = form->linear_coef == 1.0 ? expr::variable("theta")
                            : form->linear_coef == -1.0
                                ? expr::negate(expr::variable("theta"))
                                : expr::binary(Node::Kind::Mul, expr::number(form->linear_coef),
                                               expr::variable("theta"));
        term = expr::binary(Node::Kind::Mul, term, expr::call(expr::Func::Exp, arg));
      }
      return expr::RealFn(term, {});
    }
  }
  expr::Bindings params = rate_fn.params();
  for (const auto& [k, v] : change.alpha().params()) params[k] = v;
  return expr::RealFn(
      expr::binary(Node::Kind::Mul, rate_fn.root(), expr::call(expr::Func::Exp, change.alpha().root())),
      std::move(params));
}

std::optional<dist::Distribution> closed_form_tilt(const dist::Distribution& base, const expr::AffineLogForm& form) {
  const double a = form.log_coef;
  const double b = form.linear_coef;
  auto gamma_family = [&](double rate, double shape) -> std::optional<dist::Distribution> {
    const double r = rate - b;
    const double m = shape + a;
    if (!(r > 0.0) || !(m > 0.0)) return std::nullopt;
    if (m == 1.0) return dist::Distribution::exponential(r);
    return dist::Distribution::gamma(r, m);
  };
  if (const auto* e = base.get_if<dist::Exponential>()) return gamma_family(e->rate, 1.0);
  if (const auto* g = base.get_if<dist::Gamma>()) return gamma_family(g->rate, g->shape);
  if (const auto* be = base.get_if<dist::Beta>()) {
    if (b != 0.0 || !(be->a + a > 0.0)) return std::nullopt;
    if (be->a + a == 1.0 && be->b == 1.0) return dist::Distribution::uniform(0.0, 1.0);
    return dist::Distribution::beta(be->a + a, be->b);
  }
  if (base.get_if<dist::Uniform>() || base.get_if<dist::Degenerate>()) {
    if (a == 0.0 && b == 0.0) return base;
    if (base.get_if<dist::Degenerate>()) return base;
  }
  return std::nullopt;
}

expr::RealFn log_of(const expr::RealFn& f) {
  return expr::RealFn(expr::call(expr::Func::Ln, f.root()), f.params());
}

double tilted_claim_mean(const BaseModel& base, const MeasureChange& change) {
  return dist::expect(base.claim_law(), [](double x) { return x; },
                      {[&](double x) { return change.gamma()(x); }});
}

DerivedModel derive_q_model(const BaseModel& base, const MeasureChange& change, const AdmissibilityReport& report) {
  if (!report.pass) throw NotValidated("measure change has not passed validation");
  if (report.fingerprint != fingerprint_of(base, change))
    throw NotValidated("validation report belongs to a different base model or change");

  DerivedModel d{derive_g(change, base.rate_fn()),
                 base.claim_law(),
                 base.mixing_law(),
                 std::make_shared<const BaseModel>(base),
                 std::make_shared<const MeasureChange>(change),
                 report.level_requested,
                 false,
                 false,
                 0.0};

  auto [q_claim, claim_closed] =
      tilt_law(base.claim_law(), change.gamma(), expr::affine_log_form(change.gamma()));
  auto [q_mixing, mixing_closed] =
      tilt_law(base.mixing_law(), log_of(change.xi()), expr::log_of_affine_log_form(change.xi()));
  d.q_claim = std::move(q_claim);
  d.q_mixing = std::move(q_mixing);
  d.claim_in_catalog = claim_closed;
  d.mixing_in_catalog = mixing_closed;
  d.tilted_claim_mean = tilted_claim_mean(base, change);
  return d;
}

}  // namespace cmpp::model
