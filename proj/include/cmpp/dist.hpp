#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cmpp/expr.hpp"
#include "cmpp/rng.hpp"

namespace cmpp::dist {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Interval {
  double lo;
  double hi;
  bool contains(double x) const { return x >= lo && x <= hi; }
};

// Parameterisations are rate-first throughout: Exponential(rate) has mean
// 1/rate and Gamma(rate, shape) has density rate^shape x^(shape-1)
// e^(-rate x) / Gamma(shape).
struct Exponential {
  double rate;
};
struct Gamma {
  double rate;
  double shape;
};
struct Beta {
  double a;
  double b;
};
struct Uniform {
  double lo;
  double hi;
};
struct Poisson {
  double lambda;
};
struct Degenerate {
  double point;
};

class Distribution;

// Base law reweighted by exp(log_weight(x)). The weight must integrate to one
// against the base; construction verifies this by quadrature and tabulates the
// cdf for inversion.
struct Tilted {
  std::shared_ptr<const Distribution> base;
  expr::RealFn log_weight;
  double normalizer;  // quadrature value of the weight's integral
  std::vector<double> nodes;
  std::vector<double> cumulative;  // tilted cdf at each node
};

class Distribution {
 public:
  using Variant =
      std::variant<Exponential, Gamma, Beta, Uniform, Poisson, Degenerate, std::shared_ptr<const Tilted>>;

  // Factories validate parameters (std::invalid_argument on bad input).
  static Distribution exponential(double rate);
  static Distribution gamma(double rate, double shape);
  static Distribution beta(double a, double b);
  static Distribution uniform(double lo, double hi);
  static Distribution poisson(double lambda);
  static Distribution degenerate(double point);

  const Variant& variant() const noexcept { return v_; }
  template <class T>
  const T* get_if() const noexcept {
    return std::get_if<T>(&v_);
  }
  const Tilted* tilted() const noexcept;

  Interval support() const;
  bool is_discrete() const;

  // Literal form, e.g. `gamma(rate=3, shape=4)`.
  std::string literal() const;

 private:
  friend Distribution tilt(const Distribution& base, expr::RealFn log_weight);
  explicit Distribution(Variant v) : v_(std::move(v)) {}
  Variant v_;
};

// Generic density tilt. Throws DivergentIntegral when the weight's integral
// diverges and std::invalid_argument when it is not within 1e-8 of one.
Distribution tilt(const Distribution& base, expr::RealFn log_weight);

double moment(const Distribution& d, unsigned k);
double mean(const Distribution& d);
double variance(const Distribution& d);
double mgf(const Distribution& d, double s);
double density(const Distribution& d, double x);  // mass function for discrete laws
double log_density(const Distribution& d, double x);
double cdf(const Distribution& d, double x);
double quantile(const Distribution& d, double p);
double sample(const Distribution& d, RngStream& rng);

// E[f(X) exp(log_weight(X))], optionally restricted to lo < X <= hi.
// Continuous laws use adaptive quadrature with the semi-infinite divergence
// guard; discrete laws sum their mass function. Throws DivergentIntegral.
struct ExpectOptions {
  std::function<double(double)> log_weight;  // empty means 0
  double lo = -kInf;
  double hi = kInf;
};
double expect(const Distribution& d, const std::function<double(double)>& f, const ExpectOptions& opts = {});

// Parses a distribution literal. Numeric arguments may be constant
// expressions over `params`, e.g. `gamma(rate=c+1, shape=2)`.
Distribution parse_literal(std::string_view src, const expr::Bindings& params = {});

}  // namespace cmpp::dist
