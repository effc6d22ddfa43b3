#pragma once

#include <memory>

#include "cmpp/dist.hpp"
#include "cmpp/expr.hpp"
#include "cmpp/model.hpp"
#include "cmpp/premium.hpp"

namespace fixture {

using cmpp::dist::Distribution;
using cmpp::expr::RealFn;
using cmpp::model::BaseModel;
using cmpp::model::DerivedModel;
using cmpp::model::MeasureChange;

// Exponential claims with mean 5, Gamma(rate 2, shape 2) mixing.
inline BaseModel gamma_mixed_base() { return BaseModel(Distribution::exponential(0.2), Distribution::gamma(2, 2)); }

// Squares the intensity and turns the mixing law into Gamma(3, 4).
inline MeasureChange squaring_change() {
  return MeasureChange(RealFn::parse("ln(theta)"), RealFn::parse("ln(x/5)"),
                       RealFn::parse("27/8*theta^2*exp(-theta)"));
}

// Gamma(c+1, 2) claims with Beta(2, 1) mixing.
inline BaseModel beta_mixed_base(double c) {
  return BaseModel(Distribution::gamma(c + 1.0, 2.0), Distribution::beta(2, 1));
}

inline MeasureChange uniformising_change(double c) {
  const cmpp::expr::Bindings p{{"c", c}};
  return MeasureChange(RealFn::parse("ln(c+theta) + 2*ln((c+1)/(c+1+theta))", p), RealFn::parse("c*x - 2*ln(c+1)", p),
                       RealFn::parse("1/(2*theta)"));
}

inline DerivedModel derive(const BaseModel& base, const MeasureChange& change, int level = 1) {
  const auto report = cmpp::model::validate_change(base, change, level);
  return cmpp::model::derive_q_model(base, change, report);
}

}  // namespace fixture
