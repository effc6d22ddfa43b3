#include "cmpp/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <stdexcept>

#include "cmpp/errors.hpp"

namespace cmpp::sim {

namespace {

void check_horizon(const Path& p, double t) {
  if (t > p.horizon) throw OutOfHorizon("time " + std::to_string(t) + " is past the path horizon");
  if (t < 0.0) throw OutOfHorizon("negative time");
}

void put_number(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}

void put_array(std::ostream& out, const std::vector<double>& values) {
  out << '[';
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out << ',';
    put_number(out, values[i]);
  }
  out << ']';
}

}  // namespace

bool is_q_side(const MeasureTag& tag) {
  return std::holds_alternative<DerivedQ>(tag) || std::holds_alternative<ConditionalQ>(tag);
}

bool is_conditional(const MeasureTag& tag) {
  return std::holds_alternative<ConditionalP>(tag) || std::holds_alternative<ConditionalQ>(tag);
}

std::string tag_name(const MeasureTag& tag) {
  char buf[64];
  if (const auto* c = std::get_if<ConditionalP>(&tag)) {
    std::snprintf(buf, sizeof buf, "P_theta(%g)", c->theta);
    return buf;
  }
  if (const auto* c = std::get_if<ConditionalQ>(&tag)) {
    std::snprintf(buf, sizeof buf, "Q_theta(%g)", c->theta);
    return buf;
  }
  return std::holds_alternative<BaseP>(tag) ? "P" : "Q";
}

Path simulate_path(const model::BaseModel& base, const model::DerivedModel* derived, const MeasureTag& tag,
                   double horizon, RngStream& rng) {
  const bool q_side = is_q_side(tag);
  if (q_side && !derived) throw std::invalid_argument("Q-side simulation needs a derived model");

  Path p;
  p.horizon = horizon;
  if (std::holds_alternative<BaseP>(tag)) {
    p.theta = dist::sample(base.mixing_law(), rng);
  } else if (std::holds_alternative<DerivedQ>(tag)) {
    p.theta = dist::sample(derived->q_mixing, rng);
  } else if (const auto* c = std::get_if<ConditionalP>(&tag)) {
    p.theta = c->theta;
  } else {
    p.theta = std::get<ConditionalQ>(tag).theta;
  }

  const double rate = q_side ? derived->g(p.theta) : base.rate(p.theta);
  const dist::Distribution& claims = q_side ? derived->q_claim : base.claim_law();
  if (!(horizon > 0.0)) return p;
  if (!(rate > 0.0)) throw std::runtime_error("arrival rate must be positive");

  std::exponential_distribution<double> interarrival(rate);
  double t = 0.0;
  for (;;) {
    t += interarrival(rng);
    if (t > horizon) break;
    if (p.event_times.size() >= kMaxEventsPerPath)
      throw std::runtime_error("path exceeded the event cap; rate or horizon is unreasonably large");
    p.event_times.push_back(t);
    p.claims.push_back(dist::sample(claims, rng));
  }
  return p;
}

std::size_t count_at(const Path& p, double t) {
  check_horizon(p, t);
  return static_cast<std::size_t>(std::upper_bound(p.event_times.begin(), p.event_times.end(), t) -
                                  p.event_times.begin());
}

double aggregate_at(const Path& p, double t) {
  const std::size_t n = count_at(p, t);
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += p.claims[k];
  return s;
}

namespace {

double log_density_impl(const Path& p, double t, double rate, const model::MeasureChange& change,
                        bool include_xi) {
  const std::size_t n = count_at(p, t);
  const double alpha = change.alpha()(p.theta);
  double sum = include_xi ? std::log(change.xi()(p.theta)) : 0.0;
  sum += static_cast<double>(n) * alpha;
  for (std::size_t k = 0; k < n; ++k) sum += change.gamma()(p.claims[k]);
  return sum - t * rate * std::expm1(alpha);
}

}  // namespace

double log_density_M(const Path& p, double t, const model::MeasureChange& change, bool include_xi) {
  return log_density_impl(p, t, p.theta, change, include_xi);
}

double log_density_M(const Path& p, double t, const model::BaseModel& base, const model::MeasureChange& change,
                     bool include_xi) {
  return log_density_impl(p, t, base.rate(p.theta), change, include_xi);
}

double surplus(const Path& p, double t, const SurplusKind& kind) {
  const double s = aggregate_at(p, t);
  if (const auto* v = std::get_if<VChange>(&kind))
    return s - t * v->derived->g(p.theta) * v->derived->tilted_claim_mean;
  const auto& y = std::get<YBase>(kind);
  return s - t * y.base->rate(p.theta) * y.base->claim_mean();
}

void write_path(std::ostream& out, const Path& p) {
  out << "{\"theta\":";
  put_number(out, p.theta);
  out << ",\"horizon\":";
  put_number(out, p.horizon);
  out << ",\"event_times\":";
  put_array(out, p.event_times);
  out << ",\"claims\":";
  put_array(out, p.claims);
  out << "}\n";
}

}  // namespace cmpp::sim
