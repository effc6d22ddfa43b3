#pragma once

#include <cstddef>
#include <iosfwd>
#include <variant>
#include <vector>

#include "cmpp/model.hpp"
#include "cmpp/rng.hpp"

namespace cmpp::sim {

// One trajectory: the realised structure parameter, strictly increasing event
// times within the horizon, and the matching positive claim sizes.
struct Path {
  double theta = 0.0;
  std::vector<double> event_times;
  std::vector<double> claims;
  double horizon = 0.0;
};

// The four measures: P, Q, and their members conditional on Theta = theta.
struct BaseP {};
struct DerivedQ {};
struct ConditionalP {
  double theta;
};
struct ConditionalQ {
  double theta;
};
using MeasureTag = std::variant<BaseP, DerivedQ, ConditionalP, ConditionalQ>;

bool is_q_side(const MeasureTag& tag);
bool is_conditional(const MeasureTag& tag);
std::string tag_name(const MeasureTag& tag);

// Hard cap on events per path; exceeding it raises std::runtime_error.
inline constexpr std::size_t kMaxEventsPerPath = 10'000'000;

// Draws theta from the tag's mixing law (or uses the fixed value), then
// interarrivals Exp(h(theta)) on the P side or Exp(g(theta)) on the Q side and
// claims from the matching claim law, stopping before the first arrival past
// the horizon. Q-side tags require `derived`.
Path simulate_path(const model::BaseModel& base, const model::DerivedModel* derived, const MeasureTag& tag,
                   double horizon, RngStream& rng);

// N_t and S_t; events at exactly t are counted. Throw OutOfHorizon when
// t > horizon.
std::size_t count_at(const Path& p, double t);
double aggregate_at(const Path& p, double t);

// ln M_t: [ln xi(theta)] + N_t alpha(theta) + sum_{k<=N_t} gamma(X_k)
//          - t h(theta) (exp(alpha(theta)) - 1),
// with h the identity unless a base model is supplied. include_xi = false
// gives the conditional density.
double log_density_M(const Path& p, double t, const model::MeasureChange& change, bool include_xi);
double log_density_M(const Path& p, double t, const model::BaseModel& base, const model::MeasureChange& change,
                     bool include_xi);

// Claim surplus processes.
//   VChange: S_t - t g(theta) E_P[X exp(gamma(X))]
//   YBase:   S_t - t h(theta) E_P[X]
struct VChange {
  const model::DerivedModel* derived;
};
struct YBase {
  const model::BaseModel* base;
};
using SurplusKind = std::variant<VChange, YBase>;
double surplus(const Path& p, double t, const SurplusKind& kind);

// Line-delimited JSON, one path per line, full double precision:
//   {"theta":..,"horizon":..,"event_times":[..],"claims":[..]}
void write_path(std::ostream& out, const Path& p);

}  // namespace cmpp::sim
