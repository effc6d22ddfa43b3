#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cmpp/model.hpp"
#include "cmpp/sim.hpp"

namespace cmpp::verify {

enum class Verdict { Pass, Fail, Inconclusive };
std::string to_string(Verdict v);

// Acceptance band, in standard errors, for single identities.
inline constexpr double kSigmaBand = 3.0;
// Family-wise level for tables of martingale cells.
inline constexpr double kFamilyAlpha = 0.01;

struct MCReport {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
  double ci_low = 0.0;  // estimate -/+ 3 standard errors
  double ci_high = 0.0;
  Verdict verdict = Verdict::Inconclusive;
  std::optional<double> oracle;
};

// A functional of the path observed up to time t.
using PathFunctional = std::function<double(const sim::Path&, double t)>;

// Builds an MCReport; with an oracle the verdict is pass iff
// |estimate - oracle| <= 3 * std_error (exact match when std_error is 0).
MCReport make_report(double estimate, double std_error, std::size_t n, std::optional<double> oracle = {});

// Sample mean of f at time t over n fresh paths simulated under `tag`.
MCReport mc_estimate(const PathFunctional& f, const model::BaseModel& base, const model::DerivedModel* derived,
                     const sim::MeasureTag& tag, double t, std::size_t n, std::uint64_t seed,
                     std::optional<double> oracle = {});

// Several functionals over the same paths.
std::vector<MCReport> mc_estimate_battery(const std::vector<PathFunctional>& fs, const model::BaseModel& base,
                                          const model::DerivedModel* derived, const sim::MeasureTag& tag, double t,
                                          std::size_t n, std::uint64_t seed, std::uint64_t family);

// ---------------------------------------------------------------------------
// Reweighting identity: E_Q[f] = E_P[f M_t] (unconditional, with xi) or
// E_{Q_theta}[f] = E_{P_theta}[f M~_t] (theta given, without xi).

enum class Direction {
  PToQ,  // direct under Q, weighted simulation under P with exp(+ln M)
  QToP,  // direct under P, weighted simulation under Q with exp(-ln M)
};

struct ReweightingResult {
  MCReport direct;
  MCReport weighted;
  double difference = 0.0;
  double pooled_std_error = 0.0;
  Verdict verdict = Verdict::Inconclusive;
};

// Second moment of the importance weight used by check_reweighting: E_P[M_t^2]
// for PToQ, E_Q[M_t^-2] for QToP (conditional forms when theta is given).
// +inf when it diverges, in which case the 3-sigma comparison is not backed
// by a central limit theorem.
double weight_second_moment(const model::DerivedModel& derived, std::optional<double> theta, double t,
                            Direction direction = Direction::PToQ);

std::vector<ReweightingResult> check_reweighting(const std::vector<PathFunctional>& fs,
                                                 const model::DerivedModel& derived, std::optional<double> theta,
                                                 double t, std::size_t n, std::uint64_t seed,
                                                 Direction direction = Direction::PToQ);

// ---------------------------------------------------------------------------
// Martingale tests in integral form: E[chi_A (Z_t - Z_s)] = 0 for A in F_s.

struct CountAtMost {
  double s;
  std::size_t k;
};
struct AggregateAtMost {
  double s;
  double q;
};
struct ThetaIn {  // lo < theta <= hi
  double lo;
  double hi;
};
struct WholeSpace {};
using EventSpec = std::variant<CountAtMost, AggregateAtMost, ThetaIn, WholeSpace>;

bool occurs(const EventSpec& e, const sim::Path& p);
std::string describe(const EventSpec& e);

struct VChangeProcess {};
struct YBaseProcess {};
struct RawAggregate {};
// M_t under unconditional tags, M~_t under conditional ones; the reciprocal
// when `inverse` is set (a martingale under the Q-side tags).
struct DensityProcess {
  bool inverse = false;
};
struct ConstantProcess {
  double value;
};
using Process = std::variant<VChangeProcess, YBaseProcess, RawAggregate, DensityProcess, ConstantProcess>;
std::string describe(const Process& p);

// The default family for a pair with earlier time s: N_s <= 0, 1, 3;
// S_s <= median and 90th percentile (pilot run); theta below/above its median
// under the tag; and the whole space.
std::vector<EventSpec> default_events(const model::BaseModel& base, const model::DerivedModel* derived,
                                      const sim::MeasureTag& tag, double s, std::uint64_t seed);

struct MartingaleCell {
  double s = 0.0;
  double t = 0.0;
  EventSpec event;
  double estimate = 0.0;
  double std_error = 0.0;
  double z = 0.0;
  bool within_3_sigma = false;
  std::optional<double> oracle;  // E[chi_A (Z_t - Z_s)] when known in closed form
};

struct MartingaleTable {
  std::vector<MartingaleCell> cells;
  double z_critical = 0.0;  // Bonferroni threshold at kFamilyAlpha
  Verdict verdict = Verdict::Inconclusive;
};

// `events` applies to every pair; empty means default_events per pair.
MartingaleTable check_martingale(const Process& process, const model::BaseModel& base,
                                 const model::DerivedModel* derived, const sim::MeasureTag& tag,
                                 const std::vector<std::pair<double, double>>& pairs,
                                 const std::vector<EventSpec>& events, std::size_t n, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Degeneracy dichotomy: S_t - E_Q[S_t] is a Q-martingale iff g(Theta) is
// degenerate under Q.

struct DegeneracyCell {
  EventSpec event;
  double estimate = 0.0;
  double std_error = 0.0;
  double z = 0.0;
  double oracle = 0.0;
};

struct DegeneracyReport {
  bool predicted_degenerate = false;  // Var_Q[g(Theta)] == 0 by quadrature
  bool martingale_observed = false;
  bool violation_detected = false;  // some cell at >= 5 standard errors
  std::size_t witness = 0;          // index of the largest |z|
  std::vector<DegeneracyCell> cells;
  Verdict verdict = Verdict::Inconclusive;
};

inline constexpr double kViolationSigma = 5.0;

DegeneracyReport degeneracy_test(const model::DerivedModel& derived, std::size_t n, std::uint64_t seed,
                                 double s = 1.0, double t = 2.0);

// ---------------------------------------------------------------------------
// Divergence of ln M_T over growing horizons.

struct SingularityRow {
  double horizon = 0.0;
  bool q_side = false;
  double drift = 0.0;  // mean of ln M_T / T
  double drift_std_error = 0.0;
  double q05 = 0.0, q50 = 0.0, q95 = 0.0;  // quantiles of ln M_T
  double fraction_below = 0.0;             // ln M_T < -5
  double fraction_above = 0.0;             // ln M_T > +5
  std::optional<double> oracle_drift;
  Verdict verdict = Verdict::Inconclusive;
};

inline constexpr double kSingularityThreshold = 5.0;

std::vector<SingularityRow> singularity_probe(const model::DerivedModel& derived, std::optional<double> theta,
                                              const std::vector<double>& horizons, std::size_t n,
                                              std::uint64_t seed);

// E[ln M~_t]/t given theta under P_theta (q_side false) or Q_theta:
//   P: h (alpha + E_P[gamma(X)]) - h (e^alpha - 1)
//   Q: g (alpha + E_Q[gamma(X)]) - h (e^alpha - 1)
double log_density_drift(const model::DerivedModel& derived, double theta, bool q_side);

// ---------------------------------------------------------------------------

// E[f(Theta)] under the tag's mixing law (a point mass for conditional tags).
double tag_expect(const model::BaseModel& base, const model::DerivedModel* derived, const sim::MeasureTag& tag,
                  const std::function<double(double)>& f);

// P(N_t = k), k = 0..k_max, for the mixed Poisson count under P.
std::vector<double> mixed_count_pmf(const model::BaseModel& base, double t, std::size_t k_max);

}  // namespace cmpp::verify
