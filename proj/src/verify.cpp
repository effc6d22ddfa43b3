#include "cmpp/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "cmpp/errors.hpp"
#include "cmpp/stats.hpp"

namespace cmpp::verify {

namespace {

constexpr std::size_t kPilotPaths = 20000;

sim::MeasureTag p_tag(std::optional<double> theta) {
  if (theta) return sim::ConditionalP{*theta};
  return sim::BaseP{};
}

sim::MeasureTag q_tag(std::optional<double> theta) {
  if (theta) return sim::ConditionalQ{*theta};
  return sim::DerivedQ{};
}

std::optional<double> tag_theta(const sim::MeasureTag& tag) {
  if (const auto* c = std::get_if<sim::ConditionalP>(&tag)) return c->theta;
  if (const auto* c = std::get_if<sim::ConditionalQ>(&tag)) return c->theta;
  return std::nullopt;
}

const dist::Distribution& tag_mixing(const model::BaseModel& base, const model::DerivedModel* derived,
                                     const sim::MeasureTag& tag) {
  return sim::is_q_side(tag) ? derived->q_mixing : base.mixing_law();
}

double z_score(double estimate, double se) {
  if (se > 0.0) return estimate / se;
  return estimate == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), estimate);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

struct DriftPieces {
  double p_gamma_mean;
  double q_gamma_mean;
};

DriftPieces drift_pieces(const model::DerivedModel& derived) {
  const auto& gamma = derived.change->gamma();
  DriftPieces d;
  d.p_gamma_mean = dist::expect(derived.base->claim_law(), [&](double x) { return gamma(x); });
  d.q_gamma_mean = dist::expect(derived.q_claim, [&](double x) { return gamma(x); });
  return d;
}

double drift_at(const model::DerivedModel& derived, const DriftPieces& pieces, double theta, bool q_side) {
  const double alpha = derived.change->alpha()(theta);
  const double h = derived.base->rate(theta);
  const double compensator = h * std::expm1(alpha);
  if (q_side) return derived.g(theta) * (alpha + pieces.q_gamma_mean) - compensator;
  return h * (alpha + pieces.p_gamma_mean) - compensator;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass:
      return "pass";
    case Verdict::Fail:
      return "fail";
    case Verdict::Inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

MCReport make_report(double estimate, double std_error, std::size_t n, std::optional<double> oracle) {
  MCReport r;
  r.estimate = estimate;
  r.std_error = std_error;
  r.n = n;
  r.ci_low = estimate - kSigmaBand * std_error;
  r.ci_high = estimate + kSigmaBand * std_error;
  r.oracle = oracle;
  if (oracle) {
    const double diff = std::abs(estimate - *oracle);
    const bool ok = std_error > 0.0 ? diff <= kSigmaBand * std_error
                                    : diff <= 1e-12 * std::max(1.0, std::abs(*oracle));
    r.verdict = ok ? Verdict::Pass : Verdict::Fail;
  }
  return r;
}

std::vector<MCReport> mc_estimate_battery(const std::vector<PathFunctional>& fs, const model::BaseModel& base,
                                          const model::DerivedModel* derived, const sim::MeasureTag& tag, double t,
                                          std::size_t n, std::uint64_t seed, std::uint64_t family) {
  if (n < 100) throw std::invalid_argument("Monte Carlo estimates need at least 100 paths");
  auto table = stats::SampleTable::generate(n, fs.size(), [&](std::size_t i, std::span<double> row) {
    RngStream rng(seed, family, i);
    const sim::Path p = sim::simulate_path(base, derived, tag, t, rng);
    for (std::size_t j = 0; j < fs.size(); ++j) row[j] = fs[j](p, t);
  });
  std::vector<MCReport> out;
  for (std::size_t j = 0; j < fs.size(); ++j) {
    const auto s = stats::summarize(table.column(j));
    out.push_back(make_report(s.mean, s.std_error, s.n));
  }
  return out;
}

MCReport mc_estimate(const PathFunctional& f, const model::BaseModel& base, const model::DerivedModel* derived,
                     const sim::MeasureTag& tag, double t, std::size_t n, std::uint64_t seed,
                     std::optional<double> oracle) {
  auto r = mc_estimate_battery({f}, base, derived, tag, t, n, seed, stream_family::kSideA).front();
  return make_report(r.estimate, r.std_error, r.n, oracle);
}

double weight_second_moment(const model::DerivedModel& derived, std::optional<double> theta, double t,
                            Direction direction) {
  const model::BaseModel& base = *derived.base;
  const model::MeasureChange& change = *derived.change;
  const bool forward = direction == Direction::PToQ;
  try {
    // Claim factor: E_P[e^{2 gamma}] forward, E_Q[e^{-2 gamma}] = E_P[e^{-gamma}] backward.
    const double claim_factor = dist::expect(base.claim_law(), [&](double x) {
      return std::exp((forward ? 2.0 : -1.0) * change.gamma()(x));
    });
    if (!std::isfinite(claim_factor)) return std::numeric_limits<double>::infinity();
    // Conditional second moment given theta, as a log.
    auto log_conditional = [&](double th) {
      const double a = change.alpha()(th);
      const double h = base.rate(th);
      const double comp = t * h * std::expm1(a);
      if (forward) return t * h * (std::exp(2.0 * a) * claim_factor - 1.0) - 2.0 * comp;
      return t * derived.g(th) * (std::exp(-2.0 * a) * claim_factor - 1.0) + 2.0 * comp;
    };
    if (theta) return std::exp(log_conditional(*theta));
    const auto& xi = change.xi();
    if (forward)
      return dist::expect(base.mixing_law(), [&](double th) {
        return std::exp(2.0 * std::log(xi(th)) + log_conditional(th));
      });
    return dist::expect(derived.q_mixing, [&](double th) {
      return std::exp(-2.0 * std::log(xi(th)) + log_conditional(th));
    });
  } catch (const DivergentIntegral&) {
    return std::numeric_limits<double>::infinity();
  }
}

std::vector<ReweightingResult> check_reweighting(const std::vector<PathFunctional>& fs,
                                                 const model::DerivedModel& derived, std::optional<double> theta,
                                                 double t, std::size_t n, std::uint64_t seed, Direction direction) {
  const model::BaseModel& base = *derived.base;
  const model::MeasureChange& change = *derived.change;
  const bool include_xi = !theta.has_value();
  const bool forward = direction == Direction::PToQ;
  const sim::MeasureTag direct_tag = forward ? q_tag(theta) : p_tag(theta);
  const sim::MeasureTag weighted_tag = forward ? p_tag(theta) : q_tag(theta);
  const double sign = forward ? 1.0 : -1.0;

  std::vector<PathFunctional> weighted;
  for (const auto& f : fs) {
    weighted.push_back([&, f](const sim::Path& p, double u) {
      return f(p, u) * std::exp(sign * sim::log_density_M(p, u, base, change, include_xi));
    });
  }
  const auto direct = mc_estimate_battery(fs, base, &derived, direct_tag, t, n, seed, stream_family::kSideA);
  const auto other = mc_estimate_battery(weighted, base, &derived, weighted_tag, t, n, seed, stream_family::kSideB);

  std::vector<ReweightingResult> out;
  for (std::size_t j = 0; j < fs.size(); ++j) {
    ReweightingResult r;
    r.direct = direct[j];
    r.weighted = other[j];
    r.difference = direct[j].estimate - other[j].estimate;
    r.pooled_std_error = std::hypot(direct[j].std_error, other[j].std_error);
    const bool ok = r.pooled_std_error > 0.0 ? std::abs(r.difference) <= kSigmaBand * r.pooled_std_error
                                             : std::abs(r.difference) <= 1e-12;
    r.verdict = ok ? Verdict::Pass : Verdict::Fail;
    out.push_back(r);
  }
  return out;
}

bool occurs(const EventSpec& e, const sim::Path& p) {
  return std::visit(
      [&](const auto& ev) -> bool {
        using T = std::decay_t<decltype(ev)>;
        if constexpr (std::is_same_v<T, CountAtMost>) {
          return sim::count_at(p, ev.s) <= ev.k;
        } else if constexpr (std::is_same_v<T, AggregateAtMost>) {
          return sim::aggregate_at(p, ev.s) <= ev.q;
        } else if constexpr (std::is_same_v<T, ThetaIn>) {
          return p.theta > ev.lo && p.theta <= ev.hi;
        } else {
          return true;
        }
      },
      e);
}

std::string describe(const EventSpec& e) {
  return std::visit(
      [](const auto& ev) -> std::string {
        using T = std::decay_t<decltype(ev)>;
        if constexpr (std::is_same_v<T, CountAtMost>) {
          return "N(" + fmt(ev.s) + ")<=" + std::to_string(ev.k);
        } else if constexpr (std::is_same_v<T, AggregateAtMost>) {
          return "S(" + fmt(ev.s) + ")<=" + fmt(ev.q);
        } else if constexpr (std::is_same_v<T, ThetaIn>) {
          return fmt(ev.lo) + "<theta<=" + fmt(ev.hi);
        } else {
          return "all";
        }
      },
      e);
}

std::string describe(const Process& p) {
  return std::visit(
      [](const auto& pr) -> std::string {
        using T = std::decay_t<decltype(pr)>;
        if constexpr (std::is_same_v<T, VChangeProcess>) {
          return "V";
        } else if constexpr (std::is_same_v<T, YBaseProcess>) {
          return "Y";
        } else if constexpr (std::is_same_v<T, RawAggregate>) {
          return "S";
        } else if constexpr (std::is_same_v<T, DensityProcess>) {
          return pr.inverse ? "1/M" : "M";
        } else {
          return "const(" + fmt(pr.value) + ")";
        }
      },
      p);
}

std::vector<EventSpec> default_events(const model::BaseModel& base, const model::DerivedModel* derived,
                                      const sim::MeasureTag& tag, double s, std::uint64_t seed) {
  std::vector<EventSpec> events{CountAtMost{s, 0}, CountAtMost{s, 1}, CountAtMost{s, 3}};

  std::vector<double> pilot(kPilotPaths);
  auto table = stats::SampleTable::generate(kPilotPaths, 1, [&](std::size_t i, std::span<double> row) {
    RngStream rng(seed, stream_family::kPilot, i);
    row[0] = sim::aggregate_at(sim::simulate_path(base, derived, tag, s, rng), s);
  });
  pilot.assign(table.column(0).begin(), table.column(0).end());
  events.push_back(AggregateAtMost{s, stats::empirical_quantile(pilot, 0.5)});
  events.push_back(AggregateAtMost{s, stats::empirical_quantile(pilot, 0.9)});

  if (!sim::is_conditional(tag)) {
    const double m = dist::quantile(tag_mixing(base, derived, tag), 0.5);
    events.push_back(ThetaIn{-std::numeric_limits<double>::infinity(), m});
    events.push_back(ThetaIn{m, std::numeric_limits<double>::infinity()});
  }
  events.push_back(WholeSpace{});
  return events;
}

double tag_expect(const model::BaseModel& base, const model::DerivedModel* derived, const sim::MeasureTag& tag,
                  const std::function<double(double)>& f) {
  if (auto th = tag_theta(tag)) return f(*th);
  if (sim::is_q_side(tag) && !derived) throw std::invalid_argument("Q-side expectation needs a derived model");
  return dist::expect(tag_mixing(base, derived, tag), f);
}

MartingaleTable check_martingale(const Process& process, const model::BaseModel& base,
                                 const model::DerivedModel* derived, const sim::MeasureTag& tag,
                                 const std::vector<std::pair<double, double>>& pairs,
                                 const std::vector<EventSpec>& events, std::size_t n, std::uint64_t seed) {
  if (pairs.empty()) throw std::invalid_argument("martingale check needs at least one (s, t) pair");
  if (sim::is_q_side(tag) && !derived) throw std::invalid_argument("Q-side check needs a derived model");
  const bool needs_derived =
      std::holds_alternative<VChangeProcess>(process) || std::holds_alternative<DensityProcess>(process);
  if (needs_derived && !derived) throw std::invalid_argument("process needs a derived model");

  double horizon = 0.0;
  for (const auto& [s, t] : pairs) {
    if (!(s >= 0.0 && s < t)) throw std::invalid_argument("pairs must satisfy 0 <= s < t");
    horizon = std::max(horizon, t);
  }

  const bool include_xi = !sim::is_conditional(tag);
  auto value = [&](const sim::Path& p, double u) -> double {
    return std::visit(
        [&](const auto& pr) -> double {
          using T = std::decay_t<decltype(pr)>;
          if constexpr (std::is_same_v<T, VChangeProcess>) {
            return sim::surplus(p, u, sim::VChange{derived});
          } else if constexpr (std::is_same_v<T, YBaseProcess>) {
            return sim::surplus(p, u, sim::YBase{&base});
          } else if constexpr (std::is_same_v<T, RawAggregate>) {
            return sim::aggregate_at(p, u);
          } else if constexpr (std::is_same_v<T, DensityProcess>) {
            const double l = sim::log_density_M(p, u, base, *derived->change, include_xi);
            return std::exp(pr.inverse ? -l : l);
          } else {
            return pr.value;
          }
        },
        process);
  };

  // Cells in pair-major order.
  std::vector<std::pair<std::size_t, EventSpec>> layout;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto evs = events.empty() ? default_events(base, derived, tag, pairs[k].first, seed + k) : events;
    for (const auto& e : evs) layout.emplace_back(k, e);
  }

  auto table = stats::SampleTable::generate(n, layout.size(), [&](std::size_t i, std::span<double> row) {
    RngStream rng(seed, stream_family::kSideA, i);
    const sim::Path p = sim::simulate_path(base, derived, tag, horizon, rng);
    std::vector<double> increments(pairs.size());
    for (std::size_t k = 0; k < pairs.size(); ++k)
      increments[k] = value(p, pairs[k].second) - value(p, pairs[k].first);
    for (std::size_t c = 0; c < layout.size(); ++c)
      row[c] = occurs(layout[c].second, p) ? increments[layout[c].first] : 0.0;
  });

  // Closed-form drift of the whole-space increment per unit time.
  std::optional<double> unit_drift;
  try {
    const bool q = sim::is_q_side(tag);
    const double claim_mean = q ? derived->tilted_claim_mean : base.claim_mean();
    auto rate = [&](double th) { return q ? derived->g(th) : base.rate(th); };
    std::visit(
        [&](const auto& pr) {
          using T = std::decay_t<decltype(pr)>;
          if constexpr (std::is_same_v<T, VChangeProcess>) {
            unit_drift = claim_mean * tag_expect(base, derived, tag, rate) -
                         derived->tilted_claim_mean * tag_expect(base, derived, tag, [&](double th) {
                           return derived->g(th);
                         });
          } else if constexpr (std::is_same_v<T, YBaseProcess>) {
            unit_drift = claim_mean * tag_expect(base, derived, tag, rate) -
                         base.claim_mean() * tag_expect(base, derived, tag, [&](double th) { return base.rate(th); });
          } else if constexpr (std::is_same_v<T, RawAggregate>) {
            unit_drift = claim_mean * tag_expect(base, derived, tag, rate);
          } else if constexpr (std::is_same_v<T, DensityProcess>) {
            if (q == pr.inverse) unit_drift = 0.0;
          } else {
            unit_drift = 0.0;
          }
        },
        process);
  } catch (const DivergentIntegral&) {
    unit_drift.reset();
  }

  MartingaleTable out;
  out.z_critical = stats::bonferroni_z(kFamilyAlpha, layout.size());
  bool all_ok = true;
  for (std::size_t c = 0; c < layout.size(); ++c) {
    const auto s = stats::summarize(table.column(c));
    MartingaleCell cell;
    cell.s = pairs[layout[c].first].first;
    cell.t = pairs[layout[c].first].second;
    cell.event = layout[c].second;
    cell.estimate = s.mean;
    cell.std_error = s.std_error;
    cell.z = z_score(s.mean, s.std_error);
    cell.within_3_sigma = std::abs(cell.z) <= kSigmaBand;
    if (unit_drift && std::holds_alternative<WholeSpace>(cell.event))
      cell.oracle = (cell.t - cell.s) * *unit_drift;
    if (!(std::abs(cell.z) <= out.z_critical)) all_ok = false;
    out.cells.push_back(cell);
  }
  out.verdict = all_ok ? Verdict::Pass : Verdict::Fail;
  return out;
}

DegeneracyReport degeneracy_test(const model::DerivedModel& derived, std::size_t n, std::uint64_t seed, double s,
                                 double t) {
  if (!(s >= 0.0 && s < t)) throw std::invalid_argument("need 0 <= s < t");
  const model::BaseModel& base = *derived.base;
  const auto& g = derived.g;
  const double claim_mean = derived.tilted_claim_mean;
  const double eg = dist::expect(derived.q_mixing, [&](double th) { return g(th); });
  const double eg2 = dist::expect(derived.q_mixing, [&](double th) { return g(th) * g(th); });
  const double slope = eg * claim_mean;  // E_Q[S_u] = u * slope

  const double inf = std::numeric_limits<double>::infinity();
  const double m = dist::quantile(derived.q_mixing, 0.5);
  const std::vector<EventSpec> events{ThetaIn{-inf, m}, ThetaIn{m, inf}, WholeSpace{}};

  auto table = stats::SampleTable::generate(n, events.size(), [&](std::size_t i, std::span<double> row) {
    RngStream rng(seed, stream_family::kSideA, i);
    const sim::Path p = sim::simulate_path(base, &derived, sim::DerivedQ{}, t, rng);
    const double inc = (sim::aggregate_at(p, t) - t * slope) - (sim::aggregate_at(p, s) - s * slope);
    for (std::size_t c = 0; c < events.size(); ++c) row[c] = occurs(events[c], p) ? inc : 0.0;
  });

  DegeneracyReport out;
  const double var_g = eg2 - eg * eg;
  out.predicted_degenerate = std::abs(var_g) <= 1e-12 * std::max(1.0, eg * eg);
  const double z_crit = stats::bonferroni_z(kFamilyAlpha, events.size());
  out.martingale_observed = true;
  double worst = -1.0;
  for (std::size_t c = 0; c < events.size(); ++c) {
    const auto sm = stats::summarize(table.column(c));
    DegeneracyCell cell;
    cell.event = events[c];
    cell.estimate = sm.mean;
    cell.std_error = sm.std_error;
    cell.z = z_score(sm.mean, sm.std_error);
    if (const auto* th = std::get_if<ThetaIn>(&events[c])) {
      const dist::ExpectOptions restrict{{}, th->lo, th->hi};
      const double mass = dist::expect(derived.q_mixing, [](double) { return 1.0; }, restrict);
      const double eg_a = dist::expect(derived.q_mixing, [&](double v) { return g(v); }, restrict);
      cell.oracle = (t - s) * claim_mean * (eg_a - mass * eg);
    }
    if (!(std::abs(cell.z) <= z_crit)) out.martingale_observed = false;
    if (std::abs(cell.z) >= kViolationSigma) out.violation_detected = true;
    if (std::abs(cell.z) > worst) {
      worst = std::abs(cell.z);
      out.witness = c;
    }
    out.cells.push_back(cell);
  }

  if (out.predicted_degenerate) {
    out.verdict = out.martingale_observed ? Verdict::Pass : Verdict::Fail;
  } else if (out.violation_detected) {
    const auto& w = out.cells[out.witness];
    const bool agrees = std::abs(w.estimate - w.oracle) <= kSigmaBand * w.std_error;
    out.verdict = agrees ? Verdict::Pass : Verdict::Fail;
  } else {
    out.verdict = Verdict::Inconclusive;
  }
  return out;
}

double log_density_drift(const model::DerivedModel& derived, double theta, bool q_side) {
  return drift_at(derived, drift_pieces(derived), theta, q_side);
}

std::vector<SingularityRow> singularity_probe(const model::DerivedModel& derived, std::optional<double> theta,
                                              const std::vector<double>& horizons, std::size_t n,
                                              std::uint64_t seed) {
  const model::BaseModel& base = *derived.base;
  const model::MeasureChange& change = *derived.change;
  const bool include_xi = !theta.has_value();
  std::optional<DriftPieces> pieces;
  try {
    pieces = drift_pieces(derived);
  } catch (const DivergentIntegral&) {
  }

  std::vector<SingularityRow> out;
  for (const bool q_side : {false, true}) {
    const sim::MeasureTag tag = q_side ? q_tag(theta) : p_tag(theta);
    bool have_drift = false;
    double drift_const = 0.0;
    double log_xi_mean = 0.0;
    if (pieces) {
      try {
        drift_const = tag_expect(base, &derived, tag, [&](double th) { return drift_at(derived, *pieces, th, q_side); });
        if (include_xi)
          log_xi_mean = tag_expect(base, &derived, tag, [&](double th) { return std::log(change.xi()(th)); });
        have_drift = true;
      } catch (const Error&) {
        have_drift = false;
      }
    }
    for (std::size_t k = 0; k < horizons.size(); ++k) {
      const double T = horizons[k];
      auto table = stats::SampleTable::generate(n, 1, [&](std::size_t i, std::span<double> row) {
        RngStream rng(seed + k, q_side ? stream_family::kSideB : stream_family::kSideA, i);
        const sim::Path p = sim::simulate_path(base, &derived, tag, T, rng);
        row[0] = sim::log_density_M(p, T, base, change, include_xi);
      });
      const auto col = table.column(0);
      const auto sm = stats::summarize(col);
      std::vector<double> values(col.begin(), col.end());
      SingularityRow row;
      row.horizon = T;
      row.q_side = q_side;
      row.drift = sm.mean / T;
      row.drift_std_error = sm.std_error / T;
      row.q05 = stats::empirical_quantile(values, 0.05);
      row.q50 = stats::empirical_quantile(values, 0.5);
      row.q95 = stats::empirical_quantile(values, 0.95);
      std::size_t below = 0;
      std::size_t above = 0;
      for (double v : values) {
        if (v < -kSingularityThreshold) ++below;
        if (v > kSingularityThreshold) ++above;
      }
      row.fraction_below = static_cast<double>(below) / static_cast<double>(n);
      row.fraction_above = static_cast<double>(above) / static_cast<double>(n);
      if (have_drift) {
        row.oracle_drift = drift_const + log_xi_mean / T;
        row.verdict = make_report(row.drift, row.drift_std_error, n, row.oracle_drift).verdict;
      }
      out.push_back(row);
    }
  }
  return out;
}

std::vector<double> mixed_count_pmf(const model::BaseModel& base, double t, std::size_t k_max) {
  std::vector<double> pmf;
  for (std::size_t k = 0; k <= k_max; ++k) {
    const double kd = static_cast<double>(k);
    pmf.push_back(dist::expect(base.mixing_law(), [&](double th) {
      const double m = t * base.rate(th);
      if (m <= 0.0) return k == 0 ? 1.0 : 0.0;
      return std::exp(-m + kd * std::log(m) - std::lgamma(kd + 1.0));
    }));
  }
  return pmf;
}

}  // namespace cmpp::verify
