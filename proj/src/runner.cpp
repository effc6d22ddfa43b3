#include "cmpp/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <fstream>

#include "cmpp/errors.hpp"
#include "cmpp/premium.hpp"
#include "cmpp/quadrature.hpp"
#include "cmpp/sim.hpp"
#include "cmpp/verify.hpp"

namespace cmpp::runner {

namespace {

using report::Row;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

bool close(double a, double b, double rel) { return std::abs(a - b) <= rel * std::max(1.0, std::abs(b)); }

std::string verdict_of(verify::Verdict v) { return verify::to_string(v); }

template <typename F>
auto at_line(const scenario::Scenario& s, const std::string& key, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ScenarioError&) {
    throw;
  } catch (const std::exception& ex) {
    throw ScenarioError(static_cast<std::size_t>(s.line_of(key)), key + ": " + ex.what());
  }
}

double constant_expression(const scenario::Scenario& s, const std::string& key, const std::string& text,
                           const expr::Bindings& params) {
  return at_line(s, key, [&] {
    const auto f = expr::RealFn::parse(text, params);
    if (!f.is_constant()) throw Error("expected a constant expression");
    return f.eval(0.0);
  });
}

class Job {
 public:
  // Rows live in a deque so references returned by row() stay valid.
  Job(const Effective& e, const Built& b, std::deque<Row>& rows) : e_(e), s_(e.scenario), b_(b), rows_(rows) {}

  void run(const std::string& name) {
    job_ = name;
    if (name == "validate") {
      validate();
    } else if (name == "derive-q") {
      derive_q();
    } else if (name == "simulate") {
      simulate();
    } else if (name == "verify-reweighting") {
      reweighting();
    } else if (name == "verify-martingale") {
      martingale();
    } else if (name == "degeneracy") {
      degeneracy();
    } else if (name == "singularity") {
      singularity();
    } else if (name == "premium") {
      premium();
    }
  }

 private:
  Row& row(const std::string& quantity) {
    Row r;
    r.scenario = s_.name;
    r.job = job_;
    r.quantity = quantity;
    r.seed = s_.seed;
    rows_.push_back(std::move(r));
    return rows_.back();
  }

  void mc_row(const std::string& quantity, const verify::MCReport& m) {
    Row& r = row(quantity);
    r.estimate = m.estimate;
    r.std_error = m.std_error;
    r.oracle = m.oracle;
    r.verdict = verdict_of(m.verdict);
  }

  const model::AdmissibilityReport& admissibility() {
    if (!report_) report_ = model::validate_change(*b_.base, *b_.change, b_.level);
    return *report_;
  }

  // Null when the change does not validate; a failing row says so.
  const model::DerivedModel* derived() {
    if (derived_) return &*derived_;
    const auto& rep = admissibility();
    if (!rep.pass) {
      if (!reported_unavailable_) {
        Row& r = row("derived model");
        r.verdict = "fail";
        r.detail = "change is not admissible";
        reported_unavailable_ = true;
      }
      return nullptr;
    }
    derived_ = model::derive_q_model(*b_.base, *b_.change, rep);
    return &*derived_;
  }

  std::vector<double> thetas_or_median() {
    if (!s_.verify_thetas.empty()) return s_.verify_thetas;
    return {dist::quantile(b_.base->mixing_law(), 0.5)};
  }

  void validate() {
    const auto& rep = admissibility();
    auto norm = [&](const char* name, double v) {
      Row& r = row(name);
      r.estimate = v;
      r.oracle = 1.0;
      r.verdict = std::abs(v - 1.0) <= model::kNormTolerance ? "pass" : "fail";
    };
    norm("gamma_norm", rep.gamma_norm);
    norm("xi_norm", rep.xi_norm);
    Row& pos = row("xi_positive");
    pos.verdict = rep.xi_positive ? "pass" : "fail";
    const char* gates[] = {"claim_gate_1", "claim_gate_2", "mixing_gate_1", "mixing_gate_2"};
    const double values[] = {rep.claim_gate[0], rep.claim_gate[1], rep.mixing_gate[0], rep.mixing_gate[1]};
    for (int i = 0; i < 4; ++i) row(gates[i]).estimate = values[i];
    Row& lvl = row("level");
    lvl.estimate = rep.level_achieved;
    lvl.detail = "requested " + std::to_string(rep.level_requested);
    Row& adm = row("admissible");
    adm.verdict = rep.pass ? "pass" : "fail";
    for (const auto& f : rep.failures) adm.detail += (adm.detail.empty() ? "" : "; ") + f;
  }

  void derive_q() {
    const auto* d = derived();
    if (!d) return;
    row("g").detail = d->g.print();
    Row& qc = row("q_claim");
    qc.detail = d->q_claim.literal();
    row("q_mixing").detail = d->q_mixing.literal();

    Row& ex = row("E_Q[X]");
    ex.estimate = d->tilted_claim_mean;
    if (d->claim_in_catalog) {
      ex.oracle = dist::mean(d->q_claim);
      ex.verdict = close(*ex.estimate, *ex.oracle, 1e-9) ? "pass" : "fail";
      ex.detail = "quadrature vs closed form";
    }

    Row& eg = row("E_Q[g(Theta)]");
    try {
      eg.estimate = dist::expect(d->q_mixing, [&](double th) { return d->g(th); });
      const auto& xi = d->change->xi();
      eg.oracle = dist::expect(b_.base->mixing_law(), [&](double th) { return xi(th) * d->g(th); });
      eg.verdict = close(*eg.estimate, *eg.oracle, 1e-8) ? "pass" : "fail";
      eg.detail = "Q mixing vs xi-weighted P mixing";
    } catch (const DivergentIntegral& ex2) {
      eg.estimate = std::numeric_limits<double>::infinity();
      eg.detail = ex2.what();
    }
  }

  void simulate() {
    const double T = s_.horizon;
    const auto& base = *b_.base;
    auto count = [](const sim::Path& p, double t) { return static_cast<double>(sim::count_at(p, t)); };
    auto aggregate = [](const sim::Path& p, double t) { return sim::aggregate_at(p, t); };

    const double eh = dist::expect(base.mixing_law(), [&](double th) { return base.rate(th); });
    auto pr = verify::mc_estimate_battery({count, aggregate}, base, nullptr, sim::BaseP{}, T, s_.paths, s_.seed,
                                          stream_family::kSideA);
    mc_row("E_P[N_T]", verify::make_report(pr[0].estimate, pr[0].std_error, pr[0].n, T * eh));
    mc_row("E_P[S_T]", verify::make_report(pr[1].estimate, pr[1].std_error, pr[1].n, T * eh * base.claim_mean()));

    if (const auto* d = derived()) {
      const double eg = dist::expect(d->q_mixing, [&](double th) { return d->g(th); });
      auto qr = verify::mc_estimate_battery({count, aggregate}, base, d, sim::DerivedQ{}, T, s_.paths, s_.seed,
                                            stream_family::kSideB);
      mc_row("E_Q[N_T]", verify::make_report(qr[0].estimate, qr[0].std_error, qr[0].n, T * eg));
      mc_row("E_Q[S_T]",
             verify::make_report(qr[1].estimate, qr[1].std_error, qr[1].n, T * eg * d->tilted_claim_mean));
    }

    if (!s_.path_output.empty()) {
      std::ofstream out(s_.path_output, std::ios::binary | std::ios::trunc);
      if (!out) throw Error("cannot open path output '" + s_.path_output + "'");
      for (std::size_t i = 0; i < s_.paths; ++i) {
        RngStream rng(s_.seed, stream_family::kSideA, i);
        sim::write_path(out, sim::simulate_path(base, nullptr, sim::BaseP{}, T, rng));
      }
      if (!out) throw Error("failed writing paths to '" + s_.path_output + "'");
      row("paths_file").detail = s_.path_output;
    }
  }

  void reweighting() {
    const auto* d = derived();
    if (!d) return;
    const double T = s_.horizon;
    const double q = s_.threshold;
    const std::vector<std::pair<std::string, verify::PathFunctional>> fs = {
        {"1", [](const sim::Path&, double) { return 1.0; }},
        {"N_t", [](const sim::Path& p, double t) { return static_cast<double>(sim::count_at(p, t)); }},
        {"S_t", [](const sim::Path& p, double t) { return sim::aggregate_at(p, t); }},
        {"1{N_t=0}", [](const sim::Path& p, double t) { return sim::count_at(p, t) == 0 ? 1.0 : 0.0; }},
        {"1{S_t>" + fmt(q) + "}", [q](const sim::Path& p, double t) { return sim::aggregate_at(p, t) > q ? 1.0 : 0.0; }},
    };
    std::vector<verify::PathFunctional> only;
    for (const auto& f : fs) only.push_back(f.second);

    const bool forward = s_.direction == "p-to-q";
    const auto direction = forward ? verify::Direction::PToQ : verify::Direction::QToP;
    const auto& change = *d->change;
    const auto& base = *b_.base;

    // Normalisation of the weight itself: E_P[M_t] or E_Q[1/M_t].
    const double sign = forward ? 1.0 : -1.0;
    auto m = verify::mc_estimate_battery(
        {[&](const sim::Path& p, double t) { return std::exp(sign * sim::log_density_M(p, t, base, change, true)); }},
        base, d, forward ? sim::MeasureTag{sim::BaseP{}} : sim::MeasureTag{sim::DerivedQ{}}, T, s_.paths, s_.seed,
        stream_family::kSideA);
    mc_row(forward ? "E_P[M_t]" : "E_Q[1/M_t]", verify::make_report(m[0].estimate, m[0].std_error, m[0].n, 1.0));

    std::vector<std::optional<double>> conditions{std::nullopt};
    for (double th : s_.verify_thetas) conditions.emplace_back(th);
    for (const auto& theta : conditions) {
      const std::string suffix = theta ? " | theta=" + fmt(*theta) : "";
      Row& w2 = row(std::string(forward ? "E_P[M_t^2]" : "E_Q[M_t^-2]") + suffix);
      w2.estimate = verify::weight_second_moment(*d, theta, T, direction);
      w2.detail = "second moment of the importance weight";

      const auto results = verify::check_reweighting(only, *d, theta, T, s_.paths, s_.seed, direction);
      for (std::size_t j = 0; j < fs.size(); ++j) {
        const auto& r = results[j];
        Row& out = row("reweight " + fs[j].first + suffix);
        out.estimate = r.difference;
        out.std_error = r.pooled_std_error;
        out.oracle = 0.0;
        out.verdict = verdict_of(r.verdict);
        out.detail = std::string(forward ? "P->Q" : "Q->P") + " direct=" + report::format_double(r.direct.estimate) +
                     " weighted=" + report::format_double(r.weighted.estimate);
      }
    }
  }

  void table_rows(const std::string& label, const verify::MartingaleTable& t, bool expect_rejection) {
    double worst = 0.0;
    bool oracle_ok = true;
    for (const auto& c : t.cells) {
      Row& r = row(label + " s=" + fmt(c.s) + " t=" + fmt(c.t) + " A=" + verify::describe(c.event));
      r.estimate = c.estimate;
      r.std_error = c.std_error;
      r.oracle = c.oracle;
      worst = std::max(worst, std::abs(c.z));
      if (expect_rejection) {
        if (c.oracle) {
          const bool ok = std::abs(c.estimate - *c.oracle) <= verify::kSigmaBand * c.std_error;
          r.verdict = ok ? "pass" : "fail";
          oracle_ok = oracle_ok && ok;
        }
      } else {
        r.verdict = std::abs(c.z) <= t.z_critical ? "pass" : "fail";
      }
      r.detail = "z=" + fmt(c.z);
    }
    Row& sum = row(label + (expect_rejection ? " rejects martingale" : " martingale"));
    sum.estimate = worst;
    sum.detail = "max |z| over " + std::to_string(t.cells.size()) + " cells; threshold " + fmt(t.z_critical);
    if (expect_rejection)
      sum.verdict = t.verdict == verify::Verdict::Fail && oracle_ok ? "pass" : "fail";
    else
      sum.verdict = verdict_of(t.verdict);
  }

  void martingale() {
    const auto* d = derived();
    if (!d) return;
    const auto& base = *b_.base;
    const std::uint64_t seed = s_.seed;
    table_rows("V|Q", verify::check_martingale(verify::VChangeProcess{}, base, d, sim::DerivedQ{}, s_.pairs, {},
                                               s_.paths, seed),
               false);
    table_rows("Y|P", verify::check_martingale(verify::YBaseProcess{}, base, d, sim::BaseP{}, s_.pairs, {},
                                               s_.paths, seed),
               false);
    table_rows("S|Q", verify::check_martingale(verify::RawAggregate{}, base, d, sim::DerivedQ{}, s_.pairs, {},
                                               s_.paths, seed),
               true);
    const bool forward = s_.direction == "p-to-q";
    for (double th : thetas_or_median()) {
      const sim::MeasureTag tag = forward ? sim::MeasureTag{sim::ConditionalP{th}} : sim::MeasureTag{sim::ConditionalQ{th}};
      table_rows((forward ? "M|P_theta=" : "1/M|Q_theta=") + fmt(th),
                 verify::check_martingale(verify::DensityProcess{!forward}, base, d, tag, s_.pairs, {}, s_.paths,
                                          seed),
                 false);
    }
  }

  void degeneracy() {
    const auto* d = derived();
    if (!d) return;
    const std::size_t n = s_.degeneracy_paths ? s_.degeneracy_paths : s_.paths;
    const auto rep = verify::degeneracy_test(*d, n, s_.seed, s_.degeneracy_s, s_.degeneracy_t);
    for (const auto& c : rep.cells) {
      Row& r = row("E_Q[1_A dV] A=" + verify::describe(c.event));
      r.estimate = c.estimate;
      r.std_error = c.std_error;
      r.oracle = c.oracle;
      r.verdict = std::abs(c.estimate - c.oracle) <= verify::kSigmaBand * c.std_error ? "pass" : "fail";
      r.detail = "z=" + fmt(c.z);
    }
    Row& sum = row("degeneracy dichotomy");
    sum.estimate = rep.cells[rep.witness].z;
    sum.verdict = verdict_of(rep.verdict);
    sum.detail = std::string(rep.predicted_degenerate ? "g degenerate under Q" : "g not degenerate under Q") +
                 (rep.martingale_observed ? "; martingale observed" : "") +
                 (rep.violation_detected ? "; violation at >= 5 sigma" : "");
  }

  void singularity() {
    const auto* d = derived();
    if (!d) return;
    const auto rows = verify::singularity_probe(*d, s_.singularity_theta, s_.singularity_horizons, s_.paths, s_.seed);
    const std::string cond = s_.singularity_theta ? "_theta=" + fmt(*s_.singularity_theta) : "";
    std::vector<double> below;
    for (const auto& r : rows) {
      const std::string side = std::string(r.q_side ? "Q" : "P") + cond;
      Row& dr = row("ln M_T/T | " + side + " T=" + fmt(r.horizon));
      dr.estimate = r.drift;
      dr.std_error = r.drift_std_error;
      dr.oracle = r.oracle_drift;
      dr.verdict = verdict_of(r.verdict);
      dr.detail = "q05=" + report::format_double(r.q05) + " q50=" + report::format_double(r.q50) +
                  " q95=" + report::format_double(r.q95);
      Row& fb = row("P(ln M_T<-5) | " + side + " T=" + fmt(r.horizon));
      fb.estimate = r.fraction_below;
      Row& fa = row("P(ln M_T>5) | " + side + " T=" + fmt(r.horizon));
      fa.estimate = r.fraction_above;
      if (!r.q_side) below.push_back(r.fraction_below);
    }
    if (below.size() >= 2) {
      Row& mono = row("P(ln M_T<-5) increasing in T | P" + cond);
      bool increasing = true;
      for (std::size_t i = 1; i < below.size(); ++i) increasing = increasing && below[i] > below[i - 1];
      mono.verdict = increasing ? "pass" : "fail";
    }
  }

  void premium() {
    const auto* d = derived();
    const auto& base = *b_.base;
    const auto quote = premium::premium_density(base, d);
    row("p(P)").estimate = quote.p_base;

    Row& pq = row("p(Q)");
    pq.estimate = quote.p_derived;
    pq.oracle = quote.p_derived_check;
    pq.verdict = close(quote.p_derived, quote.p_derived_check, 1e-8) ? "pass" : "fail";
    pq.detail = quote.method == premium::Method::ClosedForm ? "closed-form laws" : "quadrature";

    row("p(P_theta)").detail = quote.per_theta_base.print();
    row("p(Q_theta)").detail = quote.per_theta_derived.print();

    Row& c13 = row("cond13");
    c13.estimate = quote.cond13.margin;
    c13.detail = std::string(quote.cond13.holds ? "holds" : "does not hold") + ": p(P)=" +
                 report::format_double(quote.cond13.lower) + " p(Q)=" + report::format_double(quote.cond13.upper);

    if (d) {
      for (double th : s_.premium_thetas) {
        const auto v = premium::check_condition_14(th, *d);
        Row& r = row("cond14 | theta=" + fmt(th));
        r.estimate = v.margin;
        r.detail = std::string(v.holds ? "holds" : "does not hold") + ": p(P_theta)=" +
                   report::format_double(v.lower) + " p(Q_theta)=" + report::format_double(v.upper);
      }
      if (std::isfinite(quote.p_derived)) {
        auto mc = verify::mc_estimate_battery({[](const sim::Path& p, double) { return sim::aggregate_at(p, 1.0); }},
                                              base, d, sim::DerivedQ{}, 1.0, s_.paths, s_.seed,
                                              stream_family::kSideB)[0];
        Row& r = row("p(Q) by simulation");
        r.estimate = mc.estimate;
        r.std_error = mc.std_error;
        r.oracle = quote.p_derived;
        r.verdict = std::abs(mc.estimate - quote.p_derived) <= 4.0 * mc.std_error ? "pass" : "fail";
        r.detail = "within 4 standard errors";
      }
    }
    Row& sched = row("p_t | t=0 T=1");
    sched.estimate = premium::premium_schedule(quote, 0.0, 1.0);

    if (!s_.j_integral_c.empty()) {
      const double c = constant_expression(s_, "premium.j_integral_c", s_.j_integral_c, e_.params);
      Row& j = row("J(c) | c=" + fmt(c));
      try {
        j.estimate = premium::j_integral(c);
        j.oracle = quad::integrate([c](double th) { return th * (c + th) / ((c + 1 + th) * (c + 1 + th)); }, 0.0,
                                   1.0)
                       .value;
        j.verdict = close(*j.estimate, *j.oracle, 1e-8) ? "pass" : "fail";
        Row& pj = row("2(c+1)^2 J(c)");
        pj.estimate = 2.0 * (c + 1.0) * (c + 1.0) * *j.estimate;
        pj.oracle = quote.p_derived;
        pj.verdict = close(*pj.estimate, *pj.oracle, 1e-8) ? "pass" : "fail";

        Row& crit = row("cond13 via J(c)");
        const double bound = (2.0 / 3.0) / ((c + 1.0) * (c + 1.0) * (c + 1.0));
        crit.estimate = *j.estimate - bound;
        const bool via_j = *j.estimate > bound;
        crit.verdict = via_j == quote.cond13.holds ? "pass" : "fail";
        crit.detail = std::string("J(c) ") + (via_j ? ">" : "<=") + " (2/3)(c+1)^-3";
      } catch (const AssumptionViolated& ex) {
        j.verdict = "fail";
        j.detail = ex.what();
      }
    }
  }

  const Effective& e_;
  const scenario::Scenario& s_;
  const Built& b_;
  std::deque<Row>& rows_;
  std::string job_;
  std::optional<model::AdmissibilityReport> report_;
  std::optional<model::DerivedModel> derived_;
  bool reported_unavailable_ = false;
};

}  // namespace

Effective apply(const scenario::Scenario& s, const Overrides& o) {
  Effective e;
  e.scenario = s;
  auto& sc = e.scenario;
  if (o.seed) {
    sc.seed = *o.seed;
    e.overridden.push_back("seed");
  }
  if (o.paths) {
    if (*o.paths < scenario::kMinPaths) throw ScenarioError(0, "--paths must be at least 100");
    sc.paths = *o.paths;
    e.overridden.push_back("paths");
  }
  if (o.horizon) {
    if (!(*o.horizon > 0.0)) throw ScenarioError(0, "--horizon must be positive");
    sc.horizon = *o.horizon;
    e.overridden.push_back("horizon");
  }
  if (o.output) {
    sc.output = *o.output;
    e.overridden.push_back("output");
  }
  if (o.format) {
    if (*o.format != "csv" && *o.format != "json-lines")
      throw ScenarioError(0, "--format must be csv or json-lines");
    sc.format = *o.format;
    e.overridden.push_back("format");
  }
  if (o.path_output) {
    sc.path_output = *o.path_output;
    e.overridden.push_back("paths_file");
  }
  if (!o.jobs.empty()) {
    for (const auto& j : o.jobs)
      if (!scenario::is_known_job(j)) throw ScenarioError(0, "unknown job '" + j + "'");
    sc.jobs = o.jobs;
    e.overridden.push_back("jobs");
  }
  for (const auto& [name, value] : o.params) e.overridden.push_back("param " + name);
  e.params = scenario::bind_params(sc, o.params);
  return e;
}

Built build(const Effective& e) {
  const auto& s = e.scenario;
  const auto& params = e.params;
  Built b;
  auto claim = at_line(s, "base.claim", [&] { return dist::parse_literal(s.claim, params); });
  auto mixing = at_line(s, "base.mixing", [&] { return dist::parse_literal(s.mixing, params); });
  auto rate = at_line(s, "base.rate", [&] { return expr::RealFn::parse(s.rate, params); });
  b.base = at_line(s, "base.claim",
                   [&] { return std::make_shared<const model::BaseModel>(claim, mixing, rate); });

  if (!s.change) {
    b.change = std::make_shared<const model::MeasureChange>(model::MeasureChange::identity());
    return b;
  }
  const auto& c = *s.change;
  b.level = c.level;
  auto xi = at_line(s, "change.xi", [&] { return expr::RealFn::parse(c.xi, params); });
  if (c.preset == "esscher") {
    const double k = constant_expression(s, "change.c", c.preset_c, params);
    b.change = at_line(s, "change.c", [&] {
      return std::make_shared<const model::MeasureChange>(premium::esscher_change(k, *b.base, xi));
    });
  } else if (c.preset == "expected-value") {
    const double k = constant_expression(s, "change.c", c.preset_c, params);
    b.change = at_line(s, "change.c", [&] {
      return std::make_shared<const model::MeasureChange>(premium::expected_value_change(k, xi));
    });
  } else {
    auto alpha = at_line(s, "change.alpha", [&] { return expr::RealFn::parse(c.alpha, params); });
    auto gamma = at_line(s, "change.gamma", [&] { return expr::RealFn::parse(c.gamma, params); });
    b.change = at_line(s, "change.alpha", [&] {
      return std::make_shared<const model::MeasureChange>(alpha, gamma, xi);
    });
  }
  return b;
}

RunResult run(const Effective& e) {
  const Built b = build(e);
  RunResult out;
  const auto& s = e.scenario;

  auto meta = [&](const std::string& quantity, std::optional<double> value, const std::string& detail) {
    Row r;
    r.scenario = s.name;
    r.job = "run";
    r.quantity = quantity;
    r.estimate = value;
    r.seed = s.seed;
    r.detail = detail;
    out.rows.push_back(std::move(r));
  };
  auto flag = [&](const std::string& name) {
    return std::find(e.overridden.begin(), e.overridden.end(), name) != e.overridden.end() ? "override"
                                                                                             : "scenario";
  };
  meta("paths", static_cast<double>(s.paths), flag("paths"));
  meta("horizon", s.horizon, flag("horizon"));
  meta("seed", std::nullopt, flag("seed"));
  for (const auto& [name, value] : e.params) meta("param " + name, value, flag("param " + name));

  std::deque<Row> job_rows;
  Job job(e, b, job_rows);
  for (const auto& name : s.jobs) job.run(name);
  out.rows.insert(out.rows.end(), job_rows.begin(), job_rows.end());

  for (auto& r : out.rows) {
    for (const auto& [quantity, value] : s.annotations)
      if (r.quantity == quantity) r.paper_value = value;
    if (r.verdict == "fail") out.exit_code = 1;
  }
  return out;
}

std::string destination(const Effective& e) {
  const auto& s = e.scenario;
  const char* dir = std::getenv("CMPP_OUTPUT_DIR");
  if (!s.output.empty()) {
    if (s.output == "-") return s.output;
    std::filesystem::path p(s.output);
    if (p.is_relative() && dir && *dir) p = std::filesystem::path(dir) / p;
    return p.string();
  }
  if (dir && *dir) {
    const std::string ext = s.format == "csv" ? ".csv" : ".jsonl";
    return (std::filesystem::path(dir) / (s.name + ext)).string();
  }
  return "-";
}

}  // namespace cmpp::runner
