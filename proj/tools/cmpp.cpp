// Command-line front end: runs scenario files or builtin scenarios and writes
// a report. Exit status: 0 all verdicts pass, 1 some verdict failed, 2 usage
// or scenario error.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cmpp/errors.hpp"
#include "cmpp/runner.hpp"
#include "cmpp/scenario.hpp"

namespace {

struct Flags {
  std::string scenario;
  std::uint64_t seed = 0;
  std::size_t paths = 0;
  double horizon = 0.0;
  std::string output;
  std::string format;
  std::string path_output;
  std::vector<std::string> params;
  std::vector<std::string> jobs;
};

void add_run_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("scenario", f.scenario, "scenario file or builtin name")->required();
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--paths", f.paths, "paths per Monte Carlo estimate (>= 100)");
  cmd->add_option("--horizon", f.horizon, "simulation horizon");
  cmd->add_option("--output", f.output, "report destination; '-' for stdout");
  cmd->add_option("--format", f.format, "csv or json-lines")->check(CLI::IsMember({"csv", "json-lines"}));
  cmd->add_option("--paths-file", f.path_output, "write simulated paths as JSON lines");
  cmd->add_option("--param", f.params, "scenario parameter override, name=value");
}

cmpp::runner::Overrides to_overrides(const CLI::App* cmd, const Flags& f) {
  cmpp::runner::Overrides o;
  if (cmd->count("--seed")) o.seed = f.seed;
  if (cmd->count("--paths")) o.paths = f.paths;
  if (cmd->count("--horizon")) o.horizon = f.horizon;
  if (cmd->count("--output")) o.output = f.output;
  if (cmd->count("--format")) o.format = f.format;
  if (cmd->count("--paths-file")) o.path_output = f.path_output;
  for (const auto& p : f.params) {
    const auto eq = p.find('=');
    if (eq == std::string::npos || eq == 0) throw cmpp::ScenarioError(0, "--param expects name=value, got '" + p + "'");
    const std::string name = p.substr(0, eq);
    try {
      o.params[name] = cmpp::expr::RealFn::parse(p.substr(eq + 1)).eval(0.0);
    } catch (const cmpp::Error& e) {
      throw cmpp::ScenarioError(0, "--param " + name + ": " + e.what());
    }
  }
  o.jobs = f.jobs;
  return o;
}

int execute(const CLI::App* cmd, const Flags& f) {
  const auto s = cmpp::scenario::resolve(f.scenario);
  const auto effective = cmpp::runner::apply(s, to_overrides(cmd, f));
  const auto result = cmpp::runner::run(effective);
  cmpp::report::write(result.rows, effective.scenario.format, cmpp::runner::destination(effective));
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compound mixed Poisson measure-change lab"};
  app.require_subcommand(1);

  Flags run_flags;
  auto* run = app.add_subcommand("run", "run every job listed in a scenario");
  add_run_flags(run, run_flags);
  run->add_option("--job", run_flags.jobs, "run only these jobs (repeatable)");

  auto* list = app.add_subcommand("list", "list builtin scenarios");
  std::string show_name;
  auto* show = app.add_subcommand("show", "print a builtin scenario");
  show->add_option("name", show_name, "builtin name")->required();

  // One subcommand per job, running just that job.
  const std::vector<std::string> jobs = {"simulate",           "validate",          "derive-q",
                                         "verify-reweighting", "verify-martingale", "degeneracy",
                                         "singularity",        "premium"};
  std::vector<Flags> job_flags(jobs.size());
  std::vector<CLI::App*> job_cmds;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    auto* cmd = app.add_subcommand(jobs[i], "run only the " + jobs[i] + " job");
    add_run_flags(cmd, job_flags[i]);
    job_flags[i].jobs = {jobs[i]};
    job_cmds.push_back(cmd);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*list) {
      for (const auto& name : cmpp::scenario::builtin_names()) std::cout << name << '\n';
      return 0;
    }
    if (*show) {
      const auto text = cmpp::scenario::builtin_text(show_name);
      if (!text) throw cmpp::ScenarioError(0, "unknown builtin scenario '" + show_name + "'");
      std::cout << *text;
      return 0;
    }
    if (*run) return execute(run, run_flags);
    for (std::size_t i = 0; i < job_cmds.size(); ++i)
      if (*job_cmds[i]) return execute(job_cmds[i], job_flags[i]);
  } catch (const cmpp::ScenarioError& e) {
    std::cerr << "cmpp: scenario error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "cmpp: error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
