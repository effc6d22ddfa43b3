#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cmpp/model.hpp"
#include "cmpp/report.hpp"
#include "cmpp/scenario.hpp"

namespace cmpp::runner {

// Command-line values that take precedence over the scenario file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> paths;
  std::optional<double> horizon;
  std::optional<std::string> output;
  std::optional<std::string> format;
  std::optional<std::string> path_output;
  expr::Bindings params;
  std::vector<std::string> jobs;  // nonempty replaces the scenario's job list
};

// Scenario with overrides applied and parameters bound.
struct Effective {
  scenario::Scenario scenario;
  expr::Bindings params;
  std::vector<std::string> overridden;  // names of the fields a flag replaced
};

Effective apply(const scenario::Scenario& s, const Overrides& o);

// Models described by a scenario. Errors in literals or expressions surface
// as ScenarioError carrying the line of the offending key.
struct Built {
  std::shared_ptr<const model::BaseModel> base;
  std::shared_ptr<const model::MeasureChange> change;  // identity when the scenario has none
  int level = 1;
};

Built build(const Effective& e);

struct RunResult {
  std::vector<report::Row> rows;
  int exit_code = 0;  // 0 when no row failed, 1 otherwise
};

// Executes the job list in order. Throws ScenarioError for invalid input.
RunResult run(const Effective& e);

// Where the report goes: the explicit path (relative paths are placed under
// CMPP_OUTPUT_DIR when it is set), else CMPP_OUTPUT_DIR/<name>.<ext>, else "-".
std::string destination(const Effective& e);

}  // namespace cmpp::runner
