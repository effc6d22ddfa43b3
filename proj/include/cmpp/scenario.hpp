#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cmpp/expr.hpp"

namespace cmpp::scenario {

// Values in a scenario file: numbers, double-quoted strings, and bracketed
// lists of values.
struct Value {
  enum class Kind { Number, String, List };
  Kind kind = Kind::Number;
  double number = 0.0;
  std::string text;
  std::vector<Value> items;
};

struct Entry {
  std::string key;
  Value value;
  int line = 0;
};

struct Section {
  std::string name;  // empty for keys before the first header
  std::vector<Entry> entries;
  int line = 0;
};

// Line-oriented syntax:
//
//   # comment
//   name = "my-scenario"
//   [base]
//   claim = "gamma(rate=c+1, shape=2)"
//   [verify]
//   pairs = [[0.5, 1], [1, 2]]
//
// Keys are bare words or quoted strings. Throws ScenarioError with the line.
std::vector<Section> parse_document(std::string_view text);

struct ChangeSpec {
  std::string alpha = "0";
  std::string gamma = "0";
  std::string xi = "1";
  std::string preset;  // "", "esscher" or "expected-value"
  std::string preset_c;
  int level = 1;
};

struct Scenario {
  std::string name;
  std::vector<std::pair<std::string, std::string>> params;  // name, constant expression
  std::string claim;
  std::string mixing;
  std::string rate = "theta";
  std::optional<ChangeSpec> change;

  std::size_t paths = 10000;
  std::uint64_t seed = 1;
  double horizon = 1.0;

  std::vector<double> verify_thetas;
  std::vector<std::pair<double, double>> pairs{{0.5, 1.0}, {1.0, 2.0}};
  double threshold = 10.0;  // level of the aggregate-exceedance functional
  // "p-to-q": simulate under P and weight by M; "q-to-p": simulate under Q and
  // weight by 1/M. Also picks the side of the density martingale check.
  std::string direction = "p-to-q";

  std::size_t degeneracy_paths = 0;  // 0 means `paths`
  double degeneracy_s = 1.0;
  double degeneracy_t = 2.0;

  std::optional<double> singularity_theta;
  std::vector<double> singularity_horizons{10.0, 50.0};

  std::vector<double> premium_thetas;
  std::string j_integral_c;  // constant expression; empty when unused

  std::vector<std::pair<std::string, double>> annotations;  // quantity -> annotated reference value

  std::string format = "csv";
  std::string output;       // empty: CMPP_OUTPUT_DIR/<name>.<ext> or stdout
  std::string path_output;  // optional JSON-lines dump of simulated paths

  std::vector<std::string> jobs;

  // "section.key" -> line, for diagnostics raised after loading.
  std::map<std::string, int> lines;
  int line_of(const std::string& section_key) const {
    auto it = lines.find(section_key);
    return it == lines.end() ? 0 : it->second;
  }
};

inline constexpr std::size_t kMinPaths = 100;

Scenario load(std::string_view text);
Scenario load_file(const std::string& path);

std::vector<std::string> builtin_names();
std::optional<std::string> builtin_text(std::string_view name);

// A file path when one exists, otherwise a builtin name. Throws ScenarioError
// naming the scenario when neither resolves.
Scenario resolve(const std::string& path_or_name);

// Evaluates the scenario's parameter list in order (later entries may refer to
// earlier ones), then applies `overrides`.
expr::Bindings bind_params(const Scenario& s, const expr::Bindings& overrides = {});

bool is_known_job(std::string_view job);

}  // namespace cmpp::scenario
