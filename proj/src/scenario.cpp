#include "cmpp/scenario.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cmpp/errors.hpp"

namespace cmpp::scenario {

namespace {

constexpr std::array<std::string_view, 8> kJobs = {"simulate",           "validate",          "derive-q",
                                                   "verify-reweighting", "verify-martingale", "degeneracy",
                                                   "singularity",        "premium"};

// --- builtin scenarios ------------------------------------------------------

constexpr std::string_view kExampleEsscher = R"sc(# Esscher change of the claim law over the gamma-mixed exponential base.
name = "example-6.1a"

[base]
claim = "exp(rate=0.2)"
mixing = "gamma(rate=2, shape=2)"

[change]
preset = "esscher"
c = 0.05

[mc]
paths = 100000
seed = 20190521
horizon = 1

[verify]
thetas = [0.5, 1, 2]
pairs = [[0.5, 1], [1, 2]]
threshold = 10

[premium]
thetas = [0.5, 1, 2]

[run]
jobs = ["validate", "derive-q", "simulate", "verify-reweighting", "verify-martingale", "premium"]
)sc";

constexpr std::string_view kExampleExpectedValue = R"sc(# Expected-value loading: constant intensity multiplier exp(c).
name = "example-6.1b"

[params]
c = "ln(2)"

[base]
claim = "exp(rate=0.2)"
mixing = "gamma(rate=2, shape=2)"

[change]
preset = "expected-value"
c = "c"

[mc]
paths = 100000
seed = 20190521
horizon = 1

[verify]
thetas = [1]
pairs = [[0.5, 1], [1, 2]]
threshold = 10

[singularity]
theta = 1
horizons = [10, 50]

[premium]
thetas = [0.5, 1, 2]

[run]
jobs = ["validate", "derive-q", "verify-reweighting", "singularity", "premium"]
)sc";

constexpr std::string_view kExampleGammaMixed = R"sc(# Exponential claims, gamma mixing; the change squares the intensity.
name = "example-6.2"

[base]
claim = "exp(rate=0.2)"
mixing = "gamma(rate=2, shape=2)"

[change]
alpha = "ln(theta)"
gamma = "ln(x/5)"
xi = "27/8*theta^2*exp(-theta)"

[mc]
paths = 100000
seed = 20190521
horizon = 1

[verify]
thetas = [0.5, 1, 2]
pairs = [[0.5, 1], [1, 2]]
threshold = 10

[degeneracy]
paths = 1000000
s = 1
t = 2

[premium]
thetas = [0.4, 0.5, 0.6, 1]

# Reference values recorded alongside this example. The last two are not
# reproduced by quadrature and are kept for comparison only.
[annotations]
"p(P)" = 5
"E_Q[X]" = 10
"E_Q[g(Theta)]" = 81
"p(Q)" = 810

[run]
jobs = ["validate", "derive-q", "simulate", "verify-reweighting", "verify-martingale", "degeneracy", "premium"]
)sc";

constexpr std::string_view kExampleBetaMixed = R"sc(# Gamma claims with beta(2, 1) mixing; the change makes the mixing uniform.
name = "example-6.3"

[params]
c = 1

[base]
claim = "gamma(rate=c+1, shape=2)"
mixing = "beta(2, 1)"

[change]
alpha = "ln(c+theta) + 2*ln((c+1)/(c+1+theta))"
gamma = "c*x - 2*ln(c+1)"
xi = "1/(2*theta)"

[mc]
paths = 100000
seed = 20190521
horizon = 1

[verify]
thetas = [0.25, 0.5, 0.75]
pairs = [[0.5, 1], [1, 2]]
threshold = 4
# E_P[M^2] diverges for this change; 1/M under Q has finite variance.
direction = "q-to-p"

[premium]
thetas = [0.25, 0.5, 0.75]
j_integral_c = "c"

[run]
jobs = ["validate", "derive-q", "simulate", "verify-reweighting", "verify-martingale", "premium"]
)sc";

constexpr std::string_view kClassical = R"sc(# No mixing: a compound Poisson process with an Esscher change.
name = "classical-cpp"

[base]
claim = "exp(rate=0.2)"
mixing = "degenerate(1)"

[change]
preset = "esscher"
c = 0.05

[mc]
paths = 100000
seed = 20190521
horizon = 1

[verify]
pairs = [[0.5, 1], [1, 2]]
threshold = 10

[degeneracy]
paths = 1000000
s = 1
t = 2

[premium]
thetas = [1]

[run]
jobs = ["validate", "derive-q", "simulate", "verify-martingale", "degeneracy", "premium"]
)sc";

struct Builtin {
  std::string_view name;
  std::string_view text;
};

constexpr std::array<Builtin, 5> kBuiltins = {{{"example-6.1a", kExampleEsscher},
                                               {"example-6.1b", kExampleExpectedValue},
                                               {"example-6.2", kExampleGammaMixed},
                                               {"example-6.3", kExampleBetaMixed},
                                               {"classical-cpp", kClassical}}};

// --- document parser --------------------------------------------------------

class LineParser {
 public:
  LineParser(std::string_view s, int line) : s_(s), line_(line) {}

  void skip_space() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool at_end_or_comment() {
    skip_space();
    return pos_ >= s_.size() || s_[pos_] == '#' || s_[pos_] == ';';
  }

  std::string quoted() {
    ++pos_;  // opening quote
    std::string out;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      if (s_[pos_] == '\\' && pos_ + 1 < s_.size()) ++pos_;
      out += s_[pos_++];
    }
    if (pos_ >= s_.size()) fail("unterminated string");
    ++pos_;
    return out;
  }

  std::string key() {
    skip_space();
    if (pos_ < s_.size() && s_[pos_] == '"') return quoted();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' ||
                                s_[pos_] == '-' || s_[pos_] == '.'))
      ++pos_;
    if (pos_ == start) fail("expected a key");
    return std::string(s_.substr(start, pos_ - start));
  }

  void expect(char c) {
    skip_space();
    if (pos_ >= s_.size() || s_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  Value value() {
    skip_space();
    if (pos_ >= s_.size()) fail("missing value");
    Value v;
    const char c = s_[pos_];
    if (c == '"') {
      v.kind = Value::Kind::String;
      v.text = quoted();
      return v;
    }
    if (c == '[') {
      ++pos_;
      v.kind = Value::Kind::List;
      skip_space();
      if (pos_ < s_.size() && s_[pos_] == ']') {
        ++pos_;
        return v;
      }
      for (;;) {
        v.items.push_back(value());
        skip_space();
        if (pos_ < s_.size() && s_[pos_] == ',') {
          ++pos_;
          continue;
        }
        expect(']');
        return v;
      }
    }
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.' ||
                                s_[pos_] == '+' || s_[pos_] == '-'))
      ++pos_;
    const std::string token(s_.substr(start, pos_ - start));
    if (token.empty()) fail("unexpected character '" + std::string(1, c) + "'");
    double d = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), d);
    if (ec != std::errc() || ptr != token.data() + token.size())
      fail("'" + token + "' is not a number; strings must be quoted");
    v.number = d;
    return v;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ScenarioError(static_cast<std::size_t>(line_), what);
  }

 private:
  std::string_view s_;
  int line_;
  std::size_t pos_ = 0;
};

// --- typed accessors --------------------------------------------------------

[[noreturn]] void bad(const Entry& e, const std::string& what) {
  throw ScenarioError(static_cast<std::size_t>(e.line), "'" + e.key + "': " + what);
}

double as_number(const Entry& e) {
  if (e.value.kind != Value::Kind::Number) bad(e, "expected a number");
  return e.value.number;
}

std::size_t as_count(const Entry& e) {
  const double d = as_number(e);
  if (!(d >= 0.0) || d != std::floor(d) || d > 1e15) bad(e, "expected a nonnegative integer");
  return static_cast<std::size_t>(d);
}

std::string as_string(const Entry& e) {
  if (e.value.kind != Value::Kind::String) bad(e, "expected a quoted string");
  return e.value.text;
}

// A number or a quoted constant expression, kept as text.
std::string as_expression_text(const Entry& e) {
  if (e.value.kind == Value::Kind::String) return e.value.text;
  if (e.value.kind == Value::Kind::Number) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, e.value.number);
    return std::string(buf, r.ptr);
  }
  bad(e, "expected a number or expression string");
}

std::vector<double> as_numbers(const Entry& e) {
  if (e.value.kind != Value::Kind::List) bad(e, "expected a list of numbers");
  std::vector<double> out;
  for (const auto& v : e.value.items) {
    if (v.kind != Value::Kind::Number) bad(e, "expected a list of numbers");
    out.push_back(v.number);
  }
  return out;
}

std::vector<std::pair<double, double>> as_pairs(const Entry& e) {
  if (e.value.kind != Value::Kind::List) bad(e, "expected a list of [s, t] pairs");
  std::vector<std::pair<double, double>> out;
  for (const auto& v : e.value.items) {
    if (v.kind != Value::Kind::List || v.items.size() != 2 || v.items[0].kind != Value::Kind::Number ||
        v.items[1].kind != Value::Kind::Number)
      bad(e, "expected a list of [s, t] pairs");
    const double s = v.items[0].number;
    const double t = v.items[1].number;
    if (!(s >= 0.0 && s < t)) bad(e, "pairs need 0 <= s < t");
    out.emplace_back(s, t);
  }
  return out;
}

}  // namespace

std::vector<Section> parse_document(std::string_view text) {
  std::vector<Section> sections(1);
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    start = end + 1;

    LineParser p(line, line_no);
    if (p.at_end_or_comment()) {
      if (end == text.size()) break;
      continue;
    }
    const std::size_t first = line.find_first_not_of(" \t");
    if (line[first] == '[') {
      const std::size_t close = line.find(']', first);
      if (close == std::string_view::npos) p.fail("unterminated section header");
      std::string name(line.substr(first + 1, close - first - 1));
      if (name.empty()) p.fail("empty section name");
      LineParser rest(line.substr(close + 1), line_no);
      if (!rest.at_end_or_comment()) rest.fail("unexpected text after section header");
      for (const auto& s : sections)
        if (s.name == name) p.fail("duplicate section [" + name + "]");
      sections.push_back(Section{name, {}, line_no});
    } else {
      Entry e;
      e.line = line_no;
      e.key = p.key();
      p.expect('=');
      e.value = p.value();
      if (!p.at_end_or_comment()) p.fail("unexpected text after value");
      for (const auto& prior : sections.back().entries)
        if (prior.key == e.key) p.fail("duplicate key '" + e.key + "'");
      sections.back().entries.push_back(std::move(e));
    }
    if (end == text.size()) break;
  }
  return sections;
}

bool is_known_job(std::string_view job) { return std::find(kJobs.begin(), kJobs.end(), job) != kJobs.end(); }

Scenario load(std::string_view text) {
  const auto sections = parse_document(text);
  Scenario s;
  bool have_name = false;
  bool have_claim = false;
  bool have_mixing = false;

  for (const auto& sec : sections) {
    for (const auto& e : sec.entries) s.lines[sec.name + "." + e.key] = e.line;
    auto unknown = [&](const Entry& e) -> void { bad(e, "unknown key in [" + sec.name + "]"); };
    if (sec.name.empty()) {
      for (const auto& e : sec.entries) {
        if (e.key == "name") {
          s.name = as_string(e);
          have_name = true;
        } else {
          unknown(e);
        }
      }
    } else if (sec.name == "params") {
      for (const auto& e : sec.entries) s.params.emplace_back(e.key, as_expression_text(e));
    } else if (sec.name == "base") {
      for (const auto& e : sec.entries) {
        if (e.key == "claim") {
          s.claim = as_string(e);
          have_claim = true;
        } else if (e.key == "mixing") {
          s.mixing = as_string(e);
          have_mixing = true;
        } else if (e.key == "rate") {
          s.rate = as_string(e);
        } else {
          unknown(e);
        }
      }
    } else if (sec.name == "change") {
      ChangeSpec c;
      for (const auto& e : sec.entries) {
        if (e.key == "alpha") {
          c.alpha = as_string(e);
        } else if (e.key == "gamma") {
          c.gamma = as_string(e);
        } else if (e.key == "xi") {
          c.xi = as_string(e);
        } else if (e.key == "preset") {
          c.preset = as_string(e);
          if (c.preset != "esscher" && c.preset != "expected-value")
            bad(e, "preset must be \"esscher\" or \"expected-value\"");
        } else if (e.key == "c") {
          c.preset_c = as_expression_text(e);
        } else if (e.key == "level") {
          const auto l = as_count(e);
          if (l != 1 && l != 2) bad(e, "level must be 1 or 2");
          c.level = static_cast<int>(l);
        } else {
          unknown(e);
        }
      }
      if (!c.preset.empty() && c.preset_c.empty())
        throw ScenarioError(static_cast<std::size_t>(sec.line), "preset needs a value for c");
      s.change = c;
    } else if (sec.name == "mc") {
      for (const auto& e : sec.entries) {
        if (e.key == "paths") {
          s.paths = as_count(e);
          if (s.paths < kMinPaths) bad(e, "need at least 100 paths");
        } else if (e.key == "seed") {
          const double d = as_number(e);
          if (!(d >= 0.0) || d != std::floor(d) || d >= 18446744073709551616.0) bad(e, "seed must be a 64-bit natural");
          s.seed = static_cast<std::uint64_t>(d);
        } else if (e.key == "horizon") {
          s.horizon = as_number(e);
          if (!(s.horizon > 0.0)) bad(e, "horizon must be positive");
        } else {
          unknown(e);
        }
      }
    } else if (sec.name == "verify") {
      for (const auto& e : sec.entries) {
        if (e.key == "thetas") {
          s.verify_thetas = as_numbers(e);
        } else if (e.key == "pairs") {
          s.pairs = as_pairs(e);
        } else if (e.key == "threshold") {
          s.threshold = as_number(e);
        } else if (e.key == "direction") {
          s.direction = as_string(e);
          if (s.direction != "p-to-q" && s.direction != "q-to-p") bad(e, "direction must be \"p-to-q\" or \"q-to-p\"");
        } else {
          unknown(e);
        }
      }
    } else if (sec.name == "degeneracy") {
      for (const auto& e : sec.entries) {
        if (e.key == "paths") {
          s.degeneracy_paths = as_count(e);
          if (s.degeneracy_paths < kMinPaths) bad(e, "need at least 100 paths");
        } else if (e.key == "s") {
          s.degeneracy_s = as_number(e);
        } else if (e.key == "t") {
          s.degeneracy_t = as_number(e);
        } else {
          unknown(e);
        }
      }
      if (!(s.degeneracy_s >= 0.0 && s.degeneracy_s < s.degeneracy_t))
        throw ScenarioError(static_cast<std::size_t>(sec.line), "[degeneracy] needs 0 <= s < t");
    } else if (sec.name == "singularity") {
      for (const auto& e : sec.entries) {
        if (e.key == "theta") {
          s.singularity_theta = as_number(e);
        } else if (e.key == "horizons") {
          s.singularity_horizons = as_numbers(e);
        } else {
          unknown(e);
        }
      }
    } else if (sec.name == "premium") {
      for (const auto& e : sec.entries) {
        if (e.key == "thetas") {
          s.premium_thetas = as_numbers(e);
        } else if (e.key == "j_integral_c") {
          s.j_integral_c = as_expression_text(e);
        } else {
          unknown(e);
        }
      }
    } else if (sec.name == "annotations") {
      for (const auto& e : sec.entries) s.annotations.emplace_back(e.key, as_number(e));
    } else if (sec.name == "output") {
      for (const auto& e : sec.entries) {
        if (e.key == "format") {
          s.format = as_string(e);
          if (s.format != "csv" && s.format != "json-lines") bad(e, "format must be \"csv\" or \"json-lines\"");
        } else if (e.key == "path") {
          s.output = as_string(e);
        } else if (e.key == "paths_file") {
          s.path_output = as_string(e);
        } else {
          unknown(e);
        }
      }
    } else if (sec.name == "run") {
      for (const auto& e : sec.entries) {
        if (e.key != "jobs") unknown(e);
        if (e.value.kind != Value::Kind::List) bad(e, "expected a list of job names");
        for (const auto& v : e.value.items) {
          if (v.kind != Value::Kind::String) bad(e, "job names must be quoted strings");
          if (!is_known_job(v.text)) bad(e, "unknown job '" + v.text + "'");
          s.jobs.push_back(v.text);
        }
      }
    } else {
      throw ScenarioError(static_cast<std::size_t>(sec.line), "unknown section [" + sec.name + "]");
    }
  }

  if (!have_name) throw ScenarioError(0, "scenario has no name");
  if (!have_claim || !have_mixing) throw ScenarioError(0, "[base] needs claim and mixing");
  return s;
}

Scenario load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(0, "cannot read scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load(buf.str());
}

std::vector<std::string> builtin_names() {
  std::vector<std::string> out;
  for (const auto& b : kBuiltins) out.emplace_back(b.name);
  return out;
}

std::optional<std::string> builtin_text(std::string_view name) {
  for (const auto& b : kBuiltins)
    if (b.name == name) return std::string(b.text);
  return std::nullopt;
}

Scenario resolve(const std::string& path_or_name) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(path_or_name, ec)) return load_file(path_or_name);
  if (auto text = builtin_text(path_or_name)) return load(*text);
  throw ScenarioError(0, "unknown scenario '" + path_or_name + "': not a file and not a builtin");
}

expr::Bindings bind_params(const Scenario& s, const expr::Bindings& overrides) {
  expr::Bindings out;
  for (const auto& [name, text] : s.params) {
    if (auto it = overrides.find(name); it != overrides.end()) {
      out[name] = it->second;
      continue;
    }
    try {
      const auto f = expr::RealFn::parse(text, out);
      if (f.is_constant()) {
        out[name] = f.eval(0.0);
        continue;
      }
    } catch (const Error&) {
    }
    throw ScenarioError(0, "parameter '" + name + "' is not a constant expression: " + text);
  }
  for (const auto& [name, value] : overrides) out[name] = value;
  return out;
}

}  // namespace cmpp::scenario
