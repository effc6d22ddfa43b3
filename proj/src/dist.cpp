#include "cmpp/dist.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/hypergeometric_1F1.hpp>

#include "cmpp/errors.hpp"
#include "cmpp/quadrature.hpp"

namespace cmpp::dist {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string fmt(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

double exp_or_zero(double log_value) {
  return log_value == -kInf ? 0.0 : std::exp(log_value);
}

// Tail probabilities used to place quadrature breakpoints.
constexpr double kBreakProbs[] = {1e-6, 0.01, 0.25, 0.5, 0.75, 0.99};
constexpr double kTruncationMass = 1e-12;

// Probabilities at which a tilted law's cdf is tabulated (in base quantiles).
std::vector<double> table_probs() {
  std::vector<double> p;
  for (int e = 12; e >= 3; --e) p.push_back(std::pow(10.0, -e));
  for (int i = 1; i <= 99; ++i) p.push_back(0.01 * i);
  for (int e = 3; e <= 12; ++e) p.push_back(1.0 - std::pow(10.0, -e));
  return p;
}


double tilted_log_density(const Tilted& t, double x) {
  const double lb = log_density(*t.base, x);
  if (lb == -kInf) return -kInf;
  return lb + t.log_weight(x);
}

double tilted_segment(const Tilted& t, double a, double b) {
  auto f = [&](double x) { return exp_or_zero(tilted_log_density(t, x)); };
  return quad::integrate(f, a, b).value;
}

double tilted_cdf(const Tilted& t, double x) {
  if (x <= t.nodes.front()) return 0.0;
  if (x >= t.nodes.back()) return std::min(1.0, t.cumulative.back());
  const auto it = std::upper_bound(t.nodes.begin(), t.nodes.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - t.nodes.begin()) - 1;
  return std::clamp(t.cumulative[i] + tilted_segment(t, t.nodes[i], x), 0.0, 1.0);
}

// Safeguarded Newton inside the tabulated bracket; bisection when the Newton
// step leaves the bracket. Terminates at bracket width 1e-10 (relative above 1).
double tilted_quantile(const Tilted& t, double p) {
  const auto it = std::upper_bound(t.cumulative.begin(), t.cumulative.end(), p);
  if (it == t.cumulative.begin()) return t.nodes.front();
  if (it == t.cumulative.end()) return t.nodes.back();
  const std::size_t i = static_cast<std::size_t>(it - t.cumulative.begin()) - 1;
  double xl = t.nodes[i];
  double xr = t.nodes[i + 1];
  double fl = t.cumulative[i];
  double x = 0.5 * (xl + xr);
  for (int iter = 0; iter < 200; ++iter) {
    if (xr - xl <= 1e-10 * std::max(1.0, std::abs(x))) break;
    if (!(x > xl && x < xr)) x = 0.5 * (xl + xr);
    const double fx = fl + tilted_segment(t, xl, x);
    if (std::abs(fx - p) <= 1e-15) return x;
    const double dens = exp_or_zero(tilted_log_density(t, x));
    if (fx < p) {
      xl = x;
      fl = fx;
    } else {
      xr = x;
    }
    double next = dens > 0.0 ? x - (fx - p) / dens : 0.5 * (xl + xr);
    if (!(next > xl && next < xr)) next = 0.5 * (xl + xr);
    x = next;
  }
  return 0.5 * (xl + xr);
}

double poisson_log_pmf(double lambda, double x) {
  if (x < 0.0 || x != std::floor(x)) return -kInf;
  return x * std::log(lambda) - lambda - std::lgamma(x + 1.0);
}

// Raw Poisson moments through Stirling numbers of the second kind.
double poisson_moment(double lambda, unsigned k) {
  std::vector<std::vector<double>> s(k + 1, std::vector<double>(k + 1, 0.0));
  s[0][0] = 1.0;
  for (unsigned n = 1; n <= k; ++n)
    for (unsigned j = 1; j <= n; ++j) s[n][j] = j * s[n - 1][j] + s[n - 1][j - 1];
  double total = 0.0;
  for (unsigned j = 0; j <= k; ++j) total += s[k][j] * std::pow(lambda, j);
  return total;
}

double expect_continuous(const Distribution& d, const std::function<double(double)>& f,
                         const ExpectOptions& opts) {
  const Interval sup = d.support();
  const double a = std::max(sup.lo, opts.lo);
  const double b = std::min(sup.hi, opts.hi);
  if (!(a < b)) return 0.0;

  auto integrand = [&](double x) {
    const double ld = log_density(d, x);
    if (ld == -kInf) return 0.0;
    const double lw = opts.log_weight ? opts.log_weight(x) : 0.0;
    const double e = ld + lw;
    if (e == -kInf) return 0.0;
    const double fx = f(x);
    if (fx == 0.0) return 0.0;
    return fx * std::exp(e);
  };

  std::vector<double> breaks;
  for (double p : kBreakProbs) breaks.push_back(quantile(d, p));

  if (std::isfinite(b)) {
    const quad::Result r = quad::integrate(integrand, a, b, breaks);
    if (!std::isfinite(r.value)) throw DivergentIntegral("integral is not finite");
    return r.value;
  }

  double truncation = quantile(d, 1.0 - kTruncationMass);
  if (!(truncation > a)) truncation = a + std::max(1.0, std::abs(a));
  const quad::Result body = quad::integrate(integrand, a, truncation, breaks);
  if (!std::isfinite(body.value)) throw DivergentIntegral("integral is not finite");
  if (quad::tail_diverges(integrand, a, truncation, body.value))
    throw DivergentIntegral("tail integral fails the divergence guard");
  const quad::Result tail = quad::integrate_to_infinity(integrand, truncation, truncation - a);
  if (!std::isfinite(tail.value)) throw DivergentIntegral("tail integral is not finite");
  return body.value + tail.value;
}

double expect_poisson(const Poisson& p, const std::function<double(double)>& f, const ExpectOptions& opts) {
  double total = 0.0;
  const double start = std::max(0.0, std::floor(opts.lo) + 1.0);
  for (double k = start; k <= opts.hi && k < 1e7; k += 1.0) {
    const double lp = poisson_log_pmf(p.lambda, k);
    const double lw = opts.log_weight ? opts.log_weight(k) : 0.0;
    const double term = f(k) * exp_or_zero(lp + lw);
    if (!std::isfinite(term)) throw DivergentIntegral("series term is not finite");
    total += term;
    if (k > p.lambda && std::exp(lp) < 1e-20 && std::abs(term) <= 1e-18 * std::abs(total)) break;
  }
  return total;
}

struct LiteralArg {
  std::string key;  // empty for positional
  std::string value;
  std::size_t offset;
};

}  // namespace

// ---------------------------------------------------------------------------

Distribution Distribution::exponential(double rate) {
  require(rate > 0.0 && std::isfinite(rate), "exponential rate must be positive");
  return Distribution(Exponential{rate});
}

Distribution Distribution::gamma(double rate, double shape) {
  require(rate > 0.0 && std::isfinite(rate), "gamma rate must be positive");
  require(shape > 0.0 && std::isfinite(shape), "gamma shape must be positive");
  return Distribution(Gamma{rate, shape});
}

Distribution Distribution::beta(double a, double b) {
  require(a > 0.0 && b > 0.0 && std::isfinite(a) && std::isfinite(b), "beta parameters must be positive");
  return Distribution(Beta{a, b});
}

Distribution Distribution::uniform(double lo, double hi) {
  require(std::isfinite(lo) && std::isfinite(hi) && lo < hi, "uniform needs lo < hi");
  return Distribution(Uniform{lo, hi});
}

Distribution Distribution::poisson(double lambda) {
  require(lambda > 0.0 && std::isfinite(lambda), "poisson lambda must be positive");
  return Distribution(Poisson{lambda});
}

Distribution Distribution::degenerate(double point) {
  require(point > 0.0 && std::isfinite(point), "degenerate point must be positive");
  return Distribution(Degenerate{point});
}

const Tilted* Distribution::tilted() const noexcept {
  auto p = std::get_if<std::shared_ptr<const Tilted>>(&v_);
  return p ? p->get() : nullptr;
}

Interval Distribution::support() const {
  return std::visit(Overloaded{
                        [](const Exponential&) { return Interval{0.0, kInf}; },
                        [](const Gamma&) { return Interval{0.0, kInf}; },
                        [](const Beta&) { return Interval{0.0, 1.0}; },
                        [](const Uniform& u) { return Interval{u.lo, u.hi}; },
                        [](const Poisson&) { return Interval{0.0, kInf}; },
                        [](const Degenerate& g) { return Interval{g.point, g.point}; },
                        [](const std::shared_ptr<const Tilted>& t) { return t->base->support(); },
                    },
                    v_);
}

bool Distribution::is_discrete() const {
  return std::holds_alternative<Poisson>(v_) || std::holds_alternative<Degenerate>(v_);
}

std::string Distribution::literal() const {
  return std::visit(
      Overloaded{
          [](const Exponential& e) { return "exp(rate=" + fmt(e.rate) + ")"; },
          [](const Gamma& g) { return "gamma(rate=" + fmt(g.rate) + ", shape=" + fmt(g.shape) + ")"; },
          [](const Beta& b) { return "beta(a=" + fmt(b.a) + ", b=" + fmt(b.b) + ")"; },
          [](const Uniform& u) { return "uniform(lo=" + fmt(u.lo) + ", hi=" + fmt(u.hi) + ")"; },
          [](const Poisson& p) { return "poisson(lambda=" + fmt(p.lambda) + ")"; },
          [](const Degenerate& g) { return "degenerate(" + fmt(g.point) + ")"; },
          [](const std::shared_ptr<const Tilted>& t) {
            return "tilted(" + t->base->literal() + ", logw=\"" + t->log_weight.print() + "\")";
          },
      },
      v_);
}

Distribution tilt(const Distribution& base, expr::RealFn log_weight) {
  if (base.is_discrete()) throw std::invalid_argument("generic tilting needs a continuous base law");
  const double norm = expect(base, [](double) { return 1.0; },
                             ExpectOptions{[&](double x) { return log_weight(x); }});
  if (std::abs(norm - 1.0) > 1e-8)
    throw std::invalid_argument("tilt weight integrates to " + fmt(norm) + ", not 1");

  auto t = std::make_shared<Tilted>();
  t->base = std::make_shared<const Distribution>(base);
  t->log_weight = std::move(log_weight);
  t->normalizer = norm;

  const Interval sup = base.support();
  std::vector<double> nodes;
  nodes.push_back(sup.lo);
  for (double p : table_probs()) {
    const double q = quantile(base, p);
    if (q > nodes.back() && q < sup.hi) nodes.push_back(q);
  }
  if (std::isfinite(sup.hi)) nodes.push_back(sup.hi);

  std::vector<double> cum{0.0};
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
    cum.push_back(cum.back() + tilted_segment(*t, nodes[i], nodes[i + 1]));

  if (!std::isfinite(sup.hi)) {
    // Extend past the base's tail until the tilted mass there is negligible.
    const double width = nodes.back() - nodes.front();
    double step = width;
    for (int k = 0; k < 60; ++k) {
      const double next = nodes.back() + step;
      const double inc = tilted_segment(*t, nodes.back(), next);
      nodes.push_back(next);
      cum.push_back(cum.back() + inc);
      if (inc <= 1e-16 * cum.back()) break;
      step *= 2.0;
    }
  }
  t->nodes = std::move(nodes);
  t->cumulative = std::move(cum);
  return Distribution(std::shared_ptr<const Tilted>(std::move(t)));
}

double moment(const Distribution& d, unsigned k) {
  if (k == 0) return 1.0;
  return std::visit(
      Overloaded{
          [&](const Exponential& e) { return std::tgamma(k + 1.0) / std::pow(e.rate, k); },
          [&](const Gamma& g) {
            double m = 1.0;
            for (unsigned i = 0; i < k; ++i) m *= (g.shape + i) / g.rate;
            return m;
          },
          [&](const Beta& b) {
            double m = 1.0;
            for (unsigned i = 0; i < k; ++i) m *= (b.a + i) / (b.a + b.b + i);
            return m;
          },
          [&](const Uniform& u) {
            return (std::pow(u.hi, k + 1) - std::pow(u.lo, k + 1)) / ((k + 1.0) * (u.hi - u.lo));
          },
          [&](const Poisson& p) { return poisson_moment(p.lambda, k); },
          [&](const Degenerate& g) { return std::pow(g.point, k); },
          [&](const std::shared_ptr<const Tilted>& t) {
            try {
              return expect(*t->base, [k](double x) { return std::pow(x, k); },
                            ExpectOptions{[&](double x) { return t->log_weight(x); }});
            } catch (const DivergentIntegral& e) {
              throw DivergentMoment("moment " + std::to_string(k) + " diverges: " + e.what());
            }
          },
      },
      d.variant());
}

double mean(const Distribution& d) { return moment(d, 1); }

double variance(const Distribution& d) {
  const double m = mean(d);
  return moment(d, 2) - m * m;
}

double mgf(const Distribution& d, double s) {
  if (s == 0.0) return 1.0;
  auto outside = [](const std::string& what) { return OutsideConvergenceStrip(what); };
  return std::visit(
      Overloaded{
          [&](const Exponential& e) {
            if (s >= e.rate) throw outside("exponential mgf needs s < rate");
            return e.rate / (e.rate - s);
          },
          [&](const Gamma& g) {
            if (s >= g.rate) throw outside("gamma mgf needs s < rate");
            return std::pow(g.rate / (g.rate - s), g.shape);
          },
          [&](const Beta& b) { return boost::math::hypergeometric_1F1(b.a, b.a + b.b, s); },
          [&](const Uniform& u) { return (std::exp(s * u.hi) - std::exp(s * u.lo)) / (s * (u.hi - u.lo)); },
          [&](const Poisson& p) { return std::exp(p.lambda * std::expm1(s)); },
          [&](const Degenerate& g) { return std::exp(s * g.point); },
          [&](const std::shared_ptr<const Tilted>& t) {
            try {
              return expect(*t->base, [](double) { return 1.0; },
                            ExpectOptions{[&](double x) { return t->log_weight(x) + s * x; }});
            } catch (const DivergentIntegral& e) {
              throw outside(std::string("tilted mgf diverges: ") + e.what());
            }
          },
      },
      d.variant());
}

double log_density(const Distribution& d, double x) {
  return std::visit(
      Overloaded{
          [&](const Exponential& e) { return x < 0.0 ? -kInf : std::log(e.rate) - e.rate * x; },
          [&](const Gamma& g) {
            if (x < 0.0) return -kInf;
            if (x == 0.0) return g.shape < 1.0 ? kInf : (g.shape == 1.0 ? std::log(g.rate) : -kInf);
            return g.shape * std::log(g.rate) + (g.shape - 1.0) * std::log(x) - g.rate * x - std::lgamma(g.shape);
          },
          [&](const Beta& b) {
            if (x < 0.0 || x > 1.0) return -kInf;
            const double lbeta = std::lgamma(b.a) + std::lgamma(b.b) - std::lgamma(b.a + b.b);
            const double left = (b.a == 1.0) ? 0.0 : (b.a - 1.0) * std::log(x);
            const double right = (b.b == 1.0) ? 0.0 : (b.b - 1.0) * std::log1p(-x);
            return left + right - lbeta;
          },
          [&](const Uniform& u) { return (x < u.lo || x > u.hi) ? -kInf : -std::log(u.hi - u.lo); },
          [&](const Poisson& p) { return poisson_log_pmf(p.lambda, x); },
          [&](const Degenerate& g) { return x == g.point ? 0.0 : -kInf; },
          [&](const std::shared_ptr<const Tilted>& t) { return tilted_log_density(*t, x); },
      },
      d.variant());
}

double density(const Distribution& d, double x) { return exp_or_zero(log_density(d, x)); }

double cdf(const Distribution& d, double x) {
  return std::visit(
      Overloaded{
          [&](const Exponential& e) { return x <= 0.0 ? 0.0 : -std::expm1(-e.rate * x); },
          [&](const Gamma& g) { return x <= 0.0 ? 0.0 : boost::math::gamma_p(g.shape, g.rate * x); },
          [&](const Beta& b) { return x <= 0.0 ? 0.0 : x >= 1.0 ? 1.0 : boost::math::ibeta(b.a, b.b, x); },
          [&](const Uniform& u) { return x <= u.lo ? 0.0 : x >= u.hi ? 1.0 : (x - u.lo) / (u.hi - u.lo); },
          [&](const Poisson& p) {
            return x < 0.0 ? 0.0 : boost::math::gamma_q(std::floor(x) + 1.0, p.lambda);
          },
          [&](const Degenerate& g) { return x >= g.point ? 1.0 : 0.0; },
          [&](const std::shared_ptr<const Tilted>& t) { return tilted_cdf(*t, x); },
      },
      d.variant());
}

double quantile(const Distribution& d, double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("quantile needs 0 < p < 1");
  return std::visit(
      Overloaded{
          [&](const Exponential& e) { return -std::log1p(-p) / e.rate; },
          [&](const Gamma& g) { return boost::math::gamma_p_inv(g.shape, p) / g.rate; },
          [&](const Beta& b) { return boost::math::ibeta_inv(b.a, b.b, p); },
          [&](const Uniform& u) { return u.lo + p * (u.hi - u.lo); },
          [&](const Poisson& q) {
            double k = 0.0;
            double c = std::exp(-q.lambda);
            double term = c;
            while (c < p && k < 1e7) {
              k += 1.0;
              term *= q.lambda / k;
              c += term;
            }
            return k;
          },
          [&](const Degenerate& g) { return g.point; },
          [&](const std::shared_ptr<const Tilted>& t) { return tilted_quantile(*t, p); },
      },
      d.variant());
}

double sample(const Distribution& d, RngStream& rng) {
  return std::visit(
      Overloaded{
          [&](const Exponential& e) { return std::exponential_distribution<double>(e.rate)(rng); },
          [&](const Gamma& g) { return std::gamma_distribution<double>(g.shape, 1.0 / g.rate)(rng); },
          [&](const Beta& b) {
            const double x = std::gamma_distribution<double>(b.a, 1.0)(rng);
            const double y = std::gamma_distribution<double>(b.b, 1.0)(rng);
            return x / (x + y);
          },
          [&](const Uniform& u) { return u.lo + (u.hi - u.lo) * rng.uniform_open(); },
          [&](const Poisson& p) {
            return static_cast<double>(std::poisson_distribution<long long>(p.lambda)(rng));
          },
          [&](const Degenerate& g) { return g.point; },
          [&](const std::shared_ptr<const Tilted>& t) { return tilted_quantile(*t, rng.uniform_open()); },
      },
      d.variant());
}

double expect(const Distribution& d, const std::function<double(double)>& f, const ExpectOptions& opts) {
  if (const auto* g = d.get_if<Degenerate>()) {
    if (!(g->point > opts.lo && g->point <= opts.hi)) return 0.0;
    const double lw = opts.log_weight ? opts.log_weight(g->point) : 0.0;
    return f(g->point) * std::exp(lw);
  }
  if (const auto* p = d.get_if<Poisson>()) return expect_poisson(*p, f, opts);
  return expect_continuous(d, f, opts);
}

// ---------------------------------------------------------------------------

Distribution parse_literal(std::string_view src, const expr::Bindings& params) {
  std::size_t pos = 0;
  auto skip = [&] {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
  };
  skip();
  const std::size_t name_start = pos;
  while (pos < src.size() && std::isalpha(static_cast<unsigned char>(src[pos]))) ++pos;
  const std::string name(src.substr(name_start, pos - name_start));
  skip();
  if (pos >= src.size() || src[pos] != '(') throw SyntaxError(pos, "expected '(' in distribution literal");
  ++pos;

  std::vector<LiteralArg> args;
  for (;;) {
    skip();
    const std::size_t start = pos;
    int depth = 0;
    while (pos < src.size() && !(depth == 0 && (src[pos] == ',' || src[pos] == ')'))) {
      if (src[pos] == '(') ++depth;
      if (src[pos] == ')') --depth;
      ++pos;
    }
    if (pos >= src.size()) throw SyntaxError(pos, "unterminated distribution literal");
    std::string text(src.substr(start, pos - start));
    LiteralArg arg{{}, {}, start};
    const auto eq = text.find('=');
    if (eq != std::string::npos) {
      arg.key = text.substr(0, eq);
      arg.value = text.substr(eq + 1);
      while (!arg.key.empty() && std::isspace(static_cast<unsigned char>(arg.key.back()))) arg.key.pop_back();
    } else {
      arg.value = text;
    }
    if (arg.value.find_first_not_of(" \t") == std::string::npos)
      throw SyntaxError(start, "empty argument in distribution literal");
    args.push_back(std::move(arg));
    if (src[pos] == ')') {
      ++pos;
      break;
    }
    ++pos;
  }
  skip();
  if (pos != src.size()) throw SyntaxError(pos, "trailing characters after distribution literal");

  std::vector<std::string> keys;
  if (name == "exp" || name == "exponential") keys = {"rate"};
  else if (name == "gamma") keys = {"rate", "shape"};
  else if (name == "beta") keys = {"a", "b"};
  else if (name == "uniform") keys = {"lo", "hi"};
  else if (name == "poisson") keys = {"lambda"};
  else if (name == "degenerate") keys = {"point"};
  else throw UnknownIdentifier(name_start, name);

  if (args.size() != keys.size())
    throw SyntaxError(name_start, name + " takes " + std::to_string(keys.size()) + " argument(s)");
  std::vector<double> values(keys.size());
  std::vector<bool> seen(keys.size(), false);
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::size_t slot = i;
    if (!args[i].key.empty()) {
      auto it = std::find(keys.begin(), keys.end(), args[i].key);
      if (it == keys.end()) throw UnknownIdentifier(args[i].offset, args[i].key);
      slot = static_cast<std::size_t>(it - keys.begin());
    }
    if (seen[slot]) throw SyntaxError(args[i].offset, "argument '" + keys[slot] + "' given twice");
    seen[slot] = true;
    const expr::RealFn value = expr::RealFn::parse(args[i].value, params);
    if (!value.is_constant()) throw SyntaxError(args[i].offset, "distribution argument must be constant");
    values[slot] = value.eval(0.0);
  }

  if (name == "exp" || name == "exponential") return Distribution::exponential(values[0]);
  if (name == "gamma") return Distribution::gamma(values[0], values[1]);
  if (name == "beta") return Distribution::beta(values[0], values[1]);
  if (name == "uniform") return Distribution::uniform(values[0], values[1]);
  if (name == "poisson") return Distribution::poisson(values[0]);
  return Distribution::degenerate(values[0]);
}

}  // namespace cmpp::dist
