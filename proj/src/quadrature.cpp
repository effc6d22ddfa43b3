#include "cmpp/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

namespace cmpp::quad {

namespace {

// QUADPACK qk21 abscissae and weights.
constexpr double kXgk[11] = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
constexpr double kWgk[11] = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
constexpr double kWg[5] = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Panel {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gk21(const Integrand& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kWgk[10];
  double gauss = 0.0;
  for (int j = 0; j < 10; ++j) {
    const double dx = half * kXgk[j];
    const double sum = f(center - dx) + f(center + dx);
    kronrod += kWgk[j] * sum;
    if (j % 2 == 1) gauss += kWg[j / 2] * sum;
  }
  kronrod *= half;
  gauss *= half;
  return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace

Result integrate(const Integrand& f, double a, double b, Tolerance tol) {
  if (a == b) return {};
  if (a > b) {
    Result r = integrate(f, b, a, tol);
    return {-r.value, r.error};
  }
  std::priority_queue<Panel> panels;
  Panel first = gk21(f, a, b);
  double value = first.value;
  double error = first.error;
  panels.push(first);
  int count = 1;
  while (error > std::max(tol.abs, tol.rel * std::abs(value)) && count < tol.max_intervals) {
    if (!std::isfinite(value) || !std::isfinite(error)) break;
    Panel worst = panels.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;  // no room left to split
    panels.pop();
    Panel left = gk21(f, worst.a, mid);
    Panel right = gk21(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
    ++count;
  }
  // Re-sum from the panels so the running update does not accumulate drift.
  double v = 0.0;
  double e = 0.0;
  std::vector<Panel> all;
  all.reserve(panels.size());
  while (!panels.empty()) {
    all.push_back(panels.top());
    panels.pop();
  }
  std::sort(all.begin(), all.end(), [](const Panel& l, const Panel& r) { return l.a < r.a; });
  for (const auto& p : all) {
    v += p.value;
    e += p.error;
  }
  return {v, e};
}

Result integrate(const Integrand& f, double a, double b, std::span<const double> breakpoints,
                 Tolerance tol) {
  std::vector<double> cuts{a};
  for (double x : breakpoints)
    if (x > a && x < b) cuts.push_back(x);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  Result total;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    Result r = integrate(f, cuts[i], cuts[i + 1], tol);
    total.value += r.value;
    total.error += r.error;
  }
  return total;
}

Result integrate_to_infinity(const Integrand& f, double a, double scale, Tolerance tol) {
  auto mapped = [&](double u) {
    const double one_minus = 1.0 - u;
    const double x = a + scale * u / one_minus;
    if (!std::isfinite(x)) return 0.0;
    const double fx = f(x);
    if (fx == 0.0) return 0.0;
    return fx * scale / (one_minus * one_minus);
  };
  return integrate(mapped, 0.0, 1.0, tol);
}

bool tail_diverges(const Integrand& f, double a, double truncation, double reference,
                   int max_doublings, Tolerance tol) {
  const double width = truncation - a;
  if (!(width > 0.0)) return false;
  double running = std::abs(reference);
  double lo = truncation;
  double step = width;
  double last = 0.0;
  for (int k = 0; k < max_doublings; ++k) {
    const double hi = lo + step;
    Result r = integrate(f, lo, hi, tol);
    if (!std::isfinite(r.value) || !std::isfinite(hi)) return true;
    last = std::abs(r.value);
    running += last;
    if (last <= 1e-15 * running) return false;
    lo = hi;
    step *= 2.0;
  }
  return last > 0.01 * running;
}

}  // namespace cmpp::quad
