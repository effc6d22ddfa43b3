#pragma once

// Reference values computed without the library: closed forms and a plain
// composite Simpson rule on truncated intervals.

#include <cmath>
#include <cstddef>
#include <functional>

namespace oracle {

inline double simpson(const std::function<double(double)>& f, double a, double b, std::size_t panels = 200000) {
  if (panels % 2) ++panels;
  const double h = (b - a) / static_cast<double>(panels);
  double sum = f(a) + f(b);
  for (std::size_t i = 1; i < panels; ++i) sum += f(a + h * static_cast<double>(i)) * (i % 2 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

// rate^shape x^(shape-1) e^(-rate x) / Gamma(shape)
inline double gamma_pdf(double x, double rate, double shape) {
  if (x <= 0.0) return 0.0;
  return std::exp(shape * std::log(rate) + (shape - 1.0) * std::log(x) - rate * x - std::lgamma(shape));
}

inline double poisson_pmf(unsigned k, double mean) {
  return std::exp(-mean + k * std::log(mean) - std::lgamma(k + 1.0));
}

inline double j_closed(double c) { return (c + 3.0) / (c + 2.0) + (c + 2.0) * std::log((c + 1.0) / (c + 2.0)); }

// The integral over (0,1) of theta (c + theta) / (c + 1 + theta)^2.
inline double j_numeric(double c) {
  return simpson([c](double th) { return th * (c + th) / ((c + 1.0 + th) * (c + 1.0 + th)); }, 0.0, 1.0, 2000);
}

}  // namespace oracle
