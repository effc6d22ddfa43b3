#pragma once

#include <functional>
#include <span>

namespace cmpp::quad {

using Integrand = std::function<double(double)>;

struct Result {
  double value = 0.0;
  double error = 0.0;
};

struct Tolerance {
  double rel = 1e-12;
  double abs = 1e-14;
  int max_intervals = 4000;
};

// Global adaptive Gauss-Kronrod (10/21 point) on a finite interval. Stops when
// the summed error estimate is below max(abs, rel*|value|) or the interval
// budget is spent. Endpoints are never evaluated.
Result integrate(const Integrand& f, double a, double b, Tolerance tol = {});

// Same, over [a, b] split at the given interior breakpoints (ignored when
// outside (a, b)).
Result integrate(const Integrand& f, double a, double b, std::span<const double> breakpoints,
                 Tolerance tol = {});

// Integral over [a, inf) through the map x = a + scale * u / (1 - u), u in [0, 1).
Result integrate_to_infinity(const Integrand& f, double a, double scale, Tolerance tol = {});

// Divergence guard for a tail starting at `truncation`: integrates over the
// successive windows [a + (2^k - 1) w, a + (2^(k+1) - 1) w] with
// w = truncation - a, and reports divergence when the integrand stops being
// finite or when the last of `max_doublings` windows still adds more than 1%
// of `reference`.
bool tail_diverges(const Integrand& f, double a, double truncation, double reference,
                   int max_doublings = 12, Tolerance tol = {});

}  // namespace cmpp::quad
