// Adaptive one-dimensional quadrature (Gauss-Kronrod 15/7 with interval
// bisection ordered by local error estimate).  Used for the principal-value
// integrals behind the Lamb-shift coefficients.
#pragma once

#include <cstddef>
#include <functional>

namespace qme {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;   // accumulated error estimate
  std::size_t evals = 0;
};

// Integrates f over [a, b] until the summed error estimate drops below
// abs_tol.  Throws QuadratureError if max_intervals bisections are exhausted
// first.  a < b required.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b, double abs_tol,
                                    int max_intervals = 4000);

}  // namespace qme
