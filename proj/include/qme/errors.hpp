// Error taxonomy for the master-equation library.  Each type corresponds to a
// distinct failure mode and maps to a distinct CLI exit code (see tools/).
#pragma once

#include <stdexcept>
#include <string>

namespace qme {

// Invalid or inconsistent user-supplied parameters (bad frequency range,
// malformed config file, local construction outside its validity window, ...).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when a partial-secular construction that drops the x-z cross terms is
// requested on (or numerically too close to) the parameter surface where the
// x-channel and z-channel transition frequencies cross and those terms stop
// being negligible.  Carries the signed distance from the surface.
struct CrossingSingularity : std::runtime_error {
  double residual;
  CrossingSingularity(const std::string& msg, double res)
      : std::runtime_error(msg), residual(res) {}
};

// Adaptive quadrature failed to reach the requested tolerance.
struct QuadratureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Iterative procedure (steady-state search, ...) hit its horizon without
// meeting its convergence criterion.
struct NoConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Adaptive time stepper could not meet its local error target.
struct StepFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace qme
