// Time evolution and steady states of the assembled generators.
//
// Two independent propagation routes are kept deliberately:
//   * Expm: rho(t_k) via matrix exponentials of the generator, either as the
//     serial reference (one cached exponential per unique step, applied
//     sequentially) or as the OpenMP-chunked kernel (each chunk starts from
//     exp(L t_start) and steps with the cached per-step exponentials);
//   * Adaptive: embedded Dormand-Prince 5(4) stepping with local error
//     control per unit time.
// The two routes are cross-checked in the tests; Expm is the default.
#pragma once

#include <optional>
#include <vector>

#include "qme/liouvillian.hpp"
#include "qme/matrices.hpp"

namespace qme {

enum class PropagationMethod : std::uint8_t { Expm, Adaptive };

struct PropagateOptions {
  PropagationMethod method = PropagationMethod::Expm;
  bool parallel = true;        // use the OpenMP chunked kernel (Expm only)
  double adaptive_tol = 1e-10; // local error per unit time (Adaptive only)
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Mat4> states;
};

// times must be non-negative and strictly increasing.
Trajectory propagate(const Mat16& generator, const Mat4& rho0,
                     const std::vector<double>& times,
                     PropagateOptions opts = {});

// The two Expm kernels, exposed separately for the agreement tests and the
// serial-vs-parallel benchmark.
Trajectory propagate_serial_expm(const Mat16& generator, const Mat4& rho0,
                                 const std::vector<double>& times);
Trajectory propagate_parallel_expm(const Mat16& generator, const Mat4& rho0,
                                   const std::vector<double>& times);
Trajectory propagate_adaptive(const Mat16& generator, const Mat4& rho0,
                              const std::vector<double>& times,
                              double tol_per_unit_time);

// Uniform grid helper: {0, dt, 2 dt, ..., <= t_max}.
std::vector<double> uniform_grid(double t_max, double dt);

struct SteadyStateResult {
  Mat4 state;
  int nullity = 1;       // dimension of the numerical null space
  double residual = 0.0; // || L vec(rho) ||_inf
};

// Null-space steady state via SVD (singular values below 1e-10 * ||L||
// count as zero).  A degenerate null space falls back to time-doubling
// propagation from rho0 (required in that case) until the state stops
// moving (trace distance <= 1e-10) or the horizon is exceeded.
SteadyStateResult steady_state(const Mat16& generator,
                               std::optional<Mat4> rho0 = std::nullopt,
                               double horizon = 1e8);

// Stationary energy current attributed to bath k (0-based index into
// Liouvillian::baths): J_k = Tr(H_S * G_k[rho]), with G_k the bath-resolved
// generator (dissipator plus that bath's Lamb-shift commutator).
double heat_current(const Liouvillian& l, int bath_index, const Mat4& rho);

struct HeatCurrents {
  std::vector<double> per_bath;
  double total = 0.0;       // sum; vanishes in the steady state
  bool balanced = true;     // |total| <= 1e-10 * max |J_k| (stationarity check)
};
HeatCurrents heat_currents(const Liouvillian& l, const Mat4& rho);

}  // namespace qme
