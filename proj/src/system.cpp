#include "qme/system.hpp"

#include <cmath>

#include "qme/errors.hpp"

namespace qme {

std::string to_string(CouplingKind k) {
  switch (k) {
    case CouplingKind::IsingXX: return "ising";
    case CouplingKind::Heisenberg: return "heisenberg";
    case CouplingKind::RWA: return "rwa";
  }
  return "?";
}

QubitPairSpec QubitPairSpec::ising(double omega2, double lambda) {
  QubitPairSpec s;
  s.omega2 = omega2;
  s.kind = CouplingKind::IsingXX;
  s.lambda_x = lambda;
  s.validate();
  return s;
}

QubitPairSpec QubitPairSpec::heisenberg(double omega2, double lx, double ly,
                                        double lz) {
  QubitPairSpec s;
  s.omega2 = omega2;
  s.kind = CouplingKind::Heisenberg;
  s.lambda_x = lx;
  s.lambda_y = ly;
  s.lambda_z = lz;
  s.validate();
  return s;
}

QubitPairSpec QubitPairSpec::rwa(double omega2, double lambda) {
  QubitPairSpec s;
  s.omega2 = omega2;
  s.kind = CouplingKind::RWA;
  s.lambda_x = lambda;
  s.validate();
  return s;
}

void QubitPairSpec::validate() const {
  if (!(omega2 > 0.0) || !(omega2 <= 1.0))
    throw ConfigError("omega2 must satisfy 0 < omega2 <= omega1 = 1, got " +
                      std::to_string(omega2));
  if (!std::isfinite(lambda_x) || !std::isfinite(lambda_y) ||
      !std::isfinite(lambda_z))
    throw ConfigError("coupling strengths must be finite");
  if (kind != CouplingKind::Heisenberg && (lambda_y != 0.0 || lambda_z != 0.0))
    throw ConfigError(
        "lambda_y/lambda_z are only meaningful for the Heisenberg kind");
}

Mat4 hamiltonian(const QubitPairSpec& spec) {
  Mat4 h = 0.5 * on_qubit(sigma_z(), 1) + 0.5 * spec.omega2 * on_qubit(sigma_z(), 2);
  return h + interaction(spec);
}

Mat4 interaction(const QubitPairSpec& spec) {
  switch (spec.kind) {
    case CouplingKind::IsingXX:
      return spec.lambda_x * kron(sigma_x(), sigma_x());
    case CouplingKind::Heisenberg:
      return spec.lambda_x * kron(sigma_x(), sigma_x()) +
             spec.lambda_y * kron(sigma_y(), sigma_y()) +
             spec.lambda_z * kron(sigma_z(), sigma_z());
    case CouplingKind::RWA:
      return spec.lambda_x * (kron(sigma_plus(), sigma_minus()) +
                              kron(sigma_minus(), sigma_plus()));
  }
  return Mat4::Zero();
}

namespace {

// Centre and off-diagonal element of the two parity blocks:
//   even block on {|11>, |00>}: [[cA + aA, bA], [bA, cA - aA]]
//   odd  block on {|10>, |01>}: [[cB + aB, bB], [bB, cB - aB]]
struct Blocks {
  double cA, aA, bA;
  double cB, aB, bB;
};

Blocks split_blocks(const QubitPairSpec& spec) {
  Blocks b{};
  b.aA = 0.5 * spec.omega_plus();
  b.aB = 0.5 * spec.omega_minus();
  switch (spec.kind) {
    case CouplingKind::IsingXX:
      b.bA = spec.lambda_x;
      b.bB = spec.lambda_x;
      break;
    case CouplingKind::Heisenberg:
      b.cA = spec.lambda_z;
      b.cB = -spec.lambda_z;
      b.bA = spec.lambda_x - spec.lambda_y;
      b.bB = spec.lambda_x + spec.lambda_y;
      break;
    case CouplingKind::RWA:
      b.bA = 0.0;  // even block stays uncoupled
      b.bB = spec.lambda_x;
      break;
  }
  return b;
}

}  // namespace

EigenStructure diagonalize(const QubitPairSpec& spec) {
  spec.validate();
  const Blocks b = split_blocks(spec);
  const double RA = std::hypot(b.aA, b.bA);
  const double RB = std::hypot(b.aB, b.bB);

  EigenStructure es;
  es.energies = {b.cA - RA, b.cB - RB, b.cB + RB, b.cA + RA};
  // Half-angle of each block rotation; atan2 keeps cos >= cos(pi/4) > 0, which
  // realises the phase convention <00|e0> >= 0, <01|e1> >= 0.
  es.theta = 0.5 * std::atan2(b.bA, b.aA);
  es.phi = 0.5 * std::atan2(b.bB, b.aB);

  const double st = std::sin(es.theta), ct = std::cos(es.theta);
  const double sp = std::sin(es.phi), cp = std::cos(es.phi);
  es.vectors.setZero();
  es.vectors.col(0) << -st, 0, 0, ct;  // e0
  es.vectors.col(1) << 0, -sp, cp, 0;  // e1
  es.vectors.col(2) << 0, cp, sp, 0;   // e2
  es.vectors.col(3) << ct, 0, 0, st;   // e3

  for (int i = 0; i + 1 < 4; ++i) {
    if (es.energies[i] > es.energies[i + 1] + 1e-12)
      throw ConfigError(
          "level labelling is not energy-ordered for these parameters "
          "(E" + std::to_string(i) + " > E" + std::to_string(i + 1) +
          "); reduce |lambda_z| or the RWA coupling");
  }
  return es;
}

CrossingCheck detect_frequency_crossing(const QubitPairSpec& spec, double tol) {
  const Blocks b = split_blocks(spec);
  const double RA = std::hypot(b.aA, b.bA);
  const double RB = std::hypot(b.aB, b.bB);
  // Zero exactly when w_II = w_IV, i.e. 2*lz + RA = 3*RB.  For IsingXX this
  // equals 32*lambda^2 - (omega_plus^2 - 9*omega_minus^2).
  const double lhs = 2.0 * b.cA + RA;
  CrossingCheck c;
  c.residual = 4.0 * (9.0 * RB * RB - lhs * lhs);
  c.crossing = std::abs(c.residual) <= tol;
  return c;
}

}  // namespace qme
