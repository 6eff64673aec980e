// Two-qubit system Hamiltonians and their closed-form eigenstructure.
//
// The model is a pair of qubits with splittings omega_1 = 1 (fixed; all other
// energies are expressed in units of omega_1) and omega_2 in (0, 1], coupled
// by one of three interaction forms:
//   * IsingXX:     lambda * sx(1) sx(2)
//   * Heisenberg:  lx * sx- sx + ly * sy sy + lz * sz sz
//   * RWA:         lambda * (s+(1) s-(2) + s-(1) s+(2))
// All three preserve the parity split of the canonical basis into the even
// block {|11>, |00>} and the odd block {|10>, |01>}, so the 4x4 Hamiltonian
// diagonalises as two 2x2 blocks parameterised by two mixing angles.
#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "qme/matrices.hpp"

namespace qme {

enum class CouplingKind : std::uint8_t { IsingXX, Heisenberg, RWA };

std::string to_string(CouplingKind k);

struct QubitPairSpec {
  double omega2 = 1.0;  // second splitting, 0 < omega2 <= omega1 = 1
  CouplingKind kind = CouplingKind::IsingXX;
  // IsingXX and RWA read lambda_x as their single coupling strength;
  // Heisenberg uses all three components.
  double lambda_x = 0.0;
  double lambda_y = 0.0;
  double lambda_z = 0.0;

  static QubitPairSpec ising(double omega2, double lambda);
  static QubitPairSpec heisenberg(double omega2, double lx, double ly, double lz);
  static QubitPairSpec rwa(double omega2, double lambda);

  double omega1() const { return 1.0; }
  double omega_plus() const { return 1.0 + omega2; }
  double omega_minus() const { return 1.0 - omega2; }
  // Scalar coupling for the single-parameter kinds (IsingXX / RWA).
  double lambda() const { return lambda_x; }
  bool is_coupled() const {
    return lambda_x != 0.0 || lambda_y != 0.0 || lambda_z != 0.0;
  }

  // Throws ConfigError when parameters are out of range.
  void validate() const;
};

// System Hamiltonian in the canonical basis {|11>, |10>, |01>, |00>}.
Mat4 hamiltonian(const QubitPairSpec& spec);

// Interaction part only (hamiltonian minus the two free splittings).
Mat4 interaction(const QubitPairSpec& spec);

// Eigenstructure in the level labelling where e0/e3 live in the even-parity
// block {|11>, |00>} and e1/e2 in the odd-parity block {|10>, |01>}:
//   e0 = -sin(theta)|11> + cos(theta)|00>      E0 = cA - RA
//   e1 = -sin(phi)  |10> + cos(phi)  |01>      E1 = cB - RB
//   e2 =  cos(phi)  |10> + sin(phi)  |01>      E2 = cB + RB
//   e3 =  cos(theta)|11> + sin(theta)|00>      E3 = cA + RA
// with (cA, RA) and (cB, RB) the centre/radius of the two 2x2 blocks.  Phases
// are fixed by requiring <00|e0> >= 0 and <01|e1> >= 0.
struct EigenStructure {
  std::array<double, 4> energies{};  // {E0, E1, E2, E3}, ascending
  Mat4 vectors;                      // columns are e0..e3 in the canonical basis
  double theta = 0.0;                // even-block mixing angle
  double phi = 0.0;                  // odd-block mixing angle

  // Transition ("jump") frequencies of the four-level ladder:
  //   {w_I = E3-E1, w_II = E3-E2, w_III = E3-E0, w_IV = E2-E1}.
  std::array<double, 4> jump_frequencies() const {
    return {energies[3] - energies[1], energies[3] - energies[2],
            energies[3] - energies[0], energies[2] - energies[1]};
  }
};

// Closed-form diagonalisation.  Throws ConfigError if the block labelling
// above is not energy-ordered for the given parameters (possible only for
// strongly asymmetric Heisenberg lz or RWA with lambda^2 > omega1*omega2).
EigenStructure diagonalize(const QubitPairSpec& spec);

// Signed distance from the parameter surface where the x-channel frequency
// w_II crosses the z-channel frequency w_IV and the partial-secular grouping
// that drops x-z cross terms stops being justified.  For IsingXX the residual
// reduces exactly to 32*lambda^2 - (omega_plus^2 - 9*omega_minus^2); the
// general form 4*(9*RB^2 - (2*lz + RA)^2) covers the other kinds.
struct CrossingCheck {
  bool crossing = false;
  double residual = 0.0;
};
CrossingCheck detect_frequency_crossing(const QubitPairSpec& spec, double tol);

}  // namespace qme
