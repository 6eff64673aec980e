// Frequency-resolved jump operators.
//
// The coupling operators sx(1), sx(2) (dissipative channels) and sz(1), sz(2)
// (dephasing channels) are decomposed into eigenoperators A(w) satisfying
// [H, A(w)] = -w A(w), one entry per transition frequency of the four-level
// ladder.  Two constructions are supported:
//   * global: decompose in the eigenbasis of the full system Hamiltonian
//     (entries are the cos/sin(theta +/- phi) dyads between dressed levels);
//   * local: decompose each qubit against its own splitting only, giving the
//     product-basis ladder operators sigma_j^-( +omega_j ), sigma_j^z( 0 ).
// Every table is closed under the adjoint pairing A(-w) = A(w)^dagger and
// sums back to the bare coupling operator.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qme/matrices.hpp"
#include "qme/system.hpp"

namespace qme {

enum class Channel : std::uint8_t { X1, X2, Z1, Z2 };

int channel_qubit(Channel c);          // 1 or 2
bool channel_dissipative(Channel c);   // true for X1/X2
std::string to_string(Channel c);
Mat4 channel_operator(Channel c);      // bare coupling operator, canonical basis

struct JumpEntry {
  Channel channel;
  double omega;  // signed transition frequency; positive entries lower energy
  Mat4 op;       // A_channel(omega) in the canonical basis
};

struct JumpTable {
  std::vector<JumpEntry> entries;  // sorted by (channel, omega)
  // Non-fatal construction notes (e.g. distinct transition frequencies merged
  // by the 1e-9 binning).
  std::vector<std::string> warnings;

  // Distinct |omega| values present in the z-sector, ascending (binned).
  std::vector<double> z_frequencies() const;
  // Sum of all entries of one channel (should reproduce the bare operator).
  Mat4 channel_sum(Channel c) const;
};

enum class Construction : std::uint8_t { GlobalCoupled, GlobalUncoupled, Local };
std::string to_string(Construction c);

// Eigenoperator table from the closed-form eigenstructure.  Entries with
// operator norm below 1e-14 are dropped; frequencies are binned to 1e-9.
JumpTable global_jumps(const EigenStructure& es);

// Product-basis table, independent of the qubit-qubit coupling.
JumpTable local_jumps(const QubitPairSpec& spec);

// Dispatch on construction.  GlobalUncoupled builds the global table of the
// coupling-free spec (identical to the local table).
JumpTable jump_table(const QubitPairSpec& spec, Construction c);

}  // namespace qme
