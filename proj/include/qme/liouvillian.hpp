// Master-equation generator assembly.
//
// The generator acts on column-stacked density matrices:
//   L = -i[H_S, .] - i[H_LS, .] + D,
//   D(rho) = sum over kept pairs (w, w'), channels (b, b') of
//            rate_{b b'}(w, w') * ( A_{b'}(w) rho A_b(w')^+
//                                   - 1/2 { A_b(w')^+ A_{b'}(w), rho } ),
//   H_LS   = sum over the same pairs of shift_{b b'}(w, w') A_b(w')^+ A_{b'}(w),
// with pair coefficients combined from the bath correlation transforms,
//   rate_{b b'}(w, w')  = Gamma_{b b'}(w) + conj(Gamma_{b' b}(w')),
//   shift_{b b'}(w, w') = (Gamma_{b b'}(w) - conj(Gamma_{b' b}(w'))) / 2i,
//   Gamma_{b b'}(w)     = sum over baths of g_b g_b' Gamma_bath(w).
//
// Which (w, w') pairs are kept is the secular policy:
//   * Full: w == w' only (the standard GKLS generator);
//   * Partial/PaperGroups: x-x pairs of equal sign, z-z pairs within the
//     near-degenerate group {0, +/-w_IV} plus the +/-w_III diagonal, never
//     x-z (hence the frequency-crossing guard);
//   * Partial/Threshold(eps): any pair with |w - w'| <= eps, including x-z
//     cross terms near the crossing surface.
// Fast counter-rotating combinations (an A(w) rho A(w') product with two
// lowering or two raising operators at order-1 frequency sum) never satisfy
// these rules, so squeezing-like terms are excluded automatically.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qme/bath.hpp"
#include "qme/jumps.hpp"
#include "qme/matrices.hpp"
#include "qme/system.hpp"

namespace qme {

enum class SecularMode : std::uint8_t { Partial, Full };
enum class PartialRule : std::uint8_t { PaperGroups, Threshold };

struct SecularPolicy {
  SecularMode mode = SecularMode::Partial;
  PartialRule rule = PartialRule::PaperGroups;
  double threshold_eps = 0.0;  // Threshold rule only

  static SecularPolicy full() { return {SecularMode::Full, PartialRule::PaperGroups, 0.0}; }
  static SecularPolicy paper() { return {SecularMode::Partial, PartialRule::PaperGroups, 0.0}; }
  // Negative eps means auto: 10 * mu^2 of the first bath at assembly time.
  static SecularPolicy threshold(double eps = -1.0) {
    return {SecularMode::Partial, PartialRule::Threshold, eps};
  }
};

enum class Variant : std::uint8_t { GP, GF, LP, LF };
std::string to_string(Variant v);
Variant variant_of(Construction c, SecularMode m);

struct AssembleOptions {
  bool lamb_shift = true;        // include H_LS (and the Im parts of Gamma)
  bool strict_local = false;     // Local: drop the coupling from the commutator too
  bool override_validity_guard = false;  // allow Local builds at lambda >= 0.5
  bool split_xz_correlations = false;    // zero x-z cross correlations (independent-bath emulation)
  double crossing_tol = -1.0;    // guard tolerance; < 0 means mu^2 of the first bath
  PvOptions pv{};                // Lamb-shift quadrature options
};

struct Liouvillian {
  Mat16 matrix;            // ham_part + lamb_part + diss_part (exact sum)
  Mat16 ham_part;          // -i[H_S, .]
  Mat16 lamb_part;         // -i[H_LS, .]
  Mat16 diss_part;         // dissipator
  // Per attached bath: that bath's dissipator terms plus its share of the
  // Lamb-shift commutator, so the generators add up to matrix - ham_part and
  // bath-resolved energy currents balance exactly in the steady state.
  std::vector<Mat16> bath_generators;

  Mat4 h_system;           // commutator Hamiltonian actually used
  Mat4 h_lamb;             // total Lamb-shift Hamiltonian

  Construction construction{};
  SecularPolicy policy{};
  AssembleOptions options{};
  QubitPairSpec system{};
  std::vector<BathSpec> baths;
  JumpTable jumps;
  Variant variant{};
  std::vector<std::string> warnings;
};

// Pairwise channel correlation coefficients summed over baths.  This is the
// named-coefficient layer of the master equation: e.g. for two uncoupled
// qubits rate(X1, X1, w1, w1) is the emission rate gamma_11 = g_x(1)^2 *
// gamma(w1), rate(X1, X2, w1, w2) the cross rate gamma_12 (zero without a
// common bath), rate(X1, X1, -w1, -w1) the absorption rate obeying detailed
// balance, and shift(...) the corresponding Lamb-shift table entries.
class CorrelationTable {
 public:
  CorrelationTable(std::vector<BathSpec> baths, bool lamb_shift,
                   bool split_xz, PvOptions pv = {});

  int n_baths() const { return static_cast<int>(baths_.size()); }
  const BathSpec& bath(int i) const { return baths_[i]; }

  // Coupling of channel b to bath i (zero when the bath is not attached to
  // that qubit or the x-z split is active for this combination).
  double coupling(int i, Channel b) const;

  // Half-range transform Gamma_{b b'}(w) restricted to one bath / summed.
  cplx Gamma_bath(int i, Channel b, Channel bp, double w) const;
  cplx Gamma(Channel b, Channel bp, double w) const;

  cplx rate(Channel b, Channel bp, double w, double wp) const;
  cplx shift(Channel b, Channel bp, double w, double wp) const;
  cplx rate_bath(int i, Channel b, Channel bp, double w, double wp) const;
  cplx shift_bath(int i, Channel b, Channel bp, double w, double wp) const;

 private:
  std::vector<BathSpec> baths_;
  std::vector<std::shared_ptr<BathCorrelation>> corr_;
  bool lamb_shift_;
  bool split_xz_;
};

// Secular pair filter.  The z-sector near-degenerate group is derived from
// the jump table (zero plus the smallest non-zero z frequency).
class SecularFilter {
 public:
  SecularFilter(SecularPolicy policy, const JumpTable& table);
  bool keeps(Channel b, double w, Channel bp, double wp) const;

 private:
  SecularPolicy policy_;
  std::vector<double> z_small_;  // |w| values of the near-degenerate z group
};

Liouvillian assemble(const QubitPairSpec& system,
                     const std::vector<BathSpec>& baths, Construction c,
                     SecularPolicy policy, AssembleOptions opts = {});

// Structural health report of an assembled generator.
struct GkslReport {
  double min_group_rate_eig = 0.0;   // min eigenvalue over secular-group rate matrices
  double trace_residual = 0.0;       // max |Tr L[E_kl]| over matrix units
  double hermiticity_residual = 0.0; // max || L[X^+] - (L[X])^+ ||
  double spectral_abscissa = 0.0;    // max Re eig(L)
};
GkslReport gksl_diagnostics(const Liouvillian& l);

}  // namespace qme
