// Thermal bath description and correlation functions.
//
// Each bath couples to the qubits through dissipative (sigma_x) and/or
// dephasing (sigma_z) channels with effective strengths g = weight * mu,
// where mu is the global perturbative scale.  The spectral density is Ohmic
// with an algebraic cutoff, J(w) = w * Omega^2 / (Omega^2 + w^2).
//
// The half-range Fourier transform of the bath correlation function is
//   Gamma(w) = 0.5 * gamma(w) + i * S(w),
// with the golden-rule rate
//   gamma(w > 0) = 2*pi*J(w)*(N(w) + 1),   gamma(w < 0) = 2*pi*J(|w|)*N(|w|),
//   gamma(0)     = 2*pi/beta               (Ohmic limit),
// obeying detailed balance gamma(-w) = exp(-beta*w)*gamma(w), and the
// Hilbert-transform partner
//   S(w) = (1/2pi) * PV Int dnu gamma(nu) / (w - nu)
// evaluated by principal-value quadrature (symmetric folding around the pole
// plus 1/nu-substituted tails).
#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

namespace qme {

struct SpectralDensity {
  double cutoff = 20.0;  // Omega, in units of omega_1
  double operator()(double w) const {  // J(w) for w >= 0
    return w * cutoff * cutoff / (cutoff * cutoff + w * w);
  }
};

enum class BathAttachment : std::uint8_t { Common, Local1, Local2 };

std::string to_string(BathAttachment a);

struct BathSpec {
  BathAttachment attachment = BathAttachment::Common;
  double beta = 1.0;                     // inverse temperature
  SpectralDensity spectral{};
  std::array<double, 2> gx_weight{0, 0};  // dissipative weights (qubit 1, qubit 2)
  std::array<double, 2> gz_weight{0, 0};  // dephasing weights
  double mu = 1e-2;                       // perturbative scale; g = weight * mu

  static BathSpec common(double beta, double gx1, double gx2, double gz1 = 0,
                         double gz2 = 0, double mu = 1e-2);
  static BathSpec local(int qubit, double beta, double gx, double gz = 0,
                        double mu = 1e-2);

  // Effective couplings (qubit is 1-based).
  double gx(int qubit) const { return gx_weight[qubit - 1] * mu; }
  double gz(int qubit) const { return gz_weight[qubit - 1] * mu; }

  // Throws ConfigError on inconsistent attachment/weights or bad parameters.
  void validate() const;

  // Bath correlation time max(1/Omega, beta/2pi).
  double correlation_time() const;

  std::string label() const;  // "c", "l1", "l2"
};

// Weak-coupling / Markov validity: the bath correlation time must be well
// separated from the relaxation scale tau_R = mu^-2.
struct MarkovDiagnostic {
  double tau_bath = 0.0;
  double tau_relax = 0.0;
  bool ok = true;
};
MarkovDiagnostic markov_check(const BathSpec& b);

struct PvOptions {
  double abs_tol = 1e-8;       // absolute tolerance per quadrature segment
  double cutoff_factor = 50.0; // finite-domain handover at cutoff_factor*Omega
};

// Correlation-function evaluator for one bath.  gamma_at is closed-form;
// lamb_shift_at runs the principal-value quadrature and memoises results per
// frequency (thread-safe, read-mostly).
class BathCorrelation {
 public:
  explicit BathCorrelation(BathSpec spec, PvOptions pv = {});

  double gamma_at(double omega) const;       // golden-rule rate, any sign
  double lamb_shift_at(double omega) const;  // S(omega), cached

  const BathSpec& spec() const { return spec_; }

 private:
  double compute_lamb_shift(double omega) const;

  BathSpec spec_;
  PvOptions pv_;
  mutable std::shared_mutex mutex_;
  mutable std::unordered_map<std::uint64_t, double> cache_;
};

}  // namespace qme
