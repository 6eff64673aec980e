// State functionals and trajectory analysis: expectation values, fidelity,
// entanglement negativity, beat spectra, and windowed synchronization.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qme/matrices.hpp"

namespace qme {

double expectation(const Mat4& rho, const Mat4& op);  // Re Tr(op rho)

// Uhlmann fidelity F(rho, sigma) = (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
double fidelity(const Mat4& rho, const Mat4& sigma);

// 0.5 * || rho - sigma ||_1.
double trace_distance(const Mat4& rho, const Mat4& sigma);

// Partial transpose over qubit 2 in the canonical basis.
Mat4 partial_transpose_q2(const Mat4& rho);

// Entanglement negativity: sum of |negative eigenvalues| of rho^T2.
// 0.5 for a Bell state, exactly 0 for PPT states.
double negativity(const Mat4& rho);

// Smallest eigenvalue of rho (positivity monitoring).
double min_eigenvalue(const Mat4& rho);

// Named single-qubit observables for trajectory output: sz1, sz2, sx1, sx2,
// sy1, sy2, p11, p10, p01, p00, negativity, purity.
std::vector<std::string> known_observables();
double evaluate_observable(const std::string& name, const Mat4& rho);

// Magnitude spectrum of a uniformly sampled series: remove the best-fit
// relaxing baseline (line plus one decaying exponential, rate scanned over a
// log grid), apply a Hann window, Fourier transform, and report bin magnitudes
// over angular frequencies 2*pi*k/(N*dt), k = 0..N/2.  `peak_index` is the
// dominant non-zero-frequency bin.
struct BeatSpectrum {
  std::vector<double> omega;      // angular frequencies, bin 0 included
  std::vector<double> amplitude;  // window-normalised magnitudes
  int peak_index = 0;             // argmax over k >= 1
  double peak_omega = 0.0;
  double peak_amplitude = 0.0;
  // Amplitude at the bin closest to a given angular frequency.
  double amplitude_near(double w) const;
};
BeatSpectrum beat_spectrum(const std::vector<double>& times,
                           const std::vector<double>& series);

// Sliding-window Pearson correlation between two equally sampled series.
// Entry i correlates the window ending at sample i (window w samples, >= 10);
// entries with an incomplete window or vanishing variance are empty.
std::vector<std::optional<double>> sliding_pearson(
    const std::vector<double>& a, const std::vector<double>& b, int window);

}  // namespace qme
