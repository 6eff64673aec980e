#include "qme/observables.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "qme/errors.hpp"

namespace qme {

double expectation(const Mat4& rho, const Mat4& op) {
  return (op * rho).trace().real();
}

namespace {

// Hermitian principal square root with negative eigenvalues clipped (states
// can dip microscopically below zero numerically).
Mat4 psd_sqrt(const Mat4& m) {
  Eigen::SelfAdjointEigenSolver<Mat4> es(m);
  Vec4 d = Vec4::Zero();
  for (int i = 0; i < 4; ++i)
    d(i) = std::sqrt(std::max(es.eigenvalues()(i), 0.0));
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

double fidelity(const Mat4& rho, const Mat4& sigma) {
  const Mat4 sr = psd_sqrt(hermitize(rho));
  const Mat4 inner = sr * hermitize(sigma) * sr;
  Eigen::SelfAdjointEigenSolver<Mat4> es(inner);
  double sum = 0.0;
  for (int i = 0; i < 4; ++i)
    sum += std::sqrt(std::max(es.eigenvalues()(i), 0.0));
  return sum * sum;
}

double trace_distance(const Mat4& rho, const Mat4& sigma) {
  Eigen::SelfAdjointEigenSolver<Mat4> es(Mat4(hermitize(rho) - hermitize(sigma)));
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

Mat4 partial_transpose_q2(const Mat4& rho) {
  Mat4 pt;
  for (int i1 = 0; i1 < 2; ++i1)
    for (int i2 = 0; i2 < 2; ++i2)
      for (int j1 = 0; j1 < 2; ++j1)
        for (int j2 = 0; j2 < 2; ++j2)
          pt(2 * i1 + i2, 2 * j1 + j2) = rho(2 * i1 + j2, 2 * j1 + i2);
  return pt;
}

double negativity(const Mat4& rho) {
  Eigen::SelfAdjointEigenSolver<Mat4> es(partial_transpose_q2(hermitize(rho)));
  double neg = 0.0;
  for (int i = 0; i < 4; ++i)
    if (es.eigenvalues()(i) < 0) neg -= es.eigenvalues()(i);
  return neg;
}

double min_eigenvalue(const Mat4& rho) {
  Eigen::SelfAdjointEigenSolver<Mat4> es(hermitize(rho));
  return es.eigenvalues().minCoeff();
}

std::vector<std::string> known_observables() {
  return {"sz1", "sz2", "sx1",  "sx2",  "sy1",        "sy2",    "p11",
          "p10", "p01", "p00", "pop1", "pop2", "negativity", "purity"};
}

double evaluate_observable(const std::string& name, const Mat4& rho) {
  if (name == "sz1") return expectation(rho, on_qubit(sigma_z(), 1));
  if (name == "sz2") return expectation(rho, on_qubit(sigma_z(), 2));
  if (name == "sx1") return expectation(rho, on_qubit(sigma_x(), 1));
  if (name == "sx2") return expectation(rho, on_qubit(sigma_x(), 2));
  if (name == "sy1") return expectation(rho, on_qubit(sigma_y(), 1));
  if (name == "sy2") return expectation(rho, on_qubit(sigma_y(), 2));
  if (name == "p11") return rho(0, 0).real();
  if (name == "p10") return rho(1, 1).real();
  if (name == "p01") return rho(2, 2).real();
  if (name == "p00") return rho(3, 3).real();
  if (name == "pop1") return (rho(0, 0) + rho(1, 1)).real();  // qubit 1 excited
  if (name == "pop2") return (rho(0, 0) + rho(2, 2)).real();  // qubit 2 excited
  if (name == "negativity") return negativity(rho);
  if (name == "purity") return (rho * rho).trace().real();
  throw ConfigError("unknown observable: " + name);
}

double BeatSpectrum::amplitude_near(double w) const {
  if (omega.size() < 2) return 0.0;
  const double dw = omega[1] - omega[0];
  const auto k = static_cast<std::size_t>(
      std::clamp(std::llround(w / dw), 0ll,
                 static_cast<long long>(omega.size() - 1)));
  return amplitude[k];
}

BeatSpectrum beat_spectrum(const std::vector<double>& times,
                           const std::vector<double>& series) {
  const std::size_t n = times.size();
  if (n < 8 || series.size() != n)
    throw ConfigError("beat_spectrum: need >= 8 uniform samples");
  const double dt = times[1] - times[0];
  for (std::size_t k = 1; k < n; ++k)
    if (std::abs(times[k] - times[k - 1] - dt) > 1e-9 * std::max(dt, 1.0))
      throw ConfigError("beat_spectrum: time grid is not uniform");

  // Detrend by removing the best-fit relaxing baseline a + b*t + c*e^{-r t}.
  // Dissipative trajectories ride on exponentially settling envelopes; with a
  // line-only detrend the envelope curvature swamps the low-frequency bins.
  // The rate r is scanned over a log grid and the least-squares residual with
  // the smallest error is kept (a plain line is the first candidate).
  const double span = times[n - 1] - times[0];
  Eigen::VectorXd tt(static_cast<Eigen::Index>(n));
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    tt(static_cast<Eigen::Index>(k)) = times[k] - times[0];
    y(static_cast<Eigen::Index>(k)) = series[k];
  }
  Eigen::MatrixXd design(static_cast<Eigen::Index>(n), 3);
  design.col(0).setOnes();
  design.col(1) = tt;
  design.col(2).setZero();
  Eigen::VectorXd residual =
      y - design.leftCols(2) * design.leftCols(2).colPivHouseholderQr().solve(y);
  double best_sse = residual.squaredNorm();
  const double r_lo = 0.1 / span, r_hi = 100.0 / span;
  for (int j = 0; j <= 60; ++j) {
    const double r =
        r_lo * std::exp(std::log(r_hi / r_lo) * static_cast<double>(j) / 60.0);
    design.col(2) = (-r * tt.array()).exp();
    const Eigen::VectorXd res = y - design * design.colPivHouseholderQr().solve(y);
    const double sse = res.squaredNorm();
    if (sse < best_sse) {
      best_sse = sse;
      residual = res;
    }
  }

  std::vector<cplx> windowed(n);
  double wsum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double w =
        0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(k) /
                              static_cast<double>(n - 1)));
    wsum += w;
    windowed[k] = w * residual(static_cast<Eigen::Index>(k));
  }

  BeatSpectrum spec;
  const std::size_t half = n / 2;
  spec.omega.resize(half + 1);
  spec.amplitude.resize(half + 1);
  // Direct transform; trajectory grids are a few thousand samples, so the
  // O(N^2) cost stays in the tens of milliseconds.
  const cplx base(0.0, -2.0 * std::numbers::pi / static_cast<double>(n));
  for (std::size_t k = 0; k <= half; ++k) {
    const cplx rot = std::exp(base * static_cast<double>(k));
    cplx acc = 0.0, cur = 1.0;
    for (std::size_t m = 0; m < n; ++m) {
      acc += windowed[m] * cur;
      cur *= rot;
    }
    spec.omega[k] = 2.0 * std::numbers::pi * static_cast<double>(k) /
                    (static_cast<double>(n) * dt);
    spec.amplitude[k] = 2.0 * std::abs(acc) / wsum;
  }
  spec.peak_index = 1;
  for (std::size_t k = 2; k <= half; ++k)
    if (spec.amplitude[k] > spec.amplitude[spec.peak_index])
      spec.peak_index = static_cast<int>(k);
  spec.peak_omega = spec.omega[spec.peak_index];
  spec.peak_amplitude = spec.amplitude[spec.peak_index];
  return spec;
}

std::vector<std::optional<double>> sliding_pearson(
    const std::vector<double>& a, const std::vector<double>& b, int window) {
  if (window < 10) throw ConfigError("sliding_pearson: window must be >= 10");
  if (a.size() != b.size())
    throw ConfigError("sliding_pearson: series lengths differ");
  const std::size_t n = a.size();
  std::vector<std::optional<double>> out(n);
  if (n < static_cast<std::size_t>(window)) return out;
  const auto w = static_cast<std::size_t>(window);
  for (std::size_t i = w - 1; i < n; ++i) {
    // Recompute each window directly; numerically safer than rolling sums
    // and still linear-ish for the window sizes used here.
    double ma = 0.0, mb = 0.0;
    for (std::size_t k = i + 1 - w; k <= i; ++k) {
      ma += a[k];
      mb += b[k];
    }
    ma /= static_cast<double>(w);
    mb /= static_cast<double>(w);
    double saa = 0.0, sbb = 0.0, sab = 0.0;
    for (std::size_t k = i + 1 - w; k <= i; ++k) {
      saa += (a[k] - ma) * (a[k] - ma);
      sbb += (b[k] - mb) * (b[k] - mb);
      sab += (a[k] - ma) * (b[k] - mb);
    }
    if (saa <= 1e-30 || sbb <= 1e-30) continue;
    out[i] = sab / std::sqrt(saa * sbb);
  }
  return out;
}

}  // namespace qme
