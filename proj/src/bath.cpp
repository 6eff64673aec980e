#include "qme/bath.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <mutex>
#include <numbers>

#include "qme/errors.hpp"
#include "qme/quadrature.hpp"

namespace qme {

namespace {
constexpr double kPi = std::numbers::pi;
}

std::string to_string(BathAttachment a) {
  switch (a) {
    case BathAttachment::Common: return "common";
    case BathAttachment::Local1: return "local1";
    case BathAttachment::Local2: return "local2";
  }
  return "?";
}

BathSpec BathSpec::common(double beta, double gx1, double gx2, double gz1,
                          double gz2, double mu) {
  BathSpec b;
  b.attachment = BathAttachment::Common;
  b.beta = beta;
  b.gx_weight = {gx1, gx2};
  b.gz_weight = {gz1, gz2};
  b.mu = mu;
  b.validate();
  return b;
}

BathSpec BathSpec::local(int qubit, double beta, double gx, double gz,
                         double mu) {
  if (qubit != 1 && qubit != 2)
    throw ConfigError("bath: local bath qubit index must be 1 or 2");
  BathSpec b;
  b.attachment = qubit == 1 ? BathAttachment::Local1 : BathAttachment::Local2;
  b.beta = beta;
  b.gx_weight = {0, 0};
  b.gz_weight = {0, 0};
  b.gx_weight[qubit - 1] = gx;
  b.gz_weight[qubit - 1] = gz;
  b.mu = mu;
  b.validate();
  return b;
}

void BathSpec::validate() const {
  if (!(beta > 0) || !std::isfinite(beta))
    throw ConfigError("bath: inverse temperature must be positive and finite");
  if (!(mu > 0) || !std::isfinite(mu))
    throw ConfigError("bath: perturbative scale mu must be positive");
  if (!(spectral.cutoff > 0))
    throw ConfigError("bath: spectral cutoff must be positive");
  for (double w : gx_weight)
    if (!std::isfinite(w) || w < 0)
      throw ConfigError("bath: coupling weights must be finite and >= 0");
  for (double w : gz_weight)
    if (!std::isfinite(w) || w < 0)
      throw ConfigError("bath: coupling weights must be finite and >= 0");
  const bool touches1 = gx_weight[0] != 0 || gz_weight[0] != 0;
  const bool touches2 = gx_weight[1] != 0 || gz_weight[1] != 0;
  if (attachment == BathAttachment::Local1 && touches2)
    throw ConfigError("bath: a qubit-1 bath cannot carry qubit-2 couplings");
  if (attachment == BathAttachment::Local2 && touches1)
    throw ConfigError("bath: a qubit-2 bath cannot carry qubit-1 couplings");
}

double BathSpec::correlation_time() const {
  return std::max(1.0 / spectral.cutoff, beta / (2.0 * kPi));
}

std::string BathSpec::label() const {
  switch (attachment) {
    case BathAttachment::Common: return "c";
    case BathAttachment::Local1: return "l1";
    case BathAttachment::Local2: return "l2";
  }
  return "?";
}

MarkovDiagnostic markov_check(const BathSpec& b) {
  MarkovDiagnostic d;
  d.tau_bath = b.correlation_time();
  d.tau_relax = 1.0 / (b.mu * b.mu);
  d.ok = d.tau_bath * 100.0 < d.tau_relax;
  return d;
}

BathCorrelation::BathCorrelation(BathSpec spec, PvOptions pv)
    : spec_(std::move(spec)), pv_(pv) {
  spec_.validate();
}

double BathCorrelation::gamma_at(double omega) const {
  const double beta = spec_.beta;
  if (omega == 0.0) return 2.0 * kPi / beta;
  const double aw = std::abs(omega);
  const double j = spec_.spectral(aw);
  // N = 1/(e^{beta w} - 1); emission carries N + 1, absorption carries N.
  const double n = 1.0 / std::expm1(beta * aw);
  return omega > 0 ? 2.0 * kPi * j * (n + 1.0) : 2.0 * kPi * j * n;
}

double BathCorrelation::lamb_shift_at(double omega) const {
  const std::uint64_t key = std::bit_cast<std::uint64_t>(omega);
  {
    std::shared_lock lock(mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  const double value = compute_lamb_shift(omega);
  std::unique_lock lock(mutex_);
  cache_.emplace(key, value);
  return value;
}

// S(w) = (1/2pi) PV Int_{-inf}^{inf} gamma(nu)/(w - nu) dnu, evaluated as
//  (a) a symmetric window around the pole, Int_0^a [gamma(w-u)-gamma(w+u)]/u du,
//      where the integrand is smooth (the pole cancels),
//  (b) plain segments from the window edges out to C = cutoff_factor*Omega,
//  (c) the |nu| > C tails mapped to [0, 1/C] via nu = 1/u, which is finite
//      because gamma(nu) ~ 2*pi*Omega^2/nu at large nu.
double BathCorrelation::compute_lamb_shift(double omega) const {
  const double tol = pv_.abs_tol / 5.0;
  const auto g = [this](double nu) { return gamma_at(nu); };
  const double C =
      std::max(pv_.cutoff_factor * spec_.spectral.cutoff, 4.0 * std::abs(omega) + 10.0);
  const double a = 1.0;

  double total = 0.0;
  // (a) symmetric window: the u -> 0 limit is -2*gamma'(w), finite and smooth.
  total += integrate_adaptive(
               [&](double u) { return (g(omega - u) - g(omega + u)) / u; }, 0.0,
               a, tol)
               .value;
  // (b) left and right plain segments.
  total += integrate_adaptive(
               [&](double nu) { return g(nu) / (omega - nu); }, omega + a, C,
               tol)
               .value;
  total += integrate_adaptive(
               [&](double nu) { return g(nu) / (omega - nu); }, -C, omega - a,
               tol)
               .value;
  // (c) algebraic tails, nu = +-1/u.
  total += integrate_adaptive(
               [&](double u) {
                 return g(1.0 / u) / ((omega - 1.0 / u) * u * u);
               },
               0.0, 1.0 / C, tol)
               .value;
  total += integrate_adaptive(
               [&](double u) {
                 return g(-1.0 / u) / ((omega + 1.0 / u) * u * u);
               },
               0.0, 1.0 / C, tol)
               .value;
  return total / (2.0 * kPi);
}

}  // namespace qme
