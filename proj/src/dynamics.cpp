#include "qme/dynamics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <unordered_map>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "qme/errors.hpp"
#include "qme/observables.hpp"

namespace qme {

namespace {

void check_times(const std::vector<double>& times) {
  if (times.empty()) throw ConfigError("propagate: empty time grid");
  double prev = -1.0;
  for (double t : times) {
    if (!(t >= 0) || !std::isfinite(t))
      throw ConfigError("propagate: times must be non-negative and finite");
    if (t <= prev) throw ConfigError("propagate: times must be strictly increasing");
    prev = t;
  }
}

// One matrix exponential per distinct step size on the grid.
class StepCache {
 public:
  explicit StepCache(const Mat16& generator) : generator_(generator) {}

  const Mat16& at(double dt) {
    const std::uint64_t key = std::bit_cast<std::uint64_t>(dt);
    auto it = cache_.find(key);
    if (it == cache_.end())
      it = cache_.emplace(key, Mat16((generator_ * dt).exp())).first;
    return it->second;
  }

 private:
  const Mat16& generator_;
  std::unordered_map<std::uint64_t, Mat16> cache_;
};

}  // namespace

std::vector<double> uniform_grid(double t_max, double dt) {
  if (!(t_max > 0) || !(dt > 0))
    throw ConfigError("uniform_grid: t_max and dt must be positive");
  const auto n = static_cast<std::size_t>(std::floor(t_max / dt + 1e-9));
  std::vector<double> times(n + 1);
  for (std::size_t k = 0; k <= n; ++k) times[k] = static_cast<double>(k) * dt;
  return times;
}

Trajectory propagate_serial_expm(const Mat16& generator, const Mat4& rho0,
                                 const std::vector<double>& times) {
  check_times(times);
  Trajectory traj;
  traj.times = times;
  traj.states.reserve(times.size());
  StepCache cache(generator);
  Vec16 v = vec(rho0);
  double prev = 0.0;
  for (double t : times) {
    const double dt = t - prev;
    if (dt > 0) v = cache.at(dt) * v;
    prev = t;
    traj.states.push_back(unvec(v));
  }
  return traj;
}

Trajectory propagate_parallel_expm(const Mat16& generator, const Mat4& rho0,
                                   const std::vector<double>& times) {
  check_times(times);
  const auto n = times.size();
  Trajectory traj;
  traj.times = times;
  traj.states.assign(n, Mat4::Zero());

  int threads = 1;
#ifdef _OPENMP
  threads = omp_get_max_threads();
#endif
  const std::size_t chunks =
      std::min<std::size_t>(n, std::max<std::size_t>(1, 4 * threads));
  const Vec16 v0 = vec(rho0);

  // The per-step exponentials are shared; precompute them serially so the
  // parallel region is read-only on the cache.
  StepCache cache(generator);
  for (std::size_t k = 1; k < n; ++k)
    if (times[k] - times[k - 1] > 0) cache.at(times[k] - times[k - 1]);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t begin = c * n / chunks;
    const std::size_t end = (c + 1) * n / chunks;
    if (begin >= end) continue;
    Vec16 v = times[begin] > 0
                  ? Vec16((generator * times[begin]).exp() * v0)
                  : v0;
    traj.states[begin] = unvec(v);
    for (std::size_t k = begin + 1; k < end; ++k) {
      const double dt = times[k] - times[k - 1];
      if (dt > 0) v = cache.at(dt) * v;
      traj.states[k] = unvec(v);
    }
  }
  return traj;
}

// Dormand-Prince 5(4) with FSAL, local error controlled per unit time.
Trajectory propagate_adaptive(const Mat16& generator, const Mat4& rho0,
                              const std::vector<double>& times,
                              double tol_per_unit_time) {
  check_times(times);
  if (!(tol_per_unit_time > 0))
    throw ConfigError("propagate: adaptive tolerance must be positive");

  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600,
                          e3 = 500.0 / 1113 - 7571.0 / 16695,
                          e4 = 125.0 / 192 - 393.0 / 640,
                          e5 = -2187.0 / 6784 + 92097.0 / 339200,
                          e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

  Trajectory traj;
  traj.times = times;
  traj.states.reserve(times.size());

  const double t_end = times.back();
  const double h_min = std::max(t_end, 1.0) * 1e-14;
  Vec16 v = vec(rho0);
  Vec16 k1 = generator * v;
  double t = 0.0;
  double h = std::min(t_end > 0 ? t_end : 1.0, 1e-2);
  std::size_t next = 0;
  while (next < times.size() && times[next] <= 0.0) {
    traj.states.push_back(unvec(v));
    ++next;
  }

  while (next < times.size()) {
    bool hit_sample = false;
    if (t + h >= times[next] - h_min) {
      h = std::max(times[next] - t, 0.0);
      hit_sample = true;
    }

    const Vec16 k2 = generator * (v + h * (a21 * k1));
    const Vec16 k3 = generator * (v + h * (a31 * k1 + a32 * k2));
    const Vec16 k4 = generator * (v + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Vec16 k5 =
        generator * (v + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Vec16 k6 = generator * (v + h * (a61 * k1 + a62 * k2 + a63 * k3 +
                                           a64 * k4 + a65 * k5));
    const Vec16 v5 = v + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Vec16 k7 = generator * v5;
    const double err =
        (h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7))
            .cwiseAbs()
            .maxCoeff();
    const double scale = std::max(1.0, v.cwiseAbs().maxCoeff());
    const double tol = tol_per_unit_time * std::max(h, h_min) * scale;
    if (err <= tol) {
      t += h;
      v = v5;
      k1 = k7;  // FSAL
      if (hit_sample) {
        traj.states.push_back(unvec(v));
        ++next;
      }
    } else if (h <= 2.0 * h_min) {
      throw StepFailure("adaptive step size underflow at t = " +
                        std::to_string(t));
    }
    const double grow = err > 0 ? 0.9 * std::pow(tol / err, 0.2) : 5.0;
    h = std::max(h * std::clamp(grow, 0.2, 5.0), h_min);
  }
  return traj;
}

Trajectory propagate(const Mat16& generator, const Mat4& rho0,
                     const std::vector<double>& times, PropagateOptions opts) {
  if (opts.method == PropagationMethod::Adaptive)
    return propagate_adaptive(generator, rho0, times, opts.adaptive_tol);
  return opts.parallel ? propagate_parallel_expm(generator, rho0, times)
                       : propagate_serial_expm(generator, rho0, times);
}

SteadyStateResult steady_state(const Mat16& generator, std::optional<Mat4> rho0,
                               double horizon) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(generator, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double thresh = 1e-10 * sv(0);
  int nullity = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) <= thresh) ++nullity;

  SteadyStateResult res;
  res.nullity = nullity;

  const auto finish = [&](const Mat4& rho) {
    Mat4 r = hermitize(rho);
    const double tr = r.trace().real();
    if (std::abs(tr) < 1e-10)
      throw NoConvergence("steady state: traceless null vector");
    r /= tr;
    res.state = r;
    res.residual = (generator * vec(r)).cwiseAbs().maxCoeff();
    if (res.residual > 1e-9)
      throw NoConvergence("steady state: residual " +
                          std::to_string(res.residual) + " exceeds 1e-9");
    return res;
  };

  if (nullity == 1) return finish(unvec(svd.matrixV().col(15)));
  if (nullity == 0)
    throw NoConvergence("steady state: generator has no numerical null vector");

  // Degenerate null space: the limit depends on the initial state.
  if (!rho0)
    throw ConfigError(
        "steady state: null space is " + std::to_string(nullity) +
        "-dimensional; an initial state is required to select the limit");

  double t = 1.0;
  Mat16 e = Mat16(generator.exp());
  Vec16 prev = e * vec(*rho0);
  while (t < horizon) {
    e = Mat16(e * e);  // exp(L 2t)
    t *= 2.0;
    const Vec16 cur = e * vec(*rho0);
    if (trace_distance(unvec(cur), unvec(prev)) <= 1e-10)
      return finish(unvec(cur));
    prev = cur;
  }
  throw NoConvergence(
      "steady state: time-doubling did not converge within the horizon");
}

double heat_current(const Liouvillian& l, int bath_index, const Mat4& rho) {
  if (bath_index < 0 ||
      bath_index >= static_cast<int>(l.bath_generators.size()))
    throw ConfigError("heat_current: bath index out of range");
  const Mat4 drho = unvec(l.bath_generators[bath_index] * vec(rho));
  return (l.h_system * drho).trace().real();
}

HeatCurrents heat_currents(const Liouvillian& l, const Mat4& rho) {
  HeatCurrents hc;
  double max_abs = 0.0;
  for (std::size_t k = 0; k < l.bath_generators.size(); ++k) {
    hc.per_bath.push_back(heat_current(l, static_cast<int>(k), rho));
    hc.total += hc.per_bath.back();
    max_abs = std::max(max_abs, std::abs(hc.per_bath.back()));
  }
  hc.balanced = std::abs(hc.total) <= 1e-10 * std::max(max_abs, 1e-300);
  return hc;
}

}  // namespace qme
