// Benchmark: serial reference kernels vs the OpenMP-parallel paths.
//
//   * trajectory propagation (matrix-exponential stepping) at two grid sizes;
//   * steady-state sweep dispatch over a coupling grid.
//
// Prints wall times, speedups, and the max deviation between the two routes
// (which must agree to near round-off).  Thread count follows OMP_NUM_THREADS.
#include <chrono>
#include <cstdio>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "qme/dynamics.hpp"
#include "qme/observables.hpp"
#include "qme/scenario.hpp"

using namespace qme;
using clock_type = std::chrono::steady_clock;

namespace {

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

void bench_trajectory(const Liouvillian& l, const Mat4& rho0, double dt,
                      int n_steps) {
  const std::vector<double> grid = uniform_grid(dt * n_steps, dt);
  auto t0 = clock_type::now();
  const Trajectory serial = propagate_serial_expm(l.matrix, rho0, grid);
  const double t_serial = seconds_since(t0);

  t0 = clock_type::now();
  const Trajectory parallel = propagate_parallel_expm(l.matrix, rho0, grid);
  const double t_parallel = seconds_since(t0);

  double dev = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k)
    dev = std::max(dev, trace_distance(serial.states[k], parallel.states[k]));

  std::printf("  %7d steps   serial %8.3f s   parallel %8.3f s   "
              "speedup %5.2fx   max dev %.2e\n",
              n_steps, t_serial, t_parallel, t_serial / t_parallel, dev);
}

void bench_sweep(const ScenarioConfig& cfg) {
  auto t0 = clock_type::now();
  const RunResult serial = run_scenario(cfg, /*parallel=*/false);
  const double t_serial = seconds_since(t0);

  t0 = clock_type::now();
  const RunResult parallel = run_scenario(cfg, /*parallel=*/true);
  const double t_parallel = seconds_since(t0);

  double dev = 0.0;
  for (std::size_t t = 0; t < serial.tables.size(); ++t)
    for (std::size_t c = 0; c < serial.tables[t].data.size(); ++c)
      for (std::size_t r = 0; r < serial.tables[t].data[c].size(); ++r)
        dev = std::max(dev, std::abs(serial.tables[t].data[c][r] -
                                     parallel.tables[t].data[c][r]));

  std::printf("  %7zu points  serial %8.3f s   parallel %8.3f s   "
              "speedup %5.2fx   max dev %.2e\n",
              serial.tables.front().data.front().size(), t_serial, t_parallel,
              t_serial / t_parallel, dev);
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP enabled, max threads = %d\n", omp_get_max_threads());
#else
  std::printf("built without OpenMP; both paths run serially\n");
#endif

  const ScenarioConfig traj_cfg = preset("fig2b");
  const Liouvillian l =
      assemble_variant(traj_cfg, traj_cfg.cases.front(), Variant::GP);
  std::printf("trajectory propagation (matrix-exponential stepping):\n");
  bench_trajectory(l, traj_cfg.rho0, 2.5, 2000);
  bench_trajectory(l, traj_cfg.rho0, 2.5, 20000);

  ScenarioConfig sweep_cfg = preset("fig5a");
  sweep_cfg.lambda_grid = GridSpec::log(1e-6, 10.0, 24);
  std::printf("steady-state sweep dispatch:\n");
  bench_sweep(sweep_cfg);
  return 0;
}
