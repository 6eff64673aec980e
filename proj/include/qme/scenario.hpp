// Scenario layer: named parameter studies (trajectories, steady-state sweeps,
// heat-current sweeps, validity scans) over one or more master-equation
// variants, plus the built-in presets reproducing the reference figures.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "qme/dynamics.hpp"
#include "qme/liouvillian.hpp"
#include "qme/matrices.hpp"
#include "qme/observables.hpp"

namespace qme {

struct GridSpec {
  enum class Kind : std::uint8_t { Log, Linear, Explicit };
  Kind kind = Kind::Explicit;
  double lo = 0.0, hi = 0.0;
  int n = 0;
  std::vector<double> points;  // Explicit only

  static GridSpec log(double lo, double hi, int n);
  static GridSpec linear(double lo, double hi, int n);
  static GridSpec list(std::vector<double> pts);
  std::vector<double> values() const;
};

enum class RunKind : std::uint8_t {
  Trajectory,
  SteadySweep,   // steady states vs coupling; fidelities against the first variant
  HeatSweep,     // stationary currents vs coupling
  ValidityScan,  // 2D (coupling x detuning) steady-state fidelity table
};
std::string to_string(RunKind k);

// One parameter point of a scenario (presets may bundle several, e.g. the
// resonant and detuned panels of one figure).
struct ScenarioCase {
  std::string label;
  QubitPairSpec system;
  std::vector<BathSpec> baths;
};

Mat4 plus_plus_state();  // both qubits fully x-polarised

struct ScenarioConfig {
  std::string name;
  RunKind kind = RunKind::Trajectory;
  std::vector<ScenarioCase> cases;
  std::vector<Variant> variants;            // first one is the fidelity reference
  SecularPolicy partial_policy = SecularPolicy::paper();
  AssembleOptions options{};

  // Trajectory runs.
  double t_max = 0.0;
  double dt = 0.0;
  std::vector<std::string> observables;

  // Sweep runs.
  GridSpec lambda_grid;
  GridSpec omega_minus_grid;  // ValidityScan only

  Mat4 rho0 = plus_plus_state();  // initial state
};

// Uniform tabular result: one named table per (case, aspect), columns of
// equal length.  CSV/JSON/SVG writers consume this directly.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> data;  // data[c][row]
};

struct RunResult {
  ScenarioConfig config;
  std::vector<Table> tables;
  // Trajectory state archives keyed "case/variant" (for the JSON format).
  std::map<std::string, Trajectory> trajectories;
  std::vector<std::string> warnings;
};

// Executes a scenario.  Sweep points are dispatched to an OpenMP worker pool
// when `parallel` is set; results are ordered by grid index either way.
RunResult run_scenario(const ScenarioConfig& cfg, bool parallel = true);

// Built-in presets: fig2a fig2b fig3 fig4 fig5a fig5b fig6a fig6b fig7a
// fig7b table1_scan.  Throws ConfigError for unknown names.
ScenarioConfig preset(const std::string& name);
std::vector<std::string> preset_names();

// Per-variant construction used by the scenario layer: Local for LP/LF,
// GlobalUncoupled for GP/GF on an uncoupled system, GlobalCoupled otherwise.
Construction construction_for(Variant v, const QubitPairSpec& spec);

// Assembles one variant of one case under the scenario's options.
Liouvillian assemble_variant(const ScenarioConfig& cfg, const ScenarioCase& c,
                             Variant v);

}  // namespace qme
