#include "qme/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <sstream>

#include "qme/errors.hpp"

namespace qme {

GridSpec GridSpec::log(double lo, double hi, int n) {
  GridSpec g;
  g.kind = Kind::Log;
  g.lo = lo;
  g.hi = hi;
  g.n = n;
  return g;
}

GridSpec GridSpec::linear(double lo, double hi, int n) {
  GridSpec g;
  g.kind = Kind::Linear;
  g.lo = lo;
  g.hi = hi;
  g.n = n;
  return g;
}

GridSpec GridSpec::list(std::vector<double> pts) {
  GridSpec g;
  g.kind = Kind::Explicit;
  g.points = std::move(pts);
  return g;
}

std::vector<double> GridSpec::values() const {
  std::vector<double> v;
  switch (kind) {
    case Kind::Log: {
      if (!(lo > 0) || !(hi > lo) || n < 2)
        throw ConfigError("grid: log grids need 0 < lo < hi and n >= 2");
      const double r = std::log(hi / lo) / (n - 1);
      for (int k = 0; k < n; ++k) v.push_back(lo * std::exp(r * k));
      v.back() = hi;
      break;
    }
    case Kind::Linear: {
      if (!(hi > lo) || n < 2)
        throw ConfigError("grid: linear grids need lo < hi and n >= 2");
      for (int k = 0; k < n; ++k)
        v.push_back(lo + (hi - lo) * k / static_cast<double>(n - 1));
      v.back() = hi;
      break;
    }
    case Kind::Explicit:
      v = points;
      break;
  }
  if (v.empty()) throw ConfigError("grid: no points");
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1]))
      throw ConfigError("grid: points must be strictly increasing");
  return v;
}

std::string to_string(RunKind k) {
  switch (k) {
    case RunKind::Trajectory: return "trajectory";
    case RunKind::SteadySweep: return "steady_sweep";
    case RunKind::HeatSweep: return "heat_sweep";
    case RunKind::ValidityScan: return "validity_scan";
  }
  return "?";
}

Mat4 plus_plus_state() {
  Mat2 plus;
  plus << 0.5, 0.5, 0.5, 0.5;
  return kron(plus, plus);
}

Construction construction_for(Variant v, const QubitPairSpec& spec) {
  if (v == Variant::LP || v == Variant::LF) return Construction::Local;
  return spec.is_coupled() ? Construction::GlobalCoupled
                           : Construction::GlobalUncoupled;
}

namespace {

SecularPolicy policy_for(const ScenarioConfig& cfg, Variant v) {
  if (v == Variant::GF || v == Variant::LF) return SecularPolicy::full();
  return cfg.partial_policy;
}

Liouvillian assemble_case(const ScenarioConfig& cfg, const QubitPairSpec& sys,
                          const std::vector<BathSpec>& baths, Variant v) {
  return assemble(sys, baths, construction_for(v, sys), policy_for(cfg, v),
                  cfg.options);
}

std::string table_name(const ScenarioCase& c, const std::string& aspect) {
  return c.label.empty() ? aspect : c.label + "_" + aspect;
}

void merge_warnings(RunResult& result, const std::vector<std::string>& w) {
  for (const auto& s : w)
    if (std::find(result.warnings.begin(), result.warnings.end(), s) ==
        result.warnings.end())
      result.warnings.push_back(s);
}

QubitPairSpec with_lambda(const QubitPairSpec& base, double lambda) {
  if (base.kind == CouplingKind::Heisenberg)
    throw ConfigError(
        "sweeps vary a single scalar coupling; use the ising or rwa kinds");
  QubitPairSpec s = base;
  s.lambda_x = lambda;
  return s;
}

void run_trajectory(const ScenarioConfig& cfg, bool parallel,
                    RunResult& result) {
  if (!(cfg.t_max > 0) || !(cfg.dt > 0))
    throw ConfigError("trajectory runs need positive t_max and dt");
  if (cfg.observables.empty())
    throw ConfigError("trajectory runs need at least one observable");
  const std::vector<double> grid = uniform_grid(cfg.t_max, cfg.dt);
  PropagateOptions popts;
  popts.parallel = parallel;

  for (const auto& c : cfg.cases) {
    std::vector<Trajectory> trajs;
    for (Variant v : cfg.variants) {
      Liouvillian l = assemble_case(cfg, c.system, c.baths, v);
      merge_warnings(result, l.warnings);
      trajs.push_back(propagate(l.matrix, cfg.rho0, grid, popts));
      const std::string key =
          c.label.empty() ? to_string(v) : c.label + "/" + to_string(v);
      result.trajectories[key] = trajs.back();
    }

    for (const auto& obs : cfg.observables) {
      Table t;
      t.name = table_name(c, obs);
      t.columns.push_back("t");
      t.data.push_back(grid);
      for (std::size_t i = 0; i < cfg.variants.size(); ++i) {
        t.columns.push_back(to_string(cfg.variants[i]));
        std::vector<double> col(grid.size());
        for (std::size_t k = 0; k < grid.size(); ++k)
          col[k] = evaluate_observable(obs, trajs[i].states[k]);
        t.data.push_back(std::move(col));
      }
      result.tables.push_back(std::move(t));
    }

    if (cfg.variants.size() >= 2) {
      Table t;
      t.name = table_name(c, "fidelity");
      t.columns.push_back("t");
      t.data.push_back(grid);
      const std::string ref = to_string(cfg.variants.front());
      for (std::size_t i = 1; i < cfg.variants.size(); ++i) {
        t.columns.push_back("F_" + ref + "_" + to_string(cfg.variants[i]));
        std::vector<double> col(grid.size());
        for (std::size_t k = 0; k < grid.size(); ++k)
          col[k] = fidelity(trajs[0].states[k], trajs[i].states[k]);
        t.data.push_back(std::move(col));
      }
      result.tables.push_back(std::move(t));
    }
  }
}

// Shared sweep machinery: evaluate `point` over the lambda grid for every
// (case, variant), in parallel when requested, ordered deterministically.
template <typename F>
void sweep_points(const std::vector<double>& lams, bool parallel, F&& point) {
  const auto n = static_cast<std::ptrdiff_t>(lams.size());
  std::vector<std::exception_ptr> errors(lams.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      point(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  (void)parallel;
}

void run_steady_sweep(const ScenarioConfig& cfg, bool parallel,
                      RunResult& result) {
  const std::vector<double> lams = cfg.lambda_grid.values();
  for (const auto& c : cfg.cases) {
    const std::size_t nv = cfg.variants.size();
    std::vector<std::vector<Mat4>> states(lams.size(), std::vector<Mat4>(nv));
    std::vector<std::vector<std::string>> warns(lams.size());
    sweep_points(lams, parallel, [&](std::size_t i) {
      for (std::size_t vi = 0; vi < nv; ++vi) {
        Liouvillian l = assemble_case(cfg, with_lambda(c.system, lams[i]),
                                      c.baths, cfg.variants[vi]);
        for (auto& w : l.warnings) warns[i].push_back(std::move(w));
        states[i][vi] = steady_state(l.matrix, cfg.rho0).state;
      }
    });
    for (const auto& w : warns) merge_warnings(result, w);

    Table t;
    t.name = table_name(c, "steady");
    t.columns.push_back("lambda");
    t.data.push_back(lams);
    const std::string ref = to_string(cfg.variants.front());
    for (std::size_t vi = 1; vi < nv; ++vi) {
      t.columns.push_back("F_" + ref + "_" + to_string(cfg.variants[vi]));
      std::vector<double> col(lams.size());
      for (std::size_t i = 0; i < lams.size(); ++i)
        col[i] = fidelity(states[i][0], states[i][vi]);
      t.data.push_back(std::move(col));
    }
    for (std::size_t vi = 0; vi < nv; ++vi) {
      t.columns.push_back("N_" + to_string(cfg.variants[vi]));
      std::vector<double> col(lams.size());
      for (std::size_t i = 0; i < lams.size(); ++i)
        col[i] = negativity(states[i][vi]);
      t.data.push_back(std::move(col));
    }
    result.tables.push_back(std::move(t));
  }
}

void run_heat_sweep(const ScenarioConfig& cfg, bool parallel,
                    RunResult& result) {
  const std::vector<double> lams = cfg.lambda_grid.values();
  for (const auto& c : cfg.cases) {
    const std::size_t nv = cfg.variants.size();
    const std::size_t nb = c.baths.size();
    if (nb == 0) throw ConfigError("heat sweeps need at least one bath");
    std::vector<std::vector<HeatCurrents>> currents(
        lams.size(), std::vector<HeatCurrents>(nv));
    std::vector<std::vector<std::string>> warns(lams.size());
    sweep_points(lams, parallel, [&](std::size_t i) {
      for (std::size_t vi = 0; vi < nv; ++vi) {
        Liouvillian l = assemble_case(cfg, with_lambda(c.system, lams[i]),
                                      c.baths, cfg.variants[vi]);
        for (auto& w : l.warnings) warns[i].push_back(std::move(w));
        const Mat4 rho = steady_state(l.matrix, cfg.rho0).state;
        currents[i][vi] = heat_currents(l, rho);
      }
    });
    for (const auto& w : warns) merge_warnings(result, w);

    Table t;
    t.name = table_name(c, "heat");
    t.columns.push_back("lambda");
    t.data.push_back(lams);
    for (std::size_t vi = 0; vi < nv; ++vi) {
      for (std::size_t k = 0; k < nb; ++k) {
        t.columns.push_back("J_" + c.baths[k].label() + "_" +
                            to_string(cfg.variants[vi]));
        std::vector<double> col(lams.size());
        for (std::size_t i = 0; i < lams.size(); ++i)
          col[i] = currents[i][vi].per_bath[k];
        t.data.push_back(std::move(col));
      }
      t.columns.push_back("Jtot_" + to_string(cfg.variants[vi]));
      std::vector<double> col(lams.size());
      for (std::size_t i = 0; i < lams.size(); ++i)
        col[i] = currents[i][vi].total;
      t.data.push_back(std::move(col));
    }
    result.tables.push_back(std::move(t));
  }
}

void run_validity_scan(const ScenarioConfig& cfg, bool parallel,
                       RunResult& result) {
  const std::vector<double> lams = cfg.lambda_grid.values();
  const std::vector<double> wms = cfg.omega_minus_grid.values();
  for (const auto& c : cfg.cases) {
    const std::size_t nv = cfg.variants.size();
    const std::size_t rows = wms.size() * lams.size();
    std::vector<double> col_wm(rows), col_lam(rows);
    std::vector<std::vector<double>> fid(nv - 1,
                                         std::vector<double>(rows, 0.0));
    std::vector<std::vector<std::string>> warns(rows);
    std::vector<double> flat(rows);
    for (std::size_t r = 0; r < rows; ++r) flat[r] = static_cast<double>(r);
    sweep_points(flat, parallel, [&](std::size_t r) {
      const double wm = wms[r / lams.size()];
      const double lam = lams[r % lams.size()];
      col_wm[r] = wm;
      col_lam[r] = lam;
      QubitPairSpec sys = with_lambda(c.system, lam);
      sys.omega2 = 1.0 - wm;
      std::vector<Mat4> states(nv);
      for (std::size_t vi = 0; vi < nv; ++vi) {
        Liouvillian l = assemble_case(cfg, sys, c.baths, cfg.variants[vi]);
        for (auto& w : l.warnings) warns[r].push_back(std::move(w));
        states[vi] = steady_state(l.matrix, cfg.rho0).state;
      }
      for (std::size_t vi = 1; vi < nv; ++vi)
        fid[vi - 1][r] = fidelity(states[0], states[vi]);
    });
    for (const auto& w : warns) merge_warnings(result, w);

    Table t;
    t.name = table_name(c, "validity");
    t.columns = {"omega_minus", "lambda"};
    t.data = {col_wm, col_lam};
    const std::string ref = to_string(cfg.variants.front());
    for (std::size_t vi = 1; vi < nv; ++vi) {
      t.columns.push_back("F_" + ref + "_" + to_string(cfg.variants[vi]));
      t.data.push_back(fid[vi - 1]);
      t.columns.push_back("ok_" + to_string(cfg.variants[vi]));
      std::vector<double> ok(rows);
      for (std::size_t r = 0; r < rows; ++r)
        ok[r] = fid[vi - 1][r] >= 0.999 ? 1.0 : 0.0;
      t.data.push_back(std::move(ok));
    }
    result.tables.push_back(std::move(t));
  }
}

}  // namespace

Liouvillian assemble_variant(const ScenarioConfig& cfg, const ScenarioCase& c,
                             Variant v) {
  return assemble_case(cfg, c.system, c.baths, v);
}

RunResult run_scenario(const ScenarioConfig& cfg, bool parallel) {
  if (cfg.cases.empty()) throw ConfigError("scenario has no cases");
  if (cfg.variants.empty()) throw ConfigError("scenario has no variants");
  for (std::size_t i = 0; i < cfg.variants.size(); ++i)
    for (std::size_t j = i + 1; j < cfg.variants.size(); ++j)
      if (cfg.variants[i] == cfg.variants[j])
        throw ConfigError("scenario lists variant " +
                          to_string(cfg.variants[i]) + " twice");
  for (const auto& c : cfg.cases) {
    c.system.validate();
    for (const auto& b : c.baths) b.validate();
  }
  for (const auto& obs : cfg.observables)
    evaluate_observable(obs, Mat4::Identity() * 0.25);  // rejects unknown names
  const double tr = std::abs(cfg.rho0.trace().real() - 1.0);
  if (tr > 1e-10 || (cfg.rho0 - cfg.rho0.adjoint()).norm() > 1e-10 ||
      min_eigenvalue(cfg.rho0) < -1e-10)
    throw ConfigError("initial state is not a density matrix");

  RunResult result;
  result.config = cfg;
  switch (cfg.kind) {
    case RunKind::Trajectory: run_trajectory(cfg, parallel, result); break;
    case RunKind::SteadySweep: run_steady_sweep(cfg, parallel, result); break;
    case RunKind::HeatSweep: run_heat_sweep(cfg, parallel, result); break;
    case RunKind::ValidityScan: run_validity_scan(cfg, parallel, result); break;
  }
  return result;
}

namespace {

std::vector<BathSpec> separate_baths() {
  return {BathSpec::local(1, 1.0, 1.0), BathSpec::local(2, 0.1, 1.0)};
}

std::vector<BathSpec> common_bath() {
  return {BathSpec::common(1.0, 1.0, 1.0)};
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"fig2a", "fig2b", "fig3",  "fig4",  "fig5a",      "fig5b",
          "fig6a", "fig6b", "fig7a", "fig7b", "table1_scan"};
}

ScenarioConfig preset(const std::string& name) {
  ScenarioConfig cfg;
  cfg.name = name;

  if (name == "fig2a" || name == "fig2b") {
    cfg.kind = RunKind::Trajectory;
    const double w2 = name == "fig2a" ? 0.5 : 0.99;
    cfg.cases = {{"", QubitPairSpec::ising(w2, 0.0), common_bath()}};
    cfg.variants = {Variant::GP, Variant::GF};
    cfg.t_max = name == "fig2a" ? 8000.0 : 20000.0;
    cfg.dt = name == "fig2a" ? 0.5 : 2.5;
    cfg.observables = {"pop1", "sz1", "sz2"};
    return cfg;
  }
  if (name == "fig3") {
    cfg.kind = RunKind::Trajectory;
    cfg.cases = {{"resonant", QubitPairSpec::ising(1.0, 1e-4), separate_baths()},
                 {"detuned", QubitPairSpec::ising(0.99, 1e-4), separate_baths()}};
    cfg.variants = {Variant::GP, Variant::GF, Variant::LF};
    cfg.t_max = 20000.0;
    cfg.dt = 25.0;
    cfg.observables = {"pop1", "sz1"};
    return cfg;
  }
  if (name == "fig4") {
    cfg.kind = RunKind::Trajectory;
    cfg.cases = {{"weak", QubitPairSpec::ising(0.99, 1e-4), common_bath()},
                 {"strong", QubitPairSpec::ising(0.99, 1.0), common_bath()}};
    cfg.variants = {Variant::GP, Variant::GF, Variant::LP, Variant::LF};
    cfg.options.override_validity_guard = true;  // the strong panel is the point
    cfg.t_max = 20000.0;
    cfg.dt = 25.0;
    cfg.observables = {"pop1", "sz1"};
    return cfg;
  }
  if (name == "fig5a" || name == "fig5b") {
    cfg.kind = RunKind::SteadySweep;
    const double w2 = name == "fig5a" ? 1.0 - 1e-3 : 1.0 - 1e-5;
    cfg.cases = {{"", QubitPairSpec::ising(w2, 0.0), separate_baths()}};
    cfg.variants = {Variant::GP, Variant::GF, Variant::LF};
    cfg.options.override_validity_guard = true;  // LF swept beyond lambda = 0.5
    cfg.lambda_grid = GridSpec::log(1e-6, 10.0, 50);
    return cfg;
  }
  if (name == "fig6a" || name == "fig6b") {
    cfg.kind = RunKind::Trajectory;
    const double lam = name == "fig6a" ? 0.0 : 1e-4;
    cfg.cases = {{"", QubitPairSpec::ising(0.99, lam), common_bath()}};
    cfg.variants = {Variant::GP, Variant::GF, Variant::LP, Variant::LF};
    cfg.t_max = 3000.0;
    cfg.dt = 1.0;
    cfg.observables = {"negativity"};
    return cfg;
  }
  if (name == "fig7a" || name == "fig7b") {
    cfg.kind = RunKind::HeatSweep;
    const double w2 = name == "fig7a" ? 1.0 - 1e-3 : 1.0 - 1e-5;
    cfg.cases = {{"", QubitPairSpec::ising(w2, 0.0), separate_baths()}};
    cfg.variants = {Variant::GP, Variant::GF, Variant::LF};
    cfg.options.override_validity_guard = true;
    cfg.lambda_grid = GridSpec::log(1e-6, 10.0, 50);
    return cfg;
  }
  if (name == "table1_scan") {
    cfg.kind = RunKind::ValidityScan;
    cfg.cases = {{"", QubitPairSpec::ising(1.0, 0.0), separate_baths()}};
    cfg.variants = {Variant::GP, Variant::GF, Variant::LP, Variant::LF};
    cfg.options.override_validity_guard = true;
    cfg.lambda_grid = GridSpec::log(1e-6, 1.0, 13);
    cfg.omega_minus_grid = GridSpec::list({1e-5, 1e-4, 1e-3, 1e-2, 1e-1});
    return cfg;
  }
  std::ostringstream msg;
  msg << "unknown preset '" << name << "'; valid names:";
  for (const auto& n : preset_names()) msg << " " << n;
  throw ConfigError(msg.str());
}

}  // namespace qme
