// Scenario-layer tests: parameter grids, run-kind table shapes and ordering,
// determinism of parallel sweeps, the built-in presets and their on-disk
// config files, the config parser/renderer, and the CSV/JSON/SVG writers.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "qme/errors.hpp"
#include "qme/io.hpp"
#include "qme/scenario.hpp"

using namespace qme;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "qme_scenario_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

ScenarioConfig tiny_trajectory() {
  ScenarioConfig cfg;
  cfg.name = "tiny";
  cfg.kind = RunKind::Trajectory;
  cfg.cases = {{"", QubitPairSpec::ising(0.9, 0.05),
                {BathSpec::common(1.0, 1.0, 1.0)}}};
  cfg.variants = {Variant::GP, Variant::GF};
  cfg.options.lamb_shift = false;
  cfg.t_max = 50.0;
  cfg.dt = 5.0;
  cfg.observables = {"sz1", "negativity"};
  return cfg;
}

const Table& table_named(const RunResult& r, const std::string& name) {
  for (const auto& t : r.tables)
    if (t.name == name) return t;
  REQUIRE_MESSAGE(false, "missing table ", name);
  return r.tables.front();  // unreachable
}

}  // namespace

TEST_CASE("parameter grids") {
  const auto lg = GridSpec::log(1e-6, 10.0, 50).values();
  REQUIRE(lg.size() == 50);
  CHECK(lg.front() == 1e-6);
  CHECK(lg.back() == 10.0);
  const double r0 = lg[1] / lg[0], r1 = lg[25] / lg[24];
  CHECK(r0 == doctest::Approx(r1).epsilon(1e-9));

  const auto ln = GridSpec::linear(0.0, 1.0, 5).values();
  REQUIRE(ln.size() == 5);
  CHECK(ln[1] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(ln.back() == 1.0);

  const auto ls = GridSpec::list({0.1, 0.5, 2.0}).values();
  CHECK(ls == std::vector<double>{0.1, 0.5, 2.0});

  CHECK_THROWS_AS(GridSpec::log(0.0, 1.0, 5).values(), ConfigError);
  CHECK_THROWS_AS(GridSpec::log(1.0, 0.5, 5).values(), ConfigError);
  CHECK_THROWS_AS(GridSpec::log(1e-3, 1.0, 1).values(), ConfigError);
  CHECK_THROWS_AS(GridSpec::linear(1.0, 1.0, 5).values(), ConfigError);
  CHECK_THROWS_AS(GridSpec::list({1.0, 0.5}).values(), ConfigError);
  CHECK_THROWS_AS(GridSpec::list({}).values(), ConfigError);
}

TEST_CASE("construction and policy routing") {
  const QubitPairSpec coupled = QubitPairSpec::ising(0.9, 0.1);
  const QubitPairSpec uncoupled = QubitPairSpec::ising(0.9, 0.0);
  CHECK(construction_for(Variant::GP, coupled) == Construction::GlobalCoupled);
  CHECK(construction_for(Variant::GF, uncoupled) ==
        Construction::GlobalUncoupled);
  CHECK(construction_for(Variant::LP, coupled) == Construction::Local);
  CHECK(construction_for(Variant::LF, uncoupled) == Construction::Local);

  ScenarioConfig cfg = tiny_trajectory();
  cfg.partial_policy = SecularPolicy::threshold(0.5);
  const Liouvillian gp = assemble_variant(cfg, cfg.cases[0], Variant::GP);
  CHECK(gp.policy.mode == SecularMode::Partial);
  CHECK(gp.policy.rule == PartialRule::Threshold);
  CHECK(gp.policy.threshold_eps == 0.5);
  CHECK(gp.variant == Variant::GP);
  // Full-secular variants ignore the partial policy.
  const Liouvillian gf = assemble_variant(cfg, cfg.cases[0], Variant::GF);
  CHECK(gf.policy.mode == SecularMode::Full);
  CHECK(gf.variant == Variant::GF);
}

TEST_CASE("fully x-polarised initial state") {
  const Mat4 pp = plus_plus_state();
  CHECK(std::abs(pp.trace().real() - 1.0) < 1e-15);
  CHECK((pp * pp - pp).norm() < 1e-15);  // pure
  CHECK(evaluate_observable("sx1", pp) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(evaluate_observable("sx2", pp) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(evaluate_observable("sz1", pp) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("scenario validation") {
  ScenarioConfig cfg = tiny_trajectory();
  cfg.cases.clear();
  CHECK_THROWS_WITH_AS(run_scenario(cfg), doctest::Contains("no cases"),
                       ConfigError);

  cfg = tiny_trajectory();
  cfg.variants.clear();
  CHECK_THROWS_WITH_AS(run_scenario(cfg), doctest::Contains("no variants"),
                       ConfigError);

  cfg = tiny_trajectory();
  cfg.variants = {Variant::GP, Variant::GP};
  CHECK_THROWS_WITH_AS(run_scenario(cfg), doctest::Contains("twice"),
                       ConfigError);

  cfg = tiny_trajectory();
  cfg.observables = {"bogus"};
  CHECK_THROWS_WITH_AS(run_scenario(cfg), doctest::Contains("unknown observable"),
                       ConfigError);

  cfg = tiny_trajectory();
  cfg.rho0 = Mat4::Identity();  // trace 4
  CHECK_THROWS_WITH_AS(run_scenario(cfg), doctest::Contains("density"),
                       ConfigError);

  cfg = tiny_trajectory();
  cfg.t_max = 0.0;
  CHECK_THROWS_WITH_AS(run_scenario(cfg), doctest::Contains("t_max"),
                       ConfigError);

  cfg = tiny_trajectory();
  cfg.observables.clear();
  CHECK_THROWS_WITH_AS(run_scenario(cfg), doctest::Contains("observable"),
                       ConfigError);

  // Sweeps vary the scalar coupling, which has no meaning for the
  // three-parameter kind.
  cfg = tiny_trajectory();
  cfg.kind = RunKind::SteadySweep;
  cfg.lambda_grid = GridSpec::list({1e-4, 1e-3});
  cfg.cases[0].system = QubitPairSpec::heisenberg(0.9, 0.1, 0.05, 0.0);
  CHECK_THROWS_WITH_AS(run_scenario(cfg),
                       doctest::Contains("single scalar coupling"), ConfigError);

  cfg = tiny_trajectory();
  cfg.kind = RunKind::HeatSweep;
  cfg.lambda_grid = GridSpec::list({1e-4});
  cfg.cases[0].baths.clear();
  CHECK_THROWS_WITH_AS(run_scenario(cfg), doctest::Contains("bath"),
                       ConfigError);
}

TEST_CASE("trajectory run: tables, archives, fidelity reference") {
  const ScenarioConfig cfg = tiny_trajectory();
  const RunResult r = run_scenario(cfg);
  REQUIRE(r.tables.size() == 3);  // sz1, negativity, fidelity
  const Table& sz1 = table_named(r, "sz1");
  REQUIRE(sz1.columns == std::vector<std::string>{"t", "GP", "GF"});
  REQUIRE(sz1.data.size() == 3);
  const std::size_t n = sz1.data[0].size();
  CHECK(n == 11);  // 0..50 step 5
  for (const auto& col : sz1.data)
    for (double v : col) CHECK(std::isfinite(v));

  const Table& fid = table_named(r, "fidelity");
  REQUIRE(fid.columns == std::vector<std::string>{"t", "F_GP_GF"});
  CHECK(fid.data[1][0] == doctest::Approx(1.0).epsilon(1e-10));  // same rho0
  for (double v : fid.data[1]) {
    CHECK(v > 0.9);
    CHECK(v < 1.0 + 1e-9);
  }

  // Archived states reproduce the observable columns.
  REQUIRE(r.trajectories.count("GP") == 1);
  REQUIRE(r.trajectories.count("GF") == 1);
  const Trajectory& gp = r.trajectories.at("GP");
  REQUIRE(gp.states.size() == n);
  for (std::size_t k = 0; k < n; k += 5)
    CHECK(evaluate_observable("sz1", gp.states[k]) == sz1.data[1][k]);

  // Labelled cases prefix tables and archive keys.
  ScenarioConfig lab = cfg;
  lab.cases[0].label = "panel";
  const RunResult r2 = run_scenario(lab);
  CHECK(table_named(r2, "panel_sz1").columns == sz1.columns);
  CHECK(r2.trajectories.count("panel/GP") == 1);
}

TEST_CASE("steady sweep: shape and parallel determinism") {
  ScenarioConfig cfg;
  cfg.name = "sweep";
  cfg.kind = RunKind::SteadySweep;
  cfg.cases = {{"", QubitPairSpec::ising(0.9, 0.0),
                {BathSpec::local(1, 1.0, 1.0), BathSpec::local(2, 0.1, 1.0)}}};
  cfg.variants = {Variant::GP, Variant::GF, Variant::LF};
  cfg.options.lamb_shift = false;
  cfg.lambda_grid = GridSpec::list({1e-4, 1e-3});

  const RunResult par = run_scenario(cfg, true);
  const RunResult ser = run_scenario(cfg, false);
  REQUIRE(par.tables.size() == 1);
  const Table& t = par.tables[0];
  CHECK(t.name == "steady");
  REQUIRE(t.columns == std::vector<std::string>{"lambda", "F_GP_GF", "F_GP_LF",
                                                "N_GP", "N_GF", "N_LF"});
  REQUIRE(t.data.size() == 6);
  for (const auto& col : t.data) REQUIRE(col.size() == 2);
  CHECK(t.data[0] == std::vector<double>{1e-4, 1e-3});
  for (std::size_t c = 1; c <= 2; ++c)
    for (double f : t.data[c]) {
      CHECK(f > 0.9);
      CHECK(f < 1.0 + 1e-9);
    }
  for (std::size_t c = 3; c <= 5; ++c)
    for (double v : t.data[c]) CHECK(v >= 0.0);
  // Worker-pool dispatch must not change a single bit of the result.
  REQUIRE(ser.tables.size() == 1);
  for (std::size_t c = 0; c < 6; ++c)
    CHECK(t.data[c] == ser.tables[0].data[c]);
}

TEST_CASE("heat sweep: per-bath columns and stationary balance") {
  ScenarioConfig cfg;
  cfg.name = "heat";
  cfg.kind = RunKind::HeatSweep;
  cfg.cases = {{"", QubitPairSpec::ising(0.7, 0.0),
                {BathSpec::local(1, 0.5, 1.0), BathSpec::local(2, 2.0, 1.0)}}};
  cfg.variants = {Variant::GP, Variant::GF};
  cfg.options.lamb_shift = false;
  cfg.lambda_grid = GridSpec::list({1e-3, 1e-2});

  const RunResult r = run_scenario(cfg);
  const Table& t = table_named(r, "heat");
  REQUIRE(t.columns ==
          std::vector<std::string>{"lambda", "J_l1_GP", "J_l2_GP", "Jtot_GP",
                                   "J_l1_GF", "J_l2_GF", "Jtot_GF"});
  for (const auto& col : t.data) REQUIRE(col.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(t.data[1][i] > 0.0);  // hot bath (beta = 0.5) injects
    CHECK(t.data[2][i] < 0.0);  // cold bath (beta = 2) extracts
    CHECK(std::abs(t.data[3][i]) <
          1e-10 * std::max(1.0, std::abs(t.data[1][i])));
    CHECK(t.data[4][i] > 0.0);
    CHECK(t.data[5][i] < 0.0);
  }
}

TEST_CASE("validity scan: row order and agreement flags") {
  ScenarioConfig cfg;
  cfg.name = "scan";
  cfg.kind = RunKind::ValidityScan;
  cfg.cases = {{"", QubitPairSpec::ising(1.0, 0.0),
                {BathSpec::local(1, 1.0, 1.0), BathSpec::local(2, 0.1, 1.0)}}};
  cfg.variants = {Variant::GP, Variant::GF};
  cfg.options.lamb_shift = false;
  cfg.lambda_grid = GridSpec::list({1e-4, 1e-3});
  cfg.omega_minus_grid = GridSpec::list({1e-3, 1e-2});

  const RunResult r = run_scenario(cfg);
  const Table& t = table_named(r, "validity");
  REQUIRE(t.columns == std::vector<std::string>{"omega_minus", "lambda",
                                                "F_GP_GF", "ok_GF"});
  REQUIRE(t.data[0].size() == 4);
  // Detuning-major ordering.
  CHECK(t.data[0] == std::vector<double>{1e-3, 1e-3, 1e-2, 1e-2});
  CHECK(t.data[1] == std::vector<double>{1e-4, 1e-3, 1e-4, 1e-3});
  for (std::size_t row = 0; row < 4; ++row) {
    CHECK(t.data[2][row] > 0.0);
    CHECK(t.data[2][row] < 1.0 + 1e-9);
    CHECK(t.data[3][row] == (t.data[2][row] >= 0.999 ? 1.0 : 0.0));
  }
}

TEST_CASE("presets are well formed") {
  const auto names = preset_names();
  REQUIRE(names.size() == 11);
  for (const auto& name : names) {
    const ScenarioConfig cfg = preset(name);
    CHECK(cfg.name == name);
    REQUIRE(!cfg.cases.empty());
    REQUIRE(!cfg.variants.empty());
    for (const auto& c : cfg.cases) {
      CHECK_NOTHROW(c.system.validate());
      for (const auto& b : c.baths) CHECK_NOTHROW(b.validate());
    }
    if (cfg.kind == RunKind::Trajectory) {
      CHECK(cfg.t_max > 0);
      CHECK(cfg.dt > 0);
      CHECK(!cfg.observables.empty());
    } else {
      CHECK_NOTHROW(cfg.lambda_grid.values());
    }
    if (cfg.kind == RunKind::ValidityScan)
      CHECK_NOTHROW(cfg.omega_minus_grid.values());
    // Render -> parse -> render is the identity for every preset.
    const std::string text = render_config(cfg);
    const std::string again = render_config(parse_config_text(text, name));
    CHECK(text == again);
  }
  CHECK_THROWS_WITH_AS(preset("nope"), doctest::Contains("valid names"),
                       ConfigError);

  // Beat-regime preset parameters, pinned against the documented study.
  const ScenarioConfig f2b = preset("fig2b");
  CHECK(f2b.cases[0].system.omega2 == 0.99);
  CHECK(f2b.cases[0].system.lambda_x == 0.0);
  CHECK(f2b.cases[0].baths.size() == 1);
  CHECK(f2b.cases[0].baths[0].attachment == BathAttachment::Common);
  CHECK(f2b.variants.front() == Variant::GP);
  CHECK(f2b.t_max == 20000.0);
  CHECK(f2b.dt == 2.5);
}

TEST_CASE("preset files on disk match the built-in definitions") {
  for (const auto& name : preset_names()) {
    const fs::path file =
        fs::path(QME_SOURCE_DIR) / "presets" / (name + ".conf");
    REQUIRE_MESSAGE(fs::exists(file), file.string(), " is missing");
    const ScenarioConfig loaded = load_config(file);
    CHECK_MESSAGE(render_config(loaded) == render_config(preset(name)),
                  "drift in ", file.string());
  }
}

TEST_CASE("preset trajectory run end to end") {
  const RunResult r = run_scenario(preset("fig2a"));
  REQUIRE(r.tables.size() == 4);  // pop1, sz1, sz2, fidelity
  for (const auto& t : r.tables) {
    REQUIRE(!t.data.empty());
    REQUIRE(t.data[0].size() == 16001);
    for (const auto& col : t.data)
      for (double v : col) REQUIRE(std::isfinite(v));
  }
  CHECK(r.trajectories.count("GP") == 1);
  CHECK(r.trajectories.count("GF") == 1);
  // Both variants relax: late-time excited population is far below the start.
  const Table& pop = table_named(r, "pop1");
  CHECK(pop.data[1].back() < 0.5 * pop.data[1].front() + 0.1);
}

TEST_CASE("validity-guard override of the local variants warns") {
  ScenarioConfig cfg = preset("fig4");
  const Liouvillian lf =
      assemble_variant(cfg, cfg.cases[1], Variant::LF);  // lambda = 1
  bool noted = false;
  for (const auto& w : lf.warnings)
    noted = noted || w.find("override") != std::string::npos;
  CHECK(noted);
}

TEST_CASE("config text round trip and feature coverage") {
  const std::string text = R"(# exercise every config feature
[scenario]
name = demo
kind = trajectory
variants = GP, LF
secular = threshold:0.025
lamb_shift = false
strict_local = true
override_validity_guard = true
split_xz_correlations = true
crossing_tol = 1e-3
pv_tol = 1e-9
initial_state = diag 0.5,0.25,0.25,0   # trailing comment
t_max = 10
dt = 2
observables = sz1, purity

[case]
label = a
system = heisenberg omega2=0.9 lx=0.1 ly=0.05 lz=0.02
bath = common beta=1 gx=1,0.5 gz=0.25,0 mu=0.02 cutoff=30

[case]
label = b
system = rwa omega2=0.8 lambda=0.1
bath = local1 beta=2 gx=1 gz=0.5
bath = local2 beta=0.5 gx=0.7
)";
  const ScenarioConfig cfg = parse_config_text(text, "demo_file");
  CHECK(cfg.name == "demo");
  CHECK(cfg.kind == RunKind::Trajectory);
  REQUIRE(cfg.variants.size() == 2);
  CHECK(cfg.variants[1] == Variant::LF);
  CHECK(cfg.partial_policy.rule == PartialRule::Threshold);
  CHECK(cfg.partial_policy.threshold_eps == 0.025);
  CHECK(!cfg.options.lamb_shift);
  CHECK(cfg.options.strict_local);
  CHECK(cfg.options.override_validity_guard);
  CHECK(cfg.options.split_xz_correlations);
  CHECK(cfg.options.crossing_tol == 1e-3);
  CHECK(cfg.options.pv.abs_tol == 1e-9);
  CHECK(cfg.rho0(0, 0).real() == 0.5);
  CHECK(cfg.rho0(3, 3).real() == 0.0);
  CHECK(cfg.t_max == 10.0);
  CHECK(cfg.observables == std::vector<std::string>{"sz1", "purity"});
  REQUIRE(cfg.cases.size() == 2);
  CHECK(cfg.cases[0].system.kind == CouplingKind::Heisenberg);
  CHECK(cfg.cases[0].system.lambda_y == 0.05);
  CHECK(cfg.cases[0].baths[0].gx_weight[1] == 0.5);
  CHECK(cfg.cases[0].baths[0].gz_weight[0] == 0.25);
  CHECK(cfg.cases[0].baths[0].mu == 0.02);
  CHECK(cfg.cases[0].baths[0].spectral.cutoff == 30.0);
  CHECK(cfg.cases[1].system.kind == CouplingKind::RWA);
  REQUIRE(cfg.cases[1].baths.size() == 2);
  CHECK(cfg.cases[1].baths[0].attachment == BathAttachment::Local1);
  CHECK(cfg.cases[1].baths[0].gz_weight[0] == 0.5);
  CHECK(cfg.cases[1].baths[1].gx_weight[1] == 0.7);
  CHECK(cfg.cases[1].baths[1].gz_weight[1] == 0.0);

  const std::string rendered = render_config(cfg);
  CHECK(render_config(parse_config_text(rendered, "x")) == rendered);
}

TEST_CASE("config parser rejects malformed input with line numbers") {
  const auto fails_with = [](const std::string& text, const char* needle) {
    CHECK_THROWS_WITH_AS(parse_config_text(text, "cfg"),
                         doctest::Contains(needle), ConfigError);
  };
  fails_with("[scenario]\nkind = bogus\n", "cfg:2");
  fails_with("[scenario]\nkind = bogus\n", "unknown kind");
  fails_with("[mystery]\n", "unknown section");
  fails_with("key = 1\n", "outside any section");
  fails_with("[scenario]\nvariants = GP, XX\n", "unknown variant");
  fails_with("[scenario]\nsecular = sometimes\n", "unknown secular policy");
  fails_with("[scenario]\nt_max = soon\n", "expected a number");
  fails_with("[scenario]\nt_max =\n", "empty value");
  fails_with("[scenario]\nnonsense = 1\n", "unknown [scenario] key");
  fails_with("[scenario]\n[scenario]\n", "duplicate [scenario]");
  fails_with("[scenario\n", "unterminated section header");
  fails_with("[scenario]\nlambda_grid = cubic 1 2 3\n", "unknown grid form");
  fails_with("[scenario]\nlambda_grid = log 1 2\n", "grid needs");
  fails_with("[scenario]\ninitial_state = bell\n", "unknown initial state");
  fails_with("[case]\nsystem = ising\n", "omega2");
  fails_with("[case]\nsystem = ising omega2=0.9 k=2\n", "unknown system key");
  fails_with("[case]\nsystem = dimer omega2=0.9\n", "unknown system kind");
  fails_with("[case]\nbath = common gx=1,1\n", "beta");
  fails_with("[case]\nbath = common beta=1 gx=1\n", "two comma-separated");
  fails_with("[case]\nbath = local1 beta=1 gx=1,1\n", "single weight");
  fails_with("[case]\nbath = sky beta=1\n", "unknown bath attachment");
  fails_with("[case]\nbath = common beta=1 q=2\n", "unknown bath key");
  fails_with("[case]\nwho = 1\n", "unknown [case] key");
  // Structural checks after the line scan.
  fails_with("[scenario]\nvariants = GP\n", "no [case]");
  fails_with("[scenario]\nvariants = GP\n[case]\nsystem = ising omega2=1\n",
             "no bath");
  fails_with("[case]\nsystem = ising omega2=1\nbath = common beta=1\n",
             "no variants");
}

TEST_CASE("shortest round-trip number formatting") {
  for (const double v :
       {0.0, 1.0, -1.0, 0.1, 2.5, 1.0 / 3.0, 0.99, 1e-6, 6.241e5, -3.95919968,
        1e-300, 9.9150651380565584, 2e22}) {
    const std::string s = format_double(v);
    CHECK(std::stod(s) == v);
  }
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("table writers") {
  const fs::path dir = scratch_dir();
  Table t;
  t.name = "demo";
  t.columns = {"x", "y"};
  t.data = {{0.5, 1.0}, {2.0, 3.0}};

  write_csv(t, dir / "demo.csv");
  CHECK(slurp(dir / "demo.csv") == "x,y\n0.5,2\n1,3\n");

  write_table_json(t, dir / "demo.json");
  const std::string js = slurp(dir / "demo.json");
  CHECK(js.find("\"demo\"") != std::string::npos);
  CHECK(js.find("\"columns\"") != std::string::npos);

  write_svg(t, dir / "demo.svg");
  const std::string svg = slurp(dir / "demo.svg");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("<polyline") != std::string::npos);
  CHECK(svg.find(">y</text>") != std::string::npos);
  CHECK(svg.find("log scale") == std::string::npos);

  // Wide positive abscissa switches to a log axis; NaNs split the polyline.
  Table lt;
  lt.name = "log";
  lt.columns = {"lambda", "J"};
  lt.data = {{1e-6, 1e-4, 1e-2, 1.0},
             {1.0, std::nan(""), 3.0, 4.0}};
  write_svg(lt, dir / "log.svg");
  const std::string lsvg = slurp(dir / "log.svg");
  CHECK(lsvg.find("log scale") != std::string::npos);
  std::size_t polylines = 0;
  for (std::size_t p = lsvg.find("<polyline"); p != std::string::npos;
       p = lsvg.find("<polyline", p + 1))
    ++polylines;
  CHECK(polylines == 2);

  Table bad = t;
  bad.data[1].pop_back();
  CHECK_THROWS_WITH_AS(write_csv(bad, dir / "bad.csv"),
                       doctest::Contains("ragged"), ConfigError);
  Table empty;
  empty.name = "empty";
  CHECK_THROWS_AS(write_csv(empty, dir / "empty.csv"), ConfigError);
}

TEST_CASE("trajectory archive round trip") {
  const fs::path dir = scratch_dir();
  const ScenarioConfig cfg = tiny_trajectory();
  const RunResult r = run_scenario(cfg);
  const Trajectory& gp = r.trajectories.at("GP");

  write_trajectory_json(gp, "GP", dir / "traj.json");
  const Trajectory back = read_trajectory_json(dir / "traj.json");
  REQUIRE(back.times == gp.times);
  REQUIRE(back.states.size() == gp.states.size());
  for (std::size_t k = 0; k < back.states.size(); ++k)
    CHECK((back.states[k] - gp.states[k]).cwiseAbs().maxCoeff() == 0.0);

  std::ofstream(dir / "junk.json") << "{\"format\": \"other\"}";
  CHECK_THROWS_AS(read_trajectory_json(dir / "junk.json"), ConfigError);
  std::ofstream(dir / "broken.json") << "{not json";
  CHECK_THROWS_WITH_AS(read_trajectory_json(dir / "broken.json"),
                       doctest::Contains("malformed"), ConfigError);
  CHECK_THROWS_AS(read_trajectory_json(dir / "absent.json"), ConfigError);
}

TEST_CASE("generator archive round trip") {
  const fs::path dir = scratch_dir();
  const ScenarioConfig cfg = tiny_trajectory();
  const Liouvillian l = assemble_variant(cfg, cfg.cases[0], Variant::GP);
  write_liouvillian_json(l, dir / "gen.json");
  const LiouvillianSnapshot s = read_liouvillian_json(dir / "gen.json");
  CHECK(s.variant == "GP");
  CHECK(s.construction == to_string(l.construction));
  CHECK((s.matrix - l.matrix).cwiseAbs().maxCoeff() == 0.0);
  CHECK((s.ham_part - l.ham_part).cwiseAbs().maxCoeff() == 0.0);
  CHECK((s.lamb_part - l.lamb_part).cwiseAbs().maxCoeff() == 0.0);
  CHECK((s.diss_part - l.diss_part).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(s.bath_generators.size() == l.bath_generators.size());
  for (std::size_t k = 0; k < s.bath_generators.size(); ++k)
    CHECK((s.bath_generators[k] - l.bath_generators[k]).cwiseAbs().maxCoeff() ==
          0.0);
}

TEST_CASE("bundled output writer is deterministic") {
  const fs::path dir = scratch_dir();
  const RunResult r = run_scenario(tiny_trajectory());

  const auto files1 = write_outputs(r, dir / "a", {"csv", "json", "svg"});
  // 3 tables x 3 formats + 2 trajectory archives.
  CHECK(files1.size() == 11);
  for (const auto& f : files1) CHECK(fs::exists(f));

  const auto files2 = write_outputs(r, dir / "b", {"csv", "json", "svg"});
  REQUIRE(files1.size() == files2.size());
  for (std::size_t k = 0; k < files1.size(); ++k)
    CHECK(slurp(files1[k]) == slurp(files2[k]));

  CHECK_THROWS_WITH_AS(write_outputs(r, dir / "c", {"pdf"}),
                       doctest::Contains("unknown output format"), ConfigError);
}
