// Command-line driver: runs scenarios (built-in presets or config files),
// prints configs, and dumps assembled generators for inspection.
//
// Exit codes: 0 success, 2 configuration error, 3 partial-secular frequency
// crossing, 4 convergence failure, 5 quadrature failure, 1 anything else.
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qme/errors.hpp"
#include "qme/io.hpp"
#include "qme/scenario.hpp"

namespace fs = std::filesystem;

namespace {

qme::ScenarioConfig resolve_scenario(const std::string& target) {
  if (fs::exists(target)) return qme::load_config(target);
  const auto names = qme::preset_names();
  for (const auto& n : names)
    if (n == target) return qme::preset(target);
  std::string msg = "'" + target + "' is neither a config file nor a preset (";
  for (std::size_t i = 0; i < names.size(); ++i)
    msg += (i ? ", " : "") + names[i];
  throw qme::ConfigError(msg + ")");
}

qme::SecularPolicy parse_secular_flag(const std::string& s) {
  if (s == "paper") return qme::SecularPolicy::paper();
  if (s == "full") return qme::SecularPolicy::full();
  if (s == "threshold") return qme::SecularPolicy::threshold();
  if (s.rfind("threshold:", 0) == 0) {
    try {
      std::size_t used = 0;
      const double eps = std::stod(s.substr(10), &used);
      if (used == s.size() - 10) return qme::SecularPolicy::threshold(eps);
    } catch (const std::exception&) {
    }
  }
  throw qme::ConfigError("--secular takes paper, full, threshold or threshold:EPS");
}

std::vector<std::string> split_formats(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (ch != ' ') {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::string preset_summary(const std::string& name) {
  const qme::ScenarioConfig cfg = qme::preset(name);
  std::string variants;
  for (std::size_t i = 0; i < cfg.variants.size(); ++i)
    variants += (i ? "/" : "") + qme::to_string(cfg.variants[i]);
  return qme::to_string(cfg.kind) + ", " + std::to_string(cfg.cases.size()) +
         (cfg.cases.size() == 1 ? " case, " : " cases, ") + variants;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Two coupled qubits in thermal baths: Markovian master-equation "
      "construction (global/local, partial/full secular), dynamics, steady "
      "states, heat currents and entanglement"};
  app.require_subcommand(1);

  std::string run_target, out_dir, format = "csv,json", secular;
  bool no_lamb_shift = false, override_guard = false, serial = false;
  auto* run = app.add_subcommand("run", "Execute a preset or a config file");
  run->add_option("scenario", run_target, "Preset name or config path")
      ->required();
  run->add_option("--out", out_dir, "Output directory (default out/<name>)");
  run->add_option("--format", format,
                  "Comma-separated output formats: csv,json,svg");
  run->add_flag("--no-lamb-shift", no_lamb_shift,
                "Drop the Lamb-shift Hamiltonian and rate imaginary parts");
  run->add_option("--secular", secular,
                  "Partial-secular policy: paper, full, threshold[:EPS] "
                  "(EPS defaults to 10*mu^2)");
  run->add_flag("--override-validity-guard", override_guard,
                "Build local variants outside |lambda| < 0.5 anyway");
  run->add_flag("--serial", serial, "Disable the OpenMP parallel kernels");

  auto* list = app.add_subcommand("list-presets", "List built-in scenarios");

  std::string print_target;
  auto* print = app.add_subcommand(
      "print-config", "Render a preset or config file in config format");
  print->add_option("scenario", print_target, "Preset name or config path")
      ->required();

  std::string dump_target, dump_case, dump_variant, dump_out;
  auto* dump = app.add_subcommand(
      "dump-liouvillian",
      "Assemble one generator, report structural diagnostics, write JSON");
  dump->add_option("scenario", dump_target, "Preset name or config path")
      ->required();
  dump->add_option("--case", dump_case, "Case label (default: first case)");
  dump->add_option("--variant", dump_variant,
                   "GP, GF, LP or LF (default: first listed)");
  dump->add_option("--out", dump_out, "Output file (default <...>.json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (list->parsed()) {
      for (const auto& n : qme::preset_names())
        std::cout << n << "  (" << preset_summary(n) << ")\n";
      return 0;
    }

    if (print->parsed()) {
      std::cout << qme::render_config(resolve_scenario(print_target));
      return 0;
    }

    if (dump->parsed()) {
      const qme::ScenarioConfig cfg = resolve_scenario(dump_target);
      const qme::ScenarioCase* cs = &cfg.cases.front();
      if (!dump_case.empty()) {
        cs = nullptr;
        for (const auto& c : cfg.cases)
          if (c.label == dump_case) cs = &c;
        if (!cs)
          throw qme::ConfigError("no case labelled '" + dump_case + "'");
      }
      qme::Variant v = cfg.variants.front();
      if (!dump_variant.empty()) {
        bool found = false;
        for (qme::Variant cand : {qme::Variant::GP, qme::Variant::GF,
                                  qme::Variant::LP, qme::Variant::LF})
          if (qme::to_string(cand) == dump_variant) {
            v = cand;
            found = true;
          }
        if (!found)
          throw qme::ConfigError("--variant takes GP, GF, LP or LF");
      }
      const qme::Liouvillian l = qme::assemble_variant(cfg, *cs, v);
      for (const auto& w : l.warnings) std::cerr << "warning: " << w << "\n";
      const qme::GkslReport rep = qme::gksl_diagnostics(l);
      std::cout << "variant              " << qme::to_string(l.variant) << "\n"
                << "construction         " << qme::to_string(l.construction)
                << "\n"
                << "trace residual       "
                << qme::format_double(rep.trace_residual) << "\n"
                << "hermiticity residual "
                << qme::format_double(rep.hermiticity_residual) << "\n"
                << "min group-rate eig   "
                << qme::format_double(rep.min_group_rate_eig) << "\n"
                << "spectral abscissa    "
                << qme::format_double(rep.spectral_abscissa) << "\n";
      fs::path out = dump_out.empty()
                         ? fs::path(cfg.name +
                                    (cs->label.empty() ? "" : "_" + cs->label) +
                                    "_" + qme::to_string(v) + ".json")
                         : fs::path(dump_out);
      qme::write_liouvillian_json(l, out);
      std::cout << "wrote " << out.string() << "\n";
      return 0;
    }

    // run
    qme::ScenarioConfig cfg = resolve_scenario(run_target);
    if (no_lamb_shift) cfg.options.lamb_shift = false;
    if (override_guard) cfg.options.override_validity_guard = true;
    if (!secular.empty()) cfg.partial_policy = parse_secular_flag(secular);
    const qme::RunResult result = qme::run_scenario(cfg, !serial);
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
    const fs::path dir = out_dir.empty() ? fs::path("out") / cfg.name
                                         : fs::path(out_dir);
    const auto files =
        qme::write_outputs(result, dir, split_formats(format));
    for (const auto& f : files) std::cout << f.string() << "\n";
    return 0;
  } catch (const qme::CrossingSingularity& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const qme::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const qme::NoConvergence& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const qme::StepFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const qme::QuadratureError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
