// Config-file parsing, result writers (CSV / JSON / SVG), and bit-exact JSON
// archives for trajectories and assembled generators.
#include "qme/io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

#include "qme/errors.hpp"

namespace qme {

using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string format_double(double v) {
  std::array<char, 40> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

// --- config parsing ----------------------------------------------------------

namespace {

struct Ctx {
  const std::string* file;
  int line;
};

[[noreturn]] void fail(const Ctx& c, const std::string& msg) {
  throw ConfigError(*c.file + ":" + std::to_string(c.line) + ": " + msg);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

double parse_num(const Ctx& c, const std::string& s) {
  double v = 0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  const auto res = std::from_chars(b, e, v);
  if (res.ec != std::errc() || res.ptr != e)
    fail(c, "expected a number, got '" + s + "'");
  return v;
}

int parse_int(const Ctx& c, const std::string& s) {
  int v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    fail(c, "expected an integer, got '" + s + "'");
  return v;
}

bool parse_bool(const Ctx& c, const std::string& s) {
  if (s == "true" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "no" || s == "0") return false;
  fail(c, "expected true/false, got '" + s + "'");
}

RunKind parse_kind(const Ctx& c, const std::string& s) {
  if (s == "trajectory") return RunKind::Trajectory;
  if (s == "steady_sweep") return RunKind::SteadySweep;
  if (s == "heat_sweep") return RunKind::HeatSweep;
  if (s == "validity_scan") return RunKind::ValidityScan;
  fail(c, "unknown kind '" + s +
              "' (trajectory, steady_sweep, heat_sweep, validity_scan)");
}

Variant parse_variant(const Ctx& c, const std::string& s) {
  if (s == "GP") return Variant::GP;
  if (s == "GF") return Variant::GF;
  if (s == "LP") return Variant::LP;
  if (s == "LF") return Variant::LF;
  fail(c, "unknown variant '" + s + "' (GP, GF, LP, LF)");
}

SecularPolicy parse_secular(const Ctx& c, const std::string& s) {
  if (s == "paper") return SecularPolicy::paper();
  if (s == "full") return SecularPolicy::full();
  if (s == "threshold") return SecularPolicy::threshold();
  if (s.rfind("threshold:", 0) == 0)
    return SecularPolicy::threshold(parse_num(c, s.substr(10)));
  fail(c, "unknown secular policy '" + s +
              "' (paper, full, threshold, threshold:EPS)");
}

GridSpec parse_grid(const Ctx& c, const std::string& s) {
  const auto tok = split_ws(s);
  if (tok.empty()) fail(c, "empty grid");
  if (tok[0] == "log" || tok[0] == "linear") {
    if (tok.size() != 4) fail(c, "grid needs: " + tok[0] + " LO HI N");
    const double lo = parse_num(c, tok[1]);
    const double hi = parse_num(c, tok[2]);
    const int n = parse_int(c, tok[3]);
    return tok[0] == "log" ? GridSpec::log(lo, hi, n)
                           : GridSpec::linear(lo, hi, n);
  }
  if (tok[0] == "list") {
    std::vector<double> pts;
    for (std::size_t i = 1; i < tok.size(); ++i)
      pts.push_back(parse_num(c, tok[i]));
    if (pts.empty()) fail(c, "grid list needs at least one value");
    return GridSpec::list(std::move(pts));
  }
  fail(c, "unknown grid form '" + tok[0] + "' (log, linear, list)");
}

// key=value pairs after the leading word of a system/bath line.
std::vector<std::pair<std::string, std::string>> key_values(
    const Ctx& c, const std::vector<std::string>& tok) {
  std::vector<std::pair<std::string, std::string>> kv;
  for (std::size_t i = 1; i < tok.size(); ++i) {
    const auto eq = tok[i].find('=');
    if (eq == std::string::npos || eq == 0)
      fail(c, "expected key=value, got '" + tok[i] + "'");
    kv.emplace_back(tok[i].substr(0, eq), tok[i].substr(eq + 1));
  }
  return kv;
}

QubitPairSpec parse_system(const Ctx& c, const std::string& s) {
  const auto tok = split_ws(s);
  if (tok.empty()) fail(c, "empty system line");
  const std::string& kind = tok[0];
  double omega2 = 0.0, lambda = 0.0, lx = 0.0, ly = 0.0, lz = 0.0;
  bool have_omega2 = false;
  for (const auto& [k, v] : key_values(c, tok)) {
    if (k == "omega2") {
      omega2 = parse_num(c, v);
      have_omega2 = true;
    } else if (k == "lambda" && (kind == "ising" || kind == "rwa")) {
      lambda = parse_num(c, v);
    } else if (k == "lx" && kind == "heisenberg") {
      lx = parse_num(c, v);
    } else if (k == "ly" && kind == "heisenberg") {
      ly = parse_num(c, v);
    } else if (k == "lz" && kind == "heisenberg") {
      lz = parse_num(c, v);
    } else {
      fail(c, "unknown system key '" + k + "' for kind '" + kind + "'");
    }
  }
  if (!have_omega2) fail(c, "system needs omega2=...");
  if (kind == "ising") return QubitPairSpec::ising(omega2, lambda);
  if (kind == "rwa") return QubitPairSpec::rwa(omega2, lambda);
  if (kind == "heisenberg") return QubitPairSpec::heisenberg(omega2, lx, ly, lz);
  fail(c, "unknown system kind '" + kind + "' (ising, rwa, heisenberg)");
}

std::array<double, 2> parse_weights(const Ctx& c, const std::string& v,
                                    bool common, int qubit) {
  const auto parts = split(v, ',');
  if (common) {
    if (parts.size() != 2)
      fail(c, "a common bath needs two comma-separated weights, got '" + v + "'");
    return {parse_num(c, parts[0]), parse_num(c, parts[1])};
  }
  if (parts.size() != 1)
    fail(c, "a local bath takes a single weight, got '" + v + "'");
  std::array<double, 2> w{0.0, 0.0};
  w[qubit - 1] = parse_num(c, parts[0]);
  return w;
}

BathSpec parse_bath(const Ctx& c, const std::string& s) {
  const auto tok = split_ws(s);
  if (tok.empty()) fail(c, "empty bath line");
  BathSpec b;
  int qubit = 0;
  if (tok[0] == "common") {
    b.attachment = BathAttachment::Common;
  } else if (tok[0] == "local1") {
    b.attachment = BathAttachment::Local1;
    qubit = 1;
  } else if (tok[0] == "local2") {
    b.attachment = BathAttachment::Local2;
    qubit = 2;
  } else {
    fail(c, "unknown bath attachment '" + tok[0] + "' (common, local1, local2)");
  }
  const bool common = qubit == 0;
  bool have_beta = false;
  for (const auto& [k, v] : key_values(c, tok)) {
    if (k == "beta") {
      b.beta = parse_num(c, v);
      have_beta = true;
    } else if (k == "gx") {
      b.gx_weight = parse_weights(c, v, common, qubit);
    } else if (k == "gz") {
      b.gz_weight = parse_weights(c, v, common, qubit);
    } else if (k == "mu") {
      b.mu = parse_num(c, v);
    } else if (k == "cutoff") {
      b.spectral.cutoff = parse_num(c, v);
    } else {
      fail(c, "unknown bath key '" + k + "' (beta, gx, gz, mu, cutoff)");
    }
  }
  if (!have_beta) fail(c, "bath needs beta=...");
  return b;
}

Mat4 parse_initial_state(const Ctx& c, const std::string& s) {
  const auto tok = split_ws(s);
  if (!tok.empty() && tok[0] == "plus_plus" && tok.size() == 1)
    return plus_plus_state();
  if (tok.size() == 2 && tok[0] == "diag") {
    const auto parts = split(tok[1], ',');
    if (parts.size() != 4)
      fail(c, "diag initial state needs four comma-separated populations");
    Mat4 rho = Mat4::Zero();
    for (int i = 0; i < 4; ++i) rho(i, i) = parse_num(c, parts[i]);
    return rho;
  }
  fail(c, "unknown initial state '" + s + "' (plus_plus, diag p11,p10,p01,p00)");
}

}  // namespace

ScenarioConfig parse_config_text(const std::string& text,
                                 const std::string& name_hint) {
  ScenarioConfig cfg;
  cfg.name = name_hint;
  std::string section;
  bool saw_scenario = false;
  std::vector<ScenarioCase> cases;

  std::istringstream in(text);
  std::string raw;
  Ctx c{&name_hint, 0};
  while (std::getline(in, raw)) {
    ++c.line;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') fail(c, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section == "scenario") {
        if (saw_scenario) fail(c, "duplicate [scenario] section");
        saw_scenario = true;
      } else if (section == "case") {
        cases.emplace_back();
      } else {
        fail(c, "unknown section [" + section + "] ([scenario] or [case])");
      }
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(c, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(c, "empty key");
    if (value.empty()) fail(c, "empty value for '" + key + "'");

    if (section == "scenario") {
      if (key == "name") {
        cfg.name = value;
      } else if (key == "kind") {
        cfg.kind = parse_kind(c, value);
      } else if (key == "variants") {
        cfg.variants.clear();
        for (const auto& v : split(value, ','))
          cfg.variants.push_back(parse_variant(c, v));
      } else if (key == "secular") {
        cfg.partial_policy = parse_secular(c, value);
      } else if (key == "lamb_shift") {
        cfg.options.lamb_shift = parse_bool(c, value);
      } else if (key == "strict_local") {
        cfg.options.strict_local = parse_bool(c, value);
      } else if (key == "override_validity_guard") {
        cfg.options.override_validity_guard = parse_bool(c, value);
      } else if (key == "split_xz_correlations") {
        cfg.options.split_xz_correlations = parse_bool(c, value);
      } else if (key == "crossing_tol") {
        cfg.options.crossing_tol = parse_num(c, value);
      } else if (key == "pv_tol") {
        cfg.options.pv.abs_tol = parse_num(c, value);
      } else if (key == "t_max") {
        cfg.t_max = parse_num(c, value);
      } else if (key == "dt") {
        cfg.dt = parse_num(c, value);
      } else if (key == "observables") {
        cfg.observables = split(value, ',');
      } else if (key == "lambda_grid") {
        cfg.lambda_grid = parse_grid(c, value);
      } else if (key == "omega_minus_grid") {
        cfg.omega_minus_grid = parse_grid(c, value);
      } else if (key == "initial_state") {
        cfg.rho0 = parse_initial_state(c, value);
      } else {
        fail(c, "unknown [scenario] key '" + key + "'");
      }
    } else if (section == "case") {
      ScenarioCase& cs = cases.back();
      if (key == "label") {
        cs.label = value;
      } else if (key == "system") {
        cs.system = parse_system(c, value);
      } else if (key == "bath") {
        cs.baths.push_back(parse_bath(c, value));
      } else {
        fail(c, "unknown [case] key '" + key + "' (label, system, bath)");
      }
    } else {
      fail(c, "key '" + key + "' outside any section");
    }
  }

  c.line = 0;
  if (cases.empty()) fail(c, "config has no [case] section");
  for (const auto& cs : cases)
    if (cs.baths.empty()) fail(c, "a [case] has no bath lines");
  if (cfg.variants.empty()) fail(c, "config lists no variants");
  cfg.cases = std::move(cases);
  return cfg;
}

ScenarioConfig load_config(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), file.stem().string());
}

namespace {

std::string render_grid(const GridSpec& g) {
  std::ostringstream out;
  switch (g.kind) {
    case GridSpec::Kind::Log:
      out << "log " << format_double(g.lo) << " " << format_double(g.hi) << " "
          << g.n;
      break;
    case GridSpec::Kind::Linear:
      out << "linear " << format_double(g.lo) << " " << format_double(g.hi)
          << " " << g.n;
      break;
    case GridSpec::Kind::Explicit:
      out << "list";
      for (double v : g.points) out << " " << format_double(v);
      break;
  }
  return out.str();
}

std::string render_system(const QubitPairSpec& s) {
  std::ostringstream out;
  switch (s.kind) {
    case CouplingKind::IsingXX:
      out << "ising omega2=" << format_double(s.omega2)
          << " lambda=" << format_double(s.lambda_x);
      break;
    case CouplingKind::RWA:
      out << "rwa omega2=" << format_double(s.omega2)
          << " lambda=" << format_double(s.lambda_x);
      break;
    case CouplingKind::Heisenberg:
      out << "heisenberg omega2=" << format_double(s.omega2)
          << " lx=" << format_double(s.lambda_x)
          << " ly=" << format_double(s.lambda_y)
          << " lz=" << format_double(s.lambda_z);
      break;
  }
  return out.str();
}

std::string render_bath(const BathSpec& b) {
  std::ostringstream out;
  switch (b.attachment) {
    case BathAttachment::Common:
      out << "common beta=" << format_double(b.beta)
          << " gx=" << format_double(b.gx_weight[0]) << ","
          << format_double(b.gx_weight[1])
          << " gz=" << format_double(b.gz_weight[0]) << ","
          << format_double(b.gz_weight[1]);
      break;
    case BathAttachment::Local1:
      out << "local1 beta=" << format_double(b.beta)
          << " gx=" << format_double(b.gx_weight[0])
          << " gz=" << format_double(b.gz_weight[0]);
      break;
    case BathAttachment::Local2:
      out << "local2 beta=" << format_double(b.beta)
          << " gx=" << format_double(b.gx_weight[1])
          << " gz=" << format_double(b.gz_weight[1]);
      break;
  }
  out << " mu=" << format_double(b.mu)
      << " cutoff=" << format_double(b.spectral.cutoff);
  return out.str();
}

std::string render_secular(const SecularPolicy& p) {
  if (p.mode == SecularMode::Full) return "full";
  if (p.rule == PartialRule::PaperGroups) return "paper";
  return "threshold:" + format_double(p.threshold_eps);
}

std::string render_initial_state(const Mat4& rho) {
  if ((rho - plus_plus_state()).cwiseAbs().maxCoeff() == 0.0)
    return "plus_plus";
  bool diagonal = true;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (i != j && rho(i, j) != cplx(0, 0)) diagonal = false;
  for (int i = 0; i < 4; ++i)
    if (rho(i, i).imag() != 0.0) diagonal = false;
  if (diagonal) {
    std::ostringstream out;
    out << "diag " << format_double(rho(0, 0).real()) << ","
        << format_double(rho(1, 1).real()) << ","
        << format_double(rho(2, 2).real()) << ","
        << format_double(rho(3, 3).real());
    return out.str();
  }
  throw ConfigError(
      "initial state has no config representation (not plus_plus or diagonal)");
}

}  // namespace

std::string render_config(const ScenarioConfig& cfg) {
  std::ostringstream out;
  out << "[scenario]\n";
  out << "name = " << cfg.name << "\n";
  out << "kind = " << to_string(cfg.kind) << "\n";
  out << "variants = ";
  for (std::size_t i = 0; i < cfg.variants.size(); ++i)
    out << (i ? ", " : "") << to_string(cfg.variants[i]);
  out << "\n";
  out << "secular = " << render_secular(cfg.partial_policy) << "\n";
  out << "lamb_shift = " << (cfg.options.lamb_shift ? "true" : "false") << "\n";
  out << "strict_local = " << (cfg.options.strict_local ? "true" : "false")
      << "\n";
  out << "override_validity_guard = "
      << (cfg.options.override_validity_guard ? "true" : "false") << "\n";
  out << "split_xz_correlations = "
      << (cfg.options.split_xz_correlations ? "true" : "false") << "\n";
  out << "crossing_tol = " << format_double(cfg.options.crossing_tol) << "\n";
  out << "pv_tol = " << format_double(cfg.options.pv.abs_tol) << "\n";
  out << "initial_state = " << render_initial_state(cfg.rho0) << "\n";
  if (cfg.kind == RunKind::Trajectory) {
    out << "t_max = " << format_double(cfg.t_max) << "\n";
    out << "dt = " << format_double(cfg.dt) << "\n";
    out << "observables = ";
    for (std::size_t i = 0; i < cfg.observables.size(); ++i)
      out << (i ? ", " : "") << cfg.observables[i];
    out << "\n";
  } else {
    out << "lambda_grid = " << render_grid(cfg.lambda_grid) << "\n";
    if (cfg.kind == RunKind::ValidityScan)
      out << "omega_minus_grid = " << render_grid(cfg.omega_minus_grid) << "\n";
  }
  for (const auto& cs : cfg.cases) {
    out << "\n[case]\n";
    if (!cs.label.empty()) out << "label = " << cs.label << "\n";
    out << "system = " << render_system(cs.system) << "\n";
    for (const auto& b : cs.baths) out << "bath = " << render_bath(b) << "\n";
  }
  return out.str();
}

// --- table writers -------------------------------------------------------------

namespace {

void check_table(const Table& t) {
  if (t.columns.size() != t.data.size() || t.columns.empty())
    throw ConfigError("table '" + t.name + "': column/data mismatch");
  for (const auto& col : t.data)
    if (col.size() != t.data.front().size())
      throw ConfigError("table '" + t.name + "': ragged columns");
}

std::ofstream open_out(const fs::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file " + file.string());
  return out;
}

}  // namespace

void write_csv(const Table& t, const fs::path& file) {
  check_table(t);
  std::ofstream out = open_out(file);
  for (std::size_t c = 0; c < t.columns.size(); ++c)
    out << (c ? "," : "") << t.columns[c];
  out << "\n";
  const std::size_t rows = t.data.front().size();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < t.data.size(); ++c)
      out << (c ? "," : "") << format_double(t.data[c][r]);
    out << "\n";
  }
  if (!out) throw ConfigError("write failed: " + file.string());
}

void write_table_json(const Table& t, const fs::path& file) {
  check_table(t);
  ojson j;
  j["name"] = t.name;
  j["columns"] = t.columns;
  j["data"] = t.data;
  std::ofstream out = open_out(file);
  out << j.dump(1) << "\n";
  if (!out) throw ConfigError("write failed: " + file.string());
}

// --- SVG plots -----------------------------------------------------------------

namespace {

constexpr double kW = 800, kH = 500;
constexpr double kL = 70, kR = 24, kT = 40, kB = 54;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    if (ch == '&') out += "&amp;";
    else if (ch == '<') out += "&lt;";
    else if (ch == '>') out += "&gt;";
    else out += ch;
  }
  return out;
}

}  // namespace

void write_svg(const Table& t, const fs::path& file) {
  check_table(t);
  if (t.columns.size() < 2)
    throw ConfigError("table '" + t.name + "': nothing to plot");
  const std::vector<double>& xraw = t.data.front();

  // Log-scale the abscissa for wide positive ranges (parameter sweeps).
  bool logx = !xraw.empty();
  double xpmin = 0, xpmax = 0;
  for (double v : xraw)
    if (!(v > 0) || !std::isfinite(v)) logx = false;
  if (logx) {
    xpmin = *std::min_element(xraw.begin(), xraw.end());
    xpmax = *std::max_element(xraw.begin(), xraw.end());
    logx = xpmax / xpmin >= 100.0;
  }
  std::vector<double> x(xraw.size());
  for (std::size_t i = 0; i < xraw.size(); ++i)
    x[i] = logx ? std::log10(xraw[i]) : xraw[i];

  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool any = false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) continue;
    for (std::size_t c = 1; c < t.data.size(); ++c) {
      const double y = t.data[c][i];
      if (!std::isfinite(y)) continue;
      if (!any) {
        xmin = xmax = x[i];
        ymin = ymax = y;
        any = true;
      } else {
        xmin = std::min(xmin, x[i]);
        xmax = std::max(xmax, x[i]);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
      }
    }
  }
  if (!any) {
    xmin = ymin = 0;
    xmax = ymax = 1;
  }
  if (xmax - xmin < 1e-300) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (ymax - ymin < 1e-300) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  const auto X = [&](double v) {
    return kL + (v - xmin) / (xmax - xmin) * (kW - kL - kR);
  };
  const auto Y = [&](double v) {
    return kH - kB - (v - ymin) / (ymax - ymin) * (kH - kT - kB);
  };

  std::ofstream out = open_out(file);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW
      << "\" height=\"" << kH << "\" viewBox=\"0 0 " << kW << " " << kH
      << "\">\n";
  out << "<rect width=\"" << kW << "\" height=\"" << kH
      << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << kW / 2 << "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"16\">"
      << xml_escape(t.name) << "</text>\n";

  // Ticks: decades on a log axis when at least two are spanned, else five
  // evenly spaced positions.
  std::vector<double> xticks;
  if (logx && std::floor(xmax) - std::ceil(xmin) >= 1) {
    for (double d = std::ceil(xmin); d <= std::floor(xmax) + 1e-9; d += 1.0)
      xticks.push_back(d);
  } else {
    for (int k = 0; k <= 4; ++k) xticks.push_back(xmin + (xmax - xmin) * k / 4);
  }
  for (double v : xticks) {
    out << "<line x1=\"" << px(X(v)) << "\" y1=\"" << px(kT) << "\" x2=\""
        << px(X(v)) << "\" y2=\"" << px(kH - kB)
        << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << px(X(v)) << "\" y=\"" << px(kH - kB + 18)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"12\">"
        << tick_label(logx ? std::pow(10.0, v) : v) << "</text>\n";
  }
  for (int k = 0; k <= 4; ++k) {
    const double v = ymin + (ymax - ymin) * k / 4;
    out << "<line x1=\"" << px(kL) << "\" y1=\"" << px(Y(v)) << "\" x2=\""
        << px(kW - kR) << "\" y2=\"" << px(Y(v))
        << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << px(kL - 6) << "\" y=\"" << px(Y(v) + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"12\">"
        << tick_label(v) << "</text>\n";
  }
  out << "<rect x=\"" << px(kL) << "\" y=\"" << px(kT) << "\" width=\""
      << px(kW - kL - kR) << "\" height=\"" << px(kH - kT - kB)
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  out << "<text x=\"" << px((kL + kW - kR) / 2) << "\" y=\"" << px(kH - 14)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\">"
      << xml_escape(t.columns[0]) << (logx ? " (log scale)" : "")
      << "</text>\n";

  for (std::size_t c = 1; c < t.data.size(); ++c) {
    const char* color = kPalette[(c - 1) % std::size(kPalette)];
    std::string pts;
    bool open = false;
    const auto flush = [&]() {
      if (open && !pts.empty())
        out << "<polyline points=\"" << pts
            << "\" fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.5\"/>\n";
      pts.clear();
      open = false;
    };
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double y = t.data[c][i];
      if (!std::isfinite(x[i]) || !std::isfinite(y)) {
        flush();
        continue;
      }
      pts += px(X(x[i])) + "," + px(Y(y)) + " ";
      open = true;
    }
    flush();
    const double ly = kT + 16 + 16 * static_cast<double>(c - 1);
    out << "<line x1=\"" << px(kL + 8) << "\" y1=\"" << px(ly - 4)
        << "\" x2=\"" << px(kL + 28) << "\" y2=\"" << px(ly - 4)
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << px(kL + 34) << "\" y=\"" << px(ly)
        << "\" font-family=\"sans-serif\" font-size=\"12\">"
        << xml_escape(t.columns[c]) << "</text>\n";
  }
  out << "</svg>\n";
  if (!out) throw ConfigError("write failed: " + file.string());
}

// --- bit-exact archives ----------------------------------------------------------

namespace {

ojson complex_to_json(const cplx& z) { return ojson::array({z.real(), z.imag()}); }

template <typename Mat>
ojson matrix_to_json(const Mat& m) {
  ojson rows = ojson::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    ojson row = ojson::array();
    for (Eigen::Index cc = 0; cc < m.cols(); ++cc)
      row.push_back(complex_to_json(m(r, cc)));
    rows.push_back(std::move(row));
  }
  return rows;
}

cplx complex_from_json(const ojson& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ConfigError("archive: expected a [re, im] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

template <typename Mat>
Mat matrix_from_json(const ojson& j) {
  Mat m;
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != m.rows())
    throw ConfigError("archive: wrong matrix shape");
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != m.cols())
      throw ConfigError("archive: wrong matrix shape");
    for (Eigen::Index cc = 0; cc < m.cols(); ++cc)
      m(r, cc) = complex_from_json(row[static_cast<std::size_t>(cc)]);
  }
  return m;
}

ojson parse_json_file(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + file.string());
  ojson j = ojson::parse(in, nullptr, false);
  if (j.is_discarded())
    throw ConfigError("malformed JSON in " + file.string());
  return j;
}

}  // namespace

void write_trajectory_json(const Trajectory& traj, const std::string& label,
                           const fs::path& file) {
  if (traj.states.size() != traj.times.size())
    throw ConfigError("trajectory archive: times/states length mismatch");
  ojson j;
  j["format"] = "qme-trajectory-v1";
  j["label"] = label;
  j["times"] = traj.times;
  ojson states = ojson::array();
  for (const auto& rho : traj.states) states.push_back(matrix_to_json(rho));
  j["states"] = std::move(states);
  std::ofstream out = open_out(file);
  out << j.dump() << "\n";
  if (!out) throw ConfigError("write failed: " + file.string());
}

Trajectory read_trajectory_json(const fs::path& file) {
  const ojson j = parse_json_file(file);
  try {
    if (!j.is_object() || j.value("format", "") != "qme-trajectory-v1")
      throw ConfigError(file.string() + " is not a trajectory archive");
    Trajectory traj;
    if (!j.contains("times") || !j["times"].is_array() || !j.contains("states"))
      throw ConfigError(file.string() + ": missing times/states");
    for (const auto& v : j["times"]) traj.times.push_back(v.get<double>());
    for (const auto& s : j["states"])
      traj.states.push_back(matrix_from_json<Mat4>(s));
    if (traj.states.size() != traj.times.size())
      throw ConfigError(file.string() + ": times/states length mismatch");
    return traj;
  } catch (const ojson::exception& e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
}

void write_liouvillian_json(const Liouvillian& l, const fs::path& file) {
  ojson j;
  j["format"] = "qme-liouvillian-v1";
  j["variant"] = to_string(l.variant);
  j["construction"] = to_string(l.construction);
  j["matrix"] = matrix_to_json(l.matrix);
  j["ham_part"] = matrix_to_json(l.ham_part);
  j["lamb_part"] = matrix_to_json(l.lamb_part);
  j["diss_part"] = matrix_to_json(l.diss_part);
  ojson gens = ojson::array();
  for (const auto& g : l.bath_generators) gens.push_back(matrix_to_json(g));
  j["bath_generators"] = std::move(gens);
  std::ofstream out = open_out(file);
  out << j.dump() << "\n";
  if (!out) throw ConfigError("write failed: " + file.string());
}

LiouvillianSnapshot read_liouvillian_json(const fs::path& file) {
  const ojson j = parse_json_file(file);
  try {
    if (!j.is_object() || j.value("format", "") != "qme-liouvillian-v1")
      throw ConfigError(file.string() + " is not a generator archive");
    LiouvillianSnapshot s;
    s.variant = j.value("variant", "");
    s.construction = j.value("construction", "");
    s.matrix = matrix_from_json<Mat16>(j.at("matrix"));
    s.ham_part = matrix_from_json<Mat16>(j.at("ham_part"));
    s.lamb_part = matrix_from_json<Mat16>(j.at("lamb_part"));
    s.diss_part = matrix_from_json<Mat16>(j.at("diss_part"));
    for (const auto& g : j.at("bath_generators"))
      s.bath_generators.push_back(matrix_from_json<Mat16>(g));
    return s;
  } catch (const ojson::exception& e) {
    throw ConfigError(file.string() + ": " + e.what());
  }
}

// --- bundled output ---------------------------------------------------------------

std::vector<fs::path> write_outputs(const RunResult& result,
                                    const fs::path& out_dir,
                                    const std::vector<std::string>& formats) {
  bool csv = false, json = false, svg = false;
  for (const auto& f : formats) {
    if (f == "csv") csv = true;
    else if (f == "json") json = true;
    else if (f == "svg") svg = true;
    else throw ConfigError("unknown output format '" + f + "' (csv, json, svg)");
  }
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw ConfigError("cannot create " + out_dir.string() + ": " + ec.message());

  std::vector<fs::path> written;
  for (const Table& t : result.tables) {
    if (csv) {
      written.push_back(out_dir / (t.name + ".csv"));
      write_csv(t, written.back());
    }
    if (json) {
      written.push_back(out_dir / (t.name + ".json"));
      write_table_json(t, written.back());
    }
    if (svg) {
      written.push_back(out_dir / (t.name + ".svg"));
      write_svg(t, written.back());
    }
  }
  if (json) {
    for (const auto& [key, traj] : result.trajectories) {
      std::string fname = "states_" + key;
      std::replace(fname.begin(), fname.end(), '/', '_');
      written.push_back(out_dir / (fname + ".json"));
      write_trajectory_json(traj, key, written.back());
    }
  }
  return written;
}

}  // namespace qme
