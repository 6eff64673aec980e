#include "qme/liouvillian.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "qme/errors.hpp"

namespace qme {

namespace {
constexpr double kDegenerate = 1e-12;  // equal-frequency tolerance
constexpr double kFreqBin = 1e-9;      // frequency matching for group membership

int freq_sign(double w) {
  if (w > kDegenerate) return 1;
  if (w < -kDegenerate) return -1;
  return 0;
}
}  // namespace

std::string to_string(Variant v) {
  switch (v) {
    case Variant::GP: return "GP";
    case Variant::GF: return "GF";
    case Variant::LP: return "LP";
    case Variant::LF: return "LF";
  }
  return "?";
}

Variant variant_of(Construction c, SecularMode m) {
  const bool local = c == Construction::Local;
  if (m == SecularMode::Full) return local ? Variant::LF : Variant::GF;
  return local ? Variant::LP : Variant::GP;
}

CorrelationTable::CorrelationTable(std::vector<BathSpec> baths, bool lamb_shift,
                                   bool split_xz, PvOptions pv)
    : baths_(std::move(baths)), lamb_shift_(lamb_shift), split_xz_(split_xz) {
  corr_.reserve(baths_.size());
  for (const auto& b : baths_)
    corr_.push_back(std::make_shared<BathCorrelation>(b, pv));
}

double CorrelationTable::coupling(int i, Channel b) const {
  const int q = channel_qubit(b);
  return channel_dissipative(b) ? baths_[i].gx(q) : baths_[i].gz(q);
}

cplx CorrelationTable::Gamma_bath(int i, Channel b, Channel bp, double w) const {
  if (split_xz_ && channel_dissipative(b) != channel_dissipative(bp))
    return 0.0;
  const double g = coupling(i, b) * coupling(i, bp);
  if (g == 0.0) return 0.0;
  const double re = 0.5 * corr_[i]->gamma_at(w);
  const double im = lamb_shift_ ? corr_[i]->lamb_shift_at(w) : 0.0;
  return g * cplx(re, im);
}

cplx CorrelationTable::Gamma(Channel b, Channel bp, double w) const {
  cplx sum = 0.0;
  for (int i = 0; i < n_baths(); ++i) sum += Gamma_bath(i, b, bp, w);
  return sum;
}

cplx CorrelationTable::rate(Channel b, Channel bp, double w, double wp) const {
  return Gamma(b, bp, w) + std::conj(Gamma(bp, b, wp));
}

cplx CorrelationTable::shift(Channel b, Channel bp, double w, double wp) const {
  return (Gamma(b, bp, w) - std::conj(Gamma(bp, b, wp))) / cplx(0.0, 2.0);
}

cplx CorrelationTable::rate_bath(int i, Channel b, Channel bp, double w,
                                 double wp) const {
  return Gamma_bath(i, b, bp, w) + std::conj(Gamma_bath(i, bp, b, wp));
}

cplx CorrelationTable::shift_bath(int i, Channel b, Channel bp, double w,
                                  double wp) const {
  return (Gamma_bath(i, b, bp, w) - std::conj(Gamma_bath(i, bp, b, wp))) /
         cplx(0.0, 2.0);
}

SecularFilter::SecularFilter(SecularPolicy policy, const JumpTable& table)
    : policy_(policy) {
  z_small_ = {0.0};
  for (double w : table.z_frequencies()) {
    if (w > kDegenerate) {
      z_small_.push_back(w);  // smallest non-zero z splitting joins the group
      break;
    }
  }
}

bool SecularFilter::keeps(Channel b, double w, Channel bp, double wp) const {
  if (policy_.mode == SecularMode::Full) return std::abs(w - wp) <= kDegenerate;
  if (policy_.rule == PartialRule::Threshold)
    return std::abs(w - wp) <= policy_.threshold_eps;
  // PaperGroups: dissipative pairs of equal sign; dephasing pairs inside the
  // near-degenerate group (or exactly equal); never mixed sectors.
  const bool xb = channel_dissipative(b), xbp = channel_dissipative(bp);
  if (xb != xbp) return false;
  if (xb) return freq_sign(w) == freq_sign(wp);
  const auto in_small = [this](double v) {
    for (double s : z_small_)
      if (std::abs(std::abs(v) - s) <= kFreqBin) return true;
    return false;
  };
  if (in_small(w) && in_small(wp)) return true;
  return std::abs(w - wp) <= kDegenerate;
}

Liouvillian assemble(const QubitPairSpec& system,
                     const std::vector<BathSpec>& baths, Construction c,
                     SecularPolicy policy, AssembleOptions opts) {
  system.validate();
  for (const auto& b : baths) b.validate();
  if (policy.mode == SecularMode::Partial &&
      policy.rule == PartialRule::Threshold) {
    if (policy.threshold_eps < 0.0) {  // auto: 10 * mu^2 of the first bath
      const double mu = baths.empty() ? 1e-2 : baths.front().mu;
      policy.threshold_eps = 10.0 * mu * mu;
    }
    if (!(policy.threshold_eps >= 0))
      throw ConfigError("secular threshold must be a non-negative number");
  }

  Liouvillian l;
  l.construction = c;
  l.policy = policy;
  l.options = opts;
  l.system = system;
  l.baths = baths;
  l.variant = variant_of(c, policy.mode);

  const double lam_max =
      std::max({std::abs(system.lambda_x), std::abs(system.lambda_y),
                std::abs(system.lambda_z)});
  if (c == Construction::Local && lam_max >= 0.5) {
    std::ostringstream msg;
    msg << "local construction outside its validity window (|lambda| = "
        << lam_max << " >= 0.5)";
    if (!opts.override_validity_guard)
      throw ConfigError(msg.str() + "; enable the override to proceed");
    l.warnings.push_back(msg.str() + "; override active");
  }
  if (c == Construction::GlobalUncoupled && system.is_coupled())
    l.warnings.push_back(
        "uncoupled construction: the qubit-qubit coupling is ignored");

  if (c == Construction::GlobalCoupled && policy.mode == SecularMode::Partial &&
      policy.rule == PartialRule::PaperGroups) {
    const double mu = baths.empty() ? 1e-2 : baths.front().mu;
    const double tol = opts.crossing_tol >= 0 ? opts.crossing_tol : mu * mu;
    const CrossingCheck cc = detect_frequency_crossing(system, tol);
    if (cc.crossing) {
      std::ostringstream msg;
      msg << "partial-secular grouping is singular: a dissipative and a "
             "dephasing transition frequency cross (residual "
          << cc.residual << ", tolerance " << tol << ") at omega_plus = "
          << system.omega_plus() << ", omega_minus = " << system.omega_minus()
          << ", lambda = (" << system.lambda_x << ", " << system.lambda_y
          << ", " << system.lambda_z
          << "); use the full-secular policy or detune";
      throw CrossingSingularity(msg.str(), cc.residual);
    }
  }

  l.jumps = jump_table(system, c);
  for (const auto& w : l.jumps.warnings) l.warnings.push_back(w);

  QubitPairSpec bare = system;
  bare.lambda_x = bare.lambda_y = bare.lambda_z = 0.0;
  switch (c) {
    case Construction::GlobalCoupled: l.h_system = hamiltonian(system); break;
    case Construction::GlobalUncoupled: l.h_system = hamiltonian(bare); break;
    case Construction::Local:
      l.h_system = opts.strict_local ? hamiltonian(bare) : hamiltonian(system);
      break;
  }
  l.ham_part = commutator_superop(l.h_system);

  const CorrelationTable tbl(baths, opts.lamb_shift, opts.split_xz_correlations,
                             opts.pv);
  const SecularFilter filt(policy, l.jumps);

  const int nb = static_cast<int>(baths.size());
  std::vector<Mat16> diss(nb, Mat16::Zero());
  std::vector<Mat4> hls(nb, Mat4::Zero());

  for (const auto& left : l.jumps.entries) {    // contributes A_{b'}(w)
    for (const auto& right : l.jumps.entries) { // contributes A_b(w')^+
      if (!filt.keeps(left.channel, left.omega, right.channel, right.omega))
        continue;
      const Mat4 bd = right.op.adjoint();
      const Mat4 bda = bd * left.op;
      Mat16 jump_super;
      bool jump_built = false;
      for (int i = 0; i < nb; ++i) {
        const cplx r = tbl.rate_bath(i, right.channel, left.channel, left.omega,
                                     right.omega);
        if (r != 0.0) {
          if (!jump_built) {
            jump_super = sandwich(left.op, bd) -
                         0.5 * (left_mult(bda) + right_mult(bda));
            jump_built = true;
          }
          diss[i] += r * jump_super;
        }
        const cplx s = tbl.shift_bath(i, right.channel, left.channel,
                                      left.omega, right.omega);
        if (s != 0.0) hls[i] += s * bda;
      }
    }
  }

  l.h_lamb = Mat4::Zero();
  l.diss_part = Mat16::Zero();
  l.bath_generators.reserve(nb);
  for (int i = 0; i < nb; ++i) {
    l.h_lamb += hls[i];
    l.diss_part += diss[i];
    l.bath_generators.push_back(diss[i] + commutator_superop(hls[i]));
  }
  l.lamb_part = commutator_superop(l.h_lamb);
  l.matrix = l.ham_part + l.lamb_part + l.diss_part;

  for (const auto& b : baths) {
    const MarkovDiagnostic d = markov_check(b);
    if (!d.ok) {
      std::ostringstream msg;
      msg << "bath " << b.label()
          << ": weak-coupling time-scale separation is marginal (tau_bath = "
          << d.tau_bath << ", tau_relax = " << d.tau_relax << ")";
      l.warnings.push_back(msg.str());
    }
  }
  return l;
}

GkslReport gksl_diagnostics(const Liouvillian& l) {
  GkslReport rep;

  // Trace preservation and Hermiticity preservation, probed on matrix units.
  for (int k = 0; k < 4; ++k) {
    for (int j = 0; j < 4; ++j) {
      const Vec16 col = l.matrix.col(k + 4 * j);
      const Vec16 colT = l.matrix.col(j + 4 * k);
      cplx tr = 0.0;
      for (int d = 0; d < 4; ++d) tr += col(d + 4 * d);
      rep.trace_residual = std::max(rep.trace_residual, std::abs(tr));
      const Mat4 a = unvec(colT);
      const Mat4 b = unvec(col);
      rep.hermiticity_residual =
          std::max(rep.hermiticity_residual,
                   (a - Mat4(b.adjoint())).cwiseAbs().maxCoeff());
    }
  }

  // Rate matrices over groups of jump operators linked by the secular policy
  // (connected components of the kept-pair relation).  Under the full-secular
  // policy these are the degenerate frequency groups and a non-negative
  // minimum eigenvalue certifies GKLS form; partial policies may report a
  // small negative eigenvalue, quantifying how far the grouped rates are from
  // a completely positive generator.
  const CorrelationTable tbl(l.baths, l.options.lamb_shift,
                             l.options.split_xz_correlations, l.options.pv);
  const SecularFilter filt(l.policy, l.jumps);
  const auto& entries = l.jumps.entries;
  const int ne = static_cast<int>(entries.size());
  std::vector<int> parent(ne);
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&parent](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (int i = 0; i < ne; ++i)
    for (int j = i + 1; j < ne; ++j)
      if (filt.keeps(entries[i].channel, entries[i].omega, entries[j].channel,
                     entries[j].omega))
        parent[find(i)] = find(j);
  std::map<int, std::vector<const JumpEntry*>> groups;
  for (int i = 0; i < ne; ++i) groups[find(i)].push_back(&entries[i]);
  rep.min_group_rate_eig = 0.0;
  bool first_group = true;
  for (const auto& [root, members] : groups) {
    const int n = static_cast<int>(members.size());
    Eigen::MatrixXcd m(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c)
        m(r, c) = filt.keeps(members[c]->channel, members[c]->omega,
                             members[r]->channel, members[r]->omega)
                      ? tbl.rate(members[r]->channel, members[c]->channel,
                                 members[c]->omega, members[r]->omega)
                      : cplx(0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
    const double mn = es.eigenvalues().minCoeff();
    rep.min_group_rate_eig = first_group ? mn : std::min(rep.min_group_rate_eig, mn);
    first_group = false;
  }

  Eigen::ComplexEigenSolver<Mat16> es(l.matrix, false);
  rep.spectral_abscissa = es.eigenvalues().real().maxCoeff();
  return rep;
}

}  // namespace qme
