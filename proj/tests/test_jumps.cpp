// Jump-operator tests: the closed-form global tables against brute-force
// eigenprojection, the commutator eigenvalue property, adjoint closure and
// completeness, the dressed-dyad amplitudes, and the local/uncoupled tables.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qme/errors.hpp"
#include "qme/jumps.hpp"
#include "qme/system.hpp"

using namespace qme;

namespace {

const Mat4& find_op(const JumpTable& t, Channel c, double w) {
  for (const JumpEntry& e : t.entries)
    if (e.channel == c && std::abs(e.omega - w) < 1e-9) return e.op;
  static const Mat4 zero = Mat4::Zero();
  return zero;
}

// Compare one channel of the closed-form table against the brute-force
// oracle, entry by entry (both drop zero-norm operators).
void check_channel(const JumpTable& table, const Mat4& h, Channel c) {
  const auto oracle_entries =
      oracle::brute_force_jumps(h, channel_operator(c), c);
  std::vector<const JumpEntry*> lib;
  for (const JumpEntry& e : table.entries)
    if (e.channel == c) lib.push_back(&e);
  REQUIRE(lib.size() == oracle_entries.size());
  for (std::size_t k = 0; k < lib.size(); ++k) {
    CHECK(std::abs(lib[k]->omega - oracle_entries[k].omega) < 1e-10);
    CHECK((lib[k]->op - oracle_entries[k].op).norm() < 1e-12);
  }
}

}  // namespace

TEST_CASE("channel helpers") {
  CHECK(channel_qubit(Channel::X1) == 1);
  CHECK(channel_qubit(Channel::Z2) == 2);
  CHECK(channel_dissipative(Channel::X2));
  CHECK(!channel_dissipative(Channel::Z1));
  CHECK((channel_operator(Channel::X1) - on_qubit(sigma_x(), 1)).norm() == 0.0);
  CHECK((channel_operator(Channel::Z2) - on_qubit(sigma_z(), 2)).norm() == 0.0);
}

TEST_CASE("local table structure") {
  const QubitPairSpec s = QubitPairSpec::ising(0.75, 0.3);
  const JumpTable t = local_jumps(s);
  REQUIRE(t.entries.size() == 6);
  // Sorted by (channel, omega): X1 at -1/+1, X2 at -w2/+w2, Z1 and Z2 at 0.
  CHECK(t.entries[0].channel == Channel::X1);
  CHECK(t.entries[0].omega == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK((t.entries[0].op - on_qubit(sigma_plus(), 1)).norm() < 1e-15);
  CHECK(t.entries[1].omega == doctest::Approx(1.0).epsilon(1e-15));
  CHECK((t.entries[1].op - on_qubit(sigma_minus(), 1)).norm() < 1e-15);
  CHECK(t.entries[2].channel == Channel::X2);
  CHECK(t.entries[2].omega == doctest::Approx(-0.75).epsilon(1e-15));
  CHECK(t.entries[3].omega == doctest::Approx(0.75).epsilon(1e-15));
  CHECK((t.entries[3].op - on_qubit(sigma_minus(), 2)).norm() < 1e-15);
  CHECK(t.entries[4].channel == Channel::Z1);
  CHECK(t.entries[4].omega == 0.0);
  CHECK((t.entries[4].op - on_qubit(sigma_z(), 1)).norm() < 1e-15);
  CHECK(t.entries[5].channel == Channel::Z2);
  CHECK((t.entries[5].op - on_qubit(sigma_z(), 2)).norm() < 1e-15);
  CHECK(t.z_frequencies() == std::vector<double>{0.0});
}

TEST_CASE("global tables match brute-force eigenprojection") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> uw(0.1, 1.0), ul(-0.5, 0.5);
  int done = 0;
  while (done < 60) {
    QubitPairSpec s;
    try {
      switch (rng() % 3) {
        case 0: s = QubitPairSpec::ising(uw(rng), ul(rng)); break;
        case 1:
          s = QubitPairSpec::heisenberg(uw(rng), ul(rng), 0.5 * ul(rng),
                                        0.2 * ul(rng));
          break;
        default: s = QubitPairSpec::rwa(uw(rng), 0.3 * ul(rng)); break;
      }
      diagonalize(s);
    } catch (const ConfigError&) {
      continue;
    }
    ++done;
    const Mat4 h = hamiltonian(s);
    const EigenStructure es = diagonalize(s);
    const JumpTable t = global_jumps(es);
    for (const Channel c : {Channel::X1, Channel::X2, Channel::Z1, Channel::Z2})
      check_channel(t, h, c);

    for (const JumpEntry& e : t.entries) {
      // Eigenoperator property [H, A(w)] = -w A(w).
      CHECK((h * e.op - e.op * h + e.omega * e.op).norm() < 1e-12);
      // Adjoint closure within the channel.
      CHECK((find_op(t, e.channel, -e.omega) - Mat4(e.op.adjoint())).norm() <
            1e-12);
    }
    // Completeness: each channel sums back to its bare coupling operator.
    for (const Channel c : {Channel::X1, Channel::X2, Channel::Z1, Channel::Z2})
      CHECK((t.channel_sum(c) - channel_operator(c)).norm() < 1e-12);
  }
}

TEST_CASE("dressed dyad amplitudes at ising(0.5, 0.5)") {
  const QubitPairSpec s = QubitPairSpec::ising(0.5, 0.5);
  const EigenStructure es = diagonalize(s);
  const JumpTable t = global_jumps(es);
  const auto w = es.jump_frequencies();  // {w_I, w_II, w_III, w_IV}
  const double th = es.theta, ph = es.phi;
  const Eigen::Vector4cd e0 = es.vectors.col(0), e1 = es.vectors.col(1),
                         e2 = es.vectors.col(2), e3 = es.vectors.col(3);

  // x-sector dyads carry cos/sin(theta +/- phi).
  const Mat4& x1_II = find_op(t, Channel::X1, w[1]);
  CHECK(std::abs(cplx(e0.adjoint() * x1_II * e1) - cplx(-std::sin(th + ph))) <
        1e-13);
  CHECK(std::abs(cplx(e2.adjoint() * x1_II * e3) - cplx(std::sin(th + ph))) <
        1e-13);
  const Mat4& x2_II = find_op(t, Channel::X2, w[1]);
  CHECK(std::abs(cplx(e0.adjoint() * x2_II * e1) - cplx(std::cos(th - ph))) <
        1e-13);
  CHECK(std::abs(cplx(e2.adjoint() * x2_II * e3) - cplx(std::cos(th - ph))) <
        1e-13);
  const Mat4& x1_I = find_op(t, Channel::X1, w[0]);
  CHECK(std::abs(cplx(e0.adjoint() * x1_I * e2) - cplx(std::cos(th + ph))) <
        1e-13);
  CHECK(std::abs(cplx(e1.adjoint() * x1_I * e3) - cplx(std::cos(th + ph))) <
        1e-13);
  const Mat4& x2_I = find_op(t, Channel::X2, w[0]);
  CHECK(std::abs(cplx(e0.adjoint() * x2_I * e2) - cplx(-std::sin(th - ph))) <
        1e-13);
  CHECK(std::abs(cplx(e1.adjoint() * x2_I * e3) - cplx(std::sin(th - ph))) <
        1e-13);

  // z-sector: static part plus the sin(2 theta), sin(2 phi) dyads.
  const Mat4& z1_III = find_op(t, Channel::Z1, w[2]);
  CHECK(std::abs(cplx(e0.adjoint() * z1_III * e3) - cplx(-std::sin(2 * th))) <
        1e-13);
  const Mat4& z1_IV = find_op(t, Channel::Z1, w[3]);
  CHECK(std::abs(cplx(e1.adjoint() * z1_IV * e2) - cplx(-std::sin(2 * ph))) <
        1e-13);
  const Mat4& z2_IV = find_op(t, Channel::Z2, w[3]);
  CHECK(std::abs(cplx(e1.adjoint() * z2_IV * e2) - cplx(std::sin(2 * ph))) <
        1e-13);
  const Mat4& z1_0 = find_op(t, Channel::Z1, 0.0);
  const cplx p3 = e3.adjoint() * z1_0 * e3, p0 = e0.adjoint() * z1_0 * e0;
  CHECK(std::abs(p3 - cplx(std::cos(2 * th))) < 1e-13);
  CHECK(std::abs(p0 - cplx(-std::cos(2 * th))) < 1e-13);
  // z frequencies are {0, w_IV, w_III} ascending.
  const auto zf = t.z_frequencies();
  REQUIRE(zf.size() == 3);
  CHECK(zf[0] == 0.0);
  CHECK(zf[1] == doctest::Approx(w[3]).epsilon(1e-12));
  CHECK(zf[2] == doctest::Approx(w[2]).epsilon(1e-12));
}

TEST_CASE("uncoupled construction reduces to the local table") {
  // For a coupled spec, GlobalUncoupled drops the coupling first; the result
  // must coincide entry-by-entry with the local product-basis table.
  const QubitPairSpec s = QubitPairSpec::ising(0.6, 0.4);
  const JumpTable g = jump_table(s, Construction::GlobalUncoupled);
  const JumpTable l = jump_table(s, Construction::Local);
  REQUIRE(g.entries.size() == l.entries.size());
  for (std::size_t k = 0; k < g.entries.size(); ++k) {
    CHECK(g.entries[k].channel == l.entries[k].channel);
    CHECK(std::abs(g.entries[k].omega - l.entries[k].omega) < 1e-12);
    CHECK((g.entries[k].op - l.entries[k].op).norm() < 1e-12);
  }
  // GlobalCoupled on an uncoupled spec agrees as well.
  const QubitPairSpec u = QubitPairSpec::ising(0.6, 0.0);
  const JumpTable gc = jump_table(u, Construction::GlobalCoupled);
  REQUIRE(gc.entries.size() == l.entries.size());
  for (std::size_t k = 0; k < gc.entries.size(); ++k)
    CHECK((gc.entries[k].op - l.entries[k].op).norm() < 1e-12);
}

TEST_CASE("near-degenerate transition frequencies are merged with a warning") {
  // omega2 = 1 - 1e-10 with a tiny coupling: w_I and w_III differ by less
  // than the 1e-9 bin, so the table merges them and says so.
  const QubitPairSpec s = QubitPairSpec::ising(1.0 - 1e-10, 1e-10);
  const JumpTable t = jump_table(s, Construction::GlobalCoupled);
  CHECK(!t.warnings.empty());
}

TEST_CASE("global x-sector frequencies are the ladder gaps") {
  const QubitPairSpec s = QubitPairSpec::ising(0.8, 0.2);
  const EigenStructure es = diagonalize(s);
  const JumpTable t = global_jumps(es);
  const auto w = es.jump_frequencies();
  for (const Channel c : {Channel::X1, Channel::X2}) {
    std::vector<double> ws;
    for (const JumpEntry& e : t.entries)
      if (e.channel == c && e.omega > 0) ws.push_back(e.omega);
    std::sort(ws.begin(), ws.end());
    REQUIRE(ws.size() == 2);
    CHECK(ws[0] == doctest::Approx(w[1]).epsilon(1e-12));  // w_II
    CHECK(ws[1] == doctest::Approx(w[0]).epsilon(1e-12));  // w_I
  }
}
