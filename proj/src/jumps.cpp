#include "qme/jumps.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "qme/errors.hpp"

namespace qme {

namespace {
constexpr double kFreqBin = 1e-9;   // frequencies closer than this are merged
constexpr double kNormDrop = 1e-14; // entries with smaller Frobenius norm vanish
}

int channel_qubit(Channel c) {
  return (c == Channel::X1 || c == Channel::Z1) ? 1 : 2;
}

bool channel_dissipative(Channel c) {
  return c == Channel::X1 || c == Channel::X2;
}

std::string to_string(Channel c) {
  switch (c) {
    case Channel::X1: return "x1";
    case Channel::X2: return "x2";
    case Channel::Z1: return "z1";
    case Channel::Z2: return "z2";
  }
  return "?";
}

Mat4 channel_operator(Channel c) {
  const int q = channel_qubit(c);
  return channel_dissipative(c) ? on_qubit(sigma_x(), q) : on_qubit(sigma_z(), q);
}

std::vector<double> JumpTable::z_frequencies() const {
  std::vector<double> freqs;
  for (const auto& e : entries)
    if (!channel_dissipative(e.channel)) freqs.push_back(std::abs(e.omega));
  std::sort(freqs.begin(), freqs.end());
  std::vector<double> out;
  for (double w : freqs)
    if (out.empty() || w - out.back() > kFreqBin) out.push_back(w);
  return out;
}

Mat4 JumpTable::channel_sum(Channel c) const {
  Mat4 sum = Mat4::Zero();
  for (const auto& e : entries)
    if (e.channel == c) sum += e.op;
  return sum;
}

std::string to_string(Construction c) {
  switch (c) {
    case Construction::GlobalCoupled: return "global";
    case Construction::GlobalUncoupled: return "global-uncoupled";
    case Construction::Local: return "local";
  }
  return "?";
}

JumpTable global_jumps(const EigenStructure& es) {
  JumpTable table;
  const Mat4& u = es.vectors;
  for (Channel ch : {Channel::X1, Channel::X2, Channel::Z1, Channel::Z2}) {
    const Mat4 op = channel_operator(ch);
    const Mat4 m = u.adjoint() * op * u;  // eigenbasis matrix elements
    // Collect dyads by transition frequency E_col - E_row; A(w) lowers by w.
    struct Bin {
      Mat4 sum;
      double lo, hi;  // raw frequency spread absorbed by this bin
    };
    std::map<double, Bin, std::less<>> bins;
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        if (std::abs(m(i, j)) <= kNormDrop) continue;
        const double w = es.energies[j] - es.energies[i];
        auto it = bins.lower_bound(w - kFreqBin);
        if (it == bins.end() || it->first > w + kFreqBin)
          it = bins.emplace(w, Bin{Mat4::Zero(), w, w}).first;
        it->second.sum += m(i, j) * (u.col(i) * u.col(j).adjoint());
        it->second.lo = std::min(it->second.lo, w);
        it->second.hi = std::max(it->second.hi, w);
      }
    }
    for (const auto& [w, bin] : bins) {
      if (bin.sum.norm() <= kNormDrop) continue;
      if (bin.hi - bin.lo > 1e-12)
        table.warnings.push_back(
            "channel " + to_string(ch) + ": transition frequencies spanning " +
            std::to_string(bin.hi - bin.lo) + " near " + std::to_string(w) +
            " were merged by the 1e-9 binning");
      table.entries.push_back({ch, std::abs(w) < kFreqBin ? 0.0 : w, bin.sum});
    }
  }
  std::sort(table.entries.begin(), table.entries.end(),
            [](const JumpEntry& a, const JumpEntry& b) {
              if (a.channel != b.channel) return a.channel < b.channel;
              return a.omega < b.omega;
            });
  return table;
}

JumpTable local_jumps(const QubitPairSpec& spec) {
  spec.validate();
  JumpTable table;
  const double w1 = spec.omega1(), w2 = spec.omega2;
  table.entries.push_back({Channel::X1, -w1, on_qubit(sigma_plus(), 1)});
  table.entries.push_back({Channel::X1, w1, on_qubit(sigma_minus(), 1)});
  table.entries.push_back({Channel::X2, -w2, on_qubit(sigma_plus(), 2)});
  table.entries.push_back({Channel::X2, w2, on_qubit(sigma_minus(), 2)});
  table.entries.push_back({Channel::Z1, 0.0, on_qubit(sigma_z(), 1)});
  table.entries.push_back({Channel::Z2, 0.0, on_qubit(sigma_z(), 2)});
  return table;
}

JumpTable jump_table(const QubitPairSpec& spec, Construction c) {
  switch (c) {
    case Construction::GlobalCoupled:
      return global_jumps(diagonalize(spec));
    case Construction::GlobalUncoupled: {
      QubitPairSpec bare = spec;
      bare.lambda_x = bare.lambda_y = bare.lambda_z = 0.0;
      return global_jumps(diagonalize(bare));
    }
    case Construction::Local:
      return local_jumps(spec);
  }
  throw ConfigError("unknown jump construction");
}

}  // namespace qme
