// Copyright 2026 The zenoprep Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Jordan-Wigner Pauli decomposition of the full-Fock-space Hubbard Hamiltonian.
// Qubit q carries fermionic mode q (site-major, spin interleaved), with
// |1> = occupied, so n_q = (I - Z_q) / 2.

#include <bit>
#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "zenoprep/error.hpp"
#include "zenoprep/model.hpp"

namespace zenoprep {

/// Pauli string in symplectic form: qubit q carries X^{x_q} Z^{z_q} with Y = iXZ.
struct PauliString {
  std::uint64_t x = 0;
  std::uint64_t z = 0;

  friend auto operator<=>(const PauliString&, const PauliString&) = default;

  /// One character per qubit, qubit 0 first.
  std::string str(int n_qubits) const {
    std::string out(static_cast<std::size_t>(n_qubits), 'I');
    for (int q = 0; q < n_qubits; ++q) {
      const bool bx = (x >> q) & 1u;
      const bool bz = (z >> q) & 1u;
      out[static_cast<std::size_t>(q)] = bx ? (bz ? 'Y' : 'X') : (bz ? 'Z' : 'I');
    }
    return out;
  }

  static PauliString parse(const std::string& s) {
    PauliString p;
    for (std::size_t q = 0; q < s.size(); ++q) {
      const std::uint64_t bit = std::uint64_t{1} << q;
      switch (s[q]) {
        case 'I': break;
        case 'X': p.x |= bit; break;
        case 'Y': p.x |= bit; p.z |= bit; break;
        case 'Z': p.z |= bit; break;
        default: throw ConfigError("bad Pauli character '" + std::string(1, s[q]) + "'");
      }
    }
    return p;
  }

  bool is_identity() const { return x == 0 && z == 0; }

  /// P|b> = phase * |b ^ x>.
  std::complex<double> phase_on(std::uint64_t b) const {
    static constexpr std::complex<double> kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const int ys = std::popcount(x & z);
    const int flips = std::popcount(b & z);
    return kIPow[(ys + 2 * flips) & 3];
  }
};

struct PauliTerm {
  PauliString pauli;
  double coeff = 0.0;
};

struct PauliSum {
  int n_qubits = 0;
  std::vector<PauliTerm> terms;
  double one_norm = 0.0;  // lambda = sum_l |c_l|

  std::size_t dim() const { return std::size_t{1} << n_qubits; }

  /// y = (sum_l c_l P_l) x.
  void apply(std::span<const std::complex<double>> x, std::span<std::complex<double>> y) const {
    std::fill(y.begin(), y.end(), std::complex<double>{});
    for (const auto& t : terms)
      for (std::uint64_t b = 0; b < x.size(); ++b) y[b ^ t.pauli.x] += t.coeff * t.pauli.phase_on(b) * x[b];
  }

  /// alpha * this + beta * I.
  PauliSum affine(double alpha, double beta) const {
    std::map<PauliString, double> acc;
    for (const auto& t : terms) acc[t.pauli] += alpha * t.coeff;
    acc[PauliString{}] += beta;
    return from_map(n_qubits, acc);
  }

  static PauliSum from_map(int n_qubits, const std::map<PauliString, double>& acc, double drop = 1e-14) {
    PauliSum ps;
    ps.n_qubits = n_qubits;
    for (const auto& [p, c] : acc) {
      if (std::abs(c) <= drop) continue;
      ps.terms.push_back({p, c});
      ps.one_norm += std::abs(c);
    }
    return ps;
  }
};

inline constexpr int kMaxPauliSites = 8;

/// Jordan-Wigner decomposition of H(s) on 2N qubits.
inline PauliSum pauli_decompose(const LatticeSpec& lat, const HubbardParams& params, int max_sites = kMaxPauliSites) {
  validate(params);
  const int n = lat.n_sites();
  if (n > max_sites) throw CapacityError("Pauli decomposition limited to " + std::to_string(max_sites) + " sites");
  std::map<PauliString, double> acc;
  const double onsite = params.s * params.u / 4.0;
  for (int i = 0; i < n; ++i) {
    const std::uint64_t za = std::uint64_t{1} << (2 * i);
    const std::uint64_t zb = std::uint64_t{1} << (2 * i + 1);
    // n_a n_b = (I - Z_a - Z_b + Z_a Z_b) / 4
    acc[PauliString{}] += onsite;
    acc[PauliString{0, za}] -= onsite;
    acc[PauliString{0, zb}] -= onsite;
    acc[PauliString{0, za | zb}] += onsite;
  }
  for (const auto& [i, j] : lat.edges) {
    for (int spin = 0; spin < 2; ++spin) {
      const int a = 2 * i + spin;
      const int b = 2 * j + spin;
      const std::uint64_t ends = (std::uint64_t{1} << a) | (std::uint64_t{1} << b);
      const std::uint64_t string = ((std::uint64_t{1} << b) - 1) & ~((std::uint64_t{1} << (a + 1)) - 1);
      // c_a^dag c_b + h.c. = (X_a Z..Z X_b + Y_a Z..Z Y_b) / 2
      acc[PauliString{ends, string}] += params.t_hop / 2.0;
      acc[PauliString{ends, string | ends}] += params.t_hop / 2.0;
    }
  }
  return PauliSum::from_map(2 * n, acc);
}

}  // namespace zenoprep
