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

// Hubbard problem instances: lattice geometry, default couplings, the fixed
// (n_up, n_down) basis and sparse Hamiltonians H(s) = T + s U sum_i n_up n_down.
//
// Fermionic modes are ordered site-major with interleaved spin: site i owns
// mode 2i (up) and 2i+1 (down). A basis state |n> is the product of creation
// operators in increasing mode order applied to the vacuum, so hopping signs
// are (-1)^(occupied modes strictly between the two endpoints).

#include <algorithm>
#include <bit>
#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "zenoprep/error.hpp"

namespace zenoprep {

inline constexpr int kMaxSites = 32;         // bitmask basis limit
inline constexpr int kMaxLatticeSites = 4096;

struct LatticeSpec {
  int m = 0;  // long side
  int k = 0;  // short side
  std::vector<std::pair<int, int>> edges;

  int n_sites() const { return m * k; }
  /// m = k > 1 lattices carry extra ground-state degeneracies.
  bool is_square() const { return m == k && m > 1; }
  std::string shape() const { return std::to_string(m) + "x" + std::to_string(k); }

  friend bool operator==(const LatticeSpec&, const LatticeSpec&) = default;
};

/// Open-boundary m x k grid. Site (x, y), 0 <= x < m, 0 <= y < k, has index
/// y*m + x. Edges are (i, j) with i < j, sorted lexicographically.
inline LatticeSpec build_lattice(int m, int k) {
  if (m <= 0 || k <= 0) throw ConfigError("lattice sides must be positive");
  if (m < k) throw ConfigError("lattice must be oriented with m >= k (got " + std::to_string(m) + "x" +
                               std::to_string(k) + ")");
  if (m * k > kMaxLatticeSites) throw CapacityError("lattice exceeds " + std::to_string(kMaxLatticeSites) + " sites");
  LatticeSpec lat{m, k, {}};
  for (int y = 0; y < k; ++y) {
    for (int x = 0; x < m; ++x) {
      const int i = y * m + x;
      if (x + 1 < m) lat.edges.emplace_back(i, i + 1);
      if (y + 1 < k) lat.edges.emplace_back(i, i + m);
    }
  }
  std::sort(lat.edges.begin(), lat.edges.end());
  return lat;
}

/// U equals twice the coordination number of the bulk: 4 (chain), 6 (ladder), 8 (2D).
inline double default_coupling(const LatticeSpec& lat) {
  if (lat.k == 1) return 4.0;
  if (lat.k == 2) return 6.0;
  return 8.0;
}

struct HubbardParams {
  double t_hop = 1.0;
  double u = 4.0;
  double s = 1.0;

  friend bool operator==(const HubbardParams&, const HubbardParams&) = default;
};

inline void validate(const HubbardParams& p) {
  if (!(p.u >= 0.0)) throw ConfigError("Coulomb strength u must be >= 0");
  if (!(p.s >= 0.0 && p.s <= 1.0)) throw ConfigError("interpolation parameter s must lie in [0, 1]");
  if (!std::isfinite(p.t_hop)) throw ConfigError("t_hop must be finite");
}

struct SectorSpec {
  int n_up = 0;
  int n_down = 0;
  int n_sites = 0;

  friend bool operator==(const SectorSpec&, const SectorSpec&) = default;
};

inline void validate(const SectorSpec& sec) {
  if (sec.n_sites <= 0) throw ConfigError("sector site count must be positive");
  if (sec.n_up < 0 || sec.n_up > sec.n_sites || sec.n_down < 0 || sec.n_down > sec.n_sites)
    throw ConfigError("sector occupation out of range");
}

/// Electron count round((1 + doping) N) with ties rounded up; the odd electron goes to n_up.
inline SectorSpec doped_sector(const LatticeSpec& lat, double doping = 0.10) {
  if (!(doping >= 0.0 && doping < 1.0)) throw ConfigError("doping must lie in [0, 1)");
  const int n = lat.n_sites();
  // The 1e-9 guard keeps representation error (e.g. 1.1 * 5 = 5.5000000000000009) from
  // flipping exact ties.
  const auto n_e = static_cast<int>(std::floor((1.0 + doping) * n + 0.5 + 1e-9));
  if (n_e > 2 * n) throw ConfigError("doping exceeds the 2N-electron capacity");
  SectorSpec sec{(n_e + 1) / 2, n_e / 2, n};
  validate(sec);
  return sec;
}

/// C(n, r) in exact 64-bit arithmetic; overflow raises CapacityError.
inline std::uint64_t binomial(int n, int r) {
  if (r < 0 || r > n) return 0;
  r = std::min(r, n - r);
  std::uint64_t c = 1;
  for (int i = 0; i < r; ++i) {
    // c * (n - i) / (i + 1) is always an integer; divide by the gcd first to stay in range.
    std::uint64_t num = static_cast<std::uint64_t>(n - i);
    std::uint64_t den = static_cast<std::uint64_t>(i + 1);
    const std::uint64_t g1 = std::gcd(c, den);
    c /= g1;
    den /= g1;
    num /= den;  // den now divides num
    std::uint64_t out;
    if (__builtin_mul_overflow(c, num, &out)) throw CapacityError("binomial coefficient overflows 64 bits");
    c = out;
  }
  return c;
}

inline std::uint64_t sector_dimension(const SectorSpec& sec) {
  validate(sec);
  std::uint64_t out;
  if (__builtin_mul_overflow(binomial(sec.n_sites, sec.n_up), binomial(sec.n_sites, sec.n_down), &out))
    throw CapacityError("sector dimension overflows 64 bits");
  return out;
}

/// All n-site occupation bitmasks with a fixed popcount, in ascending numeric
/// order. That order coincides with the colexicographic order of the
/// combinatorial number system, so rank(mask) = sum_i C(c_i, i + 1) over the
/// sorted set-bit positions c_0 < c_1 < ...
class SpinBasis {
 public:
  SpinBasis(int n_sites, int n_particles) : n_sites_(n_sites), n_particles_(n_particles) {
    if (n_sites < 0 || n_sites > kMaxSites || n_particles < 0 || n_particles > n_sites)
      throw ConfigError("invalid spin basis");
    for (int n = 0; n <= n_sites; ++n)
      for (int r = 0; r <= n_particles + 1; ++r) table_.push_back(binomial(n, r));
    const std::uint64_t count = binomial(n_sites, n_particles);
    masks_.reserve(count);
    if (n_particles == 0) {
      masks_.push_back(0);
      return;
    }
    std::uint64_t v = (std::uint64_t{1} << n_particles) - 1;
    const std::uint64_t limit = std::uint64_t{1} << n_sites;
    while (v < limit) {
      masks_.push_back(static_cast<std::uint32_t>(v));
      // Gosper's hack: next integer with the same popcount.
      const std::uint64_t c = v & (~v + 1);
      const std::uint64_t r = v + c;
      v = (((r ^ v) >> 2) / c) | r;
    }
  }

  std::size_t size() const { return masks_.size(); }
  std::uint32_t mask(std::size_t rank) const { return masks_[rank]; }
  std::span<const std::uint32_t> masks() const { return masks_; }
  int n_particles() const { return n_particles_; }

  std::size_t rank(std::uint32_t mask) const {
    std::size_t r = 0;
    int i = 0;
    while (mask) {
      const int pos = std::countr_zero(mask);
      r += choose(pos, i + 1);
      mask &= mask - 1;
      ++i;
    }
    return r;
  }

 private:
  std::uint64_t choose(int n, int r) const { return table_[static_cast<std::size_t>(n) * (n_particles_ + 2) + r]; }

  int n_sites_;
  int n_particles_;
  std::vector<std::uint64_t> table_;
  std::vector<std::uint32_t> masks_;
};

/// Spread per-site up/down bitmasks into the interleaved 2N-mode occupation word.
inline std::uint64_t interleave_modes(std::uint32_t up, std::uint32_t down) {
  std::uint64_t out = 0;
  for (int i = 0; up | down; ++i, up >>= 1, down >>= 1) {
    out |= static_cast<std::uint64_t>(up & 1u) << (2 * i);
    out |= static_cast<std::uint64_t>(down & 1u) << (2 * i + 1);
  }
  return out;
}

/// Tensor basis of a fixed (n_up, n_down) sector. State index = rank_up * dim_down + rank_down.
class SectorBasis {
 public:
  explicit SectorBasis(const SectorSpec& sec)
      : sector_(sec), up_(sec.n_sites, sec.n_up), down_(sec.n_sites, sec.n_down) {}

  std::size_t size() const { return up_.size() * down_.size(); }
  const SectorSpec& sector() const { return sector_; }
  const SpinBasis& up() const { return up_; }
  const SpinBasis& down() const { return down_; }

  std::uint32_t up_mask(std::size_t idx) const { return up_.mask(idx / down_.size()); }
  std::uint32_t down_mask(std::size_t idx) const { return down_.mask(idx % down_.size()); }
  std::size_t index(std::uint32_t up, std::uint32_t down) const {
    return up_.rank(up) * down_.size() + down_.rank(down);
  }
  /// Index of the state in the full 4^N Fock space (qubit q = bit q).
  std::uint64_t fock_index(std::size_t idx) const { return interleave_modes(up_mask(idx), down_mask(idx)); }

 private:
  SectorSpec sector_;
  SpinBasis up_;
  SpinBasis down_;
};

/// Real symmetric matrix in CSR form. Every row stores its diagonal entry.
class SparseOperator {
 public:
  struct Metadata {
    LatticeSpec lattice;
    HubbardParams params;
    SectorSpec sector;
  };

  struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
  };

  SparseOperator() = default;

  /// Duplicate (row, col) entries are summed.
  static SparseOperator from_triplets(std::size_t dim, std::vector<Triplet> entries) {
    for (std::size_t i = 0; i < dim; ++i) entries.push_back({i, i, 0.0});
    std::sort(entries.begin(), entries.end(),
              [](const Triplet& a, const Triplet& b) { return std::tie(a.row, a.col) < std::tie(b.row, b.col); });
    SparseOperator op;
    op.dim_ = dim;
    op.row_ptr_.assign(dim + 1, 0);
    for (const auto& t : entries) {
      if (t.row >= dim || t.col >= dim) throw ConfigError("triplet index out of range");
      if (!op.col_.empty() && op.row_of_last_ == t.row && op.col_.back() == t.col) {
        op.val_.back() += t.value;
        continue;
      }
      op.col_.push_back(static_cast<std::uint32_t>(t.col));
      op.val_.push_back(t.value);
      op.row_of_last_ = t.row;
      ++op.row_ptr_[t.row + 1];
    }
    for (std::size_t i = 0; i < dim; ++i) op.row_ptr_[i + 1] += op.row_ptr_[i];
    return op;
  }

  static SparseOperator diagonal(std::span<const double> d) {
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < d.size(); ++i) t.push_back({i, i, d[i]});
    return from_triplets(d.size(), std::move(t));
  }

  std::size_t dim() const { return dim_; }
  std::size_t nnz() const { return val_.size(); }
  std::span<const std::size_t> row_ptr() const { return row_ptr_; }
  std::span<const std::uint32_t> col() const { return col_; }
  std::span<const double> values() const { return val_; }
  const std::optional<Metadata>& metadata() const { return metadata_; }

  void apply(std::span<const double> x, std::span<double> y) const {
    for (std::size_t i = 0; i < dim_; ++i) {
      double acc = 0.0;
      for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) acc += val_[p] * x[col_[p]];
      y[i] = acc;
    }
  }

  double at(std::size_t i, std::size_t j) const {
    const auto first = col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
    const auto last = col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
    const auto it = std::lower_bound(first, last, static_cast<std::uint32_t>(j));
    return (it != last && *it == j) ? val_[static_cast<std::size_t>(it - col_.begin())] : 0.0;
  }

  /// max |H_ij - H_ji| over stored entries.
  double hermiticity_residual() const {
    double r = 0.0;
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) r = std::max(r, std::abs(val_[p] - at(col_[p], i)));
    return r;
  }

  /// Max absolute row sum; bounds the spectral radius.
  double gershgorin_bound() const {
    double b = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
      double s = 0.0;
      for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) s += std::abs(val_[p]);
      b = std::max(b, s);
    }
    return b;
  }

  /// scale * H + shift * I.
  SparseOperator affine(double scale, double shift) const {
    SparseOperator out = *this;
    for (auto& v : out.val_) v *= scale;
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p)
        if (col_[p] == i) out.val_[p] += shift;
    return out;
  }

  SparseOperator with_metadata(Metadata md) && {
    metadata_ = std::move(md);
    return std::move(*this);
  }

 private:
  friend class CsrBuilder;

  std::size_t dim_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::uint32_t> col_;
  std::vector<double> val_;
  std::optional<Metadata> metadata_;
  std::size_t row_of_last_ = 0;
};

/// Appends rows in order; avoids materializing triplets for large sectors.
class CsrBuilder {
 public:
  explicit CsrBuilder(std::size_t dim) {
    op_.dim_ = dim;
    op_.row_ptr_.reserve(dim + 1);
  }

  /// `row` must contain each column at most once.
  void push_row(std::vector<std::pair<std::uint32_t, double>>& row) {
    std::sort(row.begin(), row.end());
    for (const auto& [c, v] : row) {
      op_.col_.push_back(c);
      op_.val_.push_back(v);
    }
    op_.row_ptr_.push_back(op_.col_.size());
  }

  SparseOperator finish() && {
    if (op_.row_ptr_.size() != op_.dim_ + 1) throw Error("CsrBuilder: row count mismatch");
    return std::move(op_);
  }

 private:
  SparseOperator op_;
};

inline constexpr std::size_t kDefaultMaxSectorDim = std::size_t{1} << 22;

namespace detail {

// Parity of occupied modes strictly between modes a and b.
inline double jw_sign(std::uint64_t occupation, int a, int b) {
  if (a > b) std::swap(a, b);
  if (b - a <= 1) return 1.0;
  const std::uint64_t between = ((std::uint64_t{1} << b) - 1) & ~((std::uint64_t{1} << (a + 1)) - 1);
  return (std::popcount(occupation & between) & 1) ? -1.0 : 1.0;
}

}  // namespace detail

/// H(s) restricted to the sector, with the kinetic term taken as +t_hop.
inline SparseOperator build_hamiltonian(const LatticeSpec& lat, const HubbardParams& params, const SectorSpec& sec,
                                        std::size_t max_dim = kDefaultMaxSectorDim) {
  validate(params);
  validate(sec);
  if (sec.n_sites != lat.n_sites()) throw ConfigError("sector and lattice disagree on the site count");
  const std::uint64_t dim = sector_dimension(sec);
  if (dim > max_dim)
    throw CapacityError("sector dimension " + std::to_string(dim) + " exceeds budget " + std::to_string(max_dim));

  if (sec.n_sites > kMaxSites) throw CapacityError("bitmask basis limited to " + std::to_string(kMaxSites) + " sites");
  const SectorBasis basis(sec);
  CsrBuilder builder(basis.size());
  std::vector<std::pair<std::uint32_t, double>> row;
  const auto n_down = basis.down().size();

  for (std::size_t idx = 0; idx < basis.size(); ++idx) {
    const std::uint32_t up = basis.up_mask(idx);
    const std::uint32_t dn = basis.down_mask(idx);
    const std::uint64_t occ = interleave_modes(up, dn);
    row.clear();
    row.emplace_back(static_cast<std::uint32_t>(idx), params.s * (params.u * std::popcount(up & dn)));

    for (const auto& [i, j] : lat.edges) {
      for (int spin = 0; spin < 2; ++spin) {
        const std::uint32_t m = spin == 0 ? up : dn;
        const bool oi = (m >> i) & 1u;
        const bool oj = (m >> j) & 1u;
        if (oi == oj) continue;
        const std::uint32_t moved = m ^ ((1u << i) | (1u << j));
        const double sign = detail::jw_sign(occ, 2 * i + spin, 2 * j + spin);
        const std::size_t target = spin == 0 ? basis.up().rank(moved) * n_down + basis.down().rank(dn)
                                             : basis.up().rank(up) * n_down + basis.down().rank(moved);
        row.emplace_back(static_cast<std::uint32_t>(target), params.t_hop * sign);
      }
    }
    builder.push_row(row);
  }
  return std::move(builder).finish().with_metadata({lat, params, sec});
}

/// H(s) on the full 4^N Fock space, using the same mode ordering and signs as
/// build_hamiltonian. Intended for tiny systems (cross-checks, qubitization).
inline SparseOperator build_fock_hamiltonian(const LatticeSpec& lat, const HubbardParams& params,
                                             int max_sites = 8) {
  validate(params);
  const int n = lat.n_sites();
  if (n > max_sites) throw CapacityError("Fock-space Hamiltonian limited to " + std::to_string(max_sites) + " sites");
  const std::size_t dim = std::size_t{1} << (2 * n);
  CsrBuilder builder(dim);
  std::vector<std::pair<std::uint32_t, double>> row;
  for (std::size_t occ = 0; occ < dim; ++occ) {
    row.clear();
    int doubles = 0;
    for (int i = 0; i < n; ++i) doubles += static_cast<int>((occ >> (2 * i)) & (occ >> (2 * i + 1)) & 1u);
    row.emplace_back(static_cast<std::uint32_t>(occ), params.s * (params.u * doubles));
    for (const auto& [i, j] : lat.edges) {
      for (int spin = 0; spin < 2; ++spin) {
        const int a = 2 * i + spin;
        const int b = 2 * j + spin;
        if (((occ >> a) & 1u) == ((occ >> b) & 1u)) continue;
        const std::size_t target = occ ^ ((std::size_t{1} << a) | (std::size_t{1} << b));
        row.emplace_back(static_cast<std::uint32_t>(target), params.t_hop * detail::jw_sign(occ, a, b));
      }
    }
    builder.push_row(row);
  }
  return std::move(builder).finish();
}

/// Embed a sector vector into the 4^N Fock space.
template <class T>
std::vector<T> embed_in_fock(const SectorBasis& basis, std::span<const T> v) {
  if (v.size() != basis.size()) throw ConfigError("vector does not match the sector dimension");
  std::vector<T> out(std::size_t{1} << (2 * basis.sector().n_sites), T{});
  for (std::size_t i = 0; i < v.size(); ++i) out[basis.fock_index(i)] = v[i];
  return out;
}

}  // namespace zenoprep
