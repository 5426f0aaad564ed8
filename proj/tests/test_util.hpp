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

#include <cmath>
#include <cstdint>
#include <vector>

#include "zenoprep/model.hpp"
#include "zenoprep/rng.hpp"
#include "zenoprep/spectral.hpp"

namespace zenoprep::testing {

inline const std::vector<double> kTwoSiteSpectrum = {2.0 - 2.0 * std::sqrt(2.0), 0.0, 4.0, 2.0 + 2.0 * std::sqrt(2.0)};

inline SparseOperator two_site_hubbard(double s = 1.0) {
  const auto lat = build_lattice(2, 1);
  return build_hamiltonian(lat, HubbardParams{1.0, 4.0, s}, SectorSpec{1, 1, 2});
}

/// Symmetric matrix with roughly `per_row` random off-diagonal entries per row.
inline SparseOperator random_symmetric(std::size_t dim, int per_row, std::uint64_t seed) {
  CounterRng rng(seed);
  std::vector<SparseOperator::Triplet> t;
  for (std::size_t i = 0; i < dim; ++i) {
    t.push_back({i, i, 4.0 * rng.uniform() - 2.0});
    for (int k = 0; k < per_row; ++k) {
      const std::size_t j = rng() % dim;
      if (j == i) continue;
      const double v = 2.0 * rng.uniform() - 1.0;
      t.push_back({i, j, v});
      t.push_back({j, i, v});
    }
  }
  return SparseOperator::from_triplets(dim, std::move(t));
}

/// Spectral settings that always take the Lanczos path.
inline SpectralConfig lanczos_config() {
  SpectralConfig cfg;
  cfg.dense_threshold = 1;
  return cfg;
}

struct RandomInstance {
  LatticeSpec lattice;
  HubbardParams params;
  SectorSpec sector;
  SparseOperator op;
  std::vector<double> dense;
};

/// Small Hubbard Hamiltonians with random shape, coupling, s and filling,
/// keeping only those whose dense ground state is separated by more than
/// `min_gap` and whose dimension exceeds `min_dim`.
inline std::vector<RandomInstance> random_instances(int count, std::uint64_t seed, double min_gap = 1e-4,
                                                    std::size_t min_dim = 20) {
  const int shapes[][2] = {{4, 1}, {5, 1}, {6, 1}, {2, 2}, {3, 2}};
  std::vector<RandomInstance> out;
  for (std::uint64_t draw = 0; static_cast<int>(out.size()) < count; ++draw) {
    CounterRng rng(seed, draw);
    const auto& sh = shapes[rng() % 5];
    RandomInstance r;
    r.lattice = build_lattice(sh[0], sh[1]);
    const int n = r.lattice.n_sites();
    r.params = {1.0, 1.0 + 7.0 * rng.uniform(), 0.05 + 0.95 * rng.uniform()};
    r.sector = {1 + static_cast<int>(rng() % static_cast<std::uint64_t>(n - 1)),
                1 + static_cast<int>(rng() % static_cast<std::uint64_t>(n - 1)), n};
    r.op = build_hamiltonian(r.lattice, r.params, r.sector);
    if (r.op.dim() <= min_dim) continue;
    r.dense = dense_spectrum(r.op);
    if (r.dense[1] - r.dense[0] <= min_gap) continue;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace zenoprep::testing
