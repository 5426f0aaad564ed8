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

#include "zenoprep/pauli.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>

#include "zenoprep/spectral.hpp"

namespace zenoprep {
namespace {

Eigen::MatrixXcd dense(const PauliSum& ps) {
  const auto d = static_cast<Eigen::Index>(ps.dim());
  Eigen::MatrixXcd m(d, d);
  std::vector<std::complex<double>> e(ps.dim()), col(ps.dim());
  for (Eigen::Index j = 0; j < d; ++j) {
    std::fill(e.begin(), e.end(), 0.0);
    e[static_cast<std::size_t>(j)] = 1.0;
    ps.apply(e, col);
    for (Eigen::Index i = 0; i < d; ++i) m(i, j) = col[static_cast<std::size_t>(i)];
  }
  return m;
}

// Independent single-qubit Kronecker construction; qubit 0 is the least significant bit.
Eigen::MatrixXcd kron_pauli(const std::string& s) {
  using C = std::complex<double>;
  Eigen::Matrix2cd I = Eigen::Matrix2cd::Identity(), X, Y, Z;
  X << 0, 1, 1, 0;
  Y << 0, C(0, -1), C(0, 1), 0;
  Z << 1, 0, 0, -1;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
  for (char c : s) {
    const Eigen::Matrix2cd& p = c == 'X' ? X : c == 'Y' ? Y : c == 'Z' ? Z : I;
    Eigen::MatrixXcd next(out.rows() * 2, out.cols() * 2);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) next.block(a * out.rows(), b * out.cols(), out.rows(), out.cols()) = p(a, b) * out;
    out = next;
  }
  return out;
}

double coeff_of(const PauliSum& ps, const std::string& s) {
  const auto p = PauliString::parse(s);
  for (const auto& t : ps.terms)
    if (t.pauli == p) return t.coeff;
  return 0.0;
}

TEST(PauliString, ActionMatchesKroneckerProducts) {
  for (const std::string s : {"X", "Y", "Z", "XY", "YZX", "ZZYI", "IYXZ"}) {
    PauliSum ps{static_cast<int>(s.size()), {{PauliString::parse(s), 1.0}}, 1.0};
    EXPECT_LT((dense(ps) - kron_pauli(s)).norm(), 1e-14) << s;
    EXPECT_EQ(PauliString::parse(s).str(static_cast<int>(s.size())), s);
  }
  EXPECT_THROW(PauliString::parse("XQ"), ConfigError);
}

TEST(PauliDecompose, SingleSiteCoulomb) {
  const auto ps = pauli_decompose(build_lattice(1, 1), {1.0, 4.0, 1.0});
  EXPECT_EQ(ps.n_qubits, 2);
  EXPECT_DOUBLE_EQ(coeff_of(ps, "II"), 1.0);
  EXPECT_DOUBLE_EQ(coeff_of(ps, "ZI"), -1.0);
  EXPECT_DOUBLE_EQ(coeff_of(ps, "IZ"), -1.0);
  EXPECT_DOUBLE_EQ(coeff_of(ps, "ZZ"), 1.0);
  EXPECT_EQ(ps.terms.size(), 4u);
  EXPECT_DOUBLE_EQ(ps.one_norm, 4.0);
}

TEST(PauliDecompose, HoppingBond) {
  // Two sites, U = 0: up modes 0 and 2 sandwich mode 1, down modes 1 and 3 sandwich mode 2.
  const auto ps = pauli_decompose(build_lattice(2, 1), {1.5, 0.0, 1.0});
  EXPECT_DOUBLE_EQ(coeff_of(ps, "XZXI"), 0.75);
  EXPECT_DOUBLE_EQ(coeff_of(ps, "YZYI"), 0.75);
  EXPECT_DOUBLE_EQ(coeff_of(ps, "IXZX"), 0.75);
  EXPECT_DOUBLE_EQ(coeff_of(ps, "IYZY"), 0.75);
  EXPECT_EQ(ps.terms.size(), 4u);
}

TEST(PauliDecompose, ReconstructsFockHamiltonian) {
  for (auto [m, k, s] : {std::tuple{2, 1, 1.0}, std::tuple{3, 1, 0.4}, std::tuple{2, 2, 0.7}}) {
    const auto lat = build_lattice(m, k);
    const HubbardParams p{1.0, default_coupling(lat), s};
    const auto ps = pauli_decompose(lat, p);
    const Eigen::MatrixXcd recon = dense(ps);
    const Eigen::MatrixXd fock = to_dense(build_fock_hamiltonian(lat, p));
    EXPECT_LT((recon - fock.cast<std::complex<double>>()).cwiseAbs().maxCoeff(), 1e-12);

    // Brute-force oracle: c_P = Tr(P H) / 2^n over every string that appears.
    for (const auto& t : ps.terms) {
      const auto kp = kron_pauli(t.pauli.str(ps.n_qubits));
      const std::complex<double> c = (kp * fock.cast<std::complex<double>>()).trace() / static_cast<double>(ps.dim());
      EXPECT_NEAR(c.real(), t.coeff, 1e-12);
      EXPECT_NEAR(c.imag(), 0.0, 1e-12);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(fock);
    EXPECT_GE(ps.one_norm, es.eigenvalues().cwiseAbs().maxCoeff() - 1e-12);
  }
}

TEST(PauliSum, AffineShiftsIdentity) {
  const auto ps = pauli_decompose(build_lattice(2, 1), {1.0, 4.0, 1.0});
  const auto g = ps.affine(-0.5, 3.0);
  const Eigen::MatrixXcd expect = -0.5 * dense(ps) + 3.0 * Eigen::MatrixXcd::Identity(16, 16);
  EXPECT_LT((dense(g) - expect).norm(), 1e-12);
}

}  // namespace
}  // namespace zenoprep
