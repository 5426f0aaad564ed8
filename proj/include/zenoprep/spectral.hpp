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

// Ground/first-excited eigenpairs, spectral bounds, fidelities and the
// [0, 2 pi] window normalization. The iterative solver is a thick-restart
// Lanczos method with (by default) full two-pass reorthogonalization; the
// dense solver is used for tiny dimensions and as a validation oracle.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "zenoprep/error.hpp"
#include "zenoprep/model.hpp"
#include "zenoprep/rng.hpp"

namespace zenoprep {

using Vector = std::vector<double>;
using LinearMap = std::function<void(std::span<const double>, std::span<double>)>;

/// Penalty added to the ground state when solving for the first excited state:
/// |e0| when |e0| > threshold, `fallback` otherwise.
struct PenaltyRule {
  double threshold = 1.0;
  double fallback = 10.0;

  double operator()(double e0) const { return std::abs(e0) > threshold ? std::abs(e0) : fallback; }
};

struct SpectralConfig {
  double tol = 1e-9;  // residual goal, relative to the operator norm estimate
  int max_iter = 20000;
  int krylov_dim = 80;
  int keep = 16;
  bool reorth = true;
  PenaltyRule penalty;
  std::size_t dense_threshold = 16;
  double degeneracy_tol = 1e-8;
  std::uint64_t seed = 20190611;

  void validate() const {
    if (!(tol > 0.0)) throw ConfigError("spectral tol must be positive");
    if (dense_threshold < 1) throw ConfigError("dense_threshold must be >= 1");
    if (krylov_dim < 4 || keep < 1 || keep >= krylov_dim - 1) throw ConfigError("invalid Krylov sizes");
    if (max_iter < 1) throw ConfigError("max_iter must be >= 1");
  }

  /// Everything that can change a computed spectral result.
  std::string fingerprint() const {
    std::ostringstream os;
    os.precision(17);
    os << "tol=" << tol << ";max_iter=" << max_iter << ";krylov=" << krylov_dim << ";keep=" << keep
       << ";reorth=" << reorth << ";pen=" << penalty.threshold << "," << penalty.fallback
       << ";dense=" << dense_threshold << ";degen=" << degeneracy_tol << ";seed=" << seed;
    return os.str();
  }
};

struct Eigenpair {
  double value = 0.0;
  Vector vector;
  double residual = 0.0;  // ||H v - value v||
  int matvecs = 0;
};

enum class SpectrumEnd { lowest, highest };

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline void scale(double alpha, std::span<double> x) {
  for (auto& v : x) v *= alpha;
}

inline Vector random_unit_vector(std::size_t dim, std::uint64_t seed) {
  CounterRng rng(seed, 0);
  Vector v(dim);
  for (auto& x : v) x = rng.uniform() - 0.5;
  scale(1.0 / norm(v), v);
  return v;
}

inline double true_residual(const LinearMap& apply, std::span<const double> v, double value, Vector& scratch) {
  apply(v, scratch);
  axpy(-value, v, scratch);
  return norm(scratch);
}

}  // namespace detail

/// Lowest eigenpair of the symmetric map `apply` on R^dim.
inline Eigenpair lanczos_lowest(const LinearMap& apply, std::size_t dim, const SpectralConfig& cfg,
                                std::uint64_t seed) {
  cfg.validate();
  if (dim == 0) throw ConfigError("empty operator");
  Vector scratch(dim);
  if (dim == 1) {
    Vector one{1.0};
    apply(one, scratch);
    return {scratch[0], one, 0.0, 1};
  }

  const int m = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(cfg.krylov_dim), dim));
  std::vector<Vector> basis;
  basis.reserve(static_cast<std::size_t>(m) + 1);
  basis.push_back(detail::random_unit_vector(dim, seed));
  Eigen::MatrixXd proj = Eigen::MatrixXd::Zero(m + 1, m + 1);
  int locked = 0;  // Ritz vectors carried over from the last restart
  int matvecs = 0;
  double normest = 0.0;
  double best_residual = std::numeric_limits<double>::infinity();
  Vector w(dim);

  while (true) {
    const int j = static_cast<int>(basis.size()) - 1;
    apply(basis[static_cast<std::size_t>(j)], w);
    ++matvecs;
    Eigen::VectorXd h = Eigen::VectorXd::Zero(j + 1);
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i <= j; ++i) {
        if (!cfg.reorth && i < j - 1 && i >= locked) continue;
        const double c = detail::dot(basis[static_cast<std::size_t>(i)], w);
        detail::axpy(-c, basis[static_cast<std::size_t>(i)], w);
        h(i) += c;
      }
      if (!cfg.reorth) break;
    }
    for (int i = 0; i <= j; ++i) proj(i, j) = proj(j, i) = h(i);
    const double beta = detail::norm(w);

    const int k = j + 1;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(proj.topLeftCorner(k, k));
    const Eigen::VectorXd& theta = es.eigenvalues();
    const Eigen::MatrixXd& y = es.eigenvectors();
    normest = std::max({normest, std::abs(theta(0)), std::abs(theta(k - 1))});
    const double goal = cfg.tol * std::max(normest, 1e-300);
    const double estimate = beta * std::abs(y(k - 1, 0));
    const bool exhausted = beta <= 1e-14 * std::max(normest, 1.0) || k == static_cast<int>(dim);

    if (estimate <= goal || exhausted) {
      Vector x(dim, 0.0);
      for (int i = 0; i < k; ++i) detail::axpy(y(i, 0), basis[static_cast<std::size_t>(i)], x);
      detail::scale(1.0 / detail::norm(x), x);
      const double r = detail::true_residual(apply, x, theta(0), scratch);
      ++matvecs;
      best_residual = std::min(best_residual, r);
      if (r <= goal || exhausted) return {theta(0), std::move(x), r, matvecs};
    } else {
      best_residual = std::min(best_residual, estimate);
    }
    if (matvecs >= cfg.max_iter)
      throw ConvergenceError("Lanczos did not converge in " + std::to_string(cfg.max_iter) + " matvecs",
                             best_residual);

    detail::scale(1.0 / beta, w);
    if (k < m) {
      basis.push_back(w);
      continue;
    }
    // Thick restart: keep the lowest Ritz vectors, then continue from the residual direction.
    const int kept = std::min(cfg.keep, k - 1);
    std::vector<Vector> next(static_cast<std::size_t>(kept), Vector(dim, 0.0));
    for (int c = 0; c < kept; ++c)
      for (int i = 0; i < k; ++i) detail::axpy(y(i, c), basis[static_cast<std::size_t>(i)], next[static_cast<std::size_t>(c)]);
    basis = std::move(next);
    basis.push_back(w);
    proj.setZero();
    for (int c = 0; c < kept; ++c) proj(c, c) = theta(c);
    locked = kept;
  }
}

inline Eigenpair extremal_eigenpair(const SparseOperator& op, SpectrumEnd end, const SpectralConfig& cfg) {
  if (end == SpectrumEnd::lowest)
    return lanczos_lowest([&op](std::span<const double> x, std::span<double> y) { op.apply(x, y); }, op.dim(), cfg,
                          cfg.seed);
  auto pair = lanczos_lowest(
      [&op](std::span<const double> x, std::span<double> y) {
        op.apply(x, y);
        for (auto& v : y) v = -v;
      },
      op.dim(), cfg, cfg.seed ^ 0xa5a5a5a5ULL);
  pair.value = -pair.value;
  return pair;
}

inline Eigen::MatrixXd to_dense(const SparseOperator& op) {
  const auto n = static_cast<Eigen::Index>(op.dim());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  const auto rp = op.row_ptr();
  const auto col = op.col();
  const auto val = op.values();
  for (std::size_t i = 0; i < op.dim(); ++i)
    for (std::size_t p = rp[i]; p < rp[i + 1]; ++p) d(static_cast<Eigen::Index>(i), col[p]) = val[p];
  return d;
}

inline constexpr std::size_t kMaxDenseDim = 4096;

/// Full ascending spectrum by dense diagonalization.
inline std::vector<double> dense_spectrum(const SparseOperator& op, std::size_t max_dim = kMaxDenseDim) {
  if (op.dim() > max_dim)
    throw CapacityError("dense spectrum limited to dimension " + std::to_string(max_dim));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_dense(op), Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

struct SpectralResiduals {
  double ground = 0.0;
  double excited = 0.0;
  int matvecs = 0;
  double penalty = 0.0;  // 0 for dense solves
};

struct SpectralPoint {
  double e0 = 0.0;
  double e1 = 0.0;
  double gap = 0.0;
  Vector ground_vector;
  Vector excited_vector;  // empty when not retained
  SpectralResiduals residuals;
};

/// |<a|b>|^2, clamped to [0, 1].
template <class T>
double fidelity(std::span<const T> a, std::span<const T> b) {
  if (a.size() != b.size()) throw ConfigError("fidelity: dimension mismatch");
  T s{};
  for (std::size_t i = 0; i < a.size(); ++i) {
    if constexpr (std::is_same_v<T, double>)
      s += a[i] * b[i];
    else
      s += std::conj(a[i]) * b[i];
  }
  return std::min(1.0, std::norm(s));
}

inline double fidelity(const Vector& a, const Vector& b) { return fidelity<double>(a, b); }

namespace detail {

inline void fix_sign(Vector& v) {
  // Gauge: the largest-magnitude component (first one on ties) is positive.
  std::size_t arg = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[arg]) * (1.0 + 1e-9)) arg = i;
  if (v[arg] < 0) scale(-1.0, v);
}

}  // namespace detail

inline SpectralPoint ground_and_first_excited(const SparseOperator& op, const SpectralConfig& cfg) {
  cfg.validate();
  const std::size_t dim = op.dim();
  if (dim < 2) throw ConfigError("ground_and_first_excited needs dimension >= 2");
  SpectralPoint pt;

  if (dim <= cfg.dense_threshold) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_dense(op));
    pt.e0 = es.eigenvalues()(0);
    pt.e1 = es.eigenvalues()(1);
    const auto v0 = es.eigenvectors().col(0);
    const auto v1 = es.eigenvectors().col(1);
    pt.ground_vector.assign(v0.data(), v0.data() + v0.size());
    pt.excited_vector.assign(v1.data(), v1.data() + v1.size());
  } else {
    auto ground = extremal_eigenpair(op, SpectrumEnd::lowest, cfg);
    pt.e0 = ground.value;
    pt.ground_vector = std::move(ground.vector);
    pt.residuals.ground = ground.residual;
    pt.residuals.matvecs = ground.matvecs;

    const Vector& psi = pt.ground_vector;
    double penalty = cfg.penalty(pt.e0);
    for (int attempt = 0;; ++attempt) {
      auto shifted = [&op, &psi, penalty](std::span<const double> x, std::span<double> y) {
        op.apply(x, y);
        detail::axpy(penalty * detail::dot(psi, x), psi, y);
      };
      auto excited = lanczos_lowest(shifted, dim, cfg, cfg.seed + 1);
      pt.residuals.matvecs += excited.matvecs;
      // A penalty smaller than the gap leaves the shifted ground state lowest; raise it and retry.
      if (fidelity(psi, excited.vector) > 0.5 && attempt < 6) {
        penalty *= 4.0;
        continue;
      }
      pt.e1 = excited.value;
      pt.excited_vector = std::move(excited.vector);
      pt.residuals.excited = excited.residual;
      pt.residuals.penalty = penalty;
      break;
    }
  }
  pt.gap = pt.e1 - pt.e0;
  if (pt.gap < cfg.degeneracy_tol) throw DegenerateGroundState("ground state is degenerate", pt.gap);
  detail::fix_sign(pt.ground_vector);
  if (!pt.excited_vector.empty()) detail::fix_sign(pt.excited_vector);
  return pt;
}

struct SpectrumBounds {
  double e_min = 0.0;
  double e_max = 0.0;
};

inline SpectrumBounds spectrum_bounds(const SparseOperator& op, const SpectralConfig& cfg) {
  if (op.dim() <= cfg.dense_threshold) {
    const auto ev = dense_spectrum(op);
    return {ev.front(), ev.back()};
  }
  return {extremal_eigenpair(op, SpectrumEnd::lowest, cfg).value,
          extremal_eigenpair(op, SpectrumEnd::highest, cfg).value};
}

/// Affine map E -> scale * E + offset sending [e_min, e_max] onto [margin, 2 pi - margin].
struct WindowMap {
  double scale = 1.0;
  double offset = 0.0;
  double margin = 0.0;

  double operator()(double e) const { return scale * e + offset; }
};

inline constexpr double kDefaultWindowMargin = 0.1;

inline WindowMap window_map(const SpectrumBounds& b, double margin = kDefaultWindowMargin) {
  if (!(margin >= 0.0 && margin < std::numbers::pi)) throw ConfigError("window margin must lie in [0, pi)");
  if (!(b.e_max > b.e_min)) throw DomainError("window normalization of a scalar operator");
  const double scale = (2.0 * std::numbers::pi - 2.0 * margin) / (b.e_max - b.e_min);
  return {scale, margin - scale * b.e_min, margin};
}

struct NormalizedOperator {
  SparseOperator op;
  WindowMap map;
};

inline NormalizedOperator normalize_to_window(const SparseOperator& op, const SpectrumBounds& b,
                                              double margin = kDefaultWindowMargin) {
  const WindowMap map = window_map(b, margin);
  return {op.affine(map.scale, map.offset), map};
}

}  // namespace zenoprep
