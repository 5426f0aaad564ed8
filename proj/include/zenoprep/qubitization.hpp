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

// Qubitized cost models. A Pauli sum H = sum_l c_l P_l is encoded as the walk
// operator W = (2 |B><B| (x) I - I) V on ancilla (x) system, where the ancilla
// is indexed by Pauli terms, B|0> = sum_l sqrt(|c_l| / lambda) |l>, and
// V = sum_l |l><l| (x) sign(c_l) P_l. On span{|B>|psi>, V|B>|psi>} for an
// eigenvector psi of H / lambda with eigenvalue E, W has eigenvalues
// exp(+-i arccos E).

#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "zenoprep/cost.hpp"
#include "zenoprep/error.hpp"
#include "zenoprep/model.hpp"
#include "zenoprep/pauli.hpp"
#include "zenoprep/schedule.hpp"

namespace zenoprep {

using Complex = std::complex<double>;
using CVector = std::vector<Complex>;

namespace detail {

inline Complex cdot(std::span<const Complex> a, std::span<const Complex> b) {
  Complex s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

inline double cnorm(std::span<const Complex> a) { return std::sqrt(std::real(cdot(a, a))); }

}  // namespace detail

class WalkOperator {
 public:
  /// Zero coefficients are allowed and give idle ancilla levels.
  explicit WalkOperator(PauliSum ps) : ps_(std::move(ps)) {
    lambda_ = 0.0;
    for (const auto& t : ps_.terms) lambda_ += std::abs(t.coeff);
    if (!(lambda_ > 0.0)) throw DomainError("walk operator of a zero Hamiltonian");
    for (const auto& t : ps_.terms) {
      beta_.push_back(std::sqrt(std::abs(t.coeff) / lambda_));
      sign_.push_back(t.coeff < 0.0 ? -1.0 : 1.0);
    }
  }

  const PauliSum& pauli_sum() const { return ps_; }
  double one_norm() const { return lambda_; }
  std::span<const double> beta() const { return beta_; }
  std::size_t ancilla_dim() const { return ps_.terms.size(); }
  std::size_t system_dim() const { return ps_.dim(); }
  std::size_t dim() const { return ancilla_dim() * system_dim(); }

  /// |B>|psi>.
  CVector prepare(std::span<const Complex> psi) const {
    check_system(psi.size());
    CVector out(dim());
    for (std::size_t l = 0; l < ancilla_dim(); ++l)
      for (std::size_t b = 0; b < psi.size(); ++b) out[l * psi.size() + b] = beta_[l] * psi[b];
    return out;
  }

  /// V = sum_l |l><l| (x) sign_l P_l.
  void apply_select(std::span<const Complex> in, std::span<Complex> out) const {
    const std::size_t d = system_dim();
    for (std::size_t l = 0; l < ancilla_dim(); ++l) {
      const auto& p = ps_.terms[l].pauli;
      for (std::uint64_t b = 0; b < d; ++b) out[l * d + (b ^ p.x)] = sign_[l] * p.phase_on(b) * in[l * d + b];
    }
  }

  /// out = 2 |B><B| (x) I in - in.
  void apply_reflection(std::span<const Complex> in, std::span<Complex> out) const {
    const std::size_t d = system_dim();
    for (std::size_t b = 0; b < d; ++b) {
      Complex proj{};
      for (std::size_t l = 0; l < ancilla_dim(); ++l) proj += beta_[l] * in[l * d + b];
      for (std::size_t l = 0; l < ancilla_dim(); ++l) out[l * d + b] = 2.0 * beta_[l] * proj - in[l * d + b];
    }
  }

  void apply(std::span<const Complex> in, std::span<Complex> out) const {
    if (in.size() != dim() || out.size() != dim()) throw ConfigError("walk operator: dimension mismatch");
    CVector tmp(dim());
    apply_select(in, tmp);
    apply_reflection(tmp, out);
  }

  /// <psi| H / lambda |psi>, computed as <a|V a> with a = |B>|psi>.
  double normalized_expectation(std::span<const Complex> psi) const {
    const CVector a = prepare(psi);
    CVector va(dim());
    apply_select(a, va);
    return std::real(detail::cdot(a, va));
  }

 private:
  void check_system(std::size_t n) const {
    if (n != system_dim()) throw ConfigError("walk operator: system vector has the wrong dimension");
  }

  PauliSum ps_;
  double lambda_ = 0.0;
  std::vector<double> beta_;
  std::vector<double> sign_;
};

enum class WalkBranch { plus, minus };

/// Eigenphase of the walk eigenstate on the given branch: +-arccos(ebar).
inline double walk_phase(double ebar, WalkBranch branch) {
  return branch == WalkBranch::plus ? std::acos(ebar) : -std::acos(ebar);
}

/// (1/sqrt2) ( [1 -+ i E/sqrt(1-E^2)] sum_l beta_l |l>|psi>  +-  i/sqrt(1-E^2) sum_l beta_l (1 (x) P_l)|l>|psi> ),
/// upper signs for the plus branch (eigenvalue exp(+i arccos E)).
inline CVector walk_eigenstate(const WalkOperator& w, std::span<const Complex> psi, double ebar, WalkBranch branch) {
  if (!(std::abs(ebar) < 1.0)) throw DomainError("walk eigenstate needs |E| < 1");
  const double root = std::sqrt(1.0 - ebar * ebar);
  const double sgn = branch == WalkBranch::plus ? 1.0 : -1.0;
  const Complex ca = Complex(1.0, -sgn * ebar / root) / std::numbers::sqrt2;
  const Complex cb = Complex(0.0, sgn / root) / std::numbers::sqrt2;
  const CVector a = w.prepare(psi);
  CVector out(w.dim());
  w.apply_select(a, out);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = ca * a[i] + cb * out[i];
  return out;
}

inline CVector walk_eigenstate(const PauliSum& ps, std::span<const Complex> psi, double ebar, WalkBranch branch) {
  return walk_eigenstate(WalkOperator(ps), psi, ebar, branch);
}

inline CVector to_complex(std::span<const double> v) { return CVector(v.begin(), v.end()); }

enum class QubitizationMode { gapmap, exact };

inline std::string to_string(QubitizationMode m) { return m == QubitizationMode::gapmap ? "gapmap" : "exact"; }

struct QubitizationSettings {
  QubitizationMode mode = QubitizationMode::gapmap;
  double normalization = 2.0 * std::numbers::pi;  // N in arccos(1 - gap / N)
  double margin = kDefaultWindowMargin;           // must match the evaluator's window margin
  int max_sites = 6;                              // capacity of the exact mode

  void validate() const {
    if (!(normalization > 0.0)) throw ConfigError("qubitization normalization must be positive");
    if (!(margin >= 0.0 && margin < std::numbers::pi)) throw ConfigError("window margin must lie in [0, pi)");
  }
};

struct QubitizedSchedule {
  QubitizationMode mode = QubitizationMode::gapmap;
  double normalization = 2.0 * std::numbers::pi;
  std::vector<double> fidelities;          // L values
  std::vector<double> walk_gaps;           // L + 1 values, eigenphase separation of W_j
  std::vector<double> normalized_gaps;     // L + 1 values, for comparison
  std::vector<std::size_t> disadvantaged;  // points whose walk gap is smaller than the normalized gap
  std::vector<double> one_norms;           // exact mode only
};

/// Per-point data for the exact mode: the walk operator of the reversed
/// normalized Hamiltonian I - H_hat / N (H_hat the window-normalized H(s)),
/// the ground-state eigenspace of W, and the walk gap.
struct ExactWalkPoint {
  double s = 0.0;
  double lambda = 0.0;
  double ebar0 = 0.0;  // ground state, as <a|V a>
  double ebar1 = 0.0;  // first excited state, from the window map
  double walk_gap = 0.0;
  std::shared_ptr<const WalkOperator> walk;
  CVector psi;                 // ground state embedded in the Fock space
  std::vector<CVector> basis;  // |B>|psi> and, unless V fixes it, (V - ebar0) |B>|psi> normalized
};

/// Builds and caches ExactWalkPoint data for one instance. All points share the
/// same ancilla term list (the union of Pauli strings along the path) so that
/// states can be carried from one walk operator to the next.
class ExactQubitizer {
 public:
  static constexpr double kFixedPointTol = 1e-9;

  ExactQubitizer(Instance inst, QubitizationSettings settings) : inst_(std::move(inst)), settings_(settings) {
    settings_.validate();
    if (inst_.lattice.n_sites() > settings_.max_sites)
      throw CapacityError("exact qubitized mode limited to " + std::to_string(settings_.max_sites) + " sites");
    HubbardParams full = inst_.params;
    full.s = 1.0;
    const PauliSum ref = pauli_decompose(inst_.lattice, full, settings_.max_sites);
    terms_.push_back(PauliString{});
    for (const auto& t : ref.terms)
      if (!t.pauli.is_identity()) terms_.push_back(t.pauli);
    basis_ = std::make_unique<SectorBasis>(inst_.sector);
  }

  const Instance& instance() const { return inst_; }
  const QubitizationSettings& settings() const { return settings_; }
  std::span<const PauliString> terms() const { return terms_; }
  const SectorBasis& sector_basis() const { return *basis_; }

  /// Pauli sum of I - H_hat / N aligned to the shared term list.
  PauliSum reversed_pauli_sum(const SchedulePoint& pt) const {
    HubbardParams p = inst_.params;
    p.s = pt.s;
    const PauliSum h = pauli_decompose(inst_.lattice, p, settings_.max_sites);
    const PauliSum g = h.affine(-pt.window.scale / settings_.normalization, 1.0 - pt.window.offset / settings_.normalization);
    std::map<PauliString, double> coeff;
    for (const auto& t : g.terms) coeff[t.pauli] = t.coeff;
    PauliSum out;
    out.n_qubits = g.n_qubits;
    for (const auto& s : terms_) {
      const auto it = coeff.find(s);
      out.terms.push_back({s, it == coeff.end() ? 0.0 : it->second});
      out.one_norm += std::abs(out.terms.back().coeff);
      if (it != coeff.end()) coeff.erase(it);
    }
    if (!coeff.empty()) throw Error("Pauli term outside the shared term list");
    return out;
  }

  std::shared_ptr<const ExactWalkPoint> point(const PointPtr& pt) {
    {
      std::lock_guard lock(mutex_);
      if (auto it = cache_.find(pt->s); it != cache_.end()) return it->second;
    }
    if (std::abs(pt->window.margin - settings_.margin) > 1e-15)
      throw ConfigError("qubitization margin differs from the evaluator's window margin");
    auto out = std::make_shared<ExactWalkPoint>();
    out->s = pt->s;
    out->walk = std::make_shared<const WalkOperator>(reversed_pauli_sum(*pt));
    out->lambda = out->walk->one_norm();
    out->psi = embed_in_fock<Complex>(*basis_, to_complex(pt->spectral.ground_vector));
    CVector a = out->walk->prepare(out->psi);
    CVector vb(out->walk->dim());
    out->walk->apply_select(a, vb);
    out->ebar0 = std::clamp(std::real(detail::cdot(a, vb)), -1.0, 1.0);
    out->ebar1 = (1.0 - pt->window(pt->spectral.e1) / settings_.normalization) / out->lambda;
    if (!(std::abs(out->ebar1) < 1.0)) throw DomainError("normalized eigenvalue outside (-1, 1)");
    for (std::size_t i = 0; i < vb.size(); ++i) vb[i] -= out->ebar0 * a[i];
    const double rest = detail::cnorm(vb);
    out->basis.push_back(std::move(a));
    // When every Pauli term fixes the ground state, |B>|psi> is itself an eigenvector of W.
    if (rest > kFixedPointTol) {
      for (auto& x : vb) x /= rest;
      out->basis.push_back(std::move(vb));
    } else {
      out->ebar0 = out->ebar0 > 0.0 ? 1.0 : -1.0;
    }
    out->walk_gap = std::acos(out->ebar1) - std::acos(out->ebar0);
    if (!(out->walk_gap > 0.0)) throw DegenerateGroundState("walk operator ground eigenphase is not isolated", out->walk_gap);
    std::lock_guard lock(mutex_);
    return cache_.emplace(pt->s, std::move(out)).first->second;
  }

  /// Plus-branch walk eigenstate of the ground state at `pt` (|B>|psi> when
  /// the eigenspace has rank one).
  CVector ground_walk_state(const PointPtr& pt) {
    const auto wp = point(pt);
    if (wp->basis.size() == 1) return wp->basis.front();
    return walk_eigenstate(*wp->walk, wp->psi, wp->ebar0, WalkBranch::plus);
  }

  /// Fidelities are the squared norms of the projections that carry the
  /// plus-branch initial state through the successive ground eigenspaces.
  QubitizedSchedule qubitize(const ScheduleData& data) {
    QubitizedSchedule q;
    q.mode = QubitizationMode::exact;
    q.normalization = settings_.normalization;
    q.normalized_gaps = data.normalized_gaps();
    std::vector<std::shared_ptr<const ExactWalkPoint>> pts;
    for (const auto& p : data.points) pts.push_back(point(p));
    CVector state = ground_walk_state(data.points.front());
    for (std::size_t j = 0; j < pts.size(); ++j) {
      q.walk_gaps.push_back(pts[j]->walk_gap);
      q.one_norms.push_back(pts[j]->lambda);
      if (j == 0) continue;
      std::vector<Complex> c;
      double f = 0.0;
      for (const auto& b : pts[j]->basis) {
        c.push_back(detail::cdot(b, state));
        f += std::norm(c.back());
      }
      f = std::min(1.0, f);
      q.fidelities.push_back(f);
      if (f <= 0.0) throw DomainError("walk eigenspaces are orthogonal; success probability vanishes");
      std::fill(state.begin(), state.end(), Complex{});
      for (std::size_t k = 0; k < c.size(); ++k)
        for (std::size_t i = 0; i < state.size(); ++i) state[i] += c[k] * pts[j]->basis[k][i];
      const double inv = 1.0 / detail::cnorm(state);
      for (auto& x : state) x *= inv;
    }
    for (std::size_t j = 0; j < q.walk_gaps.size(); ++j)
      if (q.walk_gaps[j] < q.normalized_gaps[j]) q.disadvantaged.push_back(j);
    return q;
  }

 private:
  Instance inst_;
  QubitizationSettings settings_;
  std::vector<PauliString> terms_;
  std::unique_ptr<SectorBasis> basis_;
  std::mutex mutex_;
  std::map<double, std::shared_ptr<const ExactWalkPoint>> cache_;
};

/// Replace step costs by walk gaps. gapmap: arccos(1 - normalized_gap / N)
/// with fidelities untouched. exact: walk gaps and eigenspace-projection
/// fidelities from `exact` (required in that mode).
inline QubitizedSchedule qubitize_schedule(const ScheduleData& data, const QubitizationSettings& settings,
                                           ExactQubitizer* exact = nullptr) {
  settings.validate();
  if (settings.mode == QubitizationMode::exact) {
    if (exact == nullptr) throw ConfigError("exact qubitized mode needs an ExactQubitizer");
    return exact->qubitize(data);
  }
  QubitizedSchedule q;
  q.mode = QubitizationMode::gapmap;
  q.normalization = settings.normalization;
  q.fidelities = data.fidelities;
  q.normalized_gaps = data.normalized_gaps();
  for (std::size_t j = 0; j < q.normalized_gaps.size(); ++j) {
    q.walk_gaps.push_back(qubitized_gap(q.normalized_gaps[j], settings.normalization));
    if (q.walk_gaps[j] < q.normalized_gaps[j]) q.disadvantaged.push_back(j);
  }
  return q;
}

/// Rewind protocol on the walk operator; cost counted in walk applications.
inline CostReport tts_qubitized(const QubitizedSchedule& q, RewindEvaluator evaluator = RewindEvaluator::chain) {
  auto r = tts_rewind(q.fidelities, q.walk_gaps, evaluator);
  r.model = q.mode == QubitizationMode::gapmap ? CostModel::qubitized_gapmap : CostModel::qubitized_exact;
  r.units = kUnitsWalkApplications;
  return r;
}

}  // namespace zenoprep
