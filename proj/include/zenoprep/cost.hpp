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

// Cost models over a schedule: plain restart TTS, the rewind step cost (the
// printed double series and the absorbing-chain closed form), gains, T-depth
// estimates and power-law scaling fits. Qubitized models live in
// qubitization.hpp.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "zenoprep/error.hpp"
#include "zenoprep/schedule.hpp"

namespace zenoprep {

enum class CostModel { plain, rewind, qubitized_gapmap, qubitized_exact };

inline std::string to_string(CostModel m) {
  switch (m) {
    case CostModel::plain: return "plain";
    case CostModel::rewind: return "rewind";
    case CostModel::qubitized_gapmap: return "qubitized_gapmap";
    case CostModel::qubitized_exact: return "qubitized_exact";
  }
  return "unknown";
}

inline CostModel cost_model_from_string(const std::string& s) {
  if (s == "plain") return CostModel::plain;
  if (s == "rewind") return CostModel::rewind;
  if (s == "qubitized_gapmap") return CostModel::qubitized_gapmap;
  if (s == "qubitized_exact") return CostModel::qubitized_exact;
  throw ConfigError("unknown cost model '" + s + "'");
}

inline constexpr const char* kUnitsHubbardTime = "hubbard_time";
inline constexpr const char* kUnitsNormalizedEvolutions = "normalized_unit_time_evolutions";
inline constexpr const char* kUnitsWalkApplications = "walk_operator_applications";

struct CostReport {
  CostModel model = CostModel::plain;
  double tts = 0.0;          // +inf when the success probability vanishes
  double repetitions = 1.0;  // restarts needed for confidence 1 - epsilon (plain only)
  double success_prob = 1.0; // prod_j F_j
  std::vector<double> per_step;
  double epsilon = 0.01;
  std::string units = kUnitsHubbardTime;
  std::optional<double> series_tts;      // rewind models: the printed double series, for comparison
  std::optional<double> tts_normalized;  // plain/rewind re-evaluated on window-normalized gaps

  bool operator==(const CostReport&) const = default;

  /// per_step sums (times repetitions) to tts.
  double consistency_residual() const {
    const double sum = std::accumulate(per_step.begin(), per_step.end(), 0.0);
    if (!std::isfinite(tts)) return 0.0;
    return std::abs(sum * repetitions - tts) / std::max(1.0, std::abs(tts));
  }
};

namespace detail {

inline void check_profile(std::span<const double> fidelities, std::span<const double> gaps) {
  for (double f : fidelities)
    if (!(f >= 0.0 && f <= 1.0)) throw DomainError("fidelity outside [0, 1]");
  for (double g : gaps)
    if (!(g > 0.0)) throw DomainError("gaps must be positive");
}

}  // namespace detail

/// Restart protocol: p = prod F_j, R = ln(eps) / ln(1 - p), TTS = R * sum_j 1/gap_j.
/// `gaps` holds the gaps of H_1..H_L (one per fidelity).
inline CostReport tts_plain(std::span<const double> fidelities, std::span<const double> gaps, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must lie in (0, 1)");
  if (fidelities.size() != gaps.size() || fidelities.empty()) throw ConfigError("tts_plain: need one gap per step");
  detail::check_profile(fidelities, gaps);
  CostReport r;
  r.model = CostModel::plain;
  r.epsilon = epsilon;
  double p = 1.0;
  for (double f : fidelities) p *= f;
  r.success_prob = p;
  for (double g : gaps) r.per_step.push_back(1.0 / g);
  const double t_total = std::accumulate(r.per_step.begin(), r.per_step.end(), 0.0);
  if (p <= 0.0) {
    r.repetitions = std::numeric_limits<double>::infinity();
    r.tts = std::numeric_limits<double>::infinity();
  } else {
    r.repetitions = p >= 1.0 ? 1.0 : std::log(epsilon) / std::log1p(-p);
    r.tts = r.repetitions * t_total;
  }
  return r;
}

inline CostReport tts_plain(const ScheduleData& data, double epsilon) {
  const auto gaps = data.gaps();
  auto r = tts_plain(data.fidelities, std::span<const double>(gaps).subspan(1), epsilon);
  const auto ngaps = data.normalized_gaps();
  r.tts_normalized = tts_plain(data.fidelities, std::span<const double>(ngaps).subspan(1), epsilon).tts;
  return r;
}

/// Average step cost of the rewind walk, evaluated term by term from the
/// printed double series
///   F/gap + 2 sum_{k1>=1} sum_{k2=0}^{k1} (1-F)^{2 k1} F^{2 k2+1} ((k1+k2+1)/gap + (k1+k2)/gap_prev),
/// truncated once a bound on the remaining k1 tail drops below `tol`.
inline double rewind_step_series(double f, double gap_prev, double gap, double tol = 1e-12) {
  if (!(f > 0.0 && f <= 1.0)) throw DomainError("rewind series diverges unless 0 < F <= 1");
  if (!(gap > 0.0 && gap_prev > 0.0)) throw DomainError("gaps must be positive");
  if (!(tol > 0.0)) throw ConfigError("tol must be positive");
  const double q = (1.0 - f) * (1.0 - f);
  const double f2 = f * f;
  const double inv = 1.0 / gap;
  const double inv_prev = 1.0 / gap_prev;
  double total = f * inv;
  if (q == 0.0) return total;

  const auto bound = [&](double k) { return 2.0 * std::pow(q, k) * (k + 1.0) * (2.0 * k + 1.0) * (inv + inv_prev); };
  double qk = 1.0;
  for (long k1 = 1; k1 < 100'000'000; ++k1) {
    qk *= q;
    double inner = 0.0;
    double fk = f;  // F^{2 k2 + 1}
    for (long k2 = 0; k2 <= k1; ++k2) {
      inner += fk * ((k1 + k2 + 1) * inv + (k1 + k2) * inv_prev);
      fk *= f2;
    }
    total += 2.0 * qk * inner;
    const double k = static_cast<double>(k1) + 1.0;
    const double rho = q * (k + 2.0) * (2.0 * k + 3.0) / ((k + 1.0) * (2.0 * k + 1.0));
    if (rho < 1.0 && bound(k) / (1.0 - rho) < tol) return total;
  }
  throw ConvergenceError("rewind series did not reach the truncation tolerance", tol);
}

/// Expected cost of one rewind step from the absorbing three-state chain:
/// 1/gap + (1/gap_prev + 1/gap) / (2F) for F < 1, exactly 1/gap at F = 1.
inline double rewind_step_chain(double f, double gap_prev, double gap) {
  if (!(f > 0.0 && f <= 1.0)) throw DomainError("rewind chain diverges unless 0 < F <= 1");
  if (!(gap > 0.0 && gap_prev > 0.0)) throw DomainError("gaps must be positive");
  if (f == 1.0) return 1.0 / gap;
  return 1.0 / gap + (1.0 / gap_prev + 1.0 / gap) / (2.0 * f);
}

enum class RewindEvaluator { series, chain };

/// Sum of per-step rewind costs; `gaps` holds gap_0..gap_L (L + 1 values).
inline CostReport tts_rewind(std::span<const double> fidelities, std::span<const double> gaps,
                             RewindEvaluator evaluator = RewindEvaluator::chain, double series_tol = 1e-12) {
  if (gaps.size() != fidelities.size() + 1 || fidelities.empty())
    throw ConfigError("tts_rewind: need L fidelities and L + 1 gaps");
  detail::check_profile(fidelities, gaps);
  CostReport r;
  r.model = CostModel::rewind;
  r.success_prob = 1.0;
  double series = 0.0;
  for (std::size_t j = 1; j < gaps.size(); ++j) {
    const double f = fidelities[j - 1];
    r.success_prob *= f;
    if (f <= 0.0) {
      r.per_step.push_back(std::numeric_limits<double>::infinity());
      series = std::numeric_limits<double>::infinity();
      continue;
    }
    const double chain = rewind_step_chain(f, gaps[j - 1], gaps[j]);
    const double ser = rewind_step_series(f, gaps[j - 1], gaps[j], series_tol);
    series += ser;
    r.per_step.push_back(evaluator == RewindEvaluator::chain ? chain : ser);
  }
  r.tts = std::accumulate(r.per_step.begin(), r.per_step.end(), 0.0);
  r.series_tts = series;
  return r;
}

inline CostReport tts_rewind(const ScheduleData& data, RewindEvaluator evaluator = RewindEvaluator::chain) {
  auto r = tts_rewind(data.fidelities, data.gaps(), evaluator);
  r.tts_normalized = tts_rewind(data.fidelities, data.normalized_gaps(), evaluator).tts;
  return r;
}

/// Eigenphase gap of the walk operator: arccos(1 - gap / normalization).
inline double qubitized_gap(double gap, double normalization = 2.0 * std::numbers::pi) {
  if (!(normalization > 0.0)) throw ConfigError("normalization must be positive");
  if (!(gap >= 0.0 && gap <= 2.0 * normalization)) throw DomainError("qubitized_gap: gap outside [0, 2N]");
  return std::acos(std::clamp(1.0 - gap / normalization, -1.0, 1.0));
}

/// Gap below which the walk gap exceeds the normalized gap, by bisection on (0, N].
inline double qubitized_crossover(double normalization = 2.0 * std::numbers::pi) {
  double lo = 0.0, hi = normalization;
  if (!(qubitized_gap(hi, normalization) < hi)) throw DomainError("no crossover below the normalization");
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (qubitized_gap(mid, normalization) > mid ? lo : hi) = mid;
  }
  return lo;
}

inline double gain(double tts_a, double tts_b) {
  if (!(tts_a > 0.0 && tts_b > 0.0)) throw DomainError("gain needs positive costs");
  return tts_a / tts_b;
}

enum class DepthModel { product_formula, qubitized_walk };

inline std::string to_string(DepthModel m) {
  return m == DepthModel::product_formula ? "product_formula" : "qubitized_walk";
}

struct DepthEstimate {
  DepthModel model = DepthModel::product_formula;
  double t_depth = 0.0;
  double per_op_depth = 0.0;
  double op_count = 0.0;
  double synthesis_accuracy = std::numeric_limits<double>::quiet_NaN();
  bool out_of_model = false;  // system size differs from the anchor size
};

/// Anchor for product-formula circuits: depth `depth_ref` for evolution time
/// `t_ref` on `n_ref` sites.
struct ProductFormulaAnchor {
  double depth_ref = 1e7;
  double t_ref = 100.0;
  int n_ref = 100;
};

/// Depth scales linearly in evolution time from the anchor.
inline DepthEstimate tdepth_product_formula(double t_total, int n_sites, const ProductFormulaAnchor& a = {}) {
  if (!(t_total > 0.0)) throw DomainError("t_total must be positive");
  DepthEstimate d;
  d.model = DepthModel::product_formula;
  d.per_op_depth = a.depth_ref / a.t_ref;
  d.op_count = t_total;
  d.t_depth = d.per_op_depth * d.op_count;
  d.out_of_model = n_sites != a.n_ref;
  return d;
}

struct WalkDepthOptions {
  bool n_is_qubits = true;  // N in 3 log N log(1/eps) counts qubits (2 per site) rather than sites
  double log_base = 2.0;
};

/// Per walk operator: 3 log(N) log(1/eps_s) with eps_s = sqrt(gap_min) / (100 n_sites^2).
inline DepthEstimate tdepth_qubitized(double walk_ops, int n_sites, double gap_min, const WalkDepthOptions& o = {}) {
  if (!(walk_ops > 0.0)) throw DomainError("walk_ops must be positive");
  if (!(gap_min > 0.0)) throw DomainError("gap_min must be positive");
  if (n_sites < 1) throw ConfigError("n_sites must be >= 1");
  const auto lg = [&](double x) { return std::log(x) / std::log(o.log_base); };
  DepthEstimate d;
  d.model = DepthModel::qubitized_walk;
  d.synthesis_accuracy = std::sqrt(gap_min) / (100.0 * n_sites * n_sites);
  const double n = o.n_is_qubits ? 2.0 * n_sites : static_cast<double>(n_sites);
  d.per_op_depth = 3.0 * lg(n) * lg(1.0 / d.synthesis_accuracy);
  d.op_count = walk_ops;
  d.t_depth = d.per_op_depth * d.op_count;
  return d;
}

struct ScalingFit {
  double exponent = 0.0;   // a in log(tts) = a log(1/gap_min) + b
  double intercept = 0.0;  // b (natural logs)
  double residual = 0.0;   // root of the summed squared log residuals
  std::size_t points = 0;
};

struct ScalingPoint {
  double gap_min = 0.0;
  double tts = 0.0;
};

inline ScalingFit scaling_fit(std::span<const ScalingPoint> pts) {
  if (pts.size() < 2) throw ConfigError("scaling_fit needs at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<double> xs, ys;
  for (const auto& p : pts) {
    if (!(p.gap_min > 0.0 && p.tts > 0.0 && std::isfinite(p.tts))) throw DomainError("scaling_fit needs positive points");
    xs.push_back(std::log(1.0 / p.gap_min));
    ys.push_back(std::log(p.tts));
  }
  const double n = static_cast<double>(pts.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / n, my = sy / n;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx <= 1e-300) throw DomainError("scaling_fit is singular: all gaps are equal");
  ScalingFit f;
  f.points = pts.size();
  f.exponent = sxy / sxx;
  f.intercept = my - f.exponent * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (f.exponent * xs[i] + f.intercept);
    rss += r * r;
  }
  f.residual = std::sqrt(rss);
  return f;
}

}  // namespace zenoprep
