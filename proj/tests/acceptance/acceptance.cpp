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


// Acceptance suite: one PASS/FAIL line per criterion, followed by the
// individual checks. Criteria listed with --expect-fail are reported as
// failures but do not count against the exit status unless they pass.

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../test_util.hpp"
#include "../walk_oracle.hpp"
#include "CLI11.hpp"
#include "zenoprep.hpp"

namespace zenoprep {
namespace {

// Pinned tolerances and sizes.
constexpr double kSpectrumTol = 1e-9;
constexpr double kExcitedTol = 1e-7;
constexpr int kRandomInstances = 20;
constexpr std::uint64_t kInstanceSeed = 4242;
constexpr double kSigmas = 3.0;
constexpr std::uint64_t kTrials = 1'000'000;
constexpr std::uint64_t kSeed = 20190611;
constexpr double kSeriesApprox = 2.25;
constexpr double kSeriesApproxTol = 0.01;
constexpr double kSeriesTruncationTol = 1e-10;
constexpr double kPlainTts = 13.2877;
constexpr double kPlainTtsTol = 1e-3;
constexpr double kWalkGapAt01 = 0.1786;
constexpr double kWalkGapTol = 1e-3;
constexpr double kCrossoverLo = 0.31;
constexpr double kCrossoverHi = 0.33;
constexpr double kWalkEigenTol = 1e-8;
constexpr double kDepthRelTol = 1e-9;
constexpr double kQubDepthLo = 1e5;
constexpr double kQubDepthHi = 1e9;
constexpr double kExponentLimit = 2.0;
constexpr double kSmallGap = 0.3;
constexpr int kChainMin = 4;
constexpr int kChainMax = 12;
constexpr double kFinalFidelityTol = 1e-10;

struct Check {
  std::string name;
  bool ok = false;
  std::string detail;
};

using Checks = std::vector<Check>;

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool within_sigmas(double value, double expected, double se, double& z) {
  z = se > 0.0 ? (value - expected) / se : (value == expected ? 0.0 : INFINITY);
  return std::abs(z) <= kSigmas;
}

Checks spectral_oracle() {
  Checks out;
  const auto h = testing::two_site_hubbard();
  const auto dense = dense_spectrum(h);
  double err = 0.0;
  for (std::size_t i = 0; i < 4; ++i) err = std::max(err, std::abs(dense[i] - testing::kTwoSiteSpectrum[i]));
  out.push_back({"dense 2x1 spectrum", err <= kSpectrumTol, fmt("max error %.2e", err)});

  // Lanczos reaches every level: the lowest pair of H and the lowest pair of -H.
  const auto cfg = testing::lanczos_config();
  const auto low = ground_and_first_excited(h, cfg);
  const auto high = ground_and_first_excited(h.affine(-1.0, 0.0), cfg);
  const double lanczos[4] = {low.e0, low.e1, -high.e1, -high.e0};
  err = 0.0;
  for (std::size_t i = 0; i < 4; ++i) err = std::max(err, std::abs(lanczos[i] - testing::kTwoSiteSpectrum[i]));
  out.push_back({"Lanczos 2x1 spectrum", err <= kSpectrumTol, fmt("max error %.2e", err)});

  const auto inst = testing::random_instances(kRandomInstances, kInstanceSeed);
  double worst = 0.0;
  std::size_t max_dim = 0;
  for (const auto& r : inst) {
    const auto p = ground_and_first_excited(r.op, cfg);
    worst = std::max(worst, std::abs(p.e1 - r.dense[1]));
    max_dim = std::max(max_dim, r.op.dim());
  }
  out.push_back({"penalty-deflated E1 on random instances", worst <= kExcitedTol,
                 fmt("%d instances up to dim %zu, max |E1 - dense| %.2e", kRandomInstances, max_dim, worst)});
  return out;
}

Checks rewind_model() {
  Checks out;
  const double c = rewind_step_chain(0.5, 1.0, 1.0);
  out.push_back({"chain(0.5, 1, 1) = 3", c == 3.0, fmt("%.17g", c)});

  const double gap = 0.4;
  int bad = 0;
  double worst = 0.0;
  std::ostringstream grid;
  std::uint64_t cell = 0;
  for (double f : {0.3, 0.5, 0.8, 0.95}) {
    for (double ratio : {0.5, 1.0, 2.0}) {
      // One seed per cell keeps the twelve comparisons independent.
      const auto r = simulate_rewind_step(f, gap * ratio, gap, kTrials, kSeed + cell++);
      double z = 0.0;
      if (!within_sigmas(r.mean_cost, rewind_step_chain(f, gap * ratio, gap), r.std_error, z)) ++bad;
      worst = std::max(worst, std::abs(z));
      grid << fmt(" %.2f/%.1f:%+.2f", f, ratio, z);
    }
  }
  out.push_back({"Monte Carlo matches chain on F x gap grid", bad == 0,
                 fmt("1e6 trials each, max |z| %.2f; z by F/ratio:", worst) + grid.str()});

  const double s12 = rewind_step_series(0.5, 1.0, 1.0, 1e-12);
  const double s14 = rewind_step_series(0.5, 1.0, 1.0, 1e-14);
  out.push_back({"series converges under truncation", std::abs(s12 - s14) <= kSeriesTruncationTol,
                 fmt("tol 1e-12: %.15f, tol 1e-14: %.15f", s12, s14)});
  out.push_back({"series value at (0.5, 1, 1) reported beside chain", std::abs(s14 - kSeriesApprox) <= kSeriesApproxTol,
                 fmt("series %.6f vs chain %.6f, discrepancy %.6f (flagged)", s14, c, c - s14)});
  return out;
}

Checks plain_tts() {
  Checks out;
  const std::vector<double> f{0.5}, g{0.5};
  const auto r = tts_plain(f, g, 0.01);
  out.push_back({"tts_plain(L=1, F=0.5, gap=0.5, eps=0.01)", std::abs(r.tts - kPlainTts) <= kPlainTtsTol,
                 fmt("%.10f (R = %.10f)", r.tts, r.repetitions)});

  WalkProfile prof{{0.9, 0.6, 0.8}, {0.5, 0.5, 0.3, 0.7}, Protocol::restart};
  const auto mc = simulate_sequence(prof, kTrials, kSeed);
  const double p = 0.9 * 0.6 * 0.8;
  double z = 0.0;
  const bool ok = within_sigmas(mc.success_frequency, p, mc.success_std_error, z);
  out.push_back({"restart success frequency matches prod F", ok,
                 fmt("%.6f vs %.6f over %llu passes, z %+.2f", mc.success_frequency, p,
                     static_cast<unsigned long long>(mc.attempts), z)});
  return out;
}

Checks qubitization() {
  Checks out;
  const double w = qubitized_gap(0.1, 2.0 * std::numbers::pi);
  out.push_back({"qubitized_gap(0.1, 2 pi)", std::abs(w - kWalkGapAt01) <= kWalkGapTol, fmt("%.10f", w)});
  const double x = qubitized_crossover();
  out.push_back({"crossover gap", x > kCrossoverLo && x < kCrossoverHi, fmt("%.10f", x)});

  const auto lat = build_lattice(2, 1);
  const HubbardParams hp{1.0, 4.0, 1.0};
  const auto ev = dense_spectrum(build_fock_hamiltonian(lat, hp));
  const auto map = window_map({ev.front(), ev.back()}, kDefaultWindowMargin);
  const double n = 2.0 * std::numbers::pi;
  const auto ps = pauli_decompose(lat, hp).affine(-map.scale / n, 1.0 - map.offset / n);
  const WalkOperator walk(ps);
  const auto oracle = testing::dense_walk(ps);

  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(ps.dim()), static_cast<Eigen::Index>(ps.dim()));
  for (const auto& t : ps.terms) g += t.coeff * testing::dense_pauli(t.pauli, ps.n_qubits);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g / walk.one_norm());
  double worst = 0.0;
  int count = 0;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    const double ebar = es.eigenvalues()(k);
    const Eigen::VectorXcd v = es.eigenvectors().col(k);
    const CVector psi(v.data(), v.data() + v.size());
    for (auto br : {WalkBranch::plus, WalkBranch::minus}) {
      const CVector phi = walk_eigenstate(walk, psi, ebar, br);
      const Eigen::VectorXcd e = Eigen::Map<const Eigen::VectorXcd>(phi.data(), static_cast<Eigen::Index>(phi.size()));
      worst = std::max(worst, (oracle.W * e - std::polar(1.0, walk_phase(ebar, br)) * e).norm());
      ++count;
    }
  }
  out.push_back({"walk eigenstates of 2x1 Hubbard against assembled W", worst < kWalkEigenTol,
                 fmt("%d eigenstates, max ||W phi - e^{i theta} phi|| %.2e", count, worst)});
  return out;
}

/// Replays the refinement sequence of a trace and checks that each insertion
/// is the midpoint of the lowest-fidelity step of the schedule before it.
bool trace_follows_argmin(const std::vector<TraceEntry>& trace, PointEvaluator& eval, std::string& why) {
  std::vector<double> s{0.0, 1.0};
  for (std::size_t i = 1; i < trace.size(); ++i) {
    const auto data = evaluate_schedule(eval, s);
    const auto it = std::min_element(data.fidelities.begin(), data.fidelities.end());
    const auto j = static_cast<std::size_t>(it - data.fidelities.begin()) + 1;
    const double mid = 0.5 * (s[j - 1] + s[j]);
    if (trace[i].replaced != j || trace[i].inserted_s != mid) {
      why = fmt("entry %zu split step %zu at s=%.6f, argmin is step %zu at s=%.6f", i, trace[i].replaced,
                trace[i].inserted_s, j, mid);
      return false;
    }
    s.insert(s.begin() + static_cast<std::ptrdiff_t>(j), mid);
  }
  return true;
}

Checks optimizer() {
  Checks out;
  for (int m : {4, 6}) {
    RunConfig cfg;
    cfg.m = m;
    cfg.k = 1;
    cfg.use_cache = false;
    cfg.cost_models = {CostModel::plain, CostModel::rewind, CostModel::qubitized_gapmap, CostModel::qubitized_exact};
    Pipeline pl(cfg, nullptr);
    for (auto model : cfg.cost_models) {
      const auto res = pl.optimize_model(model);
      std::string why;
      const bool argmin = trace_follows_argmin(res.trace, pl.evaluator(), why);
      const std::string name = fmt("%dx1 %s", m, to_string(model).c_str());
      out.push_back({name + " optimized <= initial", res.best_cost <= res.initial_cost,
                     fmt("best %.6f, initial %.6f, %zu points, stop %s", res.best_cost, res.initial_cost,
                         res.best.points.size(), to_string(res.stop).c_str())});
      out.push_back({name + " insertions at argmin F", argmin,
                     argmin ? fmt("%zu insertions replayed", res.trace.size() - 1) : why});
    }
  }
  return out;
}

Checks tdepth() {
  Checks out;
  struct Anchor {
    double t, expected;
  };
  for (const auto& a : {Anchor{100.0, 1e7}, Anchor{1e5, 1e12}, Anchor{1e7, 1e14}}) {
    const auto d = tdepth_product_formula(a.t, 100);
    const bool ok = std::abs(d.t_depth - a.expected) <= kDepthRelTol * a.expected;
    out.push_back({fmt("product formula t=%g, N=100 -> %g", a.t, a.expected), ok, fmt("computed %.6g", d.t_depth)});
  }
  for (double ops : {1e4, 1e5, 1e6}) {
    const auto d = tdepth_qubitized(ops, 100, 0.01);
    out.push_back({fmt("qubitized depth walk_ops=%g, N=100, gap=0.01 in [1e5, 1e9)", ops),
                   d.t_depth >= kQubDepthLo && d.t_depth < kQubDepthHi,
                   fmt("computed %.6g (per walk %.4f)", d.t_depth, d.per_op_depth)});
  }
  return out;
}

Checks trend() {
  Checks out;
  std::vector<Report> reports;
  for (int m = kChainMin; m <= kChainMax; ++m) {
    RunConfig cfg;
    cfg.m = m;
    cfg.k = 1;
    cfg.use_cache = false;
    cfg.cost_models = {CostModel::plain, CostModel::rewind, CostModel::qubitized_gapmap};
    const auto t0 = std::chrono::steady_clock::now();
    reports.push_back(run_pipeline(cfg, nullptr));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cerr << "  [trend] " << m << "x1 done in " << fmt("%.1f", secs) << " s\n";
  }
  for (auto model : {CostModel::plain, CostModel::rewind, CostModel::qubitized_gapmap}) {
    std::vector<ScalingPoint> pts;
    for (const auto& r : reports) pts.push_back({r.delta_min, r.find(model)->cost.tts});
    const auto f = scaling_fit(pts);
    out.push_back({"scaling exponent " + to_string(model) + " < 2", f.exponent < kExponentLimit,
                   fmt("a = %.4f, residual %.4f over %zu chains", f.exponent, f.residual, f.points)});
  }
  int compared = 0, wins = 0;
  std::ostringstream rows;
  for (const auto& r : reports) {
    double max_ngap = 0.0;
    for (auto model : {CostModel::rewind, CostModel::qubitized_gapmap})
      for (const auto& row : r.find(model)->schedule) max_ngap = std::max(max_ngap, row.normalized_gap);
    const double q = r.find(CostModel::qubitized_gapmap)->cost.tts;
    const double rw = *r.rewind_normalized_tts;
    rows << fmt(" %s(max ngap %.3f: %.3f vs %.3f)", r.instance.shape.c_str(), max_ngap, q, rw);
    if (max_ngap >= kSmallGap) continue;
    ++compared;
    wins += q < rw ? 1 : 0;
  }
  out.push_back({"qubitized < rewind when all normalized gaps < 0.3", compared > 0 && wins == compared,
                 fmt("%d/%d small-gap chains; qubitized vs rewind (normalized units):", wins, compared) + rows.str()});
  return out;
}

Checks exact_projective() {
  Checks out;
  RunConfig cfg;
  cfg.m = 3;
  cfg.k = 1;
  cfg.use_cache = false;
  cfg.cost_models = {CostModel::rewind};
  Pipeline pl(cfg, nullptr);
  const auto best = pl.optimize_model(CostModel::rewind).best;
  ExactSimOptions opt;
  opt.protocol = Protocol::rewind;
  opt.trials = kTrials;
  opt.seed = kSeed;
  const auto res = simulate_exact_projective(best, opt);
  double z = 0.0;
  const bool ok = within_sigmas(res.step_frequency[0], best.fidelities[0], res.step_std_error[0], z);
  out.push_back({"3x1 first-step success frequency", ok,
                 fmt("%.6f vs F1 = %.6f, z %+.2f, leakage %.1e", res.step_frequency[0], best.fidelities[0], z,
                     res.max_leakage)});
  out.push_back({"3x1 final fidelity given success", std::abs(res.min_final_fidelity - 1.0) <= kFinalFidelityTol,
                 fmt("min over successes %.15f", res.min_final_fidelity)});
  return out;
}

struct Criterion {
  int id;
  const char* title;
  std::function<Checks()> run;
};

}  // namespace
}  // namespace zenoprep

int main(int argc, char** argv) {
  using namespace zenoprep;
  CLI::App app{"zenoprep acceptance suite"};
  std::vector<int> only, expect_fail;
  app.add_option("--only", only, "run only these criteria");
  app.add_option("--expect-fail", expect_fail, "criteria known to fail");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria = {
      {1, "spectral oracle", spectral_oracle},   {2, "rewind model", rewind_model},
      {3, "plain TTS", plain_tts},               {4, "qubitization", qubitization},
      {5, "optimizer", optimizer},               {6, "T-depth arithmetic", tdepth},
      {7, "desk-scale trend", trend},            {8, "exact projective simulation", exact_projective},
  };
  const std::set<int> selected(only.begin(), only.end());
  const std::set<int> expected_failures(expect_fail.begin(), expect_fail.end());
  int unexpected = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Checks checks;
    std::string error;
    try {
      checks = c.run();
    } catch (const std::exception& e) {
      error = e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool pass = error.empty() && !checks.empty();
    for (const auto& k : checks) pass = pass && k.ok;
    const bool known = expected_failures.count(c.id) > 0;
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.title << " ("
              << fmt("%.1f", secs) << " s)" << (known ? (pass ? " [listed as expected failure]" : " [expected failure]") : "")
              << '\n';
    for (const auto& k : checks) std::cout << "    " << (k.ok ? "ok  " : "FAIL") << "  " << k.name << ": " << k.detail << '\n';
    if (!error.empty()) std::cout << "    FAIL  error: " << error << '\n';
    std::cout.flush();
    if (pass == known) ++unexpected;
  }
  return unexpected == 0 ? 0 : 1;
}
