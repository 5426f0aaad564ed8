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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "zenoprep/error.hpp"
#include "zenoprep/qubitization.hpp"
#include "zenoprep/rng.hpp"
#include "zenoprep/schedule.hpp"

namespace zenoprep {

enum class Protocol { restart, rewind };

inline std::string to_string(Protocol p) { return p == Protocol::restart ? "restart" : "rewind"; }

inline Protocol protocol_from_string(const std::string& s) {
  if (s == "restart") return Protocol::restart;
  if (s == "rewind") return Protocol::rewind;
  throw ConfigError("unknown protocol '" + s + "'");
}

struct WalkProfile {
  std::vector<double> fidelities;  // F_1..F_L
  std::vector<double> gaps;        // gap_0..gap_L
  Protocol protocol = Protocol::rewind;

  std::size_t steps() const { return fidelities.size(); }

  void validate() const {
    if (fidelities.empty()) throw ConfigError("walk profile needs at least one step");
    if (gaps.size() != fidelities.size() + 1) throw ConfigError("walk profile needs L + 1 gaps");
    for (double f : fidelities)
      if (!(f > 0.0 && f <= 1.0)) throw DomainError("walk profile fidelities must lie in (0, 1]");
    for (double g : gaps)
      if (!(g > 0.0 && std::isfinite(g))) throw DomainError("walk profile gaps must be positive");
  }
};

struct McResult {
  double mean_cost = 0.0;
  double std_error = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  double min = 0.0;
  double max = 0.0;
  // Attempts are full passes (restart) or Q_j measurements from the previous
  // ground state (rewind step); successes are those that reached the target.
  std::uint64_t attempts = 0;
  std::uint64_t successes = 0;
  double success_frequency = 0.0;
  double success_std_error = 0.0;

  bool operator==(const McResult&) const = default;
};

namespace detail {

inline constexpr std::uint64_t kTrialChunk = 4096;

/// Running moments, merged in a fixed order so the result does not depend on
/// the number of workers.
struct CostStats {
  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;
  double min = std::numeric_limits<double>::infinity();
  double max = -std::numeric_limits<double>::infinity();
  std::uint64_t attempts = 0;
  std::uint64_t successes = 0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
    min = std::min(min, x);
    max = std::max(max, x);
  }

  void merge(const CostStats& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const double na = static_cast<double>(n), nb = static_cast<double>(o.n);
    const double d = o.mean - mean;
    mean += d * nb / (na + nb);
    m2 += o.m2 + d * d * na * nb / (na + nb);
    n += o.n;
    min = std::min(min, o.min);
    max = std::max(max, o.max);
    attempts += o.attempts;
    successes += o.successes;
  }

  McResult result(std::uint64_t seed) const {
    McResult r;
    r.trials = n;
    r.seed = seed;
    r.mean_cost = mean;
    r.std_error = n > 1 ? std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
    r.min = min;
    r.max = max;
    r.attempts = attempts;
    r.successes = successes;
    if (attempts > 0) {
      const double p = static_cast<double>(successes) / static_cast<double>(attempts);
      r.success_frequency = p;
      r.success_std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(attempts));
    }
    return r;
  }
};

/// Runs `trial(rng, acc)` for every trial index with its own substream,
/// accumulating per fixed-size chunk and merging chunks in index order.
template <class Acc, class Trial>
Acc run_trials(std::uint64_t trials, std::uint64_t seed, int workers, const Acc& zero, Trial&& trial) {
  const std::uint64_t chunks = (trials + kTrialChunk - 1) / kTrialChunk;
  std::vector<Acc> parts(chunks, zero);
  const auto run_chunk = [&](std::uint64_t c) {
    const std::uint64_t end = std::min(trials, (c + 1) * kTrialChunk);
    for (std::uint64_t t = c * kTrialChunk; t < end; ++t) {
      CounterRng rng(seed, t);
      trial(rng, parts[c]);
    }
  };
  const auto n_threads = static_cast<std::uint64_t>(std::max(1, workers));
  if (n_threads == 1 || chunks <= 1) {
    for (std::uint64_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::vector<std::jthread> pool;
    for (std::uint64_t w = 0; w < std::min(n_threads, chunks); ++w)
      pool.emplace_back([&] {
        for (std::uint64_t c = next++; c < chunks; c = next++) run_chunk(c);
      });
  }
  Acc out = zero;
  for (const auto& p : parts) out.merge(p);
  return out;
}

inline void check_trials(std::uint64_t trials) {
  if (trials == 0) throw ConfigError("need at least one trial");
}

/// One rewind walk starting from the previous ground state; returns its cost.
inline double rewind_walk(CounterRng& rng, double f, double inv_prev, double inv, bool& first_success) {
  double cost = inv;
  first_success = rng.uniform() < f;
  if (first_success) return cost;
  // At the excited state of step j. Measuring Q_{j-1} finds its ground state
  // with probability 1 - F; from there Q_j succeeds with probability F, from
  // the excited state with probability 1 - F.
  for (;;) {
    cost += inv_prev;
    const bool at_ground = rng.uniform() >= f;
    cost += inv;
    const double p = at_ground ? f : 1.0 - f;
    if (rng.uniform() < p) return cost;
  }
}

}  // namespace detail

/// Monte Carlo of one rewind step between levels with gaps `gap_prev` and `gap`.
inline McResult simulate_rewind_step(double f, double gap_prev, double gap, std::uint64_t trials, std::uint64_t seed,
                                     int workers = 1) {
  if (!(f > 0.0 && f <= 1.0)) throw DomainError("rewind walk needs 0 < F <= 1");
  if (!(gap > 0.0 && gap_prev > 0.0)) throw DomainError("gaps must be positive");
  detail::check_trials(trials);
  const double inv = 1.0 / gap, inv_prev = 1.0 / gap_prev;
  const auto acc = detail::run_trials(trials, seed, workers, detail::CostStats{}, [&](CounterRng& rng, detail::CostStats& s) {
    bool first = false;
    s.add(detail::rewind_walk(rng, f, inv_prev, inv, first));
    ++s.attempts;
    s.successes += first ? 1 : 0;
  });
  return acc.result(seed);
}

/// Monte Carlo of a full preparation. Restart: every failure returns to the
/// cost-free initial state and starts again at step 1; attempts count passes.
/// Rewind: independent rewind walks per step; attempts count runs whose steps
/// all succeeded at the first measurement.
inline McResult simulate_sequence(const WalkProfile& profile, std::uint64_t trials, std::uint64_t seed,
                                  int workers = 1) {
  profile.validate();
  detail::check_trials(trials);
  std::vector<double> inv;
  for (double g : profile.gaps) inv.push_back(1.0 / g);
  const auto& f = profile.fidelities;
  const std::size_t L = f.size();
  const auto acc = detail::run_trials(trials, seed, workers, detail::CostStats{}, [&](CounterRng& rng, detail::CostStats& s) {
    double cost = 0.0;
    if (profile.protocol == Protocol::restart) {
      for (;;) {
        ++s.attempts;
        std::size_t j = 1;
        for (; j <= L; ++j) {
          cost += inv[j];
          if (!(rng.uniform() < f[j - 1])) break;
        }
        if (j > L) {
          ++s.successes;
          break;
        }
      }
    } else {
      bool clean = true;
      for (std::size_t j = 1; j <= L; ++j) {
        bool first = false;
        cost += detail::rewind_walk(rng, f[j - 1], inv[j - 1], inv[j], first);
        clean = clean && first;
      }
      ++s.attempts;
      s.successes += clean ? 1 : 0;
    }
    s.add(cost);
  });
  return acc.result(seed);
}

/// Mean cost per successful preparation predicted by the two-level model.
inline double expected_cost(const WalkProfile& profile) {
  profile.validate();
  if (profile.protocol == Protocol::rewind) return tts_rewind(profile.fidelities, profile.gaps).tts;
  double pass = 0.0, reach = 1.0;
  for (std::size_t j = 1; j < profile.gaps.size(); ++j) {
    pass += reach / profile.gaps[j];
    reach *= profile.fidelities[j - 1];
  }
  return pass / reach;
}

struct ExactSimOptions {
  Protocol protocol = Protocol::rewind;
  bool qubitized = false;
  std::uint64_t trials = 100'000;
  std::uint64_t seed = 20190611;
  std::size_t max_dim = 1024;  // sector dimension limit
  int workers = 1;
};

struct ExactSimResult {
  Protocol protocol = Protocol::rewind;
  bool qubitized = false;
  McResult cost;
  // Measurements of Q_j made from the state that left step j - 1 successfully.
  std::vector<std::uint64_t> step_attempts;
  std::vector<std::uint64_t> step_successes;
  std::vector<double> step_frequency;
  std::vector<double> step_std_error;
  std::vector<double> expected;     // stored F_j (eigenspace fidelities when qubitized)
  double min_final_fidelity = 1.0;  // over successful runs
  double max_leakage = 0.0;         // weight outside span(Q_{j-1}, Q_j) after any failure
};

namespace detail {

struct Projector {
  std::vector<CVector> basis;  // orthonormal

  double weight(std::span<const Complex> v) const {
    double w = 0.0;
    for (const auto& b : basis) w += std::norm(cdot(b, v));
    return w;
  }

  // Replaces v by its normalized projection (success) or normalized
  // complement (failure); returns whether the outcome was success.
  bool measure(CVector& v, double u) const {
    std::vector<Complex> c;
    double p = 0.0;
    for (const auto& b : basis) {
      c.push_back(cdot(b, v));
      p += std::norm(c.back());
    }
    p = std::clamp(p, 0.0, 1.0);
    const bool success = u < p;
    if (success) {
      std::fill(v.begin(), v.end(), Complex{});
      for (std::size_t k = 0; k < basis.size(); ++k)
        for (std::size_t i = 0; i < v.size(); ++i) v[i] += c[k] * basis[k][i];
    } else {
      for (std::size_t k = 0; k < basis.size(); ++k)
        for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c[k] * basis[k][i];
    }
    const double nrm = cnorm(v);
    for (auto& x : v) x /= nrm;
    return success;
  }
};

/// Orthonormal basis of span(vs) by two-pass Gram-Schmidt.
inline std::vector<CVector> orthonormal_span(std::vector<CVector> vs) {
  std::vector<CVector> out;
  for (auto& v : vs) {
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : out) {
        const Complex c = cdot(q, v);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * q[i];
      }
    }
    const double n = cnorm(v);
    if (n < 1e-10) continue;
    for (auto& x : v) x /= n;
    out.push_back(std::move(v));
  }
  return out;
}

inline Projector joint_span(const Projector& a, const Projector& b) {
  auto all = a.basis;
  all.insert(all.end(), b.basis.begin(), b.basis.end());
  return {orthonormal_span(std::move(all))};
}

/// Coordinates of v in the orthonormal basis q.
inline CVector coordinates(const std::vector<CVector>& q, std::span<const Complex> v) {
  CVector out;
  for (const auto& b : q) out.push_back(cdot(b, v));
  return out;
}

}  // namespace detail

/// Sequential projective measurements with the true ground-state projectors
/// (rank 1 in the sector, or the walk eigenspaces when qubitized),
/// following the restart or rewind policy. Costs are 1/gap per measurement,
/// with walk gaps in the qubitized case.
inline ExactSimResult simulate_exact_projective(const ScheduleData& data, const ExactSimOptions& opt,
                                                ExactQubitizer* exact = nullptr) {
  detail::check_trials(opt.trials);
  if (data.points.size() < 2) throw ConfigError("schedule needs at least two points");
  const std::size_t dim = data.points.front()->spectral.ground_vector.size();
  if (dim == 0 || dim > opt.max_dim)
    throw CapacityError("exact projective simulation limited to sector dimension " + std::to_string(opt.max_dim));
  const std::size_t L = data.steps();

  ExactSimResult res;
  res.protocol = opt.protocol;
  res.qubitized = opt.qubitized;
  std::vector<detail::Projector> proj(L + 1);
  std::vector<double> inv(L + 1);
  CVector init;
  if (opt.qubitized) {
    if (exact == nullptr) throw ConfigError("qubitized simulation needs an ExactQubitizer");
    const auto q = exact->qubitize(data);
    res.expected = q.fidelities;
    for (std::size_t j = 0; j <= L; ++j) {
      const auto wp = exact->point(data.points[j]);
      proj[j].basis = wp->basis;
      inv[j] = 1.0 / q.walk_gaps[j];
    }
    init = exact->ground_walk_state(data.points.front());
  } else {
    res.expected = data.fidelities;
    for (std::size_t j = 0; j <= L; ++j) {
      proj[j].basis = {to_complex(data.points[j]->spectral.ground_vector)};
      inv[j] = 1.0 / data.points[j]->spectral.gap;
    }
    init = proj[0].basis[0];
  }
  // Measurements only project, so the state stays in the span of the initial
  // state and the projector ranges; it is stored exactly in a basis of that span.
  std::vector<CVector> all{init};
  for (const auto& p : proj) all.insert(all.end(), p.basis.begin(), p.basis.end());
  const auto frame = detail::orthonormal_span(std::move(all));
  init = detail::coordinates(frame, init);
  for (auto& p : proj)
    for (auto& b : p.basis) b = detail::coordinates(frame, b);
  std::vector<detail::Projector> spans;
  for (std::size_t j = 1; j <= L; ++j) spans.push_back(detail::joint_span(proj[j - 1], proj[j]));

  struct Acc {
    detail::CostStats cost;
    std::vector<std::uint64_t> attempts, successes;
    double min_fid = 1.0;
    double leak = 0.0;

    void merge(const Acc& o) {
      cost.merge(o.cost);
      for (std::size_t j = 0; j < attempts.size(); ++j) {
        attempts[j] += o.attempts[j];
        successes[j] += o.successes[j];
      }
      min_fid = std::min(min_fid, o.min_fid);
      leak = std::max(leak, o.leak);
    }
  };
  Acc zero;
  zero.attempts.assign(L, 0);
  zero.successes.assign(L, 0);

  const auto acc = detail::run_trials(opt.trials, opt.seed, opt.workers, zero, [&](CounterRng& rng, Acc& a) {
    CVector v = init;
    double cost = 0.0;
    std::size_t j = 1;
    ++a.cost.attempts;
    while (j <= L) {
      // v holds the state that left step j - 1 successfully.
      ++a.attempts[j - 1];
      cost += inv[j];
      if (proj[j].measure(v, rng.uniform())) {
        ++a.successes[j - 1];
        ++j;
        continue;
      }
      a.leak = std::max(a.leak, 1.0 - spans[j - 1].weight(v));
      if (opt.protocol == Protocol::restart) {
        v = init;
        j = 1;
        ++a.cost.attempts;
        continue;
      }
      for (bool done = false; !done;) {
        cost += inv[j - 1];
        proj[j - 1].measure(v, rng.uniform());
        cost += inv[j];
        done = proj[j].measure(v, rng.uniform());
        if (!done) a.leak = std::max(a.leak, 1.0 - spans[j - 1].weight(v));
      }
      ++j;
    }
    ++a.cost.successes;
    a.min_fid = std::min(a.min_fid, proj[L].weight(v));
    a.cost.add(cost);
  });

  res.cost = acc.cost.result(opt.seed);
  res.step_attempts = acc.attempts;
  res.step_successes = acc.successes;
  for (std::size_t j = 0; j < L; ++j) {
    const double n = static_cast<double>(acc.attempts[j]);
    const double p = n > 0 ? static_cast<double>(acc.successes[j]) / n : 0.0;
    res.step_frequency.push_back(p);
    res.step_std_error.push_back(n > 0 ? std::sqrt(p * (1.0 - p) / n) : 0.0);
  }
  res.min_final_fidelity = acc.min_fid;
  res.max_leakage = std::max(0.0, acc.leak);
  return res;
}

}  // namespace zenoprep
