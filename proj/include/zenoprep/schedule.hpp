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

// Interpolation points H(s), the schedule {H_j} with consecutive ground-state
// fidelities, and the midpoint-refinement optimizer that minimizes a cost
// model over schedules.

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "zenoprep/error.hpp"
#include "zenoprep/model.hpp"
#include "zenoprep/spectral.hpp"

namespace zenoprep {

struct Instance {
  LatticeSpec lattice;
  HubbardParams params;  // params.s is ignored; each point sets its own s
  SectorSpec sector;

  std::string key() const {
    std::ostringstream os;
    os.precision(17);
    os << "lattice=" << lattice.shape() << ";t=" << params.t_hop << ";u=" << params.u << ";sector=" << sector.n_up
       << "," << sector.n_down << "," << sector.n_sites;
    return os.str();
  }

  friend bool operator==(const Instance&, const Instance&) = default;
};

/// Lattice with the default coupling and doping unless overridden.
inline Instance make_instance(int m, int k, std::optional<double> u = std::nullopt, double doping = 0.10,
                              double t_hop = 1.0) {
  Instance inst;
  inst.lattice = build_lattice(m, k);
  inst.params = HubbardParams{t_hop, u.value_or(default_coupling(inst.lattice)), 1.0};
  validate(inst.params);
  inst.sector = doped_sector(inst.lattice, doping);
  return inst;
}

struct SchedulePoint {
  double s = 0.0;
  SpectralPoint spectral;
  SpectrumBounds bounds;
  WindowMap window;
  double normalized_gap = 0.0;  // gap of the window-normalized Hamiltonian

  double gap() const { return spectral.gap; }
};

using PointPtr = std::shared_ptr<const SchedulePoint>;

/// Persistence hook for evaluated points (the CLI provides a disk cache).
class PointStore {
 public:
  virtual ~PointStore() = default;
  virtual PointPtr load(const std::string& key) = 0;
  virtual void store(const std::string& key, const SchedulePoint& point) = 0;
};

struct EvalConfig {
  SpectralConfig spectral;
  double window_margin = kDefaultWindowMargin;
  std::size_t max_dim = kDefaultMaxSectorDim;
  std::size_t keep_excited_below = std::size_t{1} << 16;  // drop excited vectors of larger sectors

  std::string fingerprint() const {
    std::ostringstream os;
    os.precision(17);
    os << spectral.fingerprint() << ";margin=" << window_margin;
    return os.str();
  }
};

inline std::string hex_double(double v) {
  std::ostringstream os;
  os << std::hexfloat << v;
  return os.str();
}

/// Evaluates and caches points of one instance. Safe to call from several
/// threads; concurrent requests for the same s share a single computation.
class PointEvaluator {
 public:
  PointEvaluator(Instance instance, EvalConfig cfg, std::shared_ptr<PointStore> store = nullptr)
      : instance_(std::move(instance)), cfg_(std::move(cfg)), store_(std::move(store)) {
    cfg_.spectral.validate();
  }

  const Instance& instance() const { return instance_; }
  const EvalConfig& config() const { return cfg_; }

  std::string point_key(double s) const {
    return instance_.key() + ";s=" + hex_double(s) + ";" + cfg_.fingerprint();
  }

  PointPtr evaluate(double s) {
    if (!(s >= 0.0 && s <= 1.0)) throw ConfigError("interpolation parameter s must lie in [0, 1]");
    std::optional<std::promise<PointPtr>> mine;
    std::shared_future<PointPtr> future;
    {
      std::lock_guard lock(mutex_);
      if (auto it = cache_.find(s); it != cache_.end()) {
        future = it->second;
      } else {
        mine.emplace();
        future = mine->get_future().share();
        cache_.emplace(s, future);
      }
    }
    if (!mine) return future.get();  // blocks while another thread computes it
    try {
      PointPtr p = compute(s);
      mine->set_value(p);
      return p;
    } catch (...) {
      mine->set_exception(std::current_exception());
      std::lock_guard lock(mutex_);
      cache_.erase(s);
      throw;
    }
  }

  /// Number of eigensolves actually performed (cache and store hits excluded).
  std::size_t eigensolves() const {
    std::lock_guard lock(mutex_);
    return solves_;
  }

  /// Every successfully evaluated point, ascending in s.
  std::vector<PointPtr> cached_points() const {
    std::lock_guard lock(mutex_);
    std::vector<PointPtr> out;
    for (const auto& [s, f] : cache_) {
      if (f.wait_for(std::chrono::seconds(0)) != std::future_status::ready) continue;
      try {
        out.push_back(f.get());
      } catch (const std::exception&) {
        // failed evaluations are removed by their owner
      }
    }
    return out;
  }

 private:
  PointPtr compute(double s) {
    const std::string key = point_key(s);
    if (store_) {
      if (auto hit = store_->load(key)) return hit;
    }
    HubbardParams params = instance_.params;
    params.s = s;
    const SparseOperator op = build_hamiltonian(instance_.lattice, params, instance_.sector, cfg_.max_dim);
    auto pt = std::make_shared<SchedulePoint>();
    pt->s = s;
    pt->spectral = ground_and_first_excited(op, cfg_.spectral);
    double e_max = 0.0;
    if (op.dim() <= cfg_.spectral.dense_threshold)
      e_max = dense_spectrum(op).back();
    else
      e_max = extremal_eigenpair(op, SpectrumEnd::highest, cfg_.spectral).value;
    pt->bounds = {pt->spectral.e0, e_max};
    pt->window = window_map(pt->bounds, cfg_.window_margin);
    pt->normalized_gap = pt->window.scale * pt->spectral.gap;
    if (op.dim() >= cfg_.keep_excited_below) pt->spectral.excited_vector.clear();
    {
      std::lock_guard lock(mutex_);
      ++solves_;
    }
    if (store_) store_->store(key, *pt);
    return pt;
  }

  Instance instance_;
  EvalConfig cfg_;
  std::shared_ptr<PointStore> store_;
  mutable std::mutex mutex_;
  std::map<double, std::shared_future<PointPtr>> cache_;
  std::size_t solves_ = 0;
};

struct ScheduleData {
  Instance instance;
  std::vector<PointPtr> points;   // s ascending, s_0 = 0, s_L = 1
  std::vector<double> fidelities;  // F_j between points j-1 and j, j = 1..L

  std::size_t steps() const { return fidelities.size(); }
  double s(std::size_t j) const { return points[j]->s; }

  std::vector<double> s_values() const {
    std::vector<double> out;
    for (const auto& p : points) out.push_back(p->s);
    return out;
  }
  std::vector<double> gaps() const {
    std::vector<double> out;
    for (const auto& p : points) out.push_back(p->spectral.gap);
    return out;
  }
  std::vector<double> normalized_gaps() const {
    std::vector<double> out;
    for (const auto& p : points) out.push_back(p->normalized_gap);
    return out;
  }
  double min_fidelity() const { return *std::min_element(fidelities.begin(), fidelities.end()); }
};

namespace detail {

template <class Fn>
auto with_context(const std::string& context, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const DegenerateGroundState& e) {
    throw DegenerateGroundState(context + ": " + e.message(), e.gap());
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(context + ": " + e.message(), e.best_residual());
  } catch (const CapacityError& e) {
    throw CapacityError(context + ": " + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(context + ": " + e.what());
  }
}

inline double point_fidelity(const PointPtr& a, const PointPtr& b) {
  if (a->s == b->s) return 1.0;
  return fidelity(a->spectral.ground_vector, b->spectral.ground_vector);
}

}  // namespace detail

/// Evaluate every point of a sorted s grid (0 first, 1 last). Equal
/// consecutive values are allowed and give F = 1.
inline ScheduleData evaluate_schedule(PointEvaluator& eval, std::vector<double> s_list, int workers = 1) {
  if (s_list.size() < 2) throw ConfigError("schedule needs at least two points");
  for (auto& s : s_list) s = std::clamp(s, 0.0, 1.0);
  if (!std::is_sorted(s_list.begin(), s_list.end())) throw ConfigError("schedule s values must be sorted");
  if (s_list.front() != 0.0 || s_list.back() != 1.0) throw ConfigError("schedule must start at s=0 and end at s=1");

  ScheduleData data;
  data.instance = eval.instance();
  data.points.resize(s_list.size());
  auto one = [&eval](double s) {
    return detail::with_context("evaluating s=" + hex_double(s) + " (" + std::to_string(s) + ")",
                                [&] { return eval.evaluate(s); });
  };
  if (workers <= 1) {
    for (std::size_t i = 0; i < s_list.size(); ++i) data.points[i] = one(s_list[i]);
  } else {
    std::vector<std::future<PointPtr>> jobs;
    for (std::size_t begin = 0; begin < s_list.size(); begin += static_cast<std::size_t>(workers)) {
      jobs.clear();
      const std::size_t end = std::min(s_list.size(), begin + static_cast<std::size_t>(workers));
      for (std::size_t i = begin; i < end; ++i) jobs.push_back(std::async(std::launch::async, one, s_list[i]));
      for (std::size_t i = begin; i < end; ++i) data.points[i] = jobs[i - begin].get();
    }
  }
  for (std::size_t j = 1; j < data.points.size(); ++j)
    data.fidelities.push_back(detail::point_fidelity(data.points[j - 1], data.points[j]));
  return data;
}

struct OptimizerPolicy {
  int patience = 5;
  std::size_t max_points = 512;
  double min_step = 1e-6;
  double epsilon = 0.01;

  void validate() const {
    if (patience < 1) throw ConfigError("patience must be >= 1");
    if (!(min_step > 0.0)) throw ConfigError("min_step must be positive");
    if (max_points < 2) throw ConfigError("max_points must be >= 2");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must lie in (0, 1)");
  }
};

struct Refinement {
  ScheduleData data;
  std::size_t replaced = 0;  // 1-based index j of the fidelity F_j that was split
  double inserted_s = 0.0;
};

/// Insert the midpoint of the lowest-fidelity step (ties go to the smallest j).
inline Refinement refine(const ScheduleData& data, PointEvaluator& eval, double min_step = 1e-6) {
  if (data.steps() < 1) throw ConfigError("refine needs at least one step");
  const auto it = std::min_element(data.fidelities.begin(), data.fidelities.end());
  const auto k = static_cast<std::size_t>(it - data.fidelities.begin()) + 1;
  const double lo = data.s(k - 1);
  const double hi = data.s(k);
  if (hi - lo < 2.0 * min_step)
    throw StepFloorError("step [" + std::to_string(lo) + ", " + std::to_string(hi) + "] is below the step floor");
  const double mid = 0.5 * (lo + hi);
  auto point = detail::with_context("evaluating s=" + hex_double(mid), [&] { return eval.evaluate(mid); });

  Refinement out{data, k, mid};
  auto& d = out.data;
  d.points.insert(d.points.begin() + static_cast<std::ptrdiff_t>(k), point);
  d.fidelities[k - 1] = detail::point_fidelity(d.points[k - 1], point);
  d.fidelities.insert(d.fidelities.begin() + static_cast<std::ptrdiff_t>(k), detail::point_fidelity(point, d.points[k + 1]));
  return out;
}

using CostFn = std::function<double(const ScheduleData&)>;

struct TraceEntry {
  int iteration = 0;
  double inserted_s = std::numeric_limits<double>::quiet_NaN();  // NaN for the initial schedule
  std::size_t replaced = 0;                                       // 0 for the initial schedule
  double min_fidelity_before = std::numeric_limits<double>::quiet_NaN();
  std::size_t points = 0;
  double cost = 0.0;
  double best_cost = 0.0;
};

enum class StopReason { patience, max_points, step_floor };

inline std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::patience: return "patience";
    case StopReason::max_points: return "max_points";
    case StopReason::step_floor: return "step_floor";
  }
  return "unknown";
}

struct OptimizeResult {
  ScheduleData best;
  double best_cost = 0.0;
  double initial_cost = 0.0;
  std::vector<TraceEntry> trace;
  StopReason stop = StopReason::patience;
};

/// Start from {H(0), H(1)}, refine repeatedly, and return the cheapest schedule
/// seen. Stops after `patience` consecutive refinements without a strict
/// improvement, at max_points, or at the step floor.
inline OptimizeResult optimize(PointEvaluator& eval, const CostFn& cost_fn, const OptimizerPolicy& policy) {
  policy.validate();
  ScheduleData current = evaluate_schedule(eval, {0.0, 1.0});
  OptimizeResult res;
  res.best = current;
  res.best_cost = res.initial_cost = cost_fn(current);
  res.trace.push_back({0, std::numeric_limits<double>::quiet_NaN(), 0, std::numeric_limits<double>::quiet_NaN(),
                       current.points.size(), res.best_cost, res.best_cost});
  int stall = 0;
  for (int iter = 1;; ++iter) {
    if (current.points.size() >= policy.max_points) {
      res.stop = StopReason::max_points;
      break;
    }
    const double fmin = current.min_fidelity();
    Refinement r;
    try {
      r = refine(current, eval, policy.min_step);
    } catch (const StepFloorError&) {
      res.stop = StopReason::step_floor;
      break;
    }
    current = std::move(r.data);
    const double c = cost_fn(current);
    if (c < res.best_cost) {
      res.best_cost = c;
      res.best = current;
      stall = 0;
    } else {
      ++stall;
    }
    res.trace.push_back({iter, r.inserted_s, r.replaced, fmin, current.points.size(), c, res.best_cost});
    if (stall >= policy.patience) {
      res.stop = StopReason::patience;
      break;
    }
  }
  return res;
}

}  // namespace zenoprep
