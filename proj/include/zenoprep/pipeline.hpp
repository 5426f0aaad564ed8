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
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "zenoprep/cache.hpp"
#include "zenoprep/config.hpp"
#include "zenoprep/cost.hpp"
#include "zenoprep/qubitization.hpp"
#include "zenoprep/report.hpp"
#include "zenoprep/schedule.hpp"
#include "zenoprep/walksim.hpp"

namespace zenoprep {

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

inline std::shared_ptr<PointStore> make_store(const RunConfig& cfg) {
  if (!cfg.use_cache) return nullptr;
  return std::make_shared<DiskPointStore>(cfg.resolved_cache_dir());
}

/// Rejects instances that cannot be run before any eigensolve happens.
inline void check_capacity(const RunConfig& cfg, const Instance& inst) {
  const auto dim = sector_dimension(inst.sector);
  if (dim > cfg.max_dim)
    throw CapacityError("sector dimension " + std::to_string(dim) + " exceeds max_dim " + std::to_string(cfg.max_dim));
  if (cfg.has(CostModel::qubitized_exact) && inst.lattice.n_sites() > cfg.qubitization.max_sites)
    throw CapacityError("exact qubitized mode limited to " + std::to_string(cfg.qubitization.max_sites) + " sites");
}

/// Everything the cost models need for one instance, sharing one point cache.
class Pipeline {
 public:
  Pipeline(RunConfig cfg, std::shared_ptr<PointStore> store)
      : cfg_(std::move(cfg)), inst_((cfg_.validate(), cfg_.instance())) {
    check_capacity(cfg_, inst_);
    eval_ = std::make_unique<PointEvaluator>(inst_, cfg_.eval_config(), std::move(store));
    if (cfg_.has(CostModel::qubitized_exact))
      exact_ = std::make_unique<ExactQubitizer>(inst_, cfg_.qubitization_settings(QubitizationMode::exact));
  }

  const RunConfig& config() const { return cfg_; }
  const Instance& instance() const { return inst_; }
  PointEvaluator& evaluator() { return *eval_; }
  ExactQubitizer* exact() { return exact_.get(); }

  QubitizedSchedule qubitized(const ScheduleData& d, CostModel m) {
    const auto mode = m == CostModel::qubitized_exact ? QubitizationMode::exact : QubitizationMode::gapmap;
    return qubitize_schedule(d, cfg_.qubitization_settings(mode), exact_.get());
  }

  CostReport cost(const ScheduleData& d, CostModel m) {
    switch (m) {
      case CostModel::plain: return tts_plain(d, cfg_.epsilon);
      case CostModel::rewind: return tts_rewind(d);
      case CostModel::qubitized_gapmap:
      case CostModel::qubitized_exact: return tts_qubitized(qubitized(d, m));
    }
    throw ConfigError("unknown cost model");
  }

  OptimizeResult optimize_model(CostModel m) {
    return optimize(*eval_, [&](const ScheduleData& d) { return cost(d, m).tts; }, cfg_.optimizer_policy());
  }

  /// Rewind cost in unit-time evolutions of the window-normalized Hamiltonian.
  OptimizeResult optimize_rewind_normalized() {
    return optimize(
        *eval_, [](const ScheduleData& d) { return tts_rewind(d.fidelities, d.normalized_gaps()).tts; },
        cfg_.optimizer_policy());
  }

  ModelRun model_run(CostModel m, const OptimizeResult& opt) {
    ModelRun run;
    run.model = m;
    run.cost = cost(opt.best, m);
    run.initial_cost = opt.initial_cost;
    run.stop = to_string(opt.stop);
    const bool qub = m == CostModel::qubitized_gapmap || m == CostModel::qubitized_exact;
    QubitizedSchedule q;
    if (qub) {
      q = qubitized(opt.best, m);
      run.disadvantaged = q.disadvantaged;
    }
    for (std::size_t j = 0; j < opt.best.points.size(); ++j) {
      const auto& p = *opt.best.points[j];
      ScheduleRow row{p.s, p.spectral.e0, p.spectral.e1, p.spectral.gap, p.normalized_gap, std::nullopt, std::nullopt};
      if (qub) row.walk_gap = q.walk_gaps[j];
      if (j > 0) row.fidelity = qub ? q.fidelities[j - 1] : opt.best.fidelities[j - 1];
      run.schedule.push_back(row);
    }
    for (const auto& t : opt.trace) {
      TraceRow r{t.iteration, std::nullopt, t.replaced, std::nullopt, t.points, t.cost, t.best_cost};
      if (!std::isnan(t.inserted_s)) r.inserted_s = t.inserted_s;
      if (!std::isnan(t.min_fidelity_before)) r.min_fidelity_before = t.min_fidelity_before;
      run.trace.push_back(r);
    }
    return run;
  }

  std::vector<McSummary> monte_carlo(const ModelRun& run, const ScheduleData& best) {
    std::vector<McSummary> out;
    const bool qub = run.model == CostModel::qubitized_gapmap || run.model == CostModel::qubitized_exact;
    WalkProfile prof;
    prof.fidelities = run.fidelities();
    for (const auto& row : run.schedule) prof.gaps.push_back(qub ? *row.walk_gap : row.gap);
    prof.protocol = run.model == CostModel::plain ? Protocol::restart : Protocol::rewind;
    double p = 1.0;
    for (double f : prof.fidelities) p *= f;

    McSummary two;
    two.model = to_string(run.model);
    two.kind = "two_level";
    two.protocol = prof.protocol;
    two.result = simulate_sequence(prof, cfg_.mc.trials, cfg_.mc.seed, cfg_.workers);
    two.expected_cost = expected_cost(prof);
    two.z_cost = z_score(two.result.mean_cost, two.expected_cost, two.result.std_error);
    two.expected_success = p;
    two.z_success = z_score(two.result.success_frequency, p, two.result.success_std_error);
    out.push_back(std::move(two));

    const bool exact_ok = run.model != CostModel::qubitized_gapmap && cfg_.mc.exact &&
                          sector_dimension(inst_.sector) <= cfg_.mc.exact_max_dim;
    if (!exact_ok) return out;
    ExactSimOptions opt;
    opt.protocol = prof.protocol;
    opt.qubitized = run.model == CostModel::qubitized_exact;
    opt.trials = cfg_.mc.trials;
    opt.seed = cfg_.mc.seed;
    opt.max_dim = cfg_.mc.exact_max_dim;
    opt.workers = cfg_.workers;
    const auto res = simulate_exact_projective(best, opt, exact_.get());
    McSummary ex;
    ex.model = to_string(run.model);
    ex.kind = "exact_projective";
    ex.protocol = prof.protocol;
    ex.result = res.cost;
    ex.expected_cost = two_level_expected(res, prof);
    ex.z_cost = z_score(ex.result.mean_cost, ex.expected_cost, ex.result.std_error);
    ex.expected_success = prof.protocol == Protocol::restart ? p : 1.0;
    ex.z_success = z_score(ex.result.success_frequency, p, ex.result.success_std_error);
    ex.step_frequency = res.step_frequency;
    ex.step_std_error = res.step_std_error;
    ex.step_expected = res.expected;
    ex.max_leakage = res.max_leakage;
    ex.min_final_fidelity = res.min_final_fidelity;
    out.push_back(std::move(ex));
    return out;
  }

 private:
  static double z_score(double value, double expected, double se) { return se > 0.0 ? (value - expected) / se : 0.0; }

  static double two_level_expected(const ExactSimResult& res, WalkProfile prof) {
    prof.fidelities = res.expected;
    return expected_cost(prof);
  }

  RunConfig cfg_;
  Instance inst_;
  std::unique_ptr<PointEvaluator> eval_;
  std::unique_ptr<ExactQubitizer> exact_;
};

inline InstanceInfo instance_info(const RunConfig& cfg, const Instance& inst) {
  return {inst.lattice.m,
          inst.lattice.k,
          inst.lattice.shape(),
          inst.lattice.n_sites(),
          inst.params.t_hop,
          inst.params.u,
          cfg.doping,
          inst.sector.n_up,
          inst.sector.n_down,
          sector_dimension(inst.sector)};
}

inline bool is_qubitized(CostModel m) { return m == CostModel::qubitized_gapmap || m == CostModel::qubitized_exact; }

/// Optimize every requested model on one shared point cache, then derive
/// gains, depths and (optionally) Monte Carlo checks.
inline Report run_pipeline(const RunConfig& cfg, std::shared_ptr<PointStore> store) {
  const auto t0 = std::chrono::steady_clock::now();
  Pipeline pl(cfg, std::move(store));
  Report rep;
  rep.instance = instance_info(pl.config(), pl.instance());
  rep.epsilon = cfg.epsilon;

  std::vector<OptimizeResult> opts;
  for (CostModel m : cfg.cost_models) {
    opts.push_back(pl.optimize_model(m));
    rep.models.push_back(pl.model_run(m, opts.back()));
  }
  const bool any_qub = std::any_of(cfg.cost_models.begin(), cfg.cost_models.end(), is_qubitized);
  if (any_qub) rep.rewind_normalized_tts = pl.optimize_rewind_normalized().best_cost;

  rep.delta_min = rep.delta_min_normalized = std::numeric_limits<double>::infinity();
  for (const auto& p : pl.evaluator().cached_points()) {
    rep.delta_min = std::min(rep.delta_min, p->spectral.gap);
    rep.delta_min_normalized = std::min(rep.delta_min_normalized, p->normalized_gap);
  }

  const ModelRun* plain = rep.find(CostModel::plain);
  const ModelRun* rewind = rep.find(CostModel::rewind);
  if (plain && rewind)
    rep.gains.push_back({"plain", "rewind", plain->cost.tts, rewind->cost.tts, gain(plain->cost.tts, rewind->cost.tts),
                         kUnitsHubbardTime});
  for (const auto& run : rep.models) {
    if (!is_qubitized(run.model)) continue;
    rep.gains.push_back({"rewind_normalized", to_string(run.model), *rep.rewind_normalized_tts, run.cost.tts,
                         gain(*rep.rewind_normalized_tts, run.cost.tts),
                         std::string(kUnitsNormalizedEvolutions) + "/" + kUnitsWalkApplications});
  }

  const int n_sites = rep.instance.n_sites;
  if (const ModelRun* src = rewind ? rewind : plain; src && std::isfinite(src->cost.tts)) {
    const auto d = tdepth_product_formula(src->cost.tts, n_sites);
    rep.depths.push_back({to_string(src->model), d.model, d.t_depth, d.per_op_depth, d.op_count, std::nullopt,
                          std::nullopt, d.out_of_model});
  }
  for (const auto& run : rep.models) {
    if (!is_qubitized(run.model) || !std::isfinite(run.cost.tts)) continue;
    const double g = run.gap_min();
    const auto d = tdepth_qubitized(run.cost.tts, n_sites, g);
    rep.depths.push_back({to_string(run.model), d.model, d.t_depth, d.per_op_depth, d.op_count, d.synthesis_accuracy, g,
                          d.out_of_model});
  }

  if (cfg.mc.enabled) {
    for (std::size_t i = 0; i < rep.models.size(); ++i) {
      auto s = pl.monte_carlo(rep.models[i], opts[i].best);
      rep.mc.insert(rep.mc.end(), s.begin(), s.end());
    }
  }

  rep.run.eigensolves = pl.evaluator().eigensolves();
  rep.run.timestamp = utc_timestamp();
  rep.run.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  check_report(rep);
  return rep;
}

inline Report run_pipeline(const RunConfig& cfg) {
  cfg.validate();
  return run_pipeline(cfg, make_store(cfg));
}

/// The pipeline for every lattice in cfg.scan, in order.
inline std::vector<Report> run_scan(const RunConfig& cfg, const std::shared_ptr<PointStore>& store) {
  if (cfg.scan.empty()) throw ConfigError("scan needs a non-empty lattice list");
  std::vector<Report> out;
  for (const auto& [m, k] : cfg.scan) {
    RunConfig c = cfg;
    c.m = m;
    c.k = k;
    c.scan.clear();
    out.push_back(run_pipeline(c, store));
  }
  return out;
}

inline std::string lattice_family(int k) { return k == 1 ? "chain" : k == 2 ? "ladder" : "square"; }

namespace detail {

inline std::string csv_num(std::optional<double> v) {
  if (!v || std::isnan(*v)) return "nan";
  if (std::isinf(*v)) return *v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(17) << *v;
  return os.str();
}

inline std::optional<double> tts_of(const Report& r, CostModel m) {
  if (const auto* run = r.find(m)) return run->cost.tts;
  return std::nullopt;
}

inline const ModelRun* qubitized_run(const Report& r) {
  if (const auto* q = r.find(CostModel::qubitized_gapmap)) return q;
  return r.find(CostModel::qubitized_exact);
}

inline std::optional<double> gain_of(const Report& r, const std::string& model) {
  for (const auto& g : r.gains)
    if (g.model == model) return g.value;
  return std::nullopt;
}

inline std::optional<double> depth_of(const Report& r, DepthModel m) {
  for (const auto& d : r.depths)
    if (d.model == m) return d.t_depth;
  return std::nullopt;
}

}  // namespace detail

/// Summary table: one row per report, then '#' lines with the TTS scaling
/// fit per lattice family and cost model.
inline std::string plot_summary_csv(const std::vector<Report>& reports) {
  if (reports.empty()) throw ConfigError("plot data needs at least one report");
  using detail::csv_num;
  std::ostringstream os;
  os << "n_sites,shape,delta_min,tts_plain,tts_rewind,tts_qubitized,gain_rewind,gain_qubitized,tdepth_pf,tdepth_qub\n";
  for (const auto& r : reports) {
    const auto* q = detail::qubitized_run(r);
    os << r.instance.n_sites << ',' << r.instance.shape << ',' << csv_num(r.delta_min) << ','
       << csv_num(detail::tts_of(r, CostModel::plain)) << ',' << csv_num(detail::tts_of(r, CostModel::rewind)) << ','
       << csv_num(q ? std::optional(q->cost.tts) : std::nullopt) << ',' << csv_num(detail::gain_of(r, "rewind")) << ','
       << csv_num(q ? detail::gain_of(r, to_string(q->model)) : std::nullopt) << ','
       << csv_num(detail::depth_of(r, DepthModel::product_formula)) << ','
       << csv_num(detail::depth_of(r, DepthModel::qubitized_walk)) << '\n';
  }
  std::map<std::string, std::map<std::string, std::vector<ScalingPoint>>> pts;
  for (const auto& r : reports)
    for (const auto& run : r.models)
      if (std::isfinite(run.cost.tts) && r.delta_min > 0.0)
        pts[lattice_family(r.instance.k)][to_string(run.model)].push_back({r.delta_min, run.cost.tts});
  for (const auto& [family, models] : pts) {
    for (const auto& [model, p] : models) {
      if (p.size() < 2) continue;
      os << "# fit family=" << family << " model=" << model;
      try {
        const auto f = scaling_fit(p);
        os << " exponent=" << csv_num(f.exponent) << " intercept=" << csv_num(f.intercept)
           << " residual=" << csv_num(f.residual) << " points=" << f.points << '\n';
      } catch (const Error& e) {
        os << " unavailable (" << e.what() << ")\n";
      }
    }
  }
  return os.str();
}

inline std::string plot_schedule_csv(const ModelRun& run) {
  std::ostringstream os;
  os << "s,F,gap\n";
  for (const auto& row : run.schedule)
    os << detail::csv_num(row.s) << ',' << detail::csv_num(row.fidelity) << ',' << detail::csv_num(row.gap) << '\n';
  return os.str();
}

/// Writes summary.csv and schedule_<shape>_<model>.csv into `dir`; returns the paths.
inline std::vector<std::filesystem::path> emit_plot_data(const std::vector<Report>& reports,
                                                         const std::filesystem::path& dir) {
  const std::string summary = plot_summary_csv(reports);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create plot directory '" + dir.string() + "': " + ec.message());
  std::vector<std::filesystem::path> out;
  auto write = [&](const std::filesystem::path& p, const std::string& text) {
    std::ofstream f(p);
    if (!f) throw ConfigError("cannot write '" + p.string() + "'");
    f << text;
    out.push_back(p);
  };
  write(dir / "summary.csv", summary);
  for (const auto& r : reports)
    for (const auto& run : r.models)
      write(dir / ("schedule_" + r.instance.shape + "_" + to_string(run.model) + ".csv"), plot_schedule_csv(run));
  return out;
}

}  // namespace zenoprep
