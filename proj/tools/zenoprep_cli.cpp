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


#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "zenoprep.hpp"

namespace zp = zenoprep;
using zp::json;

namespace {

enum ExitCode { kOk = 0, kOther = 1, kConfig = 2, kCapacity = 3, kConvergence = 4, kDegenerate = 5 };

/// Flags that mirror config keys; unset flags leave the config untouched.
struct Overrides {
  std::string config_path;
  std::optional<int> m, k, patience, max_iter, krylov_dim, keep, max_sites, workers;
  std::optional<double> u, doping, t_hop, epsilon, min_step, tol, penalty_threshold, penalty_fallback, degeneracy_tol,
      window_margin, normalization;
  std::optional<std::size_t> max_points, dense_threshold, max_dim, exact_max_dim;
  std::optional<std::uint64_t> spectral_seed, mc_trials, mc_seed;
  std::vector<std::string> models;
  bool mc = false, no_exact = false, no_cache = false;
  std::optional<std::string> cache_dir, output;

  void add_to(CLI::App& app) {
    app.add_option("-c,--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    app.add_option("--m", m, "long side of the lattice");
    app.add_option("--k", k, "short side of the lattice");
    app.add_option("--u", u, "on-site coupling (default by lattice family)");
    app.add_option("--doping", doping, "hole doping fraction");
    app.add_option("--t-hop", t_hop, "hopping amplitude");
    app.add_option("--epsilon", epsilon, "restart failure probability");
    app.add_option("--models", models, "cost models: plain rewind qubitized_gapmap qubitized_exact")->delimiter(',');
    app.add_option("--patience", patience, "optimizer patience");
    app.add_option("--max-points", max_points, "optimizer point limit");
    app.add_option("--min-step", min_step, "smallest allowed interval");
    app.add_option("--tol", tol, "eigensolver residual goal");
    app.add_option("--max-iter", max_iter, "eigensolver matvec limit");
    app.add_option("--krylov-dim", krylov_dim, "Lanczos basis size");
    app.add_option("--keep", keep, "Ritz vectors kept at restart");
    app.add_option("--penalty-threshold", penalty_threshold, "penalty rule threshold");
    app.add_option("--penalty-fallback", penalty_fallback, "penalty for small |E0|");
    app.add_option("--dense-threshold", dense_threshold, "dense solve at or below this dimension");
    app.add_option("--degeneracy-tol", degeneracy_tol, "smallest accepted gap");
    app.add_option("--spectral-seed", spectral_seed, "Lanczos start vector seed");
    app.add_option("--window-margin", window_margin, "spectral window margin");
    app.add_option("--max-dim", max_dim, "sector dimension limit");
    app.add_option("--normalization", normalization, "qubitization normalization N");
    app.add_option("--max-sites", max_sites, "exact qubitization site limit");
    app.add_flag("--mc", mc, "run Monte Carlo validation");
    app.add_option("--mc-trials", mc_trials, "Monte Carlo trials");
    app.add_option("--mc-seed", mc_seed, "Monte Carlo seed");
    app.add_flag("--no-exact", no_exact, "skip exact projective simulation");
    app.add_option("--exact-max-dim", exact_max_dim, "sector limit of the exact simulation");
    app.add_option("--workers", workers, "worker threads");
    app.add_option("--cache-dir", cache_dir, "point cache directory");
    app.add_flag("--no-cache", no_cache, "disable the point cache");
    app.add_option("-o,--output", output, "output path");
  }

  zp::RunConfig build() const {
    zp::RunConfig c = config_path.empty() ? zp::RunConfig{} : zp::load_config(config_path);
    auto set = [](auto& dst, const auto& src) {
      if (src) dst = *src;
    };
    set(c.m, m);
    set(c.k, k);
    if (u) c.u = *u;
    set(c.doping, doping);
    set(c.t_hop, t_hop);
    set(c.epsilon, epsilon);
    if (!models.empty()) {
      c.cost_models.clear();
      for (const auto& s : models) c.cost_models.push_back(zp::cost_model_from_string(s));
    }
    set(c.policy.patience, patience);
    set(c.policy.max_points, max_points);
    set(c.policy.min_step, min_step);
    set(c.spectral.tol, tol);
    set(c.spectral.max_iter, max_iter);
    set(c.spectral.krylov_dim, krylov_dim);
    set(c.spectral.keep, keep);
    set(c.spectral.penalty.threshold, penalty_threshold);
    set(c.spectral.penalty.fallback, penalty_fallback);
    set(c.spectral.dense_threshold, dense_threshold);
    set(c.spectral.degeneracy_tol, degeneracy_tol);
    set(c.spectral.seed, spectral_seed);
    set(c.window_margin, window_margin);
    set(c.max_dim, max_dim);
    set(c.qubitization.normalization, normalization);
    set(c.qubitization.max_sites, max_sites);
    if (mc) c.mc.enabled = true;
    set(c.mc.trials, mc_trials);
    set(c.mc.seed, mc_seed);
    if (no_exact) c.mc.exact = false;
    set(c.mc.exact_max_dim, exact_max_dim);
    set(c.workers, workers);
    set(c.cache_dir, cache_dir);
    if (no_cache) c.use_cache = false;
    set(c.output, output);
    c.validate();
    return c;
  }
};

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw zp::ConfigError("cannot write '" + path + "'");
  out << text << '\n';
  std::cerr << "wrote " << path << '\n';
}

std::vector<double> parse_s_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw zp::ConfigError("bad s value '" + item + "'");
    }
  }
  if (out.size() < 2 || out.front() != 0.0 || out.back() != 1.0)
    throw zp::ConfigError("schedule must start at s=0 and end at s=1");
  return out;
}

std::vector<std::pair<int, int>> parse_lattices(const std::vector<std::string>& items) {
  std::vector<std::pair<int, int>> out;
  for (const auto& it : items) {
    int a = 0, b = 0;
    char x = 0, extra = 0;
    if (std::sscanf(it.c_str(), "%d%c%d%c", &a, &x, &b, &extra) != 3 || x != 'x')
      throw zp::ConfigError("lattice '" + it + "' must look like MxK");
    out.emplace_back(a, b);
  }
  return out;
}

json point_json(const zp::SchedulePoint& p, const zp::Instance& inst) {
  return {{"lattice", inst.lattice.shape()},
          {"sector", {inst.sector.n_up, inst.sector.n_down}},
          {"dim", zp::sector_dimension(inst.sector)},
          {"u", inst.params.u},
          {"s", p.s},
          {"e0", p.spectral.e0},
          {"e1", p.spectral.e1},
          {"gap", p.spectral.gap},
          {"e_max", p.bounds.e_max},
          {"normalized_gap", p.normalized_gap},
          {"residual_ground", p.spectral.residuals.ground},
          {"residual_excited", p.spectral.residuals.excited},
          {"matvecs", p.spectral.residuals.matvecs}};
}

int run(int argc, char** argv) {
  CLI::App app{"Measurement-driven adiabatic state preparation: schedules, costs and depths for the Hubbard model"};
  app.set_version_flag("--version", zp::kSoftwareVersion);
  app.require_subcommand(1);
  app.fallthrough();
  Overrides ov;
  ov.add_to(app);

  auto* spectrum = app.add_subcommand("spectrum", "ground and first excited state at one s");
  double s_point = 1.0;
  spectrum->add_option("--s", s_point, "interpolation parameter")->check(CLI::Range(0.0, 1.0));

  auto* schedule = app.add_subcommand("schedule", "optimize the schedule per cost model and write a report");

  auto* cost = app.add_subcommand("cost", "evaluate the cost models on a fixed schedule");
  std::string s_list;
  cost->add_option("--s-list", s_list, "comma-separated s values from 0 to 1")->required();

  auto* simulate = app.add_subcommand("simulate", "optimize, then validate the costs by Monte Carlo");

  auto* tdepth = app.add_subcommand("tdepth", "T-depth estimates");
  std::optional<double> t_total, walk_ops, gap_min;
  int n_sites = 100;
  tdepth->add_option("--t-total", t_total, "total evolution time (product formula)");
  tdepth->add_option("--walk-ops", walk_ops, "walk operator applications (qubitized)");
  tdepth->add_option("--gap-min", gap_min, "minimum gap (qubitized)");
  tdepth->add_option("--n-sites", n_sites, "number of sites");

  auto* scan = app.add_subcommand("scan", "run the pipeline over a list of lattices");
  std::vector<std::string> lattices;
  std::string scan_dir = "zenoprep-scan";
  scan->add_option("--lattices", lattices, "lattices such as 4x1,5x1")->delimiter(',');
  scan->add_option("--report-dir", scan_dir, "directory for the per-lattice reports");

  auto* plot = app.add_subcommand("plot-data", "CSV tables from reports");
  std::vector<std::string> report_files;
  std::string plot_dir = "zenoprep-plot";
  plot->add_option("reports", report_files, "report files")->required()->check(CLI::ExistingFile);
  plot->add_option("--out-dir", plot_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  if (plot->parsed()) {
    std::vector<zp::Report> reports;
    for (const auto& f : report_files) reports.push_back(zp::load_report(f));
    for (const auto& p : zp::emit_plot_data(reports, plot_dir)) std::cerr << "wrote " << p.string() << '\n';
    return kOk;
  }
  if (tdepth->parsed()) {
    json out = json::array();
    if (t_total) {
      const auto d = zp::tdepth_product_formula(*t_total, n_sites);
      out.push_back({{"model", zp::to_string(d.model)}, {"t_depth", d.t_depth}, {"per_op_depth", d.per_op_depth},
                     {"op_count", d.op_count}, {"out_of_model", d.out_of_model}});
    }
    if (walk_ops) {
      if (!gap_min) throw zp::ConfigError("--walk-ops needs --gap-min");
      const auto d = zp::tdepth_qubitized(*walk_ops, n_sites, *gap_min);
      out.push_back({{"model", zp::to_string(d.model)}, {"t_depth", d.t_depth}, {"per_op_depth", d.per_op_depth},
                     {"op_count", d.op_count}, {"synthesis_accuracy", d.synthesis_accuracy}});
    }
    if (out.empty()) throw zp::ConfigError("tdepth needs --t-total or --walk-ops");
    emit(out.dump(2), ov.output.value_or(""));
    return kOk;
  }

  zp::RunConfig cfg = ov.build();
  if (spectrum->parsed()) {
    const auto inst = cfg.instance();
    zp::check_capacity(cfg, inst);
    zp::PointEvaluator eval(inst, cfg.eval_config(), zp::make_store(cfg));
    emit(point_json(*eval.evaluate(s_point), inst).dump(2), cfg.output);
    return kOk;
  }
  if (cost->parsed()) {
    zp::Pipeline pl(cfg, zp::make_store(cfg));
    const auto data = zp::evaluate_schedule(pl.evaluator(), parse_s_list(s_list), cfg.workers);
    json out = json::array();
    for (auto m : cfg.cost_models) out.push_back(zp::detail::cost_to_json(pl.cost(data, m)));
    emit(out.dump(2), cfg.output);
    return kOk;
  }
  if (schedule->parsed() || simulate->parsed()) {
    if (simulate->parsed()) cfg.mc.enabled = true;
    const auto rep = zp::run_pipeline(cfg);
    emit(zp::to_json(rep).dump(2), cfg.output);
    return kOk;
  }
  if (scan->parsed()) {
    if (!lattices.empty()) cfg.scan = parse_lattices(lattices);
    cfg.validate();
    const auto reports = zp::run_scan(cfg, zp::make_store(cfg));
    std::filesystem::create_directories(scan_dir);
    for (const auto& r : reports) {
      const auto path = std::filesystem::path(scan_dir) / ("report_" + r.instance.shape + ".json");
      zp::write_report(r, path.string());
      std::cerr << "wrote " << path.string() << '\n';
    }
    std::cout << zp::plot_summary_csv(reports);
    return kOk;
  }
  return kOther;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const zp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const zp::CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << '\n';
    return kCapacity;
  } catch (const zp::ConvergenceError& e) {
    std::cerr << "solver did not converge: " << e.what() << '\n';
    return kConvergence;
  } catch (const zp::DegenerateGroundState& e) {
    std::cerr << "degenerate ground state: " << e.what() << '\n';
    return kDegenerate;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kOther;
  }
}
