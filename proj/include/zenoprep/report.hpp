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
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "zenoprep/config.hpp"
#include "zenoprep/cost.hpp"
#include "zenoprep/walksim.hpp"

namespace zenoprep {

inline constexpr int kReportSchemaVersion = 1;

#ifdef ZENOPREP_VERSION
inline constexpr const char* kSoftwareVersion = ZENOPREP_VERSION;
#else
inline constexpr const char* kSoftwareVersion = "unknown";
#endif

struct InstanceInfo {
  int m = 0;
  int k = 0;
  std::string shape;
  int n_sites = 0;
  double t_hop = 1.0;
  double u = 0.0;
  double doping = 0.0;
  int n_up = 0;
  int n_down = 0;
  std::uint64_t dim = 0;

  bool operator==(const InstanceInfo&) const = default;
};

/// One point of an optimized schedule. `fidelity` is F_j with the previous
/// point (absent for j = 0); for qubitized models it is the fidelity the
/// model uses and `walk_gap` the eigenphase gap of the walk operator.
struct ScheduleRow {
  double s = 0.0;
  double e0 = 0.0;
  double e1 = 0.0;
  double gap = 0.0;
  double normalized_gap = 0.0;
  std::optional<double> walk_gap;
  std::optional<double> fidelity;

  bool operator==(const ScheduleRow&) const = default;
};

struct TraceRow {
  int iteration = 0;
  std::optional<double> inserted_s;
  std::size_t replaced = 0;
  std::optional<double> min_fidelity_before;
  std::size_t points = 0;
  double cost = 0.0;
  double best_cost = 0.0;

  bool operator==(const TraceRow&) const = default;
};

struct ModelRun {
  CostModel model = CostModel::plain;
  std::vector<ScheduleRow> schedule;
  CostReport cost;
  double initial_cost = 0.0;
  std::vector<TraceRow> trace;
  std::string stop;
  std::vector<std::size_t> disadvantaged;  // qubitized models: points whose walk gap is below the normalized gap

  bool operator==(const ModelRun&) const = default;

  std::vector<double> fidelities() const {
    std::vector<double> out;
    for (const auto& r : schedule)
      if (r.fidelity) out.push_back(*r.fidelity);
    return out;
  }
  double gap_min() const {
    double g = std::numeric_limits<double>::infinity();
    for (const auto& r : schedule) g = std::min(g, r.gap);
    return g;
  }
};

struct GainEntry {
  std::string baseline;  // cost model name, or "rewind_normalized"
  std::string model;
  double baseline_tts = 0.0;
  double model_tts = 0.0;
  double value = 0.0;  // baseline_tts / model_tts
  std::string units;

  bool operator==(const GainEntry&) const = default;
};

struct DepthRow {
  std::string source;  // cost model whose TTS sets the operation count
  DepthModel model = DepthModel::product_formula;
  double t_depth = 0.0;
  double per_op_depth = 0.0;
  double op_count = 0.0;
  std::optional<double> synthesis_accuracy;
  std::optional<double> gap_min;
  bool out_of_model = false;

  bool operator==(const DepthRow&) const = default;
};

struct McSummary {
  std::string model;
  std::string kind;  // "two_level" or "exact_projective"
  Protocol protocol = Protocol::rewind;
  McResult result;
  double expected_cost = 0.0;
  double z_cost = 0.0;
  double expected_success = 0.0;  // model value of result.success_frequency
  double z_success = 0.0;
  std::vector<double> step_frequency;  // exact only
  std::vector<double> step_std_error;
  std::vector<double> step_expected;
  std::optional<double> max_leakage;
  std::optional<double> min_final_fidelity;

  bool operator==(const McSummary&) const = default;
};

/// Run metadata that differs between otherwise identical runs.
struct RunInfo {
  std::string timestamp;
  double wall_time_s = 0.0;
  std::size_t eigensolves = 0;

  bool operator==(const RunInfo&) const = default;
};

struct Report {
  int schema_version = kReportSchemaVersion;
  std::string software_version = kSoftwareVersion;
  InstanceInfo instance;
  double epsilon = 0.01;
  double delta_min = 0.0;             // smallest raw gap over every evaluated point
  double delta_min_normalized = 0.0;  // same for the window-normalized gap
  std::vector<ModelRun> models;
  std::optional<double> rewind_normalized_tts;  // rewind on normalized gaps, optimized separately
  std::vector<GainEntry> gains;
  std::vector<DepthRow> depths;
  std::vector<McSummary> mc;
  RunInfo run;

  bool operator==(const Report&) const = default;

  const ModelRun* find(CostModel m) const {
    for (const auto& r : models)
      if (r.model == m) return &r;
    return nullptr;
  }
};

namespace detail {

inline json num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline json num(const std::optional<double>& v) { return v ? num(*v) : json(nullptr); }

inline double get_num(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw ConfigError("report: expected a number, got " + j.dump());
}

inline std::optional<double> get_opt(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return get_num(j.at(key));
}

inline json nums(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

inline std::vector<double> get_nums(const json& j) {
  std::vector<double> out;
  for (const auto& x : j) out.push_back(get_num(x));
  return out;
}

inline json cost_to_json(const CostReport& c) {
  return {{"model", to_string(c.model)},        {"tts", num(c.tts)},
          {"repetitions", num(c.repetitions)}, {"success_prob", num(c.success_prob)},
          {"per_step", nums(c.per_step)},       {"epsilon", num(c.epsilon)},
          {"units", c.units},                   {"series_tts", num(c.series_tts)},
          {"tts_normalized", num(c.tts_normalized)}};
}

inline CostReport cost_from_json(const json& j) {
  CostReport c;
  c.model = cost_model_from_string(j.at("model").get<std::string>());
  c.tts = get_num(j.at("tts"));
  c.repetitions = get_num(j.at("repetitions"));
  c.success_prob = get_num(j.at("success_prob"));
  c.per_step = get_nums(j.at("per_step"));
  c.epsilon = get_num(j.at("epsilon"));
  c.units = j.at("units").get<std::string>();
  c.series_tts = get_opt(j, "series_tts");
  c.tts_normalized = get_opt(j, "tts_normalized");
  return c;
}

inline json mc_to_json(const McResult& r) {
  return {{"mean_cost", num(r.mean_cost)},
          {"std_error", num(r.std_error)},
          {"trials", r.trials},
          {"seed", r.seed},
          {"min", num(r.min)},
          {"max", num(r.max)},
          {"attempts", r.attempts},
          {"successes", r.successes},
          {"success_frequency", num(r.success_frequency)},
          {"success_std_error", num(r.success_std_error)}};
}

inline McResult mc_from_json(const json& j) {
  McResult r;
  r.mean_cost = get_num(j.at("mean_cost"));
  r.std_error = get_num(j.at("std_error"));
  r.trials = j.at("trials").get<std::uint64_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.min = get_num(j.at("min"));
  r.max = get_num(j.at("max"));
  r.attempts = j.at("attempts").get<std::uint64_t>();
  r.successes = j.at("successes").get<std::uint64_t>();
  r.success_frequency = get_num(j.at("success_frequency"));
  r.success_std_error = get_num(j.at("success_std_error"));
  return r;
}

inline DepthModel depth_model_from_string(const std::string& s) {
  if (s == to_string(DepthModel::product_formula)) return DepthModel::product_formula;
  if (s == to_string(DepthModel::qubitized_walk)) return DepthModel::qubitized_walk;
  throw ConfigError("report: unknown depth model '" + s + "'");
}

}  // namespace detail

inline json to_json(const Report& r) {
  using detail::num;
  json j;
  j["schema_version"] = r.schema_version;
  j["software_version"] = r.software_version;
  const auto& in = r.instance;
  j["instance"] = {{"m", in.m},         {"k", in.k},          {"shape", in.shape}, {"n_sites", in.n_sites},
                   {"t_hop", num(in.t_hop)}, {"u", num(in.u)}, {"doping", num(in.doping)}, {"n_up", in.n_up},
                   {"n_down", in.n_down}, {"dim", in.dim}};
  j["epsilon"] = num(r.epsilon);
  j["delta_min"] = num(r.delta_min);
  j["delta_min_normalized"] = num(r.delta_min_normalized);
  j["models"] = json::array();
  for (const auto& m : r.models) {
    json sched = json::array();
    for (const auto& row : m.schedule)
      sched.push_back({{"s", num(row.s)},
                       {"e0", num(row.e0)},
                       {"e1", num(row.e1)},
                       {"gap", num(row.gap)},
                       {"normalized_gap", num(row.normalized_gap)},
                       {"walk_gap", num(row.walk_gap)},
                       {"fidelity", num(row.fidelity)}});
    json trace = json::array();
    for (const auto& t : m.trace)
      trace.push_back({{"iteration", t.iteration},
                       {"inserted_s", num(t.inserted_s)},
                       {"replaced", t.replaced},
                       {"min_fidelity_before", num(t.min_fidelity_before)},
                       {"points", t.points},
                       {"cost", num(t.cost)},
                       {"best_cost", num(t.best_cost)}});
    j["models"].push_back({{"model", to_string(m.model)},
                           {"schedule", sched},
                           {"cost", detail::cost_to_json(m.cost)},
                           {"initial_cost", num(m.initial_cost)},
                           {"trace", trace},
                           {"stop", m.stop},
                           {"disadvantaged", m.disadvantaged}});
  }
  j["rewind_normalized_tts"] = num(r.rewind_normalized_tts);
  j["gains"] = json::array();
  for (const auto& g : r.gains)
    j["gains"].push_back({{"baseline", g.baseline},
                          {"model", g.model},
                          {"baseline_tts", num(g.baseline_tts)},
                          {"model_tts", num(g.model_tts)},
                          {"value", num(g.value)},
                          {"units", g.units}});
  j["depths"] = json::array();
  for (const auto& d : r.depths)
    j["depths"].push_back({{"source", d.source},
                           {"model", to_string(d.model)},
                           {"t_depth", num(d.t_depth)},
                           {"per_op_depth", num(d.per_op_depth)},
                           {"op_count", num(d.op_count)},
                           {"synthesis_accuracy", num(d.synthesis_accuracy)},
                           {"gap_min", num(d.gap_min)},
                           {"out_of_model", d.out_of_model}});
  j["mc"] = json::array();
  for (const auto& s : r.mc)
    j["mc"].push_back({{"model", s.model},
                       {"kind", s.kind},
                       {"protocol", to_string(s.protocol)},
                       {"result", detail::mc_to_json(s.result)},
                       {"expected_cost", num(s.expected_cost)},
                       {"z_cost", num(s.z_cost)},
                       {"expected_success", num(s.expected_success)},
                       {"z_success", num(s.z_success)},
                       {"step_frequency", detail::nums(s.step_frequency)},
                       {"step_std_error", detail::nums(s.step_std_error)},
                       {"step_expected", detail::nums(s.step_expected)},
                       {"max_leakage", num(s.max_leakage)},
                       {"min_final_fidelity", num(s.min_final_fidelity)}});
  j["run"] = {{"timestamp", r.run.timestamp}, {"wall_time_s", num(r.run.wall_time_s)}, {"eigensolves", r.run.eigensolves}};
  return j;
}

/// Throws ConfigError when the per-step data of a report contradicts its totals.
inline void check_report(const Report& r) {
  if (r.schema_version != kReportSchemaVersion) throw ConfigError("report: unsupported schema_version");
  for (const auto& m : r.models) {
    const std::string where = "report model " + to_string(m.model) + ": ";
    if (m.schedule.size() < 2) throw ConfigError(where + "schedule needs at least two points");
    if (m.schedule.front().s != 0.0 || m.schedule.back().s != 1.0) throw ConfigError(where + "schedule must run from 0 to 1");
    for (std::size_t j = 0; j < m.schedule.size(); ++j) {
      const auto& row = m.schedule[j];
      if (j > 0 && row.s < m.schedule[j - 1].s) throw ConfigError(where + "s values must be non-decreasing");
      if (row.fidelity.has_value() != (j > 0)) throw ConfigError(where + "fidelity present exactly for j >= 1");
      if (row.fidelity && !(*row.fidelity >= 0.0 && *row.fidelity <= 1.0)) throw ConfigError(where + "fidelity outside [0, 1]");
    }
    const auto f = m.fidelities();
    if (m.cost.model != m.model) throw ConfigError(where + "cost model mismatch");
    if (m.cost.per_step.size() != f.size()) throw ConfigError(where + "per_step length differs from the step count");
    if (m.cost.consistency_residual() > 1e-9) throw ConfigError(where + "per_step does not add up to tts");
    double p = 1.0;
    for (double x : f) p *= x;
    if (std::abs(p - m.cost.success_prob) > 1e-12 * std::max(1.0, p)) throw ConfigError(where + "success_prob differs from prod F_j");
    if (!m.trace.empty() && m.trace.back().best_cost != m.cost.tts) throw ConfigError(where + "trace best differs from tts");
  }
}

inline Report report_from_json(const json& j) {
  using detail::get_num;
  using detail::get_opt;
  try {
    Report r;
    r.schema_version = j.at("schema_version").get<int>();
    if (r.schema_version != kReportSchemaVersion) throw ConfigError("report: unsupported schema_version");
    r.software_version = j.at("software_version").get<std::string>();
    const auto& in = j.at("instance");
    r.instance = {in.at("m").get<int>(),       in.at("k").get<int>(),         in.at("shape").get<std::string>(),
                  in.at("n_sites").get<int>(), get_num(in.at("t_hop")),       get_num(in.at("u")),
                  get_num(in.at("doping")),    in.at("n_up").get<int>(),      in.at("n_down").get<int>(),
                  in.at("dim").get<std::uint64_t>()};
    r.epsilon = get_num(j.at("epsilon"));
    r.delta_min = get_num(j.at("delta_min"));
    r.delta_min_normalized = get_num(j.at("delta_min_normalized"));
    for (const auto& m : j.at("models")) {
      ModelRun run;
      run.model = cost_model_from_string(m.at("model").get<std::string>());
      for (const auto& row : m.at("schedule"))
        run.schedule.push_back({get_num(row.at("s")), get_num(row.at("e0")), get_num(row.at("e1")), get_num(row.at("gap")),
                                get_num(row.at("normalized_gap")), get_opt(row, "walk_gap"), get_opt(row, "fidelity")});
      run.cost = detail::cost_from_json(m.at("cost"));
      run.initial_cost = get_num(m.at("initial_cost"));
      for (const auto& t : m.at("trace"))
        run.trace.push_back({t.at("iteration").get<int>(), get_opt(t, "inserted_s"), t.at("replaced").get<std::size_t>(),
                             get_opt(t, "min_fidelity_before"), t.at("points").get<std::size_t>(), get_num(t.at("cost")),
                             get_num(t.at("best_cost"))});
      run.stop = m.at("stop").get<std::string>();
      run.disadvantaged = m.at("disadvantaged").get<std::vector<std::size_t>>();
      r.models.push_back(std::move(run));
    }
    r.rewind_normalized_tts = get_opt(j, "rewind_normalized_tts");
    for (const auto& g : j.at("gains"))
      r.gains.push_back({g.at("baseline").get<std::string>(), g.at("model").get<std::string>(), get_num(g.at("baseline_tts")),
                         get_num(g.at("model_tts")), get_num(g.at("value")), g.at("units").get<std::string>()});
    for (const auto& d : j.at("depths"))
      r.depths.push_back({d.at("source").get<std::string>(), detail::depth_model_from_string(d.at("model").get<std::string>()),
                          get_num(d.at("t_depth")), get_num(d.at("per_op_depth")), get_num(d.at("op_count")),
                          get_opt(d, "synthesis_accuracy"), get_opt(d, "gap_min"), d.at("out_of_model").get<bool>()});
    for (const auto& s : j.at("mc")) {
      McSummary m;
      m.model = s.at("model").get<std::string>();
      m.kind = s.at("kind").get<std::string>();
      m.protocol = protocol_from_string(s.at("protocol").get<std::string>());
      m.result = detail::mc_from_json(s.at("result"));
      m.expected_cost = get_num(s.at("expected_cost"));
      m.z_cost = get_num(s.at("z_cost"));
      m.expected_success = get_num(s.at("expected_success"));
      m.z_success = get_num(s.at("z_success"));
      m.step_frequency = detail::get_nums(s.at("step_frequency"));
      m.step_std_error = detail::get_nums(s.at("step_std_error"));
      m.step_expected = detail::get_nums(s.at("step_expected"));
      m.max_leakage = get_opt(s, "max_leakage");
      m.min_final_fidelity = get_opt(s, "min_final_fidelity");
      r.mc.push_back(std::move(m));
    }
    const auto& run = j.at("run");
    r.run = {run.at("timestamp").get<std::string>(), get_num(run.at("wall_time_s")), run.at("eigensolves").get<std::size_t>()};
    check_report(r);
    return r;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("report: malformed field: ") + e.what());
  }
}

/// Report without the run block, for comparing the results of two runs.
inline std::string deterministic_dump(const Report& r) {
  json j = to_json(r);
  j.erase("run");
  return j.dump(2);
}

inline void write_report(const Report& r, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write report '" + path + "'");
  out << to_json(r).dump(2) << '\n';
}

inline Report load_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open report '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("report '" + path + "' is not valid JSON: " + e.what());
  }
  return report_from_json(j);
}

}  // namespace zenoprep
