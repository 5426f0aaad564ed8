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
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "zenoprep/cost.hpp"
#include "zenoprep/qubitization.hpp"
#include "zenoprep/schedule.hpp"
#include "zenoprep/walksim.hpp"

namespace zenoprep {

using json = nlohmann::json;

inline constexpr int kConfigSchemaVersion = 1;
inline constexpr const char* kCacheDirEnv = "ZENOPREP_CACHE_DIR";
inline constexpr const char* kDefaultCacheDir = "./zenoprep-cache";

struct McSettings {
  bool enabled = false;
  std::uint64_t trials = 100'000;
  std::uint64_t seed = 20190611;
  bool exact = true;  // also run the exact projective simulation when the sector is small enough
  std::size_t exact_max_dim = 1024;

  bool operator==(const McSettings&) const = default;
};

struct RunConfig {
  int m = 2;
  int k = 1;
  std::optional<double> u;
  double doping = 0.10;
  double t_hop = 1.0;
  double epsilon = 0.01;
  std::vector<CostModel> cost_models{CostModel::plain, CostModel::rewind, CostModel::qubitized_gapmap};
  OptimizerPolicy policy;
  SpectralConfig spectral;
  double window_margin = kDefaultWindowMargin;
  std::size_t max_dim = kDefaultMaxSectorDim;
  QubitizationSettings qubitization;
  McSettings mc;
  int workers = 1;
  std::string cache_dir;  // empty: environment override, then the default
  bool use_cache = true;
  std::string output;
  std::vector<std::pair<int, int>> scan;  // lattices for the scan subcommand

  void validate() const {
    if (m < 1 || k < 1) throw ConfigError("lattice dimensions must be >= 1");
    if (m < k) throw ConfigError("lattice must satisfy m >= k (got " + std::to_string(m) + "x" + std::to_string(k) + ")");
    if (u && !(*u >= 0.0 && std::isfinite(*u))) throw ConfigError("u must be finite and non-negative");
    if (!(doping >= 0.0 && doping < 1.0)) throw ConfigError("doping must lie in [0, 1)");
    if (!(t_hop > 0.0)) throw ConfigError("t_hop must be positive");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must lie in (0, 1)");
    if (cost_models.empty()) throw ConfigError("at least one cost model is required");
    std::set<CostModel> seen(cost_models.begin(), cost_models.end());
    if (seen.size() != cost_models.size()) throw ConfigError("duplicate cost model");
    optimizer_policy().validate();
    spectral.validate();
    qubitization.validate();
    if (!(window_margin >= 0.0 && window_margin < std::numbers::pi)) throw ConfigError("window margin must lie in [0, pi)");
    if (mc.enabled && mc.trials == 0) throw ConfigError("mc.trials must be >= 1");
    if (workers < 1) throw ConfigError("workers must be >= 1");
    for (const auto& [a, b] : scan)
      if (a < 1 || b < 1 || a < b) throw ConfigError("scan lattices must satisfy m >= k >= 1");
  }

  /// Cache directory after applying the environment override.
  std::string resolved_cache_dir() const {
    if (const char* env = std::getenv(kCacheDirEnv); env != nullptr && *env != '\0') return env;
    return cache_dir.empty() ? kDefaultCacheDir : cache_dir;
  }

  Instance instance() const { return make_instance(m, k, u, doping, t_hop); }

  EvalConfig eval_config() const {
    EvalConfig e;
    e.spectral = spectral;
    e.window_margin = window_margin;
    e.max_dim = max_dim;
    return e;
  }

  OptimizerPolicy optimizer_policy() const {
    OptimizerPolicy p = policy;
    p.epsilon = epsilon;
    return p;
  }

  QubitizationSettings qubitization_settings(QubitizationMode mode) const {
    QubitizationSettings q = qubitization;
    q.mode = mode;
    q.margin = window_margin;
    return q;
  }

  bool has(CostModel mdl) const { return std::find(cost_models.begin(), cost_models.end(), mdl) != cost_models.end(); }
};

namespace detail {

/// Reads an object field by field and rejects keys nobody asked for.
class StrictObject {
 public:
  StrictObject(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    used_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(where_ + "." + key + ": " + e.what());
    }
  }

  const json* sub(const char* key) {
    used_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!used_.count(key)) throw ConfigError(where_ + ": unknown key '" + key + "'");
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> used_;
};

}  // namespace detail

inline json to_json(const RunConfig& c) {
  json j;
  j["schema_version"] = kConfigSchemaVersion;
  j["lattice"] = {{"m", c.m}, {"k", c.k}};
  j["u"] = c.u ? json(*c.u) : json(nullptr);
  j["doping"] = c.doping;
  j["t_hop"] = c.t_hop;
  j["epsilon"] = c.epsilon;
  j["cost_models"] = json::array();
  for (auto m : c.cost_models) j["cost_models"].push_back(to_string(m));
  j["optimizer"] = {{"patience", c.policy.patience}, {"max_points", c.policy.max_points}, {"min_step", c.policy.min_step}};
  j["spectral"] = {{"tol", c.spectral.tol},
                   {"max_iter", c.spectral.max_iter},
                   {"krylov_dim", c.spectral.krylov_dim},
                   {"keep", c.spectral.keep},
                   {"reorth", c.spectral.reorth},
                   {"penalty_threshold", c.spectral.penalty.threshold},
                   {"penalty_fallback", c.spectral.penalty.fallback},
                   {"dense_threshold", c.spectral.dense_threshold},
                   {"degeneracy_tol", c.spectral.degeneracy_tol},
                   {"seed", c.spectral.seed},
                   {"window_margin", c.window_margin},
                   {"max_dim", c.max_dim}};
  j["qubitization"] = {{"normalization", c.qubitization.normalization},
                       {"max_sites", c.qubitization.max_sites}};
  j["mc"] = {{"enabled", c.mc.enabled},
             {"trials", c.mc.trials},
             {"seed", c.mc.seed},
             {"exact", c.mc.exact},
             {"exact_max_dim", c.mc.exact_max_dim}};
  j["workers"] = c.workers;
  j["cache_dir"] = c.cache_dir;
  j["use_cache"] = c.use_cache;
  j["output"] = c.output;
  j["scan"] = json::array();
  for (const auto& [a, b] : c.scan) j["scan"].push_back({a, b});
  return j;
}

inline RunConfig config_from_json(const json& j) {
  RunConfig c;
  detail::StrictObject top(j, "config");
  int version = -1;
  top.get("schema_version", version);
  if (version != kConfigSchemaVersion)
    throw ConfigError("config schema_version must be " + std::to_string(kConfigSchemaVersion));
  if (const json* lat = top.sub("lattice")) {
    detail::StrictObject o(*lat, "config.lattice");
    o.get("m", c.m);
    o.get("k", c.k);
    o.finish();
  }
  if (const json* u = top.sub("u"); u && !u->is_null()) {
    if (!u->is_number()) throw ConfigError("config.u: expected a number or null");
    c.u = u->get<double>();
  }
  top.get("doping", c.doping);
  top.get("t_hop", c.t_hop);
  top.get("epsilon", c.epsilon);
  if (const json* cm = top.sub("cost_models")) {
    if (!cm->is_array()) throw ConfigError("config.cost_models: expected an array");
    c.cost_models.clear();
    for (const auto& x : *cm) {
      if (!x.is_string()) throw ConfigError("config.cost_models: expected strings");
      c.cost_models.push_back(cost_model_from_string(x.get<std::string>()));
    }
  }
  if (const json* o = top.sub("optimizer")) {
    detail::StrictObject s(*o, "config.optimizer");
    s.get("patience", c.policy.patience);
    s.get("max_points", c.policy.max_points);
    s.get("min_step", c.policy.min_step);
    s.finish();
  }
  if (const json* o = top.sub("spectral")) {
    detail::StrictObject s(*o, "config.spectral");
    s.get("tol", c.spectral.tol);
    s.get("max_iter", c.spectral.max_iter);
    s.get("krylov_dim", c.spectral.krylov_dim);
    s.get("keep", c.spectral.keep);
    s.get("reorth", c.spectral.reorth);
    s.get("penalty_threshold", c.spectral.penalty.threshold);
    s.get("penalty_fallback", c.spectral.penalty.fallback);
    s.get("dense_threshold", c.spectral.dense_threshold);
    s.get("degeneracy_tol", c.spectral.degeneracy_tol);
    s.get("seed", c.spectral.seed);
    s.get("window_margin", c.window_margin);
    s.get("max_dim", c.max_dim);
    s.finish();
  }
  if (const json* o = top.sub("qubitization")) {
    detail::StrictObject s(*o, "config.qubitization");
    s.get("normalization", c.qubitization.normalization);
    s.get("max_sites", c.qubitization.max_sites);
    s.finish();
  }
  if (const json* o = top.sub("mc")) {
    detail::StrictObject s(*o, "config.mc");
    s.get("enabled", c.mc.enabled);
    s.get("trials", c.mc.trials);
    s.get("seed", c.mc.seed);
    s.get("exact", c.mc.exact);
    s.get("exact_max_dim", c.mc.exact_max_dim);
    s.finish();
  }
  top.get("workers", c.workers);
  top.get("cache_dir", c.cache_dir);
  top.get("use_cache", c.use_cache);
  top.get("output", c.output);
  if (const json* sc = top.sub("scan")) {
    if (!sc->is_array()) throw ConfigError("config.scan: expected an array of [m, k] pairs");
    for (const auto& p : *sc) {
      if (!p.is_array() || p.size() != 2 || !p[0].is_number_integer() || !p[1].is_number_integer())
        throw ConfigError("config.scan: expected [m, k] integer pairs");
      c.scan.emplace_back(p[0].get<int>(), p[1].get<int>());
    }
  }
  top.finish();
  c.validate();
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

}  // namespace zenoprep
