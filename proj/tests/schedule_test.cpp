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

#include "zenoprep/schedule.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <thread>

#include "test_util.hpp"
#include "zenoprep/cost.hpp"

namespace zenoprep {
namespace {

Instance two_site() {
  Instance inst;
  inst.lattice = build_lattice(2, 1);
  inst.params = {1.0, 4.0, 1.0};
  inst.sector = {1, 1, 2};
  return inst;
}

TEST(Instance, DefaultsAndKey) {
  const auto inst = make_instance(3, 1);
  EXPECT_EQ(inst.params.u, default_coupling(inst.lattice));
  EXPECT_EQ(inst.sector.n_up + inst.sector.n_down, 3);
  EXPECT_NE(make_instance(3, 1, 2.0).key(), inst.key());
  EXPECT_EQ(make_instance(3, 1).key(), inst.key());
}

TEST(EvaluatePoint, TwoSiteEndpoints) {
  PointEvaluator eval(two_site(), EvalConfig{});
  const auto p0 = eval.evaluate(0.0);
  const auto free = dense_spectrum(testing::two_site_hubbard(0.0));
  EXPECT_NEAR(p0->gap(), free[1] - free[0], 1e-12);
  const auto p1 = eval.evaluate(1.0);
  EXPECT_NEAR(p1->gap(), 0.8284271247461903, 1e-9);
  EXPECT_NEAR(p1->normalized_gap, p1->window.scale * p1->gap(), 1e-15);
  EXPECT_NEAR(p1->bounds.e_max, testing::kTwoSiteSpectrum.back(), 1e-9);
  EXPECT_THROW(eval.evaluate(1.5), ConfigError);
}

TEST(EvaluatePoint, CacheReturnsSameObject) {
  PointEvaluator eval(make_instance(4, 1), EvalConfig{});
  const auto a = eval.evaluate(0.3);
  const auto b = eval.evaluate(0.3);
  EXPECT_EQ(a.get(), b.get());
  EXPECT_EQ(eval.eigensolves(), 1u);
}

TEST(EvaluatePoint, ConcurrentRequestsSolveOnce) {
  PointEvaluator eval(make_instance(6, 1), EvalConfig{});
  std::vector<PointPtr> got(4);
  {
    std::vector<std::jthread> pool;
    for (int i = 0; i < 4; ++i) pool.emplace_back([&, i] { got[static_cast<std::size_t>(i)] = eval.evaluate(0.5); });
  }
  for (const auto& p : got) EXPECT_EQ(p.get(), got[0].get());
  EXPECT_EQ(eval.eigensolves(), 1u);
}

TEST(EvaluatePoint, FailureIsNotCached) {
  // The half-filled 2x2 plaquette is degenerate at s = 0.
  Instance inst;
  inst.lattice = build_lattice(2, 2);
  inst.params = {1.0, 4.0, 1.0};
  inst.sector = {2, 2, 4};
  PointEvaluator eval(inst, EvalConfig{});
  EXPECT_THROW(eval.evaluate(0.0), DegenerateGroundState);
  EXPECT_TRUE(eval.cached_points().empty());
  EXPECT_THROW(eval.evaluate(0.0), DegenerateGroundState);
}

TEST(EvaluateSchedule, TwoPoints) {
  PointEvaluator eval(two_site(), EvalConfig{});
  const auto d = evaluate_schedule(eval, {0.0, 1.0});
  ASSERT_EQ(d.fidelities.size(), 1u);
  const auto& a = d.points[0]->spectral.ground_vector;
  const auto& b = d.points[1]->spectral.ground_vector;
  double ov = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) ov += a[i] * b[i];
  EXPECT_NEAR(d.fidelities[0], ov * ov, 1e-15);
}

TEST(EvaluateSchedule, StructureAndDuplicates) {
  PointEvaluator eval(make_instance(4, 1), EvalConfig{});
  const auto d = evaluate_schedule(eval, {0.0, 0.5, 1.0});
  EXPECT_EQ(d.points.size(), 3u);
  EXPECT_EQ(d.fidelities.size(), 2u);
  for (double f : d.fidelities) {
    EXPECT_GE(f, 0.0);
    EXPECT_LE(f, 1.0);
  }
  const auto dup = evaluate_schedule(eval, {0.0, 0.5, 0.5, 1.0 + 1e-15});
  EXPECT_EQ(dup.fidelities[1], 1.0);
  EXPECT_EQ(dup.s(3), 1.0);
  EXPECT_THROW(evaluate_schedule(eval, {0.0, 0.7, 0.5, 1.0}), ConfigError);
  EXPECT_THROW(evaluate_schedule(eval, {0.1, 1.0}), ConfigError);
  EXPECT_THROW(evaluate_schedule(eval, {0.0}), ConfigError);
}

TEST(EvaluateSchedule, ParallelMatchesSerial) {
  const std::vector<double> grid{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  PointEvaluator a(make_instance(5, 1), EvalConfig{});
  PointEvaluator b(make_instance(5, 1), EvalConfig{});
  const auto serial = evaluate_schedule(a, grid, 1);
  const auto parallel = evaluate_schedule(b, grid, 3);
  EXPECT_EQ(serial.fidelities, parallel.fidelities);
  EXPECT_EQ(serial.gaps(), parallel.gaps());
}

TEST(EvaluateSchedule, FailureNamesThePoint) {
  Instance inst;
  inst.lattice = build_lattice(2, 2);
  inst.params = {1.0, 4.0, 1.0};
  inst.sector = {2, 2, 4};
  PointEvaluator eval(inst, EvalConfig{});
  try {
    evaluate_schedule(eval, {0.0, 1.0});
    FAIL();
  } catch (const DegenerateGroundState& e) {
    EXPECT_NE(std::string(e.what()).find("s=0x0p+0"), std::string::npos) << e.what();
  }
}

ScheduleData with_fidelities(ScheduleData d, std::vector<double> f) {
  d.fidelities = std::move(f);
  return d;
}

TEST(Refine, MidpointOfLowestFidelity) {
  PointEvaluator eval(make_instance(4, 1), EvalConfig{});
  const auto base = evaluate_schedule(eval, {0.0, 0.5, 1.0});

  auto r = refine(with_fidelities(base, {0.7, 0.9}), eval);
  EXPECT_EQ(r.inserted_s, 0.25);
  EXPECT_EQ(r.replaced, 1u);
  EXPECT_EQ(r.data.s_values(), (std::vector<double>{0.0, 0.25, 0.5, 1.0}));
  EXPECT_EQ(r.data.fidelities[2], 0.9);  // untouched

  r = refine(with_fidelities(base, {0.9, 0.9}), eval);
  EXPECT_EQ(r.inserted_s, 0.25);

  r = refine(with_fidelities(base, {0.95, 0.6}), eval);
  EXPECT_EQ(r.inserted_s, 0.75);
  EXPECT_EQ(r.data.fidelities[0], 0.95);
  EXPECT_EQ(r.data.points.size(), 4u);
  const auto sv = r.data.s_values();
  EXPECT_TRUE(std::is_sorted(sv.begin(), sv.end()));
}

TEST(Refine, OnlyTheSplitStepChanges) {
  PointEvaluator eval(make_instance(5, 1), EvalConfig{});
  auto d = evaluate_schedule(eval, {0.0, 1.0});
  for (int i = 0; i < 6; ++i) {
    const auto r = refine(d, eval);
    const std::size_t k = r.replaced;
    for (std::size_t j = 1; j < k; ++j) EXPECT_EQ(r.data.fidelities[j - 1], d.fidelities[j - 1]);
    for (std::size_t j = k + 1; j <= d.steps(); ++j) EXPECT_EQ(r.data.fidelities[j], d.fidelities[j - 1]);
    EXPECT_EQ(r.data.points.size(), d.points.size() + 1);
    d = r.data;
  }
}

TEST(Refine, StepFloor) {
  PointEvaluator eval(make_instance(4, 1), EvalConfig{});
  const auto d = evaluate_schedule(eval, {0.0, 1.0});
  EXPECT_THROW(refine(d, eval, 0.6), StepFloorError);
}

TEST(Optimize, ConstantCostStopsAfterPatience) {
  PointEvaluator eval(make_instance(4, 1), EvalConfig{});
  OptimizerPolicy pol;
  pol.patience = 3;
  const auto res = optimize(eval, [](const ScheduleData&) { return 1.0; }, pol);
  EXPECT_EQ(res.trace.size(), 4u);
  EXPECT_EQ(res.best.points.size(), 2u);
  EXPECT_EQ(res.stop, StopReason::patience);
}

TEST(Optimize, PlainCostOnTwoSites) {
  PointEvaluator eval(two_site(), EvalConfig{});
  const CostFn cost = [](const ScheduleData& d) { return tts_plain(d, 0.01).tts; };
  const auto res = optimize(eval, cost, OptimizerPolicy{});
  const auto initial = evaluate_schedule(eval, {0.0, 1.0});
  EXPECT_EQ(res.initial_cost, cost(initial));
  EXPECT_LE(res.best_cost, res.initial_cost);
  EXPECT_EQ(res.best_cost, cost(res.best));
}

TEST(Optimize, TraceInvariantsAndDeterminism) {
  const CostFn cost = [](const ScheduleData& d) { return tts_rewind(d).tts; };
  OptimizerPolicy pol;
  pol.patience = 4;
  PointEvaluator e1(make_instance(5, 1), EvalConfig{});
  PointEvaluator e2(make_instance(5, 1), EvalConfig{});
  const auto a = optimize(e1, cost, pol);
  const auto b = optimize(e2, cost, pol);
  ASSERT_EQ(a.trace.size(), b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    EXPECT_EQ(a.trace[i].cost, b.trace[i].cost);
    if (i == 0) continue;
    EXPECT_EQ(a.trace[i].inserted_s, b.trace[i].inserted_s);
    EXPECT_LE(a.trace[i].best_cost, a.trace[i - 1].best_cost);
    EXPECT_EQ(a.trace[i].points, a.trace[i - 1].points + 1);
  }
  EXPECT_EQ(a.best.s_values(), b.best.s_values());
}

TEST(Optimize, MaxPoints) {
  PointEvaluator eval(make_instance(4, 1), EvalConfig{});
  OptimizerPolicy pol;
  pol.max_points = 4;
  pol.patience = 100;
  const auto res = optimize(eval, [](const ScheduleData& d) { return 10.0 - static_cast<double>(d.points.size()); }, pol);
  EXPECT_EQ(res.stop, StopReason::max_points);
  EXPECT_EQ(res.best.points.size(), 4u);
}

TEST(Schedule, UniformRefinementKeepsMinimumFidelity) {
  for (auto inst : {two_site(), make_instance(4, 1), make_instance(3, 2)}) {
    PointEvaluator eval(inst, EvalConfig{});
    for (int L : {2, 4, 8}) {
      std::vector<double> coarse, fine;
      for (int i = 0; i <= L; ++i) coarse.push_back(static_cast<double>(i) / L);
      for (int i = 0; i <= 2 * L; ++i) fine.push_back(static_cast<double>(i) / (2 * L));
      const double a = evaluate_schedule(eval, coarse).min_fidelity();
      const double b = evaluate_schedule(eval, fine).min_fidelity();
      EXPECT_GE(b, a - 1e-6) << inst.key() << " L=" << L;
    }
  }
}

}  // namespace
}  // namespace zenoprep
