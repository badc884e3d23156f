#include <gtest/gtest.h>

#include "brute_force.hpp"
#include "builders.hpp"
#include "ecosched/error.hpp"
#include "ecosched/policy.hpp"

using namespace ecosched;
using namespace ecosched::testing;

namespace {

WaitingApp waiting(std::string id, std::vector<std::pair<int, double>> modes, std::size_t idx = 0) {
  WaitingApp w;
  w.app_id = id;
  w.queue_index = idx;
  for (auto [g, e] : modes) {
    ModeEstimate m;
    m.app_id = id;
    m.gpu_count = g;
    m.e_norm = e;
    w.modes.push_back(m);
  }
  return w;
}

SchedulerView view(int g_free, int domains, int total, std::vector<WaitingApp> apps) {
  SchedulerView v;
  v.g_free = g_free;
  v.free_numa_domains = domains;
  v.total_gpus = total;
  v.waiting = std::move(apps);
  return v;
}

}  // namespace

TEST(Score, PerfectAction) {
  const std::vector<Mode> modes{{"a", 2, 1.0}, {"b", 2, 1.0}};
  const auto s = score(modes, view(4, 2, 4, {}), 1.0);
  EXPECT_EQ(s.r_energy, 0.0);
  EXPECT_EQ(s.idle_frac, 0.0);
  EXPECT_EQ(s.score, 0.0);
}

TEST(Score, SingleModeWithIdleGpus) {
  const std::vector<Mode> modes{{"a", 2, 1.2}};
  const auto s = score(modes, view(4, 2, 4, {}), 1.0);
  EXPECT_NEAR(s.r_energy, 0.2, 1e-12 * 0.2);
  EXPECT_NEAR(s.idle_frac, 0.5, 1e-12 * 0.5);
  EXPECT_NEAR(s.score, 0.7, 1e-12 * 0.7);
}

TEST(Score, TwoModesLambdaTwo) {
  const std::vector<Mode> modes{{"a", 2, 1.0}, {"b", 2, 1.3}};
  const auto s = score(modes, view(4, 2, 4, {}), 2.0);
  EXPECT_NEAR(s.r_energy, 0.15, 1e-12 * 0.15);
  EXPECT_EQ(s.idle_frac, 0.0);
  EXPECT_NEAR(s.score, 0.15, 1e-12 * 0.15);
}

TEST(Enumerate, TwoAppsTwoGpus) {
  const auto v = view(2, 2, 4, {waiting("A", {{1, 1}, {2, 1}}), waiting("B", {{1, 1}, {2, 1}}, 1)});
  const auto actions = enumerate_actions(v);
  std::vector<std::vector<std::pair<std::string, int>>> got;
  for (const auto& a : actions) {
    got.emplace_back();
    for (const auto& m : a.modes) got.back().emplace_back(m.app_id, m.gpu_count);
  }
  const std::vector<std::vector<std::pair<std::string, int>>> want{
      {{"A", 1}}, {{"A", 2}}, {{"B", 1}}, {{"B", 2}}, {{"A", 1}, {"B", 1}}};
  EXPECT_EQ(got, want);
}

TEST(Enumerate, NoFreeGpus) {
  EXPECT_TRUE(enumerate_actions(view(0, 2, 4, {waiting("A", {{1, 1}})})).empty());
}

TEST(Enumerate, SingleFourGpuMode) {
  EXPECT_EQ(enumerate_actions(view(4, 1, 4, {waiting("A", {{4, 1}})})).size(), 1u);
}

TEST(Enumerate, OutOfToleranceModesExcluded) {
  auto w = waiting("A", {{1, 1}, {2, 1}});
  w.modes[1].within_tolerance = false;
  const auto actions = enumerate_actions(view(4, 2, 4, {w}));
  ASSERT_EQ(actions.size(), 1u);
  EXPECT_EQ(actions[0].modes[0].gpu_count, 1);
}

TEST(Enumerate, MatchesBruteForceOnRandomViews) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const auto v = random_view(seed, 4, 3);
    const auto actions = enumerate_actions(v);
    EXPECT_EQ(as_mode_sets(actions), brute_force_actions(v)) << "seed " << seed;
    EXPECT_EQ(as_mode_sets(actions).size(), actions.size()) << "duplicates, seed " << seed;
    for (const auto& a : actions) {
      EXPECT_LE(a.gpus_used, v.g_free);
      EXPECT_LE(static_cast<int>(a.modes.size()), v.free_numa_domains);
    }
  }
}

TEST(Select, SingleFeasibleAction) {
  const auto a = select_action(view(4, 1, 4, {waiting("A", {{4, 1}})}), {});
  ASSERT_TRUE(a);
  EXPECT_EQ(a->modes[0].gpu_count, 4);
}

TEST(Select, PacksWhenAllEnergiesEqual) {
  const auto v = view(2, 2, 4, {waiting("A", {{1, 1}, {2, 1}}), waiting("B", {{1, 1}, {2, 1}}, 1)});
  const auto a = select_action(v, {});
  ASSERT_TRUE(a);
  EXPECT_EQ(a->app_ids(), (std::vector<std::string>{"A", "B"}));
  EXPECT_EQ(a->gpu_counts(), (std::vector<int>{1, 1}));
  EXPECT_EQ(a->score, 0.0);
}

TEST(Select, EmptyWaitingSetWaits) { EXPECT_FALSE(select_action(view(4, 2, 4, {}), {})); }

TEST(Select, TieBreakPrefersMoreGpus) {
  // {A@2} and {A@4}: regrets 0 and 0.5, idle 0.5 and 0 -> both S = 0.5.
  const auto a = select_action(view(4, 2, 4, {waiting("A", {{2, 1.0}, {4, 1.5}})}), {});
  ASSERT_TRUE(a);
  EXPECT_EQ(a->gpus_used, 4);
}

TEST(Select, SelectedIsMinimalUnderBruteForceScoring) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const auto v = random_view(seed, 4, 3);
    PolicyConfig cfg;
    cfg.lambda = 0.5 + static_cast<double>(seed % 5);
    const auto sel = select_action(v, cfg);
    const auto sets = brute_force_actions(v);
    ASSERT_EQ(sel.has_value(), !sets.empty());
    if (!sel) continue;
    for (const auto& set : sets) {
      double regret = 0.0;
      int used = 0;
      for (const auto& [id, g] : set) {
        for (const auto& w : v.waiting)
          if (w.app_id == id)
            for (const auto& m : w.modes)
              if (m.gpu_count == g) regret += m.e_norm - 1.0;
        used += g;
      }
      const double s = regret / static_cast<double>(set.size()) +
                       cfg.lambda * static_cast<double>(v.g_free - used) / v.total_gpus;
      EXPECT_LE(sel->score, s + 1e-12) << "seed " << seed;
    }
  }
}

TEST(Baselines, SequentialMaxUsesAllGpusSerially) {
  const auto spec = node(4, 2, 70,
                         {app("a", {mode(1, 100, 100), mode(4, 40, 400)}), app("b", {mode(2, 50, 100), mode(4, 30, 400)}),
                          app("c", {mode(4, 10, 400)})});
  SchedulerView v;
  v.g_free = 4;
  v.free_numa_domains = 2;
  v.total_gpus = 4;
  for (std::size_t i = 0; i < 3; ++i) v.waiting.push_back(WaitingApp{spec.applications[i].app_id, i, {}});
  auto a = baseline_policy(PolicyKind::kSequentialMaxGpu, v, spec);
  ASSERT_TRUE(a);
  EXPECT_EQ(a->app_ids(), std::vector<std::string>{"a"});
  EXPECT_EQ(a->gpu_counts(), std::vector<int>{4});
  v.running_jobs = 1;
  EXPECT_FALSE(baseline_policy(PolicyKind::kSequentialMaxGpu, v, spec));
}

TEST(Baselines, SequentialOptimalPicksFastest) {
  const auto spec = node(4, 2, 70, {app("a", {mode(1, 100, 100), mode(4, 90, 400)})});
  SchedulerView v;
  v.g_free = 4;
  v.free_numa_domains = 2;
  v.total_gpus = 4;
  v.waiting.push_back(WaitingApp{"a", 0, {}});
  auto a = baseline_policy(PolicyKind::kSequentialOptimalGpu, v, spec);
  ASSERT_TRUE(a);
  EXPECT_EQ(a->gpu_counts(), std::vector<int>{4});
}

TEST(Baselines, MarblePacksPerformanceOptimalModes) {
  const auto spec = node(4, 2, 70,
                         {app("a", {mode(4, 50, 400)}), app("b", {mode(1, 60, 100), mode(2, 40, 200)}),
                          app("c", {mode(2, 30, 200)})});
  SchedulerView v;
  v.g_free = 4;
  v.free_numa_domains = 2;
  v.total_gpus = 4;
  for (std::size_t i = 0; i < 3; ++i) v.waiting.push_back(WaitingApp{spec.applications[i].app_id, i, {}});
  auto a = baseline_policy(PolicyKind::kMarbleLike, v, spec);
  ASSERT_TRUE(a);
  // {a@4} and {b@2, c@2} both fill the node; two apps win.
  EXPECT_EQ(a->app_ids(), (std::vector<std::string>{"b", "c"}));
}

TEST(Baselines, RejectsNonBaselineKinds) {
  const auto spec = node(1, 1, 0, {app("a", {mode(1, 1, 1)})});
  EXPECT_THROW(baseline_policy(PolicyKind::kEcoSched, SchedulerView{}, spec), ConfigError);
  PolicyConfig cfg;
  cfg.kind = PolicyKind::kOracleReplay;
  EXPECT_THROW(make_policy(spec, cfg), ConfigError);
}
