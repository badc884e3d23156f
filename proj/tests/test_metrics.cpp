#include <gtest/gtest.h>

#include "builders.hpp"
#include "ecosched/engine.hpp"
#include "ecosched/error.hpp"
#include "ecosched/metrics.hpp"
#include "ecosched/workload.hpp"

using namespace ecosched;
using namespace ecosched::testing;

TEST(Metrics, Savings) {
  EXPECT_DOUBLE_EQ(energy_saving(80, 100), 20);
  EXPECT_DOUBLE_EQ(makespan_improvement(120, 100), -20);
  EXPECT_DOUBLE_EQ(edp_saving(50, 200), 75);
  EXPECT_DOUBLE_EQ(perf_loss(110, 100), 10);
  EXPECT_THROW(energy_saving(1, 0), DomainError);
  EXPECT_THROW(makespan_improvement(1, -1), DomainError);
  EXPECT_THROW(perf_loss(1, 0), DomainError);
}

TEST(Metrics, ComposedEdp) {
  EXPECT_NEAR(composed_edp_saving(14.8, 30.1), 40.4452, 1e-9);
  EXPECT_NEAR(composed_edp_saving(14.8, 30.1), 40.4, 0.1);
  EXPECT_DOUBLE_EQ(composed_edp_saving(0, 0), 0);
}

TEST(Metrics, ComposedMatchesDirectEdp) {
  const auto spec = load_workload(fixture("case_study.json"));
  PolicyConfig eco, seq;
  seq.kind = PolicyKind::kSequentialOptimalGpu;
  const auto a = simulate(spec, eco), b = simulate(spec, seq);
  EXPECT_NEAR(edp_saving(a.edp, b.edp),
              composed_edp_saving(energy_saving(a.total_energy, b.total_energy),
                                  makespan_improvement(a.makespan, b.makespan)),
              1e-9);
}

TEST(Report, ComparesAgainstNamedBaseline) {
  const auto spec = load_workload(fixture("case_study.json"));
  std::vector<PolicyRun> runs;
  for (auto k : {PolicyKind::kEcoSched, PolicyKind::kMarbleLike, PolicyKind::kSequentialOptimalGpu}) {
    PolicyConfig cfg;
    cfg.kind = k;
    runs.push_back({std::string(to_string(k)), simulate(spec, cfg), true});
  }
  const auto rep = compare_runs(runs, "marble_like", spec, {}, "case_study");
  EXPECT_NEAR(rep.per_policy.at("ecosched").makespan_improvement_pct, 30.909090909, 1e-6);
  EXPECT_NEAR(rep.per_policy.at("ecosched").energy_saving_pct, 18.0672002074, 1e-6);
  EXPECT_EQ(rep.per_policy.at("marble_like").energy_saving_pct, 0.0);
  EXPECT_NEAR(rep.per_app_perf_loss.at("ecosched").at("pot3d"), 10.0, 1e-9);
  EXPECT_EQ(rep.policy_order.front(), "ecosched");
  EXPECT_THROW(compare_runs(runs, "oracle", spec, {}, "x"), ConfigError);

  const auto json = report_to_json({rep});
  EXPECT_NE(json.find("\"baseline\""), std::string::npos);
  const auto table = report_to_table({rep});
  EXPECT_NE(table.find("ecosched"), std::string::npos);
}
