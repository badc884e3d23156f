#include <gtest/gtest.h>

#include "builders.hpp"
#include "ecosched/error.hpp"
#include "ecosched/generator.hpp"
#include "ecosched/workload.hpp"

using namespace ecosched;
using namespace ecosched::testing;

namespace {

const char* kMinimal = R"({
  "platform": {"total_gpus": 1, "numa_domains": 1, "idle_power_per_gpu_w": 50, "name": "tiny"},
  "window_size": 1,
  "applications": [{"app_id": "a", "profiles": [
    {"gpu_count": 1, "true_runtime_s": 10, "busy_power_w": 200, "dram_util": 0.4,
     "profiling_energy_j": 100, "profiling_duration_s": 1}]}]
})";

std::string with_util(double u) {
  std::string s = kMinimal;
  s.replace(s.find("0.4"), 3, std::to_string(u));
  return s;
}

}  // namespace

TEST(Workload, MinimalFileParses) {
  const auto spec = parse_workload(kMinimal);
  ASSERT_EQ(spec.applications.size(), 1u);
  EXPECT_EQ(spec.applications[0].profiles.size(), 1u);
  EXPECT_EQ(spec.applications[0].feasible_gpu_counts, std::vector<int>{1});
  EXPECT_DOUBLE_EQ(spec.applications[0].corun_slowdown, 1.0);
  EXPECT_EQ(spec.window_size, 1);
}

TEST(Workload, DramUtilAboveOneIsRejected) {
  try {
    parse_workload(with_util(1.3));
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    ASSERT_EQ(e.violations().size(), 1u);
    EXPECT_NE(e.violations()[0].find("dram_util out of [0,1]"), std::string::npos);
  }
}

TEST(Workload, CaseStudyFixtureLoads) {
  const auto spec = load_workload(fixture("case_study.json"));
  EXPECT_EQ(spec.applications.size(), 6u);
  EXPECT_EQ(spec.window_size, 6);
  EXPECT_EQ(spec.platform.total_gpus, 4);
  EXPECT_EQ(spec.platform.numa_domains, 2);
}

TEST(Workload, FixturesRoundTrip) {
  for (const char* name : {"case_study.json", "compute_bound.json"}) {
    const auto spec = load_workload(fixture(name));
    EXPECT_EQ(parse_workload(serialize_workload(spec)), spec) << name;
  }
}

TEST(Workload, RandomSpecsRoundTrip) {
  RandomWorkloadParams p;
  p.interference = true;
  p.max_modes = 4;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto spec = random_workload(seed, p);
    EXPECT_TRUE(validate(spec).empty());
    EXPECT_EQ(parse_workload(serialize_workload(spec)), spec) << seed;
  }
}

TEST(Validate, ValidSpecHasNoViolations) {
  EXPECT_TRUE(validate(node(4, 2, 70, {app("a", {mode(1, 10, 100)})})).empty());
}

TEST(Validate, MoreDomainsThanGpus) {
  const auto v = validate(node(2, 3, 70, {app("a", {mode(1, 10, 100)})}));
  EXPECT_EQ(v, std::vector<std::string>{"numa_domains exceeds total_gpus"});
}

TEST(Validate, MissingProfileNamesAppAndCount) {
  auto a = app("lbm", {mode(1, 10, 100)});
  a.feasible_gpu_counts.push_back(2);
  const auto v = validate(node(4, 2, 70, {a}));
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].find("lbm"), std::string::npos);
  EXPECT_NE(v[0].find("gpu_count 2"), std::string::npos);
}

TEST(Validate, DuplicateIdsAndOversizedModes) {
  const auto v = validate(node(2, 1, 70, {app("a", {mode(1, 10, 100)}), app("a", {mode(3, 10, 100)})}));
  EXPECT_GE(v.size(), 2u);
}

TEST(Validate, WindowBounds) {
  auto s = node(2, 1, 70, {app("a", {mode(1, 10, 100)})});
  s.window_size = 2;
  EXPECT_FALSE(validate(s).empty());
  s.window_size = 0;
  EXPECT_FALSE(validate(s).empty());
  EXPECT_TRUE(validate(node(2, 1, 70, {})).empty());
}

TEST(Parse, SyntaxErrorReportsLine) {
  try {
    parse_workload("{\n\"platform\": {\n,}");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(Parse, UnknownKeyRejected) {
  std::string s = kMinimal;
  s.replace(s.find("\"window_size\""), 0, "\"extra\": 1, ");
  EXPECT_THROW(parse_workload(s), ParseError);
}

TEST(Parse, WrongTypeRejected) {
  std::string s = kMinimal;
  s.replace(s.find("\"tiny\""), 6, "3");
  EXPECT_THROW(parse_workload(s), ParseError);
}

TEST(Parse, MissingFile) { EXPECT_THROW(load_workload("/nonexistent/w.json"), ParseError); }

TEST(Types, PolicyKindNamesRoundTrip) {
  for (auto k : {PolicyKind::kEcoSched, PolicyKind::kSequentialMaxGpu, PolicyKind::kSequentialOptimalGpu,
                 PolicyKind::kMarbleLike, PolicyKind::kOracleReplay})
    EXPECT_EQ(parse_policy_kind(to_string(k)), k);
  EXPECT_FALSE(parse_policy_kind("fifo"));
}

TEST(Types, PerformanceOptimalTiesGoToFewerGpus) {
  const auto a = app("x", {mode(1, 100, 100), mode(2, 90, 200), mode(4, 90, 400)});
  EXPECT_EQ(a.performance_optimal().gpu_count, 2);
}

TEST(Generator, DeterministicPerSeed) {
  EXPECT_EQ(random_workload(7), random_workload(7));
  EXPECT_NE(random_workload(7), random_workload(8));
}
