#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "ecosched/engine.hpp"
#include "ecosched/policy.hpp"
#include "ecosched/types.hpp"

namespace ecosched {

struct PlannedLaunch {
  std::string app_id;
  int gpu_count = 0;

  bool operator==(const PlannedLaunch&) const = default;
  auto operator<=>(const PlannedLaunch&) const = default;
};

/// Jobs launched at the `event_index`-th scheduling event (0 is t = 0; each
/// batch of simultaneous completions opens the next event).
struct PlanDecision {
  int event_index = 0;
  std::vector<PlannedLaunch> launches;

  bool operator==(const PlanDecision&) const = default;
};

struct OraclePlan {
  std::vector<PlanDecision> decisions;
  Joules objective_energy = 0.0;  // active + idle, profiling excluded
  Seconds objective_makespan = 0.0;
  bool complete = true;  // false when limits stopped the search early
};

struct SolveLimits {
  std::uint64_t max_nodes = 20'000'000;
  double time_budget_s = 60.0;
};

struct SolveOptions {
  /// Start from the best plan produced by the online policies.
  bool seed_with_policies = true;
  /// Skip states already reached with no more accumulated energy.
  bool use_memo = true;
  /// Disable pruning and check the lower bound against every subtree's true
  /// optimum. Exponential; small instances only.
  bool verify_bound = false;
};

struct SolveStats {
  std::uint64_t nodes = 0;
  std::uint64_t pruned_by_bound = 0;
  std::uint64_t pruned_by_memo = 0;
  std::uint64_t bound_checks = 0;
  std::uint64_t bound_violations = 0;
};

/// Energy-minimal plan over all event-driven schedules: at each completion
/// event any feasible launch set of any modes may start (nothing, only while
/// something runs). Branch-and-bound with an admissible active-energy bound.
OraclePlan solve(const WorkloadSpec& spec, const SolveLimits& limits = {}, SolveStats* stats = nullptr,
                 const SolveOptions& options = {});

/// Scripted policy emitting each decision once at its event.
std::unique_ptr<Policy> make_replay_policy(const OraclePlan& plan);

/// Runs `plan` through the simulator. Throws ReplayError naming the event on
/// an infeasible or unreachable decision.
SimResult replay(const OraclePlan& plan, const WorkloadSpec& spec, const SimOptions& options = {});

/// Plan recorded from an ordinary policy run (one decision per event).
OraclePlan record_plan(const WorkloadSpec& spec, const PolicyConfig& cfg);

std::string plan_to_json(const OraclePlan& plan);
OraclePlan parse_plan_json(std::string_view text);

}  // namespace ecosched
