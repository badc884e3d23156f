#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ecosched/perf_model.hpp"
#include "ecosched/types.hpp"

namespace ecosched {

/// One application launched at one GPU count.
struct Mode {
  std::string app_id;
  int gpu_count = 0;
  double e_norm = 1.0;

  bool operator==(const Mode&) const = default;
};

struct ScoreParts {
  double r_energy = 0.0;   // mean (e_norm - 1) over the action's modes
  double idle_frac = 0.0;  // (G_free - G(a)) / M
  double score = 0.0;      // r_energy + lambda * idle_frac
};

/// A set of modes launched together at one scheduling event. Modes are kept
/// sorted by app_id.
struct Action {
  std::vector<Mode> modes;
  int gpus_used = 0;
  double r_energy = 0.0;
  double idle_frac = 0.0;
  double score = 0.0;

  std::vector<std::string> app_ids() const;
  std::vector<int> gpu_counts() const;
  bool operator==(const Action&) const = default;
};

struct WaitingApp {
  std::string app_id;
  std::size_t queue_index = 0;      // FCFS position in the workload file
  std::vector<ModeEstimate> modes;  // empty for policies that ignore estimates
};

/// What a policy may observe at a scheduling event.
struct SchedulerView {
  int g_free = 0;
  int free_numa_domains = 0;
  int total_gpus = 1;
  int running_jobs = 0;
  int event_index = 0;
  Seconds clock = 0.0;
  std::vector<WaitingApp> waiting;
};

ScoreParts score(std::span<const Mode> modes, const SchedulerView& view, double lambda);

/// All feasible actions over within-tolerance modes: non-empty subsets of the
/// waiting set with at most `free_numa_domains` members and sum(g) <= G_free.
/// Ordered by action size, then app_id tuple, then gpu-count tuple.
std::vector<Action> enumerate_actions(const SchedulerView& view, double lambda = 1.0);

/// Strict ordering used by select_action: lower score, then more GPUs, then
/// more modes, then the smaller (app_id, gpu_count) tuples.
bool preferred(const Action& a, const Action& b);

/// Minimum-score feasible action; nullopt means wait for the next event.
std::optional<Action> select_action(const SchedulerView& view, const PolicyConfig& cfg);

/// Ground-truth baselines. `truth` supplies true runtimes, which these
/// policies read by construction. Throws ConfigError for non-baseline kinds.
std::optional<Action> baseline_policy(PolicyKind kind, const SchedulerView& view, const WorkloadSpec& truth);

class Policy {
 public:
  virtual ~Policy() = default;
  virtual PolicyKind kind() const = 0;
  virtual std::optional<Action> select(const SchedulerView& view) = 0;
};

/// Builds any policy except oracle_replay (see oracle.hpp).
std::unique_ptr<Policy> make_policy(const WorkloadSpec& spec, const PolicyConfig& cfg);

}  // namespace ecosched
