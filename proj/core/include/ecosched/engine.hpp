#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ecosched/perf_model.hpp"
#include "ecosched/policy.hpp"
#include "ecosched/types.hpp"

namespace ecosched {

enum class EventKind { kLaunch, kFinish };

struct TraceEvent {
  Seconds time = 0.0;
  EventKind kind = EventKind::kLaunch;
  std::string app_id;
  int gpu_count = 0;
  int numa_domain = 0;
  std::vector<int> gpus;

  bool operator==(const TraceEvent&) const = default;
};

struct RunningSlot {
  std::string app_id;
  std::vector<int> gpus;

  bool operator==(const RunningSlot&) const = default;
};

/// Piecewise-constant power over [t_start, t_end).
struct TraceInterval {
  Seconds t_start = 0.0;
  Seconds t_end = 0.0;
  std::vector<RunningSlot> running;
  int busy_gpus = 0;
  int idle_gpus = 0;
  Watts active_power = 0.0;
  Watts idle_power = 0.0;

  Seconds duration() const { return t_end - t_start; }
  bool operator==(const TraceInterval&) const = default;
};

struct AppRecord {
  std::string app_id;
  int gpu_count = 0;
  int numa_domain = 0;
  std::vector<int> gpus;
  bool cross_numa = false;
  bool corun = false;
  Seconds start = 0.0;
  Seconds end = 0.0;
  Seconds runtime = 0.0;
  Watts busy_power = 0.0;
  Joules active_energy = 0.0;

  bool operator==(const AppRecord&) const = default;
};

struct ScheduleTrace {
  int total_gpus = 0;
  std::vector<TraceEvent> events;
  std::vector<TraceInterval> intervals;  // tile [0, makespan]
  Seconds makespan = 0.0;
  std::map<std::string, AppRecord> per_app;

  bool operator==(const ScheduleTrace&) const = default;
};

struct SimResult {
  PolicyKind policy = PolicyKind::kEcoSched;
  ScheduleTrace trace;
  Joules total_energy = 0.0;
  Joules active_energy = 0.0;
  Joules idle_energy = 0.0;
  Joules profiling_energy = 0.0;  // reported separately unless included
  bool profiling_included = false;
  Seconds makespan = 0.0;
  double edp = 0.0;  // total_energy * makespan
  double busy_gpu_seconds = 0.0;
  double idle_gpu_seconds = 0.0;
  std::map<std::string, double> perf_loss_pct;  // vs. solo performance-optimal runtime
  EstimateTable estimates;                       // populated for ecosched runs
};

struct SimOptions {
  bool include_profiling_energy = false;
};

/// true_runtime x cross_numa_slowdown (if spanning) x corun_slowdown (if co-running).
/// Throws EngineFault when no profile exists for gpu_count.
Seconds effective_runtime(const Application& app, int gpu_count, bool numa_span, bool corunners_present);

/// NUMA domain owning GPU `gpu` when M GPUs are split evenly over K domains.
int numa_domain_of_gpu(int gpu, int total_gpus, int numa_domains);

struct RunningJob {
  std::size_t app_index = 0;
  int gpu_count = 0;
  int numa_domain = 0;
  std::vector<int> gpus;
  bool cross_numa = false;
  bool corun = false;
  Seconds start = 0.0;
  Seconds base_runtime = 0.0;  // before the co-run multiplier
  Seconds completion = 0.0;
  Watts busy_power = 0.0;
};

/// Event-driven state of one node. Copyable so that search procedures can
/// branch on it; all policy-driven runs go through the same transitions.
class NodeSimulator {
 public:
  explicit NodeSimulator(const WorkloadSpec& spec, bool record_trace = true);
  NodeSimulator(WorkloadSpec&&, bool = true) = delete;  // holds a pointer to the spec

  const WorkloadSpec& spec() const { return *spec_; }
  Seconds clock() const { return clock_; }
  int event_index() const { return event_index_; }
  int free_gpus() const;
  int free_numa_domains() const;
  const std::vector<RunningJob>& running() const { return running_; }
  /// Window indices of jobs not yet launched, in queue order.
  const std::vector<std::size_t>& waiting() const { return waiting_; }
  bool finished() const { return waiting_.empty() && running_.empty(); }

  Joules active_energy() const { return active_energy_; }
  Joules idle_energy() const { return idle_energy_; }
  Joules energy() const { return active_energy_ + idle_energy_; }

  /// Snapshot for a policy; `estimates` may be null.
  SchedulerView view(const EstimateTable* estimates) const;

  /// Starts every mode at the current clock. Throws EngineFault if the set is
  /// empty, repeats an app, names a job that is not waiting, or exceeds free
  /// GPUs / NUMA domains.
  void launch(std::span<const Mode> modes);

  /// Integrates energy up to the earliest completion and retires every job
  /// finishing then. Throws EngineFault when nothing is running.
  void advance();

  /// Runs all remaining jobs to completion without launching anything.
  void drain();

  ScheduleTrace trace() const;

 private:
  std::size_t index_of(const std::string& app_id) const;

  const WorkloadSpec* spec_;
  bool record_;
  Seconds clock_ = 0.0;
  int event_index_ = 0;
  std::vector<char> gpu_busy_;
  std::vector<char> domain_busy_;
  std::vector<std::size_t> waiting_;
  std::vector<RunningJob> running_;
  Joules active_energy_ = 0.0;
  Joules idle_energy_ = 0.0;
  double busy_gpu_seconds_ = 0.0;
  std::vector<TraceEvent> events_;
  std::vector<TraceInterval> intervals_;
  std::vector<AppRecord> finished_;
};

SimResult simulate(const WorkloadSpec& spec, const PolicyConfig& cfg, const SimOptions& options = {});

/// Drives `policy` until every window job finishes. The policy is invoked
/// repeatedly at each event until it declines to launch.
SimResult simulate(const WorkloadSpec& spec, Policy& policy, const EstimateTable* estimates,
                   const SimOptions& options = {});

/// Maximum relative error of the energy and GPU-second conservation identities.
double conservation_error(const SimResult& result);

}  // namespace ecosched
