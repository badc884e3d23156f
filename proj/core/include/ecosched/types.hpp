#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ecosched {

using Seconds = double;
using Watts = double;
using Joules = double;

struct Platform {
  int total_gpus = 1;      // M
  int numa_domains = 1;    // K: at most K applications run concurrently
  Watts idle_power_per_gpu = 0.0;
  std::string name;

  bool operator==(const Platform&) const = default;
};

/// Measurements for one (application, GPU-count) pair.
///
/// `true_runtime` is simulation ground truth. Online policies never read it;
/// they see only the estimates derived from `dram_util` and `busy_power`.
struct ModeProfile {
  int gpu_count = 1;
  Seconds true_runtime = 0.0;
  Watts busy_power = 0.0;  // aggregate over all gpu_count GPUs
  double dram_util = 0.0;  // mean per-GPU DRAM utilization, [0, 1]
  Joules profiling_energy = 0.0;
  Seconds profiling_duration = 0.0;

  bool operator==(const ModeProfile&) const = default;
};

struct Application {
  std::string app_id;
  std::vector<int> feasible_gpu_counts;  // every listed count needs a profile
  std::vector<ModeProfile> profiles;
  double corun_slowdown = 1.0;
  double cross_numa_slowdown = 1.0;

  const ModeProfile* profile(int gpu_count) const;
  /// Fastest mode by ground truth; ties go to the smaller count.
  const ModeProfile& performance_optimal() const;
  Joules profiling_energy() const;

  bool operator==(const Application&) const = default;
};

/// The first `window_size` applications form the scheduling window; only
/// those are simulated.
struct WorkloadSpec {
  Platform platform;
  std::vector<Application> applications;  // queue (FCFS) order
  int window_size = 0;

  const Application* find(std::string_view app_id) const;
  std::span<const Application> window() const;
  bool operator==(const WorkloadSpec&) const = default;
};

enum class PolicyKind {
  kEcoSched,
  kSequentialMaxGpu,
  kSequentialOptimalGpu,
  kMarbleLike,
  kOracleReplay,
};

std::string_view to_string(PolicyKind kind);
std::optional<PolicyKind> parse_policy_kind(std::string_view name);

struct PolicyConfig {
  double lambda = 1.0;  // idle-capacity penalty weight
  double tau = 0.10;    // accepted predicted slowdown over the fastest mode
  PolicyKind kind = PolicyKind::kEcoSched;
};

}  // namespace ecosched
