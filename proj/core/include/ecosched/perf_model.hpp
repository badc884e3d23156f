#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ecosched/types.hpp"

namespace ecosched {

/// Phase-I output for one (application, GPU-count) mode.
struct ModeEstimate {
  std::string app_id;
  int gpu_count = 0;
  double t_norm = 1.0;    // predicted runtime relative to the fastest predicted mode
  double e_proxy = 0.0;   // busy_power * t_norm
  double e_norm = 1.0;    // e_proxy relative to the cheapest mode
  bool within_tolerance = true;

  bool operator==(const ModeEstimate&) const = default;
};

/// Maps a profiled mode to a raw runtime proxy; only ratios between modes of
/// the same application matter. Must be positive for dram_util > 0.
using RuntimeProxy = std::function<double(int gpu_count, double dram_util)>;

/// Default model: runtime inversely proportional to aggregate memory
/// throughput, r(g) = 1 / (g * u_g).
double throughput_runtime_proxy(int gpu_count, double dram_util);

struct TNormPrediction {
  std::map<int, double> t_norm;         // gpu_count -> normalized runtime, min is 1
  std::vector<int> unprofiled_counts;   // modes dropped for dram_util == 0
};

/// Throws PredictionError("no usable profiling signal") when every mode has
/// zero DRAM utilization.
TNormPrediction predict_t_norm(const Application& app,
                               const RuntimeProxy& proxy = throughput_runtime_proxy);

/// One estimate per predictable mode, ordered by gpu_count.
std::vector<ModeEstimate> estimate_modes(const Application& app, const PolicyConfig& cfg,
                                         const RuntimeProxy& proxy = throughput_runtime_proxy);

/// Estimates for every application in the scheduling window, keyed by app_id.
using EstimateTable = std::map<std::string, std::vector<ModeEstimate>, std::less<>>;
EstimateTable estimate_window(const WorkloadSpec& spec, const PolicyConfig& cfg,
                              const RuntimeProxy& proxy = throughput_runtime_proxy);

/// Seconds of execution needed before a power reduction of `power_delta`
/// repays `profiling_energy`. Throws DomainError when power_delta <= 0.
Seconds amortization_time(Joules profiling_energy, Watts power_delta);

}  // namespace ecosched
