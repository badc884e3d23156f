#pragma once

#include <cstdint>

#include "ecosched/types.hpp"

namespace ecosched {

struct RandomWorkloadParams {
  int min_apps = 1;
  int max_apps = 4;
  int total_gpus = 4;
  int numa_domains = 2;
  int max_modes = 2;  // feasible GPU counts per application
  double idle_power_per_gpu = 70.0;
  bool interference = false;  // draw corun / cross-NUMA slowdowns above 1
};

/// Deterministic synthetic workload for a given seed. Runtimes follow a
/// sublinear strong-scaling curve, DRAM utilization tracks throughput with
/// multiplicative noise, and aggregate power grows with GPU count.
WorkloadSpec random_workload(std::uint64_t seed, const RandomWorkloadParams& params = {});

}  // namespace ecosched
