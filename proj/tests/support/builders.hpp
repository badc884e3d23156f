#pragma once

#include <string>
#include <vector>

#include "ecosched/types.hpp"

namespace ecosched::testing {

inline ModeProfile mode(int g, double runtime, double power, double util = 0.5) {
  ModeProfile p;
  p.gpu_count = g;
  p.true_runtime = runtime;
  p.busy_power = power;
  p.dram_util = util;
  return p;
}

inline Application app(std::string id, std::vector<ModeProfile> profiles) {
  Application a;
  a.app_id = std::move(id);
  for (const auto& p : profiles) a.feasible_gpu_counts.push_back(p.gpu_count);
  a.profiles = std::move(profiles);
  return a;
}

inline WorkloadSpec node(int gpus, int domains, double idle_w, std::vector<Application> apps) {
  WorkloadSpec s;
  s.platform.total_gpus = gpus;
  s.platform.numa_domains = domains;
  s.platform.idle_power_per_gpu = idle_w;
  s.platform.name = "test";
  s.applications = std::move(apps);
  s.window_size = static_cast<int>(s.applications.size());
  return s;
}

inline std::string fixture(const std::string& name) { return std::string(ECOSCHED_FIXTURE_DIR) + "/" + name; }

}  // namespace ecosched::testing
