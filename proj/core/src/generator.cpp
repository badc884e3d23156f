#include "ecosched/generator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "ecosched/error.hpp"

namespace ecosched {

namespace {

// std::uniform_*_distribution output differs between standard libraries; map
// the raw engine output by hand so fixtures are portable.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo, double hi) {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }
  int integer(int lo, int hi) {  // inclusive
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<int>(engine_() % span);
  }

 private:
  std::mt19937_64 engine_;
};

double round_to(double v, double quantum) { return std::round(v / quantum) * quantum; }

}  // namespace

WorkloadSpec random_workload(std::uint64_t seed, const RandomWorkloadParams& params) {
  if (params.total_gpus < 1 || params.numa_domains < 1 || params.numa_domains > params.total_gpus ||
      params.min_apps < 0 || params.max_apps < params.min_apps || params.max_modes < 1)
    throw ConfigError("random_workload: inconsistent parameters");

  Rng rng(seed);
  WorkloadSpec spec;
  spec.platform.total_gpus = params.total_gpus;
  spec.platform.numa_domains = params.numa_domains;
  spec.platform.idle_power_per_gpu = params.idle_power_per_gpu;
  spec.platform.name = "random-" + std::to_string(seed);

  const int n_apps = rng.integer(params.min_apps, params.max_apps);
  for (int a = 0; a < n_apps; ++a) {
    Application app;
    app.app_id = "app" + std::to_string(a);

    std::vector<int> counts(static_cast<std::size_t>(params.total_gpus));
    std::iota(counts.begin(), counts.end(), 1);
    for (std::size_t i = counts.size(); i > 1; --i)
      std::swap(counts[i - 1], counts[static_cast<std::size_t>(rng.integer(0, static_cast<int>(i) - 1))]);
    const int n_modes = rng.integer(1, std::min(params.max_modes, params.total_gpus));
    counts.resize(static_cast<std::size_t>(n_modes));
    std::sort(counts.begin(), counts.end());
    app.feasible_gpu_counts = counts;

    const double t1 = rng.uniform(50.0, 500.0);
    const double alpha = rng.uniform(0.0, 1.0);         // strong-scaling exponent
    const double per_gpu_power = rng.uniform(150.0, 400.0);
    const double util_scale = rng.uniform(0.3, 0.95);
    for (int g : counts) {
      ModeProfile p;
      p.gpu_count = g;
      p.true_runtime = round_to(t1 / std::pow(g, alpha) * rng.uniform(0.95, 1.05), 0.1);
      p.busy_power = round_to(per_gpu_power * g * rng.uniform(0.75, 1.0), 0.1);
      const double throughput = t1 / (g * p.true_runtime);
      p.dram_util = std::clamp(round_to(util_scale * throughput * rng.uniform(0.9, 1.1), 1e-4), 1e-3, 1.0);
      p.profiling_duration = round_to(rng.uniform(5.0, 30.0), 0.1);
      p.profiling_energy = round_to(p.busy_power * p.profiling_duration, 0.1);
      app.profiles.push_back(p);
    }
    if (params.interference) {
      app.corun_slowdown = round_to(rng.uniform(1.0, 1.1), 1e-3);
      app.cross_numa_slowdown = round_to(rng.uniform(1.0, 1.08), 1e-3);
    }
    spec.applications.push_back(std::move(app));
  }
  spec.window_size = n_apps;
  return spec;
}

}  // namespace ecosched
