#include "ecosched/workload.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "ecosched/error.hpp"
#include "json_util.hpp"

namespace ecosched {

namespace {

bool finite_non_negative(double v) { return std::isfinite(v) && v >= 0.0; }

void validate_application(const Application& app, const Platform& platform,
                          std::vector<std::string>& out) {
  const std::string& id = app.app_id;
  if (id.empty()) out.push_back("application with empty app_id");
  if (app.feasible_gpu_counts.empty())
    out.push_back(fmt::format("app '{}': feasible_gpu_counts is empty", id));
  if (!(app.corun_slowdown >= 1.0) || !std::isfinite(app.corun_slowdown))
    out.push_back(fmt::format("app '{}': corun_slowdown must be >= 1", id));
  if (!(app.cross_numa_slowdown >= 1.0) || !std::isfinite(app.cross_numa_slowdown))
    out.push_back(fmt::format("app '{}': cross_numa_slowdown must be >= 1", id));

  std::set<int> listed;
  for (int g : app.feasible_gpu_counts) {
    if (!listed.insert(g).second)
      out.push_back(fmt::format("app '{}': gpu_count {} listed twice", id, g));
    if (g < 1 || g > platform.total_gpus)
      out.push_back(fmt::format("app '{}': gpu_count {} outside [1, {}]", id, g, platform.total_gpus));
    if (!app.profile(g)) out.push_back(fmt::format("app '{}': missing profile for gpu_count {}", id, g));
  }

  std::set<int> seen;
  for (const auto& p : app.profiles) {
    const int g = p.gpu_count;
    if (!seen.insert(g).second)
      out.push_back(fmt::format("app '{}': duplicate profile for gpu_count {}", id, g));
    if (!listed.count(g))
      out.push_back(fmt::format("app '{}': profile for unlisted gpu_count {}", id, g));
    if (g < 1 || g > platform.total_gpus)
      out.push_back(fmt::format("app '{}': gpu_count {} > total_gpus {}", id, g, platform.total_gpus));
    if (!(p.true_runtime > 0.0) || !std::isfinite(p.true_runtime))
      out.push_back(fmt::format("app '{}' gpu_count {}: true_runtime must be > 0", id, g));
    if (!(p.busy_power > 0.0) || !std::isfinite(p.busy_power))
      out.push_back(fmt::format("app '{}' gpu_count {}: busy_power must be > 0", id, g));
    if (!(p.dram_util >= 0.0 && p.dram_util <= 1.0))
      out.push_back(fmt::format("app '{}' gpu_count {}: dram_util out of [0,1]", id, g));
    if (!finite_non_negative(p.profiling_energy))
      out.push_back(fmt::format("app '{}' gpu_count {}: profiling_energy must be >= 0", id, g));
    if (!finite_non_negative(p.profiling_duration))
      out.push_back(fmt::format("app '{}' gpu_count {}: profiling_duration must be >= 0", id, g));
  }
}

}  // namespace

std::vector<std::string> validate(const WorkloadSpec& spec) {
  std::vector<std::string> out;
  const Platform& pf = spec.platform;
  if (pf.total_gpus < 1) out.push_back("total_gpus must be >= 1");
  if (pf.numa_domains < 1) out.push_back("numa_domains must be >= 1");
  if (pf.numa_domains > pf.total_gpus) out.push_back("numa_domains exceeds total_gpus");
  if (!finite_non_negative(pf.idle_power_per_gpu)) out.push_back("idle_power_per_gpu must be >= 0");

  const auto n = static_cast<long long>(spec.applications.size());
  if (n == 0 ? spec.window_size != 0 : (spec.window_size < 1 || spec.window_size > n))
    out.push_back(fmt::format("window_size {} outside [1, {}]", spec.window_size, n));

  std::set<std::string> ids;
  for (const auto& app : spec.applications) {
    if (!ids.insert(app.app_id).second) out.push_back(fmt::format("duplicate app_id '{}'", app.app_id));
    validate_application(app, pf, out);
  }
  return out;
}

WorkloadSpec parse_workload(std::string_view json_text) {
  using detail::Field;
  const auto doc = detail::parse_document(json_text);
  Field root(doc, "");
  root.expect_object({"platform", "window_size", "applications"});

  WorkloadSpec spec;
  Field platform = root.at("platform");
  platform.expect_object({"total_gpus", "numa_domains", "idle_power_per_gpu_w", "name"});
  spec.platform.total_gpus = static_cast<int>(platform.at("total_gpus").integer());
  spec.platform.numa_domains = static_cast<int>(platform.at("numa_domains").integer());
  spec.platform.idle_power_per_gpu = platform.at("idle_power_per_gpu_w").number();
  spec.platform.name = platform.at("name").string();

  Field apps = root.at("applications");
  const std::size_t n_apps = apps.array_size();
  spec.applications.reserve(n_apps);
  for (std::size_t i = 0; i < n_apps; ++i) {
    Field a = apps.at(i);
    a.expect_object({"app_id", "corun_slowdown", "cross_numa_slowdown", "profiles"});
    Application app;
    app.app_id = a.at("app_id").string();
    if (a.has("corun_slowdown")) app.corun_slowdown = a.at("corun_slowdown").number();
    if (a.has("cross_numa_slowdown")) app.cross_numa_slowdown = a.at("cross_numa_slowdown").number();
    Field profiles = a.at("profiles");
    const std::size_t n_prof = profiles.array_size();
    for (std::size_t j = 0; j < n_prof; ++j) {
      Field p = profiles.at(j);
      p.expect_object({"gpu_count", "true_runtime_s", "busy_power_w", "dram_util", "profiling_energy_j",
                       "profiling_duration_s"});
      ModeProfile mp;
      mp.gpu_count = static_cast<int>(p.at("gpu_count").integer());
      mp.true_runtime = p.at("true_runtime_s").number();
      mp.busy_power = p.at("busy_power_w").number();
      mp.dram_util = p.at("dram_util").number();
      mp.profiling_energy = p.at("profiling_energy_j").number();
      mp.profiling_duration = p.at("profiling_duration_s").number();
      app.profiles.push_back(mp);
      if (std::find(app.feasible_gpu_counts.begin(), app.feasible_gpu_counts.end(), mp.gpu_count) ==
          app.feasible_gpu_counts.end())
        app.feasible_gpu_counts.push_back(mp.gpu_count);
    }
    std::sort(app.feasible_gpu_counts.begin(), app.feasible_gpu_counts.end());
    spec.applications.push_back(std::move(app));
  }
  spec.window_size = static_cast<int>(root.at("window_size").integer());

  if (auto violations = validate(spec); !violations.empty()) throw ValidationError(std::move(violations));
  return spec;
}

WorkloadSpec load_workload(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open workload file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_workload(buf.str());
}

std::string serialize_workload(const WorkloadSpec& spec) {
  using detail::Json;
  Json apps = Json::array();
  for (const auto& app : spec.applications) {
    Json profiles = Json::array();
    for (const auto& p : app.profiles) {
      profiles.push_back(Json{{"gpu_count", p.gpu_count},
                              {"true_runtime_s", p.true_runtime},
                              {"busy_power_w", p.busy_power},
                              {"dram_util", p.dram_util},
                              {"profiling_energy_j", p.profiling_energy},
                              {"profiling_duration_s", p.profiling_duration}});
    }
    apps.push_back(Json{{"app_id", app.app_id},
                        {"corun_slowdown", app.corun_slowdown},
                        {"cross_numa_slowdown", app.cross_numa_slowdown},
                        {"profiles", std::move(profiles)}});
  }
  Json doc{{"platform",
            {{"total_gpus", spec.platform.total_gpus},
             {"numa_domains", spec.platform.numa_domains},
             {"idle_power_per_gpu_w", spec.platform.idle_power_per_gpu},
             {"name", spec.platform.name}}},
           {"window_size", spec.window_size},
           {"applications", std::move(apps)}};
  return doc.dump(2) + "\n";
}

}  // namespace ecosched
