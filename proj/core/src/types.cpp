#include "ecosched/types.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>
#include <utility>

namespace ecosched {

const ModeProfile* Application::profile(int gpu_count) const {
  auto it = std::find_if(profiles.begin(), profiles.end(),
                         [&](const ModeProfile& p) { return p.gpu_count == gpu_count; });
  return it == profiles.end() ? nullptr : &*it;
}

const ModeProfile& Application::performance_optimal() const {
  if (profiles.empty()) throw std::logic_error("application '" + app_id + "' has no profiles");
  return *std::min_element(profiles.begin(), profiles.end(),
                           [](const ModeProfile& a, const ModeProfile& b) {
                             if (a.true_runtime != b.true_runtime) return a.true_runtime < b.true_runtime;
                             return a.gpu_count < b.gpu_count;
                           });
}

Joules Application::profiling_energy() const {
  Joules total = 0.0;
  for (const auto& p : profiles) total += p.profiling_energy;
  return total;
}

const Application* WorkloadSpec::find(std::string_view app_id) const {
  auto it = std::find_if(applications.begin(), applications.end(),
                         [&](const Application& a) { return a.app_id == app_id; });
  return it == applications.end() ? nullptr : &*it;
}

std::span<const Application> WorkloadSpec::window() const {
  const auto n = std::min<std::size_t>(applications.size(), static_cast<std::size_t>(std::max(window_size, 0)));
  return std::span<const Application>(applications).first(n);
}

namespace {
constexpr std::array<std::pair<PolicyKind, std::string_view>, 5> kPolicyNames{{
    {PolicyKind::kEcoSched, "ecosched"},
    {PolicyKind::kSequentialMaxGpu, "sequential_max_gpu"},
    {PolicyKind::kSequentialOptimalGpu, "sequential_optimal_gpu"},
    {PolicyKind::kMarbleLike, "marble_like"},
    {PolicyKind::kOracleReplay, "oracle_replay"},
}};
}  // namespace

std::string_view to_string(PolicyKind kind) {
  for (const auto& [k, name] : kPolicyNames)
    if (k == kind) return name;
  return "unknown";
}

std::optional<PolicyKind> parse_policy_kind(std::string_view name) {
  for (const auto& [k, n] : kPolicyNames)
    if (n == name) return k;
  return std::nullopt;
}

}  // namespace ecosched
