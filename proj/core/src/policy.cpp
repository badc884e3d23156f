#include "ecosched/policy.hpp"

#include <algorithm>
#include <functional>

#include "ecosched/error.hpp"

namespace ecosched {

std::vector<std::string> Action::app_ids() const {
  std::vector<std::string> ids;
  ids.reserve(modes.size());
  for (const auto& m : modes) ids.push_back(m.app_id);
  return ids;
}

std::vector<int> Action::gpu_counts() const {
  std::vector<int> counts;
  counts.reserve(modes.size());
  for (const auto& m : modes) counts.push_back(m.gpu_count);
  return counts;
}

ScoreParts score(std::span<const Mode> modes, const SchedulerView& view, double lambda) {
  ScoreParts s;
  if (modes.empty()) return s;
  int used = 0;
  double regret = 0.0;
  for (const auto& m : modes) {
    regret += m.e_norm - 1.0;
    used += m.gpu_count;
  }
  s.r_energy = regret / static_cast<double>(modes.size());
  s.idle_frac = static_cast<double>(view.g_free - used) / static_cast<double>(view.total_gpus);
  s.score = s.r_energy + lambda * s.idle_frac;
  return s;
}

namespace {

Action make_action(std::vector<Mode> modes, const SchedulerView& view, double lambda) {
  std::sort(modes.begin(), modes.end(), [](const Mode& a, const Mode& b) { return a.app_id < b.app_id; });
  Action a;
  for (const auto& m : modes) a.gpus_used += m.gpu_count;
  const auto parts = score(modes, view, lambda);
  a.r_energy = parts.r_energy;
  a.idle_frac = parts.idle_frac;
  a.score = parts.score;
  a.modes = std::move(modes);
  return a;
}

bool canonical_less(const Action& a, const Action& b) {
  if (a.modes.size() != b.modes.size()) return a.modes.size() < b.modes.size();
  for (std::size_t i = 0; i < a.modes.size(); ++i)
    if (a.modes[i].app_id != b.modes[i].app_id) return a.modes[i].app_id < b.modes[i].app_id;
  for (std::size_t i = 0; i < a.modes.size(); ++i)
    if (a.modes[i].gpu_count != b.modes[i].gpu_count) return a.modes[i].gpu_count < b.modes[i].gpu_count;
  return false;
}

// Visits every subset of `n` items with size in [1, max_size], in
// lexicographic index order.
void for_each_subset(std::size_t n, std::size_t max_size,
                     const std::function<void(const std::vector<std::size_t>&)>& visit) {
  std::vector<std::size_t> chosen;
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    if (!chosen.empty()) visit(chosen);
    if (chosen.size() == max_size) return;
    for (std::size_t i = start; i < n; ++i) {
      chosen.push_back(i);
      rec(i + 1);
      chosen.pop_back();
    }
  };
  rec(0);
}

}  // namespace

std::vector<Action> enumerate_actions(const SchedulerView& view, double lambda) {
  std::vector<Action> actions;
  if (view.g_free <= 0 || view.free_numa_domains <= 0) return actions;

  std::vector<const WaitingApp*> apps;
  for (const auto& w : view.waiting) apps.push_back(&w);
  std::sort(apps.begin(), apps.end(), [](auto* a, auto* b) { return a->app_id < b->app_id; });

  std::vector<std::vector<Mode>> candidates(apps.size());
  for (std::size_t i = 0; i < apps.size(); ++i) {
    for (const auto& e : apps[i]->modes)
      if (e.within_tolerance && e.gpu_count <= view.g_free)
        candidates[i].push_back(Mode{e.app_id, e.gpu_count, e.e_norm});
    std::sort(candidates[i].begin(), candidates[i].end(),
              [](const Mode& a, const Mode& b) { return a.gpu_count < b.gpu_count; });
  }

  for_each_subset(apps.size(), static_cast<std::size_t>(view.free_numa_domains),
                  [&](const std::vector<std::size_t>& subset) {
                    std::vector<Mode> picked;
                    std::function<void(std::size_t, int)> cross = [&](std::size_t k, int used) {
                      if (k == subset.size()) {
                        actions.push_back(make_action(picked, view, lambda));
                        return;
                      }
                      for (const auto& m : candidates[subset[k]]) {
                        if (used + m.gpu_count > view.g_free) break;
                        picked.push_back(m);
                        cross(k + 1, used + m.gpu_count);
                        picked.pop_back();
                      }
                    };
                    cross(0, 0);
                  });

  std::sort(actions.begin(), actions.end(), canonical_less);
  return actions;
}

bool preferred(const Action& a, const Action& b) {
  if (a.score != b.score) return a.score < b.score;
  if (a.gpus_used != b.gpus_used) return a.gpus_used > b.gpus_used;
  if (a.modes.size() != b.modes.size()) return a.modes.size() > b.modes.size();
  const auto ia = a.app_ids(), ib = b.app_ids();
  if (ia != ib) return ia < ib;
  return a.gpu_counts() < b.gpu_counts();
}

std::optional<Action> select_action(const SchedulerView& view, const PolicyConfig& cfg) {
  auto actions = enumerate_actions(view, cfg.lambda);
  if (actions.empty()) return std::nullopt;
  return *std::min_element(actions.begin(), actions.end(), preferred);
}

namespace {

const WaitingApp* fcfs_head(const SchedulerView& view) {
  const WaitingApp* head = nullptr;
  for (const auto& w : view.waiting)
    if (!head || w.queue_index < head->queue_index) head = &w;
  return head;
}

const Application& truth_for(const WorkloadSpec& truth, const std::string& app_id) {
  const auto* app = truth.find(app_id);
  if (!app) throw ConfigError("baseline: unknown application '" + app_id + "'");
  return *app;
}

Action baseline_action(std::vector<Mode> modes, const SchedulerView& view) {
  // Baselines carry no energy estimate; regret is reported as zero.
  return make_action(std::move(modes), view, 0.0);
}

std::optional<Action> sequential(const SchedulerView& view, const WorkloadSpec& truth, bool max_gpu) {
  if (view.running_jobs > 0 || view.free_numa_domains < 1) return std::nullopt;
  const WaitingApp* head = fcfs_head(view);
  if (!head) return std::nullopt;
  const auto& app = truth_for(truth, head->app_id);
  int g = 0;
  if (max_gpu) {
    for (int c : app.feasible_gpu_counts)
      if (c <= view.total_gpus) g = std::max(g, c);
  } else {
    g = app.performance_optimal().gpu_count;
  }
  if (g < 1 || g > view.g_free) return std::nullopt;
  return baseline_action({Mode{app.app_id, g, 1.0}}, view);
}

std::optional<Action> marble_like(const SchedulerView& view, const WorkloadSpec& truth) {
  std::vector<const WaitingApp*> queue;
  for (const auto& w : view.waiting) queue.push_back(&w);
  std::sort(queue.begin(), queue.end(), [](auto* a, auto* b) { return a->queue_index < b->queue_index; });
  std::vector<int> pinned;
  for (auto* w : queue) pinned.push_back(truth_for(truth, w->app_id).performance_optimal().gpu_count);

  std::optional<std::vector<std::size_t>> best;
  int best_used = 0;
  for_each_subset(queue.size(), static_cast<std::size_t>(std::max(view.free_numa_domains, 0)),
                  [&](const std::vector<std::size_t>& subset) {
                    int used = 0;
                    for (auto i : subset) used += pinned[i];
                    if (used > view.g_free) return;
                    // subsets arrive in lexicographic queue order, so the first
                    // one seen at a given (G, size) wins the FCFS tie-break
                    if (!best || used > best_used || (used == best_used && subset.size() > best->size())) {
                      best = subset;
                      best_used = used;
                    }
                  });
  if (!best) return std::nullopt;
  std::vector<Mode> modes;
  for (auto i : *best) modes.push_back(Mode{queue[i]->app_id, pinned[i], 1.0});
  return baseline_action(std::move(modes), view);
}

class EcoSchedPolicy final : public Policy {
 public:
  explicit EcoSchedPolicy(PolicyConfig cfg) : cfg_(cfg) {}
  PolicyKind kind() const override { return PolicyKind::kEcoSched; }
  std::optional<Action> select(const SchedulerView& view) override { return select_action(view, cfg_); }

 private:
  PolicyConfig cfg_;
};

class BaselinePolicy final : public Policy {
 public:
  BaselinePolicy(PolicyKind kind, const WorkloadSpec& truth) : kind_(kind), truth_(truth) {}
  PolicyKind kind() const override { return kind_; }
  std::optional<Action> select(const SchedulerView& view) override { return baseline_policy(kind_, view, truth_); }

 private:
  PolicyKind kind_;
  const WorkloadSpec& truth_;
};

}  // namespace

std::optional<Action> baseline_policy(PolicyKind kind, const SchedulerView& view, const WorkloadSpec& truth) {
  switch (kind) {
    case PolicyKind::kSequentialMaxGpu:
      return sequential(view, truth, true);
    case PolicyKind::kSequentialOptimalGpu:
      return sequential(view, truth, false);
    case PolicyKind::kMarbleLike:
      return marble_like(view, truth);
    default:
      throw ConfigError("'" + std::string(to_string(kind)) + "' is not a baseline policy");
  }
}

std::unique_ptr<Policy> make_policy(const WorkloadSpec& spec, const PolicyConfig& cfg) {
  if (!(cfg.lambda >= 0.0)) throw ConfigError("lambda must be >= 0");
  if (!(cfg.tau >= 0.0)) throw ConfigError("tau must be >= 0");
  switch (cfg.kind) {
    case PolicyKind::kEcoSched:
      return std::make_unique<EcoSchedPolicy>(cfg);
    case PolicyKind::kSequentialMaxGpu:
    case PolicyKind::kSequentialOptimalGpu:
    case PolicyKind::kMarbleLike:
      return std::make_unique<BaselinePolicy>(cfg.kind, spec);
    case PolicyKind::kOracleReplay:
      throw ConfigError("oracle_replay needs a plan; use replay()");
  }
  throw ConfigError("unknown policy kind");
}

}  // namespace ecosched
