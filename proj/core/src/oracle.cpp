#include "ecosched/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cstring>
#include <limits>
#include <map>
#include <set>
#include <unordered_map>

#include <fmt/format.h>

#include "ecosched/error.hpp"
#include "ecosched/perf_model.hpp"
#include "ecosched/workload.hpp"
#include "json_util.hpp"

namespace ecosched {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMemoCapacity = 4'000'000;

class Search {
 public:
  Search(const WorkloadSpec& spec, const SolveLimits& limits, const SolveOptions& options, SolveStats& stats)
      : spec_(spec),
        limits_(limits),
        options_(options),
        stats_(stats),
        deadline_(std::chrono::steady_clock::now() +
                  std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                      std::chrono::duration<double>(std::max(limits.time_budget_s, 0.0)))) {
    for (const auto& app : spec.window()) {
      double best = kInf;
      for (const auto& p : app.profiles) best = std::min(best, p.busy_power * p.true_runtime);
      min_active_.push_back(best);
    }
  }

  void seed(const OraclePlan& plan) {
    if (plan.objective_energy < best_energy_) {
      best_energy_ = plan.objective_energy;
      best_makespan_ = plan.objective_makespan;
      best_plan_ = plan.decisions;
    }
  }

  double run() {
    NodeSimulator root(spec_, false);
    return dfs(root);
  }

  bool aborted() const { return aborted_; }
  double best_energy() const { return best_energy_; }
  double best_makespan() const { return best_makespan_; }
  const std::vector<PlanDecision>& best_plan() const { return best_plan_; }

 private:
  double lower_bound(const NodeSimulator& sim) const {
    double lb = sim.energy();
    for (const auto& job : sim.running()) lb += job.busy_power * (job.completion - sim.clock());
    for (auto i : sim.waiting()) lb += min_active_[i];
    return lb;
  }

  std::string state_key(const NodeSimulator& sim) const {
    std::string key;
    auto put = [&key](const void* p, std::size_t n) { key.append(static_cast<const char*>(p), n); };
    const double clock = sim.clock();
    put(&clock, sizeof clock);
    for (auto i : sim.waiting()) put(&i, sizeof i);
    key.push_back('|');
    std::vector<const RunningJob*> jobs;
    for (const auto& j : sim.running()) jobs.push_back(&j);
    std::sort(jobs.begin(), jobs.end(), [](auto* a, auto* b) { return a->app_index < b->app_index; });
    for (const auto* j : jobs) {
      put(&j->app_index, sizeof j->app_index);
      put(&j->completion, sizeof j->completion);
      put(&j->numa_domain, sizeof j->numa_domain);
      key.push_back(j->corun ? 'c' : 's');
      for (int g : j->gpus) put(&g, sizeof g);
      key.push_back(';');
    }
    return key;
  }

  bool out_of_budget() {
    if (aborted_) return true;
    if (stats_.nodes >= limits_.max_nodes) aborted_ = true;
    if ((stats_.nodes & 0xFFF) == 0 && std::chrono::steady_clock::now() > deadline_) aborted_ = true;
    return aborted_;
  }

  // Feasible non-empty launch sets at this event, in deterministic order.
  std::vector<std::vector<Mode>> launch_sets(const NodeSimulator& sim) const {
    std::vector<std::vector<Mode>> sets;
    const auto window = spec_.window();
    const auto& waiting = sim.waiting();
    const int g_free = sim.free_gpus();
    const int d_free = sim.free_numa_domains();
    std::vector<Mode> current;
    auto rec = [&](auto&& self, std::size_t k, int used) -> void {
      if (k == waiting.size()) {
        if (!current.empty()) sets.push_back(current);
        return;
      }
      const Application& app = window[waiting[k]];
      if (static_cast<int>(current.size()) < d_free) {
        for (int g : app.feasible_gpu_counts) {
          if (used + g > g_free) continue;
          current.push_back(Mode{app.app_id, g, 1.0});
          self(self, k + 1, used + g);
          current.pop_back();
        }
      }
      self(self, k + 1, used);
    };
    rec(rec, 0, 0);
    // Replay launches each decision in app_id order; GPU placement must match.
    for (auto& set : sets)
      std::sort(set.begin(), set.end(), [](const Mode& a, const Mode& b) { return a.app_id < b.app_id; });
    return sets;
  }

  // Returns the minimum completion energy found in this subtree (kInf when
  // pruned or aborted).
  double dfs(const NodeSimulator& sim) {
    ++stats_.nodes;
    if (out_of_budget()) return kInf;
    if (sim.finished()) {
      const double e = sim.energy();
      if (e < best_energy_) {
        best_energy_ = e;
        best_makespan_ = sim.clock();
        best_plan_ = path_;
      }
      return e;
    }

    const double lb = lower_bound(sim);
    if (!options_.verify_bound) {
      if (lb >= best_energy_) {
        ++stats_.pruned_by_bound;
        return kInf;
      }
      if (options_.use_memo) {
        auto key = state_key(sim);
        auto it = memo_.find(key);
        if (it != memo_.end() && it->second <= sim.energy()) {
          ++stats_.pruned_by_memo;
          return kInf;
        }
        if (it != memo_.end())
          it->second = sim.energy();
        else if (memo_.size() < kMemoCapacity)
          memo_.emplace(std::move(key), sim.energy());
      }
    }

    double subtree_best = kInf;
    for (const auto& set : launch_sets(sim)) {
      NodeSimulator child = sim;
      child.launch(set);
      PlanDecision d;
      d.event_index = sim.event_index();
      for (const auto& m : set) d.launches.push_back({m.app_id, m.gpu_count});
      std::sort(d.launches.begin(), d.launches.end());
      path_.push_back(std::move(d));
      child.advance();
      subtree_best = std::min(subtree_best, dfs(child));
      path_.pop_back();
      if (aborted_) return subtree_best;
    }
    if (!sim.running().empty()) {
      NodeSimulator child = sim;
      child.advance();
      subtree_best = std::min(subtree_best, dfs(child));
    }

    if (options_.verify_bound && !aborted_) {
      ++stats_.bound_checks;
      if (lb > subtree_best * (1.0 + 1e-12)) ++stats_.bound_violations;
    }
    return subtree_best;
  }

  const WorkloadSpec& spec_;
  SolveLimits limits_;
  SolveOptions options_;
  SolveStats& stats_;
  std::chrono::steady_clock::time_point deadline_;
  std::vector<double> min_active_;
  std::unordered_map<std::string, double> memo_;
  std::vector<PlanDecision> path_;
  std::vector<PlanDecision> best_plan_;
  double best_energy_ = kInf;
  double best_makespan_ = 0.0;
  bool aborted_ = false;
};

class RecordingPolicy final : public Policy {
 public:
  explicit RecordingPolicy(Policy& inner) : inner_(inner) {}
  PolicyKind kind() const override { return inner_.kind(); }
  std::optional<Action> select(const SchedulerView& view) override {
    auto action = inner_.select(view);
    if (action) {
      if (decisions_.empty() || decisions_.back().event_index != view.event_index)
        decisions_.push_back(PlanDecision{view.event_index, {}});
      for (const auto& m : action->modes) decisions_.back().launches.push_back({m.app_id, m.gpu_count});
    }
    return action;
  }
  std::vector<PlanDecision> take() {
    for (auto& d : decisions_) std::sort(d.launches.begin(), d.launches.end());
    return std::move(decisions_);
  }

 private:
  Policy& inner_;
  std::vector<PlanDecision> decisions_;
};

class ReplayPolicy final : public Policy {
 public:
  explicit ReplayPolicy(const OraclePlan& plan) {
    for (const auto& d : plan.decisions) {
      if (d.launches.empty()) continue;
      auto& slot = by_event_[d.event_index];
      slot.insert(slot.end(), d.launches.begin(), d.launches.end());
    }
  }
  PolicyKind kind() const override { return PolicyKind::kOracleReplay; }
  std::optional<Action> select(const SchedulerView& view) override {
    auto it = by_event_.find(view.event_index);
    if (it == by_event_.end() || emitted_.count(view.event_index)) return std::nullopt;
    emitted_.insert(view.event_index);
    Action a;
    for (const auto& l : it->second) {
      a.modes.push_back(Mode{l.app_id, l.gpu_count, 1.0});
      a.gpus_used += l.gpu_count;
    }
    return a;
  }
  std::optional<int> first_unreached() const {
    for (const auto& [event, _] : by_event_)
      if (!emitted_.count(event)) return event;
    return std::nullopt;
  }

 private:
  std::map<int, std::vector<PlannedLaunch>> by_event_;
  std::set<int> emitted_;
};

}  // namespace

OraclePlan record_plan(const WorkloadSpec& spec, const PolicyConfig& cfg) {
  auto inner = make_policy(spec, cfg);
  RecordingPolicy recorder(*inner);
  EstimateTable estimates;
  if (cfg.kind == PolicyKind::kEcoSched) estimates = estimate_window(spec, cfg);
  const auto result = simulate(spec, recorder, cfg.kind == PolicyKind::kEcoSched ? &estimates : nullptr);
  OraclePlan plan;
  plan.decisions = recorder.take();
  plan.objective_energy = result.active_energy + result.idle_energy;
  plan.objective_makespan = result.makespan;
  return plan;
}

OraclePlan solve(const WorkloadSpec& spec, const SolveLimits& limits, SolveStats* stats,
                 const SolveOptions& options) {
  if (auto violations = validate(spec); !violations.empty()) throw ValidationError(std::move(violations));
  SolveStats local;
  SolveStats& st = stats ? *stats : local;
  st = SolveStats{};

  OraclePlan plan;
  if (spec.window().empty()) return plan;

  Search search(spec, limits, options, st);
  if (options.seed_with_policies && !options.verify_bound) {
    for (auto kind : {PolicyKind::kEcoSched, PolicyKind::kMarbleLike, PolicyKind::kSequentialOptimalGpu,
                      PolicyKind::kSequentialMaxGpu}) {
      try {
        PolicyConfig cfg;
        cfg.kind = kind;
        search.seed(record_plan(spec, cfg));
      } catch (const PredictionError&) {
        // ecosched cannot run without a profiling signal; other seeds remain
      }
    }
  }
  search.run();
  plan.decisions = search.best_plan();
  plan.objective_energy = search.best_energy();
  plan.objective_makespan = search.best_makespan();
  plan.complete = !search.aborted();
  return plan;
}

std::unique_ptr<Policy> make_replay_policy(const OraclePlan& plan) { return std::make_unique<ReplayPolicy>(plan); }

SimResult replay(const OraclePlan& plan, const WorkloadSpec& spec, const SimOptions& options) {
  ReplayPolicy policy(plan);
  SimResult result;
  try {
    result = simulate(spec, policy, nullptr, options);
  } catch (const EngineFault& e) {
    throw ReplayError(std::string("replay failed: ") + e.what());
  }
  if (auto event = policy.first_unreached())
    throw ReplayError(fmt::format("replay failed: event {} is never reached", *event));
  return result;
}

std::string plan_to_json(const OraclePlan& plan) {
  using detail::Json;
  Json decisions = Json::array();
  for (const auto& d : plan.decisions) {
    Json launches = Json::array();
    for (const auto& l : d.launches) launches.push_back(Json{{"app_id", l.app_id}, {"gpu_count", l.gpu_count}});
    decisions.push_back(Json{{"event_index", d.event_index}, {"launch", std::move(launches)}});
  }
  Json doc{{"objective_energy_j", plan.objective_energy},
           {"objective_makespan_s", plan.objective_makespan},
           {"complete", plan.complete},
           {"decisions", std::move(decisions)}};
  return doc.dump(2) + "\n";
}

OraclePlan parse_plan_json(std::string_view text) {
  using detail::Field;
  const auto doc = detail::parse_document(text);
  Field root(doc, "");
  root.expect_object({"objective_energy_j", "objective_makespan_s", "complete", "decisions"});
  OraclePlan plan;
  plan.objective_energy = root.has("objective_energy_j") ? root.at("objective_energy_j").number() : 0.0;
  plan.objective_makespan = root.has("objective_makespan_s") ? root.at("objective_makespan_s").number() : 0.0;
  plan.complete = root.has("complete") ? root.at("complete").boolean() : true;
  Field decisions = root.at("decisions");
  for (std::size_t i = 0; i < decisions.array_size(); ++i) {
    Field d = decisions.at(i);
    d.expect_object({"event_index", "launch"});
    PlanDecision pd;
    pd.event_index = static_cast<int>(d.at("event_index").integer());
    if (pd.event_index < 0) d.at("event_index").fail("must be >= 0");
    Field launches = d.at("launch");
    for (std::size_t k = 0; k < launches.array_size(); ++k) {
      Field l = launches.at(k);
      l.expect_object({"app_id", "gpu_count"});
      pd.launches.push_back({l.at("app_id").string(), static_cast<int>(l.at("gpu_count").integer())});
    }
    plan.decisions.push_back(std::move(pd));
  }
  return plan;
}

}  // namespace ecosched
