#include "ecosched/metrics.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "ecosched/error.hpp"
#include "json_util.hpp"

namespace ecosched {

namespace {

double percent_reduction(double policy, double baseline, const char* what) {
  if (!(baseline > 0.0) || !std::isfinite(baseline))
    throw DomainError(fmt::format("{}: baseline must be positive, got {}", what, baseline));
  return 100.0 * (baseline - policy) / baseline;
}

}  // namespace

double energy_saving(Joules policy, Joules baseline) { return percent_reduction(policy, baseline, "energy_saving"); }

double makespan_improvement(Seconds policy, Seconds baseline) {
  return percent_reduction(policy, baseline, "makespan_improvement");
}

double edp_saving(double policy_edp, double baseline_edp) {
  return percent_reduction(policy_edp, baseline_edp, "edp_saving");
}

double composed_edp_saving(double energy_saving_pct, double makespan_saving_pct) {
  return 100.0 * (1.0 - (1.0 - energy_saving_pct / 100.0) * (1.0 - makespan_saving_pct / 100.0));
}

double perf_loss(Seconds runtime_coscheduled, Seconds runtime_solo_optimal) {
  if (!(runtime_solo_optimal > 0.0)) throw DomainError("perf_loss: solo runtime must be positive");
  return 100.0 * (runtime_coscheduled - runtime_solo_optimal) / runtime_solo_optimal;
}

ComparisonReport compare_runs(const std::vector<PolicyRun>& runs, const std::string& baseline,
                              const WorkloadSpec& spec, const PolicyConfig& cfg, const std::string& workload_name) {
  auto base = std::find_if(runs.begin(), runs.end(), [&](const PolicyRun& r) { return r.name == baseline; });
  if (base == runs.end()) throw ConfigError("baseline '" + baseline + "' missing from comparison");

  ComparisonReport rep;
  rep.baseline_kind = baseline;
  rep.workload = workload_name;
  rep.platform = spec.platform.name;
  rep.total_gpus = spec.platform.total_gpus;
  rep.numa_domains = spec.platform.numa_domains;
  rep.window_size = spec.window_size;
  rep.lambda = cfg.lambda;
  rep.tau = cfg.tau;

  const auto& b = base->result;
  for (const auto& run : runs) {
    rep.policy_order.push_back(run.name);
    PolicySavings s;
    // An empty window has nothing to save; report zeros instead of failing.
    if (b.total_energy > 0.0) s.energy_saving_pct = energy_saving(run.result.total_energy, b.total_energy);
    if (b.makespan > 0.0) s.makespan_improvement_pct = makespan_improvement(run.result.makespan, b.makespan);
    if (b.edp > 0.0) s.edp_saving_pct = edp_saving(run.result.edp, b.edp);
    rep.per_policy[run.name] = s;
    rep.per_app_perf_loss[run.name] = run.result.perf_loss_pct;
    rep.complete[run.name] = run.complete;
  }
  return rep;
}

std::string report_to_json(const std::vector<ComparisonReport>& reports) {
  using detail::Json;
  Json arr = Json::array();
  for (const auto& rep : reports) {
    Json rows = Json::array();
    for (const auto& name : rep.policy_order) {
      const auto& s = rep.per_policy.at(name);
      Json loss = Json::object();
      for (const auto& [app, pct] : rep.per_app_perf_loss.at(name)) loss[app] = pct;
      rows.push_back(Json{{"policy", name},
                          {"energy_saving_pct", s.energy_saving_pct},
                          {"makespan_improvement_pct", s.makespan_improvement_pct},
                          {"edp_saving_pct", s.edp_saving_pct},
                          {"complete", rep.complete.at(name)},
                          {"perf_loss_pct", std::move(loss)}});
    }
    arr.push_back(Json{{"baseline", rep.baseline_kind},
                       {"workload", rep.workload},
                       {"platform", rep.platform},
                       {"total_gpus", rep.total_gpus},
                       {"numa_domains", rep.numa_domains},
                       {"window_size", rep.window_size},
                       {"lambda", rep.lambda},
                       {"tau", rep.tau},
                       {"rows", std::move(rows)}});
  }
  return Json{{"comparisons", std::move(arr)}}.dump(2) + "\n";
}

std::string report_to_table(const std::vector<ComparisonReport>& reports) {
  std::string out;
  for (const auto& rep : reports) {
    out += fmt::format("baseline: {}  (workload {}, platform {}, M={}, K={}, lambda={}, tau={})\n",
                       rep.baseline_kind, rep.workload, rep.platform, rep.total_gpus, rep.numa_domains,
                       rep.lambda, rep.tau);
    std::size_t width = 6;
    for (const auto& name : rep.policy_order) width = std::max(width, name.size() + (rep.complete.at(name) ? 0 : 1));
    out += fmt::format("  {:<{}}  {:>12}  {:>12}  {:>12}\n", "policy", width, "energy_%", "makespan_%", "edp_%");
    for (const auto& name : rep.policy_order) {
      const auto& s = rep.per_policy.at(name);
      const std::string label = rep.complete.at(name) ? name : name + "*";
      out += fmt::format("  {:<{}}  {:>12.2f}  {:>12.2f}  {:>12.2f}\n", label, width, s.energy_saving_pct,
                         s.makespan_improvement_pct, s.edp_saving_pct);
    }
    if (std::any_of(rep.complete.begin(), rep.complete.end(), [](const auto& kv) { return !kv.second; }))
      out += "  * search stopped at its budget; best plan found so far\n";
    out += "\n";
  }
  return out;
}

}  // namespace ecosched
