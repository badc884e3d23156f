#pragma once

#include <map>
#include <string>
#include <vector>

#include "ecosched/engine.hpp"
#include "ecosched/types.hpp"

namespace ecosched {

// Percent reductions relative to a baseline. Negative values mean the policy
// is worse; they are never clamped. Each throws DomainError when the
// baseline value is not positive.
double energy_saving(Joules policy, Joules baseline);
double makespan_improvement(Seconds policy, Seconds baseline);
double edp_saving(double policy_edp, double baseline_edp);

/// EDP saving implied by independent energy and makespan savings when
/// EDP = E * T.
double composed_edp_saving(double energy_saving_pct, double makespan_saving_pct);

/// Percent runtime increase over solo execution at the performance-optimal
/// GPU count.
double perf_loss(Seconds runtime_coscheduled, Seconds runtime_solo_optimal);

struct PolicySavings {
  double energy_saving_pct = 0.0;
  double makespan_improvement_pct = 0.0;
  double edp_saving_pct = 0.0;
};

/// A named policy run entering a comparison.
struct PolicyRun {
  std::string name;  // e.g. "ecosched", "oracle"
  SimResult result;
  bool complete = true;  // false for an oracle stopped by its budget
};

struct ComparisonReport {
  std::string baseline_kind;
  std::vector<std::string> policy_order;
  std::map<std::string, PolicySavings> per_policy;
  std::map<std::string, std::map<std::string, double>> per_app_perf_loss;  // policy -> app -> pct
  std::map<std::string, bool> complete;
  // fixture metadata
  std::string workload;
  std::string platform;
  int total_gpus = 0;
  int numa_domains = 0;
  int window_size = 0;
  double lambda = 0.0;
  double tau = 0.0;
};

/// Savings of every run against the run named `baseline`, which must be present.
ComparisonReport compare_runs(const std::vector<PolicyRun>& runs, const std::string& baseline,
                              const WorkloadSpec& spec, const PolicyConfig& cfg, const std::string& workload_name);

std::string report_to_json(const std::vector<ComparisonReport>& reports);
/// Aligned-column plain-text table, one block per baseline.
std::string report_to_table(const std::vector<ComparisonReport>& reports);

}  // namespace ecosched
