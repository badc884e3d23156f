#include "ecosched/perf_model.hpp"

#include <algorithm>
#include <limits>

#include "ecosched/error.hpp"

namespace ecosched {

double throughput_runtime_proxy(int gpu_count, double dram_util) {
  return 1.0 / (static_cast<double>(gpu_count) * dram_util);
}

TNormPrediction predict_t_norm(const Application& app, const RuntimeProxy& proxy) {
  TNormPrediction out;
  std::map<int, double> raw;
  for (const auto& p : app.profiles) {
    if (p.dram_util > 0.0)
      raw[p.gpu_count] = proxy(p.gpu_count, p.dram_util);
    else
      out.unprofiled_counts.push_back(p.gpu_count);
  }
  if (raw.empty()) throw PredictionError("app '" + app.app_id + "': no usable profiling signal");

  double best = std::numeric_limits<double>::infinity();
  for (const auto& [g, r] : raw) best = std::min(best, r);
  for (const auto& [g, r] : raw) out.t_norm[g] = r == best ? 1.0 : r / best;
  std::sort(out.unprofiled_counts.begin(), out.unprofiled_counts.end());
  return out;
}

std::vector<ModeEstimate> estimate_modes(const Application& app, const PolicyConfig& cfg,
                                         const RuntimeProxy& proxy) {
  const auto prediction = predict_t_norm(app, proxy);
  std::vector<ModeEstimate> out;
  out.reserve(prediction.t_norm.size());
  double best_proxy = std::numeric_limits<double>::infinity();
  for (const auto& [g, t] : prediction.t_norm) {
    ModeEstimate e;
    e.app_id = app.app_id;
    e.gpu_count = g;
    e.t_norm = t;
    e.e_proxy = app.profile(g)->busy_power * t;
    e.within_tolerance = t <= 1.0 + cfg.tau;
    best_proxy = std::min(best_proxy, e.e_proxy);
    out.push_back(std::move(e));
  }
  for (auto& e : out) e.e_norm = e.e_proxy == best_proxy ? 1.0 : e.e_proxy / best_proxy;
  return out;
}

EstimateTable estimate_window(const WorkloadSpec& spec, const PolicyConfig& cfg, const RuntimeProxy& proxy) {
  EstimateTable table;
  for (const auto& app : spec.window()) table.emplace(app.app_id, estimate_modes(app, cfg, proxy));
  return table;
}

Seconds amortization_time(Joules profiling_energy, Watts power_delta) {
  if (!(power_delta > 0.0)) throw DomainError("no amortization path: power reduction must be positive");
  return profiling_energy / power_delta;
}

}  // namespace ecosched
