// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <fmt/format.h>

#include "brute_force.hpp"
#include "builders.hpp"
#include "commands.hpp"
#include "ecosched/engine.hpp"
#include "ecosched/generator.hpp"
#include "ecosched/metrics.hpp"
#include "ecosched/oracle.hpp"
#include "ecosched/perf_model.hpp"
#include "ecosched/policy.hpp"
#include "ecosched/workload.hpp"

using namespace ecosched;
using namespace ecosched::testing;
namespace fs = std::filesystem;

namespace {

constexpr PolicyKind kOnline[] = {PolicyKind::kEcoSched, PolicyKind::kMarbleLike, PolicyKind::kSequentialOptimalGpu,
                                  PolicyKind::kSequentialMaxGpu};

struct Outcome {
  bool ok = true;
  std::string detail;
};

bool rel_eq(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), 1.0}); }

// Every simulation run by the suite is checked for conservation here.
struct ConservationLog {
  std::size_t runs = 0;
  std::size_t violations = 0;
  void check(const SimResult& r) {
    ++runs;
    const double gpu_seconds = r.trace.total_gpus * r.makespan;
    const bool gpu_ok = rel_eq(r.busy_gpu_seconds + r.idle_gpu_seconds, gpu_seconds, 1e-9);
    const double base = r.total_energy - (r.profiling_included ? r.profiling_energy : 0.0);
    const bool energy_ok = rel_eq(base, r.active_energy + r.idle_energy, 1e-9);
    if (!gpu_ok || !energy_ok || conservation_error(r) > 1e-9) ++violations;
  }
} conservation;

SimResult run(const WorkloadSpec& spec, PolicyKind kind, double lambda = 1.0, double tau = 0.10) {
  PolicyConfig cfg;
  cfg.kind = kind;
  cfg.lambda = lambda;
  cfg.tau = tau;
  auto r = simulate(spec, cfg);
  conservation.check(r);
  return r;
}

std::vector<WorkloadSpec> oracle_instances() {
  std::vector<WorkloadSpec> out;
  for (std::uint64_t seed = 0; out.size() < 200; ++seed) {
    RandomWorkloadParams p;
    p.min_apps = 1;
    p.max_apps = 4;
    p.max_modes = 2;
    p.total_gpus = 1 + static_cast<int>(seed % 4);
    p.numa_domains = std::min(p.total_gpus, 1 + static_cast<int>((seed / 4) % 2));
    p.interference = seed % 2 == 1;
    out.push_back(random_workload(1000 + seed, p));
  }
  return out;
}

Outcome amortization() {
  const double a = amortization_time(64000, 341) / 60.0;
  const double b = amortization_time(34000, 210) / 60.0;
  return {std::abs(a - 3.13) <= 0.01 && std::abs(b - 2.70) <= 0.01,
          fmt::format("{:.4f} min, {:.4f} min", a, b)};
}

Outcome edp_composition() {
  const double v = composed_edp_saving(14.8, 30.1);
  return {std::abs(v - 40.4) <= 0.1, fmt::format("composed EDP saving {:.4f}%", v)};
}

Outcome score_examples() {
  SchedulerView v;
  v.g_free = 4;
  v.total_gpus = 4;
  v.free_numa_domains = 2;
  const std::vector<Mode> perfect{{"a", 2, 1.0}, {"b", 2, 1.0}};
  const std::vector<Mode> single{{"a", 2, 1.2}};
  const std::vector<Mode> pair{{"a", 2, 1.0}, {"b", 2, 1.3}};
  const auto s0 = score(perfect, v, 1.0);
  const auto s1 = score(single, v, 1.0);
  const auto s2 = score(pair, v, 2.0);
  auto close = [](double got, double want) { return want == 0.0 ? got == 0.0 : rel_eq(got, want, 1e-12); };
  const bool ok = close(s0.r_energy, 0) && close(s0.idle_frac, 0) && close(s0.score, 0) && close(s1.r_energy, 0.2) &&
                  close(s1.idle_frac, 0.5) && close(s1.score, 0.7) && close(s2.r_energy, 0.15) &&
                  close(s2.idle_frac, 0) && close(s2.score, 0.15);
  return {ok, fmt::format("S = {}, {}, {}", s0.score, s1.score, s2.score)};
}

Outcome enumeration_equivalence() {
  int mismatches = 0;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const auto v = random_view(seed, 4, 3);
    const auto actions = enumerate_actions(v);
    const auto sets = as_mode_sets(actions);
    if (sets != brute_force_actions(v) || sets.size() != actions.size()) ++mismatches;
  }
  return {mismatches == 0, fmt::format("500 views, {} mismatches", mismatches)};
}

Outcome oracle_optimality(const std::vector<WorkloadSpec>& instances, std::vector<OraclePlan>& plans) {
  int mismatches = 0, incomplete = 0;
  for (const auto& spec : instances) {
    plans.push_back(solve(spec));
    if (!plans.back().complete) ++incomplete;
    const double ref = exhaustive_min_energy(spec).min_energy;
    if (!rel_eq(plans.back().objective_energy, ref, 1e-9)) ++mismatches;
    conservation.check(replay(plans.back(), spec));
  }
  return {mismatches == 0 && incomplete == 0,
          fmt::format("{} instances, {} mismatches, {} incomplete", instances.size(), mismatches, incomplete)};
}

Outcome dominance(const std::vector<WorkloadSpec>& instances, const std::vector<OraclePlan>& plans) {
  int violations = 0;
  for (std::size_t i = 0; i < instances.size(); ++i)
    for (auto k : kOnline)
      if (plans[i].objective_energy > run(instances[i], k).total_energy * (1.0 + 1e-12)) ++violations;
  return {violations == 0, fmt::format("{} comparisons, {} violations", instances.size() * 4, violations)};
}

Outcome case_study() {
  const auto spec = load_workload(fixture("case_study.json"));
  const auto eco = run(spec, PolicyKind::kEcoSched);
  const auto marble = run(spec, PolicyKind::kMarbleLike);
  const auto& apps = eco.trace.per_app;
  const bool downsized =
      apps.at("pot3d").gpu_count == 2 && apps.at("resnet50").gpu_count == 3 && apps.at("gpt2").gpu_count == 2;
  const double ms = makespan_improvement(eco.makespan, marble.makespan);
  const double en = energy_saving(eco.total_energy, marble.total_energy);
  // Targets from the independent reference model in tests/oracles.
  const double ms_target = 30.909090909, en_target = 18.0672002074;
  const bool ok = downsized && eco.makespan < marble.makespan && eco.total_energy < marble.total_energy &&
                  std::abs(ms - ms_target) <= 5.0 && std::abs(en - en_target) <= 5.0;
  return {ok, fmt::format("modes pot3d@{} resnet50@{} gpt2@{}; makespan -{:.2f}%, energy -{:.2f}% vs marble_like",
                          apps.at("pot3d").gpu_count, apps.at("resnet50").gpu_count, apps.at("gpt2").gpu_count, ms, en)};
}

Outcome determinism() {
  const auto dir = fs::temp_directory_path() / "ecosched_acceptance_det";
  fs::remove_all(dir);
  std::string files[2][3];
  for (int i = 0; i < 2; ++i) {
    cli::RunConfig cfg;
    cfg.workload_path = fixture("case_study.json");
    cfg.output_dir = dir / std::to_string(i);
    cfg.emit = {cli::Emit::kTraceCsv, cli::Emit::kEventsJson, cli::Emit::kReportJson};
    std::ostringstream out, err;
    if (cli::cmd_simulate(cfg, out, err) != cli::kExitOk) return {false, "cmd_simulate failed: " + err.str()};
    int k = 0;
    for (auto name : {"trace.csv", "events.json", "report.json"}) {
      std::ifstream in(cfg.output_dir / name, std::ios::binary);
      std::ostringstream s;
      s << in.rdbuf();
      files[i][k++] = s.str();
    }
  }
  fs::remove_all(dir);
  bool same = true;
  for (int k = 0; k < 3; ++k) same = same && !files[0][k].empty() && files[0][k] == files[1][k];
  return {same, same ? "trace.csv, events.json, report.json identical" : "artifacts differ"};
}

Outcome lambda_tau_behavior() {
  int lambda_violations = 0, tau_violations = 0, fastest_violations = 0, marble_mismatches = 0, marble_checked = 0;

  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const auto v = random_view(seed + 5000, 4, 3);
    const double lambdas[] = {0.0, 0.25, 1.0, 4.0, 1e6};
    double prev = 2.0;
    for (double l : lambdas) {
      PolicyConfig cfg;
      cfg.lambda = l;
      const auto a = select_action(v, cfg);
      if (!a) break;
      if (a->idle_frac > prev + 1e-12) ++lambda_violations;
      prev = a->idle_frac;
    }
  }

  RandomWorkloadParams p;
  p.max_modes = 4;
  p.total_gpus = 8;
  p.numa_domains = 4;
  p.max_apps = 6;
  std::size_t apps_checked = 0;
  for (std::uint64_t seed = 0; apps_checked < 500; ++seed) {
    const auto spec = random_workload(seed + 9000, p);
    for (const auto& app : spec.applications) {
      if (apps_checked == 500) break;
      ++apps_checked;
      const double taus[] = {0.0, 0.02, 0.05, 0.1, 0.2, 0.5};
      std::vector<bool> prev;
      for (double t : taus) {
        PolicyConfig cfg;
        cfg.tau = t;
        const auto est = estimate_modes(app, cfg);
        for (std::size_t i = 0; i < prev.size(); ++i)
          if (prev[i] && !est[i].within_tolerance) ++tau_violations;
        prev.clear();
        for (const auto& e : est) prev.push_back(e.within_tolerance);
      }
    }
  }

  RandomWorkloadParams q;
  q.max_apps = 6;
  q.max_modes = 3;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto spec = random_workload(seed + 13000, q);
    const auto eco = run(spec, PolicyKind::kEcoSched, 1e6, 0.0);
    bool predictions_exact = true;
    for (const auto& [id, rec] : eco.trace.per_app) {
      const auto* app = spec.find(id);
      PolicyConfig cfg;
      cfg.tau = 0.0;
      const auto est = estimate_modes(*app, cfg);
      int fastest = 0, n_fastest = 0;
      for (const auto& e : est) {
        if (e.t_norm == 1.0) {
          fastest = e.gpu_count;
          ++n_fastest;
        }
        if (e.gpu_count == rec.gpu_count && e.t_norm != 1.0) ++fastest_violations;
      }
      if (n_fastest != 1 || fastest != app->performance_optimal().gpu_count) predictions_exact = false;
    }
    if (predictions_exact) {
      ++marble_checked;
      const auto marble = run(spec, PolicyKind::kMarbleLike);
      for (const auto& [id, rec] : eco.trace.per_app)
        if (marble.trace.per_app.at(id).gpu_count != rec.gpu_count) {
          ++marble_mismatches;
          break;
        }
    }
  }
  const bool ok = lambda_violations == 0 && tau_violations == 0 && fastest_violations == 0 && marble_mismatches == 0 &&
                  marble_checked > 0;
  return {ok, fmt::format("lambda violations {}, tau violations {}, non-fastest picks {}, GPU-count mismatches vs "
                          "marble_like {}/{}",
                          lambda_violations, tau_violations, fastest_violations, marble_mismatches, marble_checked)};
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](int id, const char* name, double limit_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (limit_s > 0 && secs > limit_s) {
      o.ok = false;
      o.detail += fmt::format(" (over the {:.0f} s limit)", limit_s);
    }
    if (!o.ok) ++failed;
    std::cout << fmt::format("[{}] criterion {:>2}: {:<28} {} [{:.2f} s]\n", o.ok ? "PASS" : "FAIL", id, name,
                             o.detail, secs)
              << std::flush;
  };

  const auto instances = oracle_instances();
  std::vector<OraclePlan> plans;

  report(1, "amortization arithmetic", 1, amortization);
  report(2, "EDP composition", 1, edp_composition);
  report(3, "score function", 1, score_examples);
  report(4, "enumeration equivalence", 10, enumeration_equivalence);
  report(5, "oracle optimality", 60, [&] { return oracle_optimality(instances, plans); });
  report(6, "policy dominance", 0, [&] {
    if (plans.size() != instances.size()) return Outcome{false, "oracle plans unavailable"};
    return dominance(instances, plans);
  });
  report(7, "case-study fixture", 5, case_study);
  report(9, "determinism", 0, determinism);
  report(10, "lambda/tau behavior", 0, lambda_tau_behavior);
  report(8, "conservation", 0, [] {
    return Outcome{conservation.violations == 0 && conservation.runs > 0,
                   fmt::format("{} runs, {} violations", conservation.runs, conservation.violations)};
  });

  std::cout << (failed == 0 ? "all criteria passed\n" : fmt::format("{} criteria failed\n", failed));
  return failed;
}
