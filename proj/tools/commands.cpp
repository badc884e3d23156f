#include "commands.hpp"

#include <fstream>
#include <future>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "ecosched/engine.hpp"
#include "ecosched/error.hpp"
#include "ecosched/gantt.hpp"
#include "ecosched/generator.hpp"
#include "ecosched/metrics.hpp"
#include "ecosched/oracle.hpp"
#include "ecosched/trace_io.hpp"
#include "ecosched/workload.hpp"

namespace ecosched::cli {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kAutoOracleMaxApps = 7;
constexpr std::size_t kAutoOracleMaxModes = 4;

struct IoError : Error {
  using Error::Error;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

// Maps library exceptions onto exit codes.
template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const EngineFault& e) {
    err << "engine fault: " << e.what() << "\n";
    return kExitEngine;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
  } catch (const ValidationError& e) {
    err << "invalid workload:\n";
    for (const auto& v : e.violations()) err << "  - " << v << "\n";
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
  }
  return kExitInput;
}

std::string summary_line(const SimResult& r) {
  return fmt::format("{}: energy {:.2f} J, makespan {:.2f} s, EDP {:.6e} J*s (active {:.2f} J, idle {:.2f} J{})",
                     to_string(r.policy), r.total_energy, r.makespan, r.edp, r.active_energy, r.idle_energy,
                     r.profiling_included ? fmt::format(", profiling {:.2f} J", r.profiling_energy) : "");
}

std::string per_app_table(const SimResult& r) {
  std::string out = fmt::format("{:<20} {:>5} {:>10} {:>10} {:>10} {:>10} {:>14}\n", "app", "gpus", "start_s",
                                "end_s", "runtime_s", "loss_%", "energy_j");
  for (const auto& [id, rec] : r.trace.per_app) {
    out += fmt::format("{:<20} {:>5} {:>10.2f} {:>10.2f} {:>10.2f} {:>10.2f} {:>14.2f}\n", id, rec.gpu_count,
                       rec.start, rec.end, rec.runtime, r.perf_loss_pct.at(id), rec.active_energy);
  }
  out += fmt::format("total energy {:.2f} J (active {:.2f}, idle {:.2f}), makespan {:.2f} s, EDP {:.6e} J*s\n",
                     r.total_energy, r.active_energy, r.idle_energy, r.makespan, r.edp);
  return out;
}

bool small_for_oracle(const WorkloadSpec& spec) {
  const auto window = spec.window();
  if (window.size() > kAutoOracleMaxApps) return false;
  for (const auto& app : window)
    if (app.profiles.size() > kAutoOracleMaxModes) return false;
  return true;
}

}  // namespace

std::optional<Emit> parse_emit(const std::string& name) {
  if (name == "trace_csv") return Emit::kTraceCsv;
  if (name == "events_json") return Emit::kEventsJson;
  if (name == "gantt_svg") return Emit::kGanttSvg;
  if (name == "report_json") return Emit::kReportJson;
  if (name == "report_table") return Emit::kReportTable;
  return std::nullopt;
}

std::string emit_file_name(Emit e) {
  switch (e) {
    case Emit::kTraceCsv: return "trace.csv";
    case Emit::kEventsJson: return "events.json";
    case Emit::kGanttSvg: return "gantt.svg";
    case Emit::kReportJson: return "report.json";
    case Emit::kReportTable: return "report.txt";
  }
  return "out";
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (cfg.emit.empty()) throw ConfigError("--emit must name at least one artifact");
    const auto spec = load_workload(cfg.workload_path);
    const SimOptions options{cfg.include_profiling_energy};

    SimResult result;
    if (cfg.policy.kind == PolicyKind::kOracleReplay) {
      OraclePlan plan;
      if (cfg.plan_path) {
        plan = parse_plan_json(read_file(*cfg.plan_path));
      } else {
        SolveLimits limits;
        limits.time_budget_s = cfg.oracle_time_budget_s;
        plan = solve(spec, limits);
        if (!plan.complete) err << "warning: oracle search hit its budget; replaying best plan found\n";
      }
      result = replay(plan, spec, options);
    } else {
      result = simulate(spec, cfg.policy, options);
    }

    fs::create_directories(cfg.output_dir);
    const auto name = cfg.workload_path.stem().string();
    for (Emit e : cfg.emit) {
      const auto path = cfg.output_dir / emit_file_name(e);
      switch (e) {
        case Emit::kTraceCsv: write_file(path, trace_to_csv(result.trace)); break;
        case Emit::kEventsJson: write_file(path, events_to_json(result.trace)); break;
        case Emit::kGanttSvg:
          write_file(path, render_gantt_svg(result.trace, name + " / " + std::string(to_string(result.policy))));
          break;
        case Emit::kReportJson: write_file(path, result_to_json(result, cfg.policy, name)); break;
        case Emit::kReportTable: write_file(path, per_app_table(result)); break;
      }
    }
    out << summary_line(result) << "\n";
    return kExitOk;
  });
}

int cmd_compare(const CompareConfig& cfg, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto spec = load_workload(cfg.workload_path);
    const SimOptions options{cfg.include_profiling_energy};
    const auto name = cfg.workload_path.stem().string();
    PolicyConfig base_cfg;
    base_cfg.lambda = cfg.lambda;
    base_cfg.tau = cfg.tau;

    const bool with_oracle =
        cfg.oracle == OracleMode::kOn || (cfg.oracle == OracleMode::kAuto && small_for_oracle(spec));

    // Runs are independent; results are gathered in a fixed order.
    const std::vector<PolicyKind> kinds{PolicyKind::kEcoSched, PolicyKind::kMarbleLike,
                                        PolicyKind::kSequentialOptimalGpu, PolicyKind::kSequentialMaxGpu};
    std::vector<std::future<PolicyRun>> pending;
    for (auto kind : kinds) {
      pending.push_back(std::async(std::launch::async, [&, kind] {
        PolicyConfig c = base_cfg;
        c.kind = kind;
        return PolicyRun{std::string(to_string(kind)), simulate(spec, c, options), true};
      }));
    }
    std::future<PolicyRun> oracle_run;
    if (with_oracle) {
      oracle_run = std::async(std::launch::async, [&] {
        SolveLimits limits;
        limits.time_budget_s = cfg.oracle_time_budget_s;
        const auto plan = solve(spec, limits);
        return PolicyRun{"oracle", replay(plan, spec, options), plan.complete};
      });
    }
    std::vector<PolicyRun> runs;
    for (auto& f : pending) runs.push_back(f.get());
    if (with_oracle) {
      runs.push_back(oracle_run.get());
      if (!runs.back().complete)
        err << "warning: oracle search hit its budget after " << cfg.oracle_time_budget_s
            << " s; reporting best plan found\n";
    }

    fs::create_directories(cfg.output_dir);
    for (const auto& run : runs) {
      PolicyConfig c = base_cfg;
      c.kind = run.result.policy;
      write_file(cfg.output_dir / "results" / (run.name + ".json"), result_to_json(run.result, c, name));
    }
    std::vector<ComparisonReport> reports;
    for (const char* baseline : {"sequential_optimal_gpu", "sequential_max_gpu"})
      reports.push_back(compare_runs(runs, baseline, spec, base_cfg, name));
    write_file(cfg.output_dir / "comparison.json", report_to_json(reports));
    const auto table = report_to_table(reports);
    write_file(cfg.output_dir / "comparison.txt", table);
    out << table;
    return kExitOk;
  });
}

int cmd_gantt(const fs::path& trace_path, const fs::path& svg_path, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto text = read_file(trace_path);
    const bool csv = trace_path.extension() == ".csv" || text.rfind("t_start,", 0) == 0;
    const auto trace = csv ? parse_trace_csv(text) : parse_events_json(text);
    write_file(svg_path, render_gantt_svg(trace, trace_path.stem().string()));
    out << "wrote " << svg_path.string() << " (" << trace.per_app.size() << " jobs, makespan " << trace.makespan
        << " s)\n";
    return kExitOk;
  });
}

int cmd_validate(const fs::path& workload_path, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto spec = load_workload(workload_path);
    out << workload_path.string() << ": ok (" << spec.applications.size() << " applications, window "
        << spec.window_size << ", M=" << spec.platform.total_gpus << ", K=" << spec.platform.numa_domains << ")\n";
    return kExitOk;
  });
}

namespace {

int cmd_oracle(const fs::path& workload, const fs::path& plan_out, const SolveLimits& limits, std::ostream& out,
               std::ostream& err) {
  return guarded(err, [&] {
    const auto spec = load_workload(workload);
    SolveStats stats;
    const auto plan = solve(spec, limits, &stats);
    write_file(plan_out, plan_to_json(plan));
    out << fmt::format("oracle: energy {:.2f} J, makespan {:.2f} s, {} ({} nodes)\n", plan.objective_energy,
                       plan.objective_makespan, plan.complete ? "optimal" : "incomplete", stats.nodes);
    return kExitOk;
  });
}

int cmd_generate(std::uint64_t seed, const RandomWorkloadParams& params, const fs::path& path, std::ostream& out,
                 std::ostream& err) {
  return guarded(err, [&] {
    const auto spec = random_workload(seed, params);
    write_file(path, serialize_workload(spec));
    out << "wrote " << path.string() << " (" << spec.applications.size() << " applications)\n";
    return kExitOk;
  });
}

std::set<Emit> parse_emit_list(const std::string& list) {
  std::set<Emit> emit;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    auto e = parse_emit(item);
    if (!e) throw ConfigError("unknown --emit entry '" + item + "'");
    emit.insert(*e);
  }
  return emit;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Energy-aware co-scheduling simulator for multi-GPU nodes", "ecosched"};
  app.require_subcommand(1);

  std::string workload, policy = "ecosched", out_dir = ".", emit = "trace_csv,report_json", plan;
  double lambda = 1.0, tau = 0.10, budget = 60.0;
  bool profiling = false;

  auto* sim = app.add_subcommand("simulate", "Run one policy and write trace/report artifacts");
  sim->add_option("--workload", workload, "Workload JSON file")->required();
  sim->add_option("--policy", policy, "ecosched | sequential_max_gpu | sequential_optimal_gpu | marble_like | oracle_replay");
  sim->add_option("--lambda", lambda, "Idle-capacity penalty weight")->check(CLI::NonNegativeNumber);
  sim->add_option("--tau", tau, "Accepted predicted slowdown")->check(CLI::NonNegativeNumber);
  sim->add_option("--out", out_dir, "Output directory");
  sim->add_option("--emit", emit, "Comma list of trace_csv,events_json,gantt_svg,report_json,report_table");
  sim->add_flag("--include-profiling-energy", profiling, "Add profiling energy to total energy");
  sim->add_option("--plan", plan, "Oracle plan JSON for oracle_replay");
  sim->add_option("--oracle-time-budget", budget, "Seconds for the oracle search (oracle_replay without --plan)");

  std::string oracle_mode = "auto";
  auto* cmp = app.add_subcommand("compare", "Run every policy and report savings against both sequential baselines");
  cmp->add_option("--workload", workload, "Workload JSON file")->required();
  cmp->add_option("--lambda", lambda)->check(CLI::NonNegativeNumber);
  cmp->add_option("--tau", tau)->check(CLI::NonNegativeNumber);
  cmp->add_option("--out", out_dir, "Output directory");
  cmp->add_flag("--include-profiling-energy", profiling);
  cmp->add_option("--oracle", oracle_mode, "auto | on | off")->check(CLI::IsMember({"auto", "on", "off"}));
  cmp->add_option("--oracle-time-budget", budget, "Seconds for the oracle search");

  std::string trace, svg = "gantt.svg";
  auto* gantt = app.add_subcommand("gantt", "Render a trace (events JSON or interval CSV) as SVG");
  gantt->add_option("--trace", trace, "events.json or trace.csv")->required();
  gantt->add_option("--out", svg, "SVG output path");

  auto* val = app.add_subcommand("validate", "Check a workload file");
  val->add_option("--workload", workload)->required();

  std::string plan_out = "plan.json";
  std::uint64_t max_nodes = SolveLimits{}.max_nodes;
  auto* orc = app.add_subcommand("oracle", "Compute the energy-optimal plan");
  orc->add_option("--workload", workload)->required();
  orc->add_option("--out", plan_out, "Plan JSON output path");
  orc->add_option("--oracle-time-budget", budget);
  orc->add_option("--max-nodes", max_nodes);

  auto* rep = app.add_subcommand("replay", "Replay a plan through the simulator");
  rep->add_option("--workload", workload)->required();
  rep->add_option("--plan", plan)->required();
  rep->add_option("--out", out_dir);
  rep->add_option("--emit", emit);
  rep->add_flag("--include-profiling-energy", profiling);

  std::uint64_t seed = 1;
  RandomWorkloadParams gen_params;
  std::string gen_out = "workload.json";
  auto* gen = app.add_subcommand("generate", "Write a random workload for property tests");
  gen->add_option("--seed", seed)->required();
  gen->add_option("--min-apps", gen_params.min_apps);
  gen->add_option("--max-apps", gen_params.max_apps);
  gen->add_option("--gpus", gen_params.total_gpus);
  gen->add_option("--numa", gen_params.numa_domains);
  gen->add_option("--modes", gen_params.max_modes);
  gen->add_option("--idle-power", gen_params.idle_power_per_gpu);
  gen->add_flag("--interference", gen_params.interference);
  gen->add_option("--out", gen_out);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // argv[0]
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << "run with --help for usage\n";
    return kExitInput;
  }

  if (*sim || *rep) {
    return guarded(err, [&] {
      RunConfig cfg;
      cfg.workload_path = workload;
      cfg.output_dir = out_dir;
      cfg.emit = parse_emit_list(emit);
      cfg.include_profiling_energy = profiling;
      cfg.policy.lambda = lambda;
      cfg.policy.tau = tau;
      cfg.oracle_time_budget_s = budget;
      if (*rep) {
        cfg.policy.kind = PolicyKind::kOracleReplay;
      } else {
        auto kind = parse_policy_kind(policy);
        if (!kind) throw ConfigError("unknown policy '" + policy + "'");
        cfg.policy.kind = *kind;
      }
      if (!plan.empty()) cfg.plan_path = plan;
      return cmd_simulate(cfg, out, err);
    });
  }
  if (*cmp) {
    CompareConfig cfg;
    cfg.workload_path = workload;
    cfg.lambda = lambda;
    cfg.tau = tau;
    cfg.output_dir = out_dir;
    cfg.include_profiling_energy = profiling;
    cfg.oracle = oracle_mode == "on" ? OracleMode::kOn : oracle_mode == "off" ? OracleMode::kOff : OracleMode::kAuto;
    cfg.oracle_time_budget_s = budget;
    return cmd_compare(cfg, out, err);
  }
  if (*gantt) return cmd_gantt(trace, svg, out, err);
  if (*val) return cmd_validate(workload, out, err);
  if (*orc) {
    SolveLimits limits;
    limits.time_budget_s = budget;
    limits.max_nodes = max_nodes;
    return cmd_oracle(workload, plan_out, limits, out, err);
  }
  if (*gen) return cmd_generate(seed, gen_params, gen_out, out, err);
  return kExitInput;
}

}  // namespace ecosched::cli
