#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ecosched/types.hpp"

namespace ecosched::cli {

enum class Emit { kTraceCsv, kEventsJson, kGanttSvg, kReportJson, kReportTable };

std::optional<Emit> parse_emit(const std::string& name);
std::string emit_file_name(Emit e);

struct RunConfig {
  std::filesystem::path workload_path;
  PolicyConfig policy;
  std::filesystem::path output_dir = ".";
  std::set<Emit> emit{Emit::kTraceCsv, Emit::kReportJson};
  bool include_profiling_energy = false;
  std::optional<std::filesystem::path> plan_path;  // oracle_replay only
  double oracle_time_budget_s = 60.0;
};

enum class OracleMode { kAuto, kOn, kOff };

struct CompareConfig {
  std::filesystem::path workload_path;
  double lambda = 1.0;
  double tau = 0.10;
  std::filesystem::path output_dir = ".";
  bool include_profiling_energy = false;
  OracleMode oracle = OracleMode::kAuto;
  double oracle_time_budget_s = 60.0;
};

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;   // parse, validation, usage, I/O
inline constexpr int kExitEngine = 2;  // engine fault

int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_compare(const CompareConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_gantt(const std::filesystem::path& trace_path, const std::filesystem::path& svg_path, std::ostream& out,
              std::ostream& err);
int cmd_validate(const std::filesystem::path& workload_path, std::ostream& out, std::ostream& err);

/// Full command line (argv[0] included) dispatched to the subcommands.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ecosched::cli
