#pragma once

#include <string>
#include <string_view>

#include "ecosched/engine.hpp"

namespace ecosched {

/// One row per interval:
///   t_start,t_end,running,busy_gpus,idle_gpus,active_power_w,idle_power_w
/// `running` lists `app_id[gpu gpu ...]` entries separated by ';'.
std::string trace_to_csv(const ScheduleTrace& trace);

/// {"total_gpus", "makespan_s", "events": [{"time_s", "kind", "app_id",
///  "gpu_count", "numa_domain", "gpus"}]}
std::string events_to_json(const ScheduleTrace& trace);

/// Full run report: totals, per-app records, estimates, events, intervals.
std::string result_to_json(const SimResult& result, const PolicyConfig& cfg, std::string_view workload_name);

/// Rebuilds launch/finish pairs from either export. Throws ParseError.
ScheduleTrace parse_events_json(std::string_view text);
ScheduleTrace parse_trace_csv(std::string_view text, int total_gpus = 0);

}  // namespace ecosched
