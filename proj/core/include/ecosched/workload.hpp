#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ecosched/types.hpp"

namespace ecosched {

/// Returns one human-readable entry per violated invariant; empty when valid.
std::vector<std::string> validate(const WorkloadSpec& spec);

/// Parses and validates a workload document.
/// Throws ParseError (with line context) or ValidationError.
WorkloadSpec parse_workload(std::string_view json_text);
WorkloadSpec load_workload(const std::filesystem::path& path);

/// Canonical JSON encoding accepted by parse_workload.
std::string serialize_workload(const WorkloadSpec& spec);

}  // namespace ecosched
