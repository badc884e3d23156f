#pragma once

#include <string>

#include "ecosched/engine.hpp"

namespace ecosched {

/// Static SVG with one lane per GPU index and one colored bar per
/// (application, GPU). Output depends only on the trace contents.
std::string render_gantt_svg(const ScheduleTrace& trace, const std::string& title = "schedule");

}  // namespace ecosched
