#include "ecosched/trace_io.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "ecosched/error.hpp"
#include "json_util.hpp"

namespace ecosched {

using detail::Json;

namespace {

std::string format_slot(const RunningSlot& s) {
  std::string out = s.app_id + "[";
  for (std::size_t i = 0; i < s.gpus.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(s.gpus[i]);
  }
  return out + "]";
}

Json gpus_json(const std::vector<int>& gpus) {
  Json arr = Json::array();
  for (int g : gpus) arr.push_back(g);
  return arr;
}

}  // namespace

std::string trace_to_csv(const ScheduleTrace& trace) {
  std::string out = "t_start,t_end,running,busy_gpus,idle_gpus,active_power_w,idle_power_w\n";
  for (const auto& iv : trace.intervals) {
    std::string running;
    for (const auto& s : iv.running) {
      if (!running.empty()) running += ';';
      running += format_slot(s);
    }
    out += fmt::format("{},{},{},{},{},{},{}\n", iv.t_start, iv.t_end, running, iv.busy_gpus, iv.idle_gpus,
                       iv.active_power, iv.idle_power);
  }
  return out;
}

std::string events_to_json(const ScheduleTrace& trace) {
  Json events = Json::array();
  for (const auto& e : trace.events) {
    events.push_back(Json{{"time_s", e.time},
                          {"kind", e.kind == EventKind::kLaunch ? "launch" : "finish"},
                          {"app_id", e.app_id},
                          {"gpu_count", e.gpu_count},
                          {"numa_domain", e.numa_domain},
                          {"gpus", gpus_json(e.gpus)}});
  }
  Json doc{{"total_gpus", trace.total_gpus}, {"makespan_s", trace.makespan}, {"events", std::move(events)}};
  return doc.dump(2) + "\n";
}

std::string result_to_json(const SimResult& r, const PolicyConfig& cfg, std::string_view workload_name) {
  Json per_app = Json::object();
  for (const auto& [id, rec] : r.trace.per_app) {
    per_app[id] = Json{{"gpu_count", rec.gpu_count},
                       {"gpus", gpus_json(rec.gpus)},
                       {"numa_domain", rec.numa_domain},
                       {"cross_numa", rec.cross_numa},
                       {"corun", rec.corun},
                       {"start_s", rec.start},
                       {"end_s", rec.end},
                       {"runtime_s", rec.runtime},
                       {"busy_power_w", rec.busy_power},
                       {"active_energy_j", rec.active_energy},
                       {"perf_loss_pct", r.perf_loss_pct.at(id)}};
  }
  Json estimates = Json::object();
  for (const auto& [id, modes] : r.estimates) {
    Json arr = Json::array();
    for (const auto& e : modes) {
      arr.push_back(Json{{"gpu_count", e.gpu_count},
                         {"t_norm", e.t_norm},
                         {"e_proxy", e.e_proxy},
                         {"e_norm", e.e_norm},
                         {"within_tolerance", e.within_tolerance}});
    }
    estimates[id] = std::move(arr);
  }
  Json intervals = Json::array();
  for (const auto& iv : r.trace.intervals) {
    Json running = Json::array();
    for (const auto& s : iv.running) running.push_back(Json{{"app_id", s.app_id}, {"gpus", gpus_json(s.gpus)}});
    intervals.push_back(Json{{"t_start_s", iv.t_start},
                             {"t_end_s", iv.t_end},
                             {"running", std::move(running)},
                             {"busy_gpus", iv.busy_gpus},
                             {"idle_gpus", iv.idle_gpus},
                             {"active_power_w", iv.active_power},
                             {"idle_power_w", iv.idle_power}});
  }
  Json doc{{"workload", std::string(workload_name)},
           {"policy", std::string(to_string(r.policy))},
           {"lambda", cfg.lambda},
           {"tau", cfg.tau},
           {"total_gpus", r.trace.total_gpus},
           {"total_energy_j", r.total_energy},
           {"active_energy_j", r.active_energy},
           {"idle_energy_j", r.idle_energy},
           {"profiling_energy_j", r.profiling_energy},
           {"profiling_included", r.profiling_included},
           {"makespan_s", r.makespan},
           {"edp_js", r.edp},
           {"busy_gpu_seconds", r.busy_gpu_seconds},
           {"idle_gpu_seconds", r.idle_gpu_seconds},
           {"per_app", std::move(per_app)},
           {"estimates", std::move(estimates)},
           {"intervals", std::move(intervals)}};
  if (r.policy == PolicyKind::kMarbleLike)
    doc["note"] = "marble_like approximates Marble: performance-optimal GPU counts with utilization-greedy packing";
  return doc.dump(2) + "\n";
}

ScheduleTrace parse_events_json(std::string_view text) {
  using detail::Field;
  const auto doc = detail::parse_document(text);
  Field root(doc, "");
  root.expect_object({"total_gpus", "makespan_s", "events"});
  ScheduleTrace t;
  t.total_gpus = static_cast<int>(root.at("total_gpus").integer());
  t.makespan = root.at("makespan_s").number();
  if (t.total_gpus < 1) root.at("total_gpus").fail("must be >= 1");

  Field events = root.at("events");
  const auto n = events.array_size();
  std::map<std::string, AppRecord> open;
  for (std::size_t i = 0; i < n; ++i) {
    Field e = events.at(i);
    e.expect_object({"time_s", "kind", "app_id", "gpu_count", "numa_domain", "gpus"});
    TraceEvent ev;
    ev.time = e.at("time_s").number();
    const auto kind = e.at("kind").string();
    if (kind == "launch")
      ev.kind = EventKind::kLaunch;
    else if (kind == "finish")
      ev.kind = EventKind::kFinish;
    else
      e.at("kind").fail("expected 'launch' or 'finish'");
    ev.app_id = e.at("app_id").string();
    ev.gpu_count = static_cast<int>(e.at("gpu_count").integer());
    ev.numa_domain = static_cast<int>(e.at("numa_domain").integer());
    Field gpus = e.at("gpus");
    for (std::size_t k = 0; k < gpus.array_size(); ++k) {
      const int g = static_cast<int>(gpus.at(k).integer());
      if (g < 0 || g >= t.total_gpus) gpus.at(k).fail("gpu index out of range");
      ev.gpus.push_back(g);
    }
    if (ev.kind == EventKind::kLaunch) {
      AppRecord rec;
      rec.app_id = ev.app_id;
      rec.gpu_count = ev.gpu_count;
      rec.numa_domain = ev.numa_domain;
      rec.gpus = ev.gpus;
      rec.start = ev.time;
      if (!open.emplace(ev.app_id, rec).second) e.fail("application launched twice");
    } else {
      auto it = open.find(ev.app_id);
      if (it == open.end()) e.fail("finish without a matching launch");
      it->second.end = ev.time;
      it->second.runtime = ev.time - it->second.start;
      if (it->second.runtime < 0.0) e.fail("finish precedes launch");
      t.per_app.emplace(ev.app_id, std::move(it->second));
      open.erase(it);
    }
    t.events.push_back(std::move(ev));
  }
  if (!open.empty()) throw ParseError("events: '" + open.begin()->first + "' never finishes");
  return t;
}

namespace {

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.emplace_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

template <typename T>
T parse_num(const std::string& s, std::size_t line, const char* column) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError(fmt::format("column '{}': cannot parse '{}'", column, s), line);
  return v;
}

}  // namespace

ScheduleTrace parse_trace_csv(std::string_view text, int total_gpus) {
  ScheduleTrace t;
  auto lines = split(text, '\n');
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty() || lines.front() != "t_start,t_end,running,busy_gpus,idle_gpus,active_power_w,idle_power_w")
    throw ParseError("unexpected CSV header", 1);

  std::map<std::string, AppRecord> open;
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    const std::size_t line_no = ln + 1;
    const auto cols = split(lines[ln], ',');
    if (cols.size() != 7) throw ParseError(fmt::format("expected 7 columns, got {}", cols.size()), line_no);
    TraceInterval iv;
    iv.t_start = parse_num<double>(cols[0], line_no, "t_start");
    iv.t_end = parse_num<double>(cols[1], line_no, "t_end");
    iv.busy_gpus = parse_num<int>(cols[3], line_no, "busy_gpus");
    iv.idle_gpus = parse_num<int>(cols[4], line_no, "idle_gpus");
    iv.active_power = parse_num<double>(cols[5], line_no, "active_power_w");
    iv.idle_power = parse_num<double>(cols[6], line_no, "idle_power_w");
    if (iv.t_end < iv.t_start) throw ParseError("t_end precedes t_start", line_no);
    if (!cols[2].empty()) {
      for (const auto& entry : split(cols[2], ';')) {
        const auto open_br = entry.find('[');
        if (open_br == std::string::npos || entry.back() != ']')
          throw ParseError(fmt::format("malformed running entry '{}'", entry), line_no);
        RunningSlot slot;
        slot.app_id = entry.substr(0, open_br);
        const auto inner = entry.substr(open_br + 1, entry.size() - open_br - 2);
        for (const auto& g : split(inner, ' '))
          if (!g.empty()) slot.gpus.push_back(parse_num<int>(g, line_no, "running"));
        iv.running.push_back(std::move(slot));
      }
    }
    t.total_gpus = std::max(t.total_gpus, iv.busy_gpus + iv.idle_gpus);
    t.makespan = std::max(t.makespan, iv.t_end);

    for (const auto& s : iv.running) {
      auto it = open.find(s.app_id);
      if (it == open.end()) {
        AppRecord rec;
        rec.app_id = s.app_id;
        rec.gpus = s.gpus;
        rec.gpu_count = static_cast<int>(s.gpus.size());
        rec.start = iv.t_start;
        rec.end = iv.t_end;
        open.emplace(s.app_id, std::move(rec));
      } else {
        it->second.end = iv.t_end;
      }
    }
    t.intervals.push_back(std::move(iv));
  }
  if (total_gpus > 0) t.total_gpus = total_gpus;
  for (auto& [id, rec] : open) {
    rec.runtime = rec.end - rec.start;
    t.per_app.emplace(id, std::move(rec));
  }
  return t;
}

}  // namespace ecosched
