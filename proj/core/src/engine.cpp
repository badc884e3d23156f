#include "ecosched/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <fmt/format.h>

#include "ecosched/error.hpp"
#include "ecosched/workload.hpp"

namespace ecosched {

Seconds effective_runtime(const Application& app, int gpu_count, bool numa_span, bool corunners_present) {
  const auto* p = app.profile(gpu_count);
  if (!p) throw EngineFault(fmt::format("app '{}' has no profile for {} GPUs", app.app_id, gpu_count));
  Seconds t = p->true_runtime;
  if (numa_span) t *= app.cross_numa_slowdown;
  if (corunners_present) t *= app.corun_slowdown;
  return t;
}

int numa_domain_of_gpu(int gpu, int total_gpus, int numa_domains) {
  return static_cast<int>(static_cast<long long>(gpu) * numa_domains / total_gpus);
}

NodeSimulator::NodeSimulator(const WorkloadSpec& spec, bool record_trace)
    : spec_(&spec),
      record_(record_trace),
      gpu_busy_(static_cast<std::size_t>(spec.platform.total_gpus), 0),
      domain_busy_(static_cast<std::size_t>(spec.platform.numa_domains), 0) {
  const auto n = spec.window().size();
  waiting_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) waiting_.push_back(i);
}

int NodeSimulator::free_gpus() const {
  return static_cast<int>(std::count(gpu_busy_.begin(), gpu_busy_.end(), 0));
}

int NodeSimulator::free_numa_domains() const {
  return static_cast<int>(std::count(domain_busy_.begin(), domain_busy_.end(), 0));
}

SchedulerView NodeSimulator::view(const EstimateTable* estimates) const {
  SchedulerView v;
  v.g_free = free_gpus();
  v.free_numa_domains = free_numa_domains();
  v.total_gpus = spec_->platform.total_gpus;
  v.running_jobs = static_cast<int>(running_.size());
  v.event_index = event_index_;
  v.clock = clock_;
  const auto window = spec_->window();
  v.waiting.reserve(waiting_.size());
  for (auto i : waiting_) {
    WaitingApp w;
    w.app_id = window[i].app_id;
    w.queue_index = i;
    if (estimates) {
      if (auto it = estimates->find(w.app_id); it != estimates->end()) w.modes = it->second;
    }
    v.waiting.push_back(std::move(w));
  }
  return v;
}

std::size_t NodeSimulator::index_of(const std::string& app_id) const {
  const auto window = spec_->window();
  for (std::size_t i = 0; i < window.size(); ++i)
    if (window[i].app_id == app_id) return i;
  throw EngineFault(fmt::format("launch of unknown application '{}'", app_id));
}

void NodeSimulator::launch(std::span<const Mode> modes) {
  if (modes.empty()) throw EngineFault("empty launch set");
  const auto window = spec_->window();

  std::set<std::size_t> seen;
  int gpus_needed = 0;
  for (const auto& m : modes) {
    const auto idx = index_of(m.app_id);
    if (!seen.insert(idx).second) throw EngineFault(fmt::format("'{}' launched twice in one action", m.app_id));
    if (std::find(waiting_.begin(), waiting_.end(), idx) == waiting_.end())
      throw EngineFault(fmt::format("'{}' is not waiting", m.app_id));
    if (!window[idx].profile(m.gpu_count))
      throw EngineFault(fmt::format("'{}' has no {}-GPU mode", m.app_id, m.gpu_count));
    if (m.gpu_count < 1) throw EngineFault(fmt::format("'{}' launched with {} GPUs", m.app_id, m.gpu_count));
    gpus_needed += m.gpu_count;
  }
  if (gpus_needed > free_gpus())
    throw EngineFault(fmt::format("action needs {} GPUs but only {} are free", gpus_needed, free_gpus()));
  if (static_cast<int>(modes.size()) > free_numa_domains())
    throw EngineFault(fmt::format("action launches {} apps but only {} NUMA domains are free", modes.size(),
                                  free_numa_domains()));

  const int total = spec_->platform.total_gpus;
  const int domains = spec_->platform.numa_domains;
  for (const auto& m : modes) {
    const auto idx = index_of(m.app_id);
    const Application& app = window[idx];
    RunningJob job;
    job.app_index = idx;
    job.gpu_count = m.gpu_count;
    for (int g = 0; g < total && static_cast<int>(job.gpus.size()) < m.gpu_count; ++g) {
      if (!gpu_busy_[static_cast<std::size_t>(g)]) {
        gpu_busy_[static_cast<std::size_t>(g)] = 1;
        job.gpus.push_back(g);
      }
    }
    for (int d = 0; d < domains; ++d) {
      if (!domain_busy_[static_cast<std::size_t>(d)]) {
        domain_busy_[static_cast<std::size_t>(d)] = 1;
        job.numa_domain = d;
        break;
      }
    }
    job.cross_numa = numa_domain_of_gpu(job.gpus.front(), total, domains) !=
                     numa_domain_of_gpu(job.gpus.back(), total, domains);
    job.start = clock_;
    job.base_runtime = effective_runtime(app, m.gpu_count, job.cross_numa, false);
    job.completion = job.start + job.base_runtime;
    job.busy_power = app.profile(m.gpu_count)->busy_power;
    waiting_.erase(std::find(waiting_.begin(), waiting_.end(), idx));
    if (record_) events_.push_back({clock_, EventKind::kLaunch, app.app_id, job.gpu_count, job.numa_domain, job.gpus});
    running_.push_back(std::move(job));
  }

  // Co-run slowdown sticks to any job that ever shares the node.
  if (running_.size() >= 2) {
    for (auto& job : running_) {
      if (job.corun) continue;
      job.corun = true;
      job.completion = job.start + job.base_runtime * window[job.app_index].corun_slowdown;
    }
  }
}

void NodeSimulator::advance() {
  if (running_.empty()) throw EngineFault("advance with no running jobs");
  const auto window = spec_->window();
  Seconds next = std::numeric_limits<Seconds>::infinity();
  for (const auto& j : running_) next = std::min(next, j.completion);

  const int total = spec_->platform.total_gpus;
  int busy = 0;
  Watts active = 0.0;
  for (const auto& j : running_) {
    busy += j.gpu_count;
    active += j.busy_power;
  }
  const int idle = total - busy;
  const Watts idle_power = idle * spec_->platform.idle_power_per_gpu;
  const Seconds dt = next - clock_;
  if (dt > 0.0) {
    active_energy_ += active * dt;
    idle_energy_ += idle_power * dt;
    busy_gpu_seconds_ += busy * dt;
    if (record_) {
      TraceInterval iv;
      iv.t_start = clock_;
      iv.t_end = next;
      for (const auto& j : running_) iv.running.push_back({window[j.app_index].app_id, j.gpus});
      std::sort(iv.running.begin(), iv.running.end(),
                [](const RunningSlot& a, const RunningSlot& b) { return a.gpus < b.gpus; });
      iv.busy_gpus = busy;
      iv.idle_gpus = idle;
      iv.active_power = active;
      iv.idle_power = idle_power;
      intervals_.push_back(std::move(iv));
    }
  }
  clock_ = next;

  std::vector<RunningJob> done;
  for (auto it = running_.begin(); it != running_.end();) {
    if (it->completion == next) {
      done.push_back(std::move(*it));
      it = running_.erase(it);
    } else {
      ++it;
    }
  }
  std::sort(done.begin(), done.end(), [&](const RunningJob& a, const RunningJob& b) {
    return window[a.app_index].app_id < window[b.app_index].app_id;
  });
  for (auto& j : done) {
    for (int g : j.gpus) gpu_busy_[static_cast<std::size_t>(g)] = 0;
    domain_busy_[static_cast<std::size_t>(j.numa_domain)] = 0;
    if (record_) {
      const auto& id = window[j.app_index].app_id;
      events_.push_back({clock_, EventKind::kFinish, id, j.gpu_count, j.numa_domain, j.gpus});
      AppRecord rec;
      rec.app_id = id;
      rec.gpu_count = j.gpu_count;
      rec.numa_domain = j.numa_domain;
      rec.gpus = j.gpus;
      rec.cross_numa = j.cross_numa;
      rec.corun = j.corun;
      rec.start = j.start;
      rec.end = j.completion;
      rec.runtime = j.completion - j.start;
      rec.busy_power = j.busy_power;
      rec.active_energy = j.busy_power * rec.runtime;
      finished_.push_back(std::move(rec));
    }
  }
  ++event_index_;
}

void NodeSimulator::drain() {
  while (!running_.empty()) advance();
}

ScheduleTrace NodeSimulator::trace() const {
  ScheduleTrace t;
  t.total_gpus = spec_->platform.total_gpus;
  t.events = events_;
  t.intervals = intervals_;
  t.makespan = clock_;
  for (const auto& rec : finished_) t.per_app.emplace(rec.app_id, rec);
  return t;
}

SimResult simulate(const WorkloadSpec& spec, const PolicyConfig& cfg, const SimOptions& options) {
  auto policy = make_policy(spec, cfg);
  EstimateTable estimates;
  if (cfg.kind == PolicyKind::kEcoSched) estimates = estimate_window(spec, cfg);
  auto result = simulate(spec, *policy, cfg.kind == PolicyKind::kEcoSched ? &estimates : nullptr, options);
  result.estimates = std::move(estimates);
  return result;
}

SimResult simulate(const WorkloadSpec& spec, Policy& policy, const EstimateTable* estimates,
                   const SimOptions& options) {
  if (auto violations = validate(spec); !violations.empty()) throw ValidationError(std::move(violations));

  NodeSimulator sim(spec);
  while (!sim.finished()) {
    while (!sim.waiting().empty()) {
      auto action = policy.select(sim.view(estimates));
      if (!action) break;
      try {
        sim.launch(action->modes);
      } catch (const EngineFault& e) {
        throw EngineFault(fmt::format("policy '{}' at event {} (t={}): {}", to_string(policy.kind()),
                                      sim.event_index(), sim.clock(), e.what()));
      }
    }
    if (sim.running().empty()) {
      if (!sim.waiting().empty())
        throw EngineFault(fmt::format("policy '{}' left the node idle with {} jobs waiting at t={}",
                                      to_string(policy.kind()), sim.waiting().size(), sim.clock()));
      break;
    }
    sim.advance();
  }

  SimResult r;
  r.policy = policy.kind();
  r.trace = sim.trace();
  r.active_energy = sim.active_energy();
  r.idle_energy = sim.idle_energy();
  r.makespan = sim.clock();
  for (const auto& app : spec.window()) r.profiling_energy += app.profiling_energy();
  r.profiling_included = options.include_profiling_energy;
  r.total_energy = r.active_energy + r.idle_energy + (r.profiling_included ? r.profiling_energy : 0.0);
  r.edp = r.total_energy * r.makespan;
  for (const auto& iv : r.trace.intervals) {
    r.busy_gpu_seconds += iv.busy_gpus * iv.duration();
    r.idle_gpu_seconds += iv.idle_gpus * iv.duration();
  }
  for (const auto& [id, rec] : r.trace.per_app) {
    const Seconds solo = spec.find(id)->performance_optimal().true_runtime;
    r.perf_loss_pct[id] = 100.0 * (rec.runtime - solo) / solo;
  }
  return r;
}

double conservation_error(const SimResult& r) {
  auto rel = [](double a, double b) {
    const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
    return std::abs(a - b) / scale;
  };
  const double gpu_seconds = r.trace.total_gpus * r.makespan;
  double per_app_active = 0.0;
  for (const auto& [_, rec] : r.trace.per_app) per_app_active += rec.active_energy;
  double interval_energy = 0.0;
  Seconds covered = 0.0;
  for (const auto& iv : r.trace.intervals) {
    interval_energy += (iv.active_power + iv.idle_power) * iv.duration();
    covered += iv.duration();
  }
  const double base_total = r.total_energy - (r.profiling_included ? r.profiling_energy : 0.0);
  double err = 0.0;
  if (r.makespan > 0.0 || gpu_seconds > 0.0) {
    err = std::max(err, rel(r.busy_gpu_seconds + r.idle_gpu_seconds, gpu_seconds));
    err = std::max(err, rel(covered, r.makespan));
  }
  if (base_total > 0.0) {
    err = std::max(err, rel(base_total, r.active_energy + r.idle_energy));
    err = std::max(err, rel(base_total, interval_energy));
    err = std::max(err, rel(r.active_energy, per_app_active));
  }
  return err;
}

}  // namespace ecosched
