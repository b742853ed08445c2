// Copyright 2026 The hima-sim Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hima/bench.hpp"

#include <algorithm>
#include <map>

#include <fmt/format.h>

#include "hima/error.hpp"

namespace hima {

void HostModel::check() const {
  if (t_pre_ns < 0 || t_post_ns < 0 || t_send_ns < 0 || t_recv_ns < 0)
    throw Error(Errc::kInvalidArgument, "host stage times must be non-negative");
  if (preprocess_workers == 0) throw Error(Errc::kInvalidArgument, "need at least one worker");
}

SimOptions bench_sim_options() {
  SimOptions o;
  o.load_ns = 5'000;
  o.record = RecordMode::kNone;
  return o;
}

std::uint32_t qla_process_count(std::uint32_t total_qubits, std::uint32_t task_qubits,
                                std::uint32_t max_processes) {
  if (task_qubits == 0 || task_qubits > total_qubits)
    throw Error(Errc::kInvalidArgument,
                fmt::format("task of {} qubits on a {}-qubit chip", task_qubits, total_qubits));
  return std::max<std::uint32_t>(1, std::min(max_processes, total_qubits / task_qubits));
}

Circuit bench_circuit(std::string name, std::uint32_t qubits, std::uint32_t layers,
                      const std::string& gate_prefix) {
  Circuit c;
  c.name = std::move(name);
  c.num_qubits = qubits;
  for (std::uint32_t l = 0; l < layers; ++l) {
    Layer layer;
    const std::string g = gate_prefix + (l % 2 == 0 ? "h" : "x");
    for (std::uint32_t q = 0; q < qubits; ++q) layer.gates.push_back(Gate::single(g, q));
    c.items.emplace_back(std::move(layer));
  }
  Layer ro;
  for (std::uint32_t q = 0; q < qubits; ++q) ro.gates.push_back(Gate::measure(q, false));
  c.items.emplace_back(std::move(ro));
  return c;
}

namespace {

std::vector<QubitId> region(const System& sys, std::uint32_t index, std::uint32_t width) {
  const auto ids = sys.qubit_ids();
  const std::size_t lo = static_cast<std::size_t>(index) * width;
  if (lo + width > ids.size())
    throw Error(Errc::kInvalidArgument,
                fmt::format("region {} of {} qubits exceeds the {}-qubit chip", index, width,
                            ids.size()));
  return {ids.begin() + static_cast<std::ptrdiff_t>(lo),
          ids.begin() + static_cast<std::ptrdiff_t>(lo + width)};
}

struct HostRun {
  std::int64_t t_total = 0;
  std::vector<TaskTiming> timings;
  RunResult result;
};

HostRun run_with_host(const std::vector<CompiledTask>& tasks, const System& sys, SimOptions opt,
                      const HostModel& host) {
  host.check();
  Simulator sim(sys, std::move(opt));
  std::vector<std::int64_t> pre_start;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    // FIFO worker pool of identical jobs: batch i / W starts after i / W rounds.
    const std::int64_t start = static_cast<std::int64_t>(i / host.preprocess_workers) * host.t_pre_ns;
    pre_start.push_back(start);
    sim.submit(tasks[i], start + host.t_pre_ns + host.t_send_ns);
  }
  HostRun out;
  out.result = sim.run();
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const TaskStats& st = out.result.tasks[i];
    TaskTiming t;
    t.name = st.name;
    t.n_qubits = static_cast<std::uint32_t>(st.n_qubits);
    t.t_pre = host.t_pre_ns;
    t.t_send = host.t_send_ns;
    t.t_recv = host.t_recv_ns;
    t.t_post = host.t_post_ns;
    t.t_qcs = st.done - st.submitted;
    t.t_qpu = st.t_qpu;
    const std::int64_t end = st.done + host.t_recv_ns + host.t_post_ns;
    t.t_total = end - pre_start[i];
    out.t_total = std::max(out.t_total, end);
    out.timings.push_back(std::move(t));
  }
  return out;
}

}  // namespace

MetricsReport run_qla_point(const QlaBenchConfig& cfg, const System& sys,
                            std::uint32_t task_qubits, QlaRuns* runs) {
  const auto total = static_cast<std::uint32_t>(sys.qcns.size());
  const std::uint32_t procs = qla_process_count(total, task_qubits, cfg.max_processes);

  std::vector<CompiledTask> tasks;
  for (std::uint32_t i = 0; i < procs; ++i) {
    CompileOptions co;
    co.process_id = i;
    co.shots = cfg.shots;
    co.shot_period_ns = cfg.shot_period_ns;
    co.mapping = region(sys, i, task_qubits);
    tasks.push_back(compile(bench_circuit(fmt::format("{}-n{}-t{}", cfg.name, task_qubits, i),
                                          task_qubits, cfg.layers),
                            cfg.times, sys, co));
  }

  SimOptions serial_opt = cfg.sim;
  serial_opt.scheduler.max_processes = 1;
  serial_opt.admission = AdmissionPolicy::kQueue;
  SimOptions parallel_opt = cfg.sim;
  parallel_opt.scheduler.max_processes = procs;
  parallel_opt.admission = AdmissionPolicy::kQueue;

  HostRun serial = run_with_host(tasks, sys, serial_opt, cfg.host);
  HostRun parallel = run_with_host(tasks, sys, parallel_opt, cfg.host);

  MetricsReport r;
  r.scenario = cfg.name;
  r.task_qubits = task_qubits;
  r.processes = procs;
  r.qla_serial = qla(serial.timings, total, serial.t_total);
  r.qla = qla(parallel.timings, total, parallel.t_total);
  r.t_serial_ns = serial.t_total;
  r.t_parallel_ns = parallel.t_total;
  r.speedup = speedup(serial.t_total, parallel.t_total);
  r.speedup_efficiency = speedup_efficiency(r.speedup, procs);
  r.elapsed_ns = parallel.t_total;
  r.tasks = parallel.timings;
  if (runs != nullptr) {
    runs->serial = std::move(serial.result);
    runs->parallel = std::move(parallel.result);
  }
  return r;
}

std::vector<MetricsReport> run_qla_benchmark(const QlaBenchConfig& cfg, const System& sys) {
  std::vector<MetricsReport> out;
  for (std::uint32_t n : cfg.usage_qubits) out.push_back(run_qla_point(cfg, sys, n));
  return out;
}

namespace {

// Egalitarian processor sharing in integer arithmetic: work is held in
// units of 1/kScale ns so that splitting time between up to 16 jobs stays
// exact. Larger job counts round down, which is still deterministic.
class SharedHost {
 public:
  static constexpr std::int64_t kScale = 720'720;  // lcm(1..16)

  using Finished = std::function<void(Simulator&, std::uint32_t region)>;

  explicit SharedHost(Finished fn) : finished_(std::move(fn)) {}

  void arrive(Simulator& sim, std::uint32_t region, std::int64_t work_ns) {
    advance(sim.now());
    jobs_.push_back({region, work_ns * kScale});
    reschedule(sim);
  }

 private:
  struct Job {
    std::uint32_t region;
    std::int64_t remaining;
  };

  void advance(std::int64_t now) {
    const std::int64_t dt = now - last_;
    last_ = now;
    if (jobs_.empty() || dt == 0) return;
    const auto k = static_cast<std::int64_t>(jobs_.size());
    for (auto& j : jobs_) j.remaining -= dt * kScale / k;
  }

  void reschedule(Simulator& sim) {
    ++generation_;
    if (jobs_.empty()) return;
    std::int64_t least = jobs_.front().remaining;
    for (const auto& j : jobs_) least = std::min(least, j.remaining);
    const auto k = static_cast<std::int64_t>(jobs_.size());
    const std::int64_t scaled = std::max<std::int64_t>(least, 0) * k;
    const std::int64_t dt = (scaled + kScale - 1) / kScale;
    const std::uint64_t gen = generation_;
    sim.at(sim.now() + dt, [this, gen](Simulator& s) {
      if (gen != generation_) return;
      advance(s.now());
      std::vector<std::uint32_t> done;
      std::erase_if(jobs_, [&](const Job& j) {
        if (j.remaining > 0) return false;
        done.push_back(j.region);
        return true;
      });
      reschedule(s);
      for (std::uint32_t r : done) finished_(s, r);
    });
  }

  Finished finished_;
  std::vector<Job> jobs_;
  std::int64_t last_ = 0;
  std::uint64_t generation_ = 0;
};

}  // namespace

MetricsReport run_clops_benchmark(const ClopsBenchConfig& cfg, std::uint32_t nproc,
                                  const System& sys) {
  cfg.params.check();
  if (nproc == 0) throw Error(Errc::kInvalidArgument, "need at least one process");
  if (cfg.host_compute_ns < 0) throw Error(Errc::kInvalidArgument, "negative host compute time");
  const ClopsParams& p = cfg.params;
  const std::uint64_t iterations = static_cast<std::uint64_t>(p.m) * p.k;

  std::vector<std::vector<QubitId>> regions;
  for (std::uint32_t r = 0; r < nproc; ++r) regions.push_back(region(sys, r, cfg.region_qubits));

  auto make_task = [&](std::uint32_t r, std::uint64_t iter) {
    const std::uint64_t m = iter / p.k;
    const std::uint64_t k = iter % p.k;
    CompileOptions co;
    co.process_id = r;
    co.shots = p.s;
    co.shot_period_ns = cfg.shot_period_ns;
    co.mapping = regions[r];
    // Fresh gate names per iteration stand in for re-parameterised pulses.
    return compile(bench_circuit(fmt::format("{}-r{}-m{}-k{}", cfg.name, r, m, k),
                                 cfg.region_qubits, p.d - 1, fmt::format("m{}k{}_", m, k)),
                   cfg.times, sys, co);
  };

  SimOptions opt = cfg.sim;
  opt.scheduler.max_processes = std::max(opt.scheduler.max_processes, nproc);
  Simulator sim(sys, opt);

  std::map<std::uint32_t, std::uint32_t> task_region;
  std::vector<std::uint64_t> completed(nproc, 0);
  std::vector<std::int64_t> finished_at(nproc, 0);

  auto submit = [&](Simulator& s, std::uint32_t r, std::int64_t at) {
    const std::uint32_t idx = s.submit(make_task(r, completed[r]), at);
    task_region[idx] = r;
  };

  SharedHost host([&](Simulator& s, std::uint32_t r) {
    ++completed[r];
    const std::int64_t next = s.now() + p.update_latency_ns;
    if (completed[r] < iterations)
      submit(s, r, next);
    else
      finished_at[r] = next;
  });
  sim.on_task_done([&](Simulator& s, std::uint32_t task, std::int64_t) {
    host.arrive(s, task_region.at(task), cfg.host_compute_ns);
  });
  for (std::uint32_t r = 0; r < nproc; ++r) submit(sim, r, 0);
  sim.run();

  MetricsReport rep;
  rep.scenario = cfg.name;
  rep.task_qubits = cfg.region_qubits;
  rep.processes = nproc;
  for (std::uint32_t r = 0; r < nproc; ++r) {
    rep.clops += clops(p, finished_at[r]);
    rep.elapsed_ns = std::max(rep.elapsed_ns, finished_at[r]);
  }
  rep.clops_per_process = rep.clops / nproc;
  rep.efficiency_factor = efficiency_factor(rep.clops, p.d);
  return rep;
}

std::vector<MetricsReport> run_clops_sweep(const ClopsBenchConfig& cfg, const System& sys) {
  std::vector<MetricsReport> out;
  for (std::uint32_t n : cfg.processes) out.push_back(run_clops_benchmark(cfg, n, sys));
  return out;
}

}  // namespace hima
