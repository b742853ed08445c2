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

#include "hima/scenario.hpp"

#include <filesystem>

#include "hima/topology_config.hpp"
#include "yaml_util.hpp"

namespace hima {

namespace {

namespace fs = std::filesystem;

std::string resolve(const std::string& base, const std::string& p) {
  const fs::path path(p);
  if (path.is_absolute()) return p;
  return (fs::path(base) / path).lexically_normal().string();
}

QubitReadout parse_readout(const YAML::Node& n) {
  yaml::check_keys(n, {"p_excited", "p1_given_0", "p1_given_1"});
  QubitReadout r;
  yaml::get(n, "p_excited", r.p_excited);
  yaml::get(n, "p1_given_0", r.p1_given_0);
  yaml::get(n, "p1_given_1", r.p1_given_1);
  r.check();
  return r;
}

HostModel parse_host(const YAML::Node& n) {
  yaml::check_keys(n, {"t_pre_ns", "t_post_ns", "preprocess_workers", "t_send_ns", "t_recv_ns"});
  HostModel h;
  yaml::get(n, "t_pre_ns", h.t_pre_ns);
  yaml::get(n, "t_post_ns", h.t_post_ns);
  yaml::get(n, "preprocess_workers", h.preprocess_workers);
  yaml::get(n, "t_send_ns", h.t_send_ns);
  yaml::get(n, "t_recv_ns", h.t_recv_ns);
  h.check();
  return h;
}

void parse_overrides(const YAML::Node& n, SimOptions& sim, GateTimeTable& times) {
  yaml::check_keys(n, {"decision_ns", "load_ns", "registers_per_unit", "pipeline", "gate_times"});
  yaml::get(n, "decision_ns", sim.decision_ns);
  yaml::get(n, "load_ns", sim.load_ns);
  yaml::get(n, "registers_per_unit", sim.registers_per_unit);
  if (const auto p = n["pipeline"]) {
    yaml::check_keys(p, {"buffer", "fifo", "parse_rate"});
    yaml::get(p, "buffer", sim.pipeline.buffer);
    yaml::get(p, "fifo", sim.pipeline.fifo);
    yaml::get(p, "parse_rate", sim.pipeline.parse_rate_ops_per_us);
    sim.pipeline.check();
  }
  if (const auto g = n["gate_times"]) {
    yaml::check_keys(g, {"single_ns", "two_ns", "measure_ns", "grid_ns", "names"});
    yaml::get(g, "single_ns", times.single_ns);
    yaml::get(g, "two_ns", times.two_ns);
    yaml::get(g, "measure_ns", times.measure_ns);
    yaml::get(g, "grid_ns", times.grid_ns);
    if (const auto names = g["names"])
      for (const auto& kv : names) times.overrides[kv.first.as<std::string>()] = kv.second.as<std::int64_t>();
    times.check();
  }
  if (sim.decision_ns < 0 || sim.load_ns < 0)
    throw Error(Errc::kConfigError, "overhead overrides must be non-negative");
}

Scenario from_yaml(const YAML::Node& root, const std::string& base) {
  yaml::check_keys(root, {"name", "topology", "seed", "admission", "limits", "sti", "overrides",
                          "readout", "tasks", "qla", "clops"});
  Scenario s;
  s.name = root["name"] ? root["name"].as<std::string>() : "scenario";
  s.topology_path = resolve(base, yaml::require<std::string>(root, "topology"));
  s.system = load_system(s.topology_path);
  if (const auto v = root["seed"]) s.seed = v.as<std::uint64_t>();
  s.sim.load_ns = 5'000;

  if (const auto v = root["admission"]) {
    const auto a = v.as<std::string>();
    if (a == "queue")
      s.sim.admission = AdmissionPolicy::kQueue;
    else if (a == "reject")
      s.sim.admission = AdmissionPolicy::kRejectOnConflict;
    else
      throw Error(Errc::kConfigError, "admission must be 'queue' or 'reject'");
  }
  if (const auto l = root["limits"]) {
    yaml::check_keys(l, {"max_processes"});
    yaml::get(l, "max_processes", s.sim.scheduler.max_processes);
    if (s.sim.scheduler.max_processes == 0 || s.sim.scheduler.max_processes > kProcessCap)
      throw Error(Errc::kConfigError, "max_processes out of range");
  }
  if (const auto st = root["sti"]) {
    yaml::check_keys(st, {"default_ns", "pairs"});
    s.has_sti = true;
    const std::int64_t def = st["default_ns"] ? st["default_ns"].as<std::int64_t>() : 0;
    if (def < 0) throw Error(Errc::kConfigError, "sti.default_ns must be non-negative");
    StiTable table(def);
    for (const auto& p : yaml::seq(st, "pairs")) {
      yaml::check_keys(p, {"a", "b", "ns", "directed"});
      const auto a = yaml::require<ProcessId>(p, "a");
      const auto b = yaml::require<ProcessId>(p, "b");
      const auto ns = yaml::require<std::int64_t>(p, "ns");
      if (ns < 0) throw Error(Errc::kConfigError, "sti pair spacing must be non-negative");
      if (p["directed"] && p["directed"].as<bool>())
        table.set_directed(a, b, ns);
      else
        table.set(a, b, ns);
    }
    s.sim.scheduler.sti = table;
  }
  if (const auto o = root["overrides"]) parse_overrides(o, s.sim, s.times);
  if (const auto r = root["readout"]) {
    yaml::check_keys(r, {"default", "qubits"});
    ReadoutModel model(r["default"] ? parse_readout(r["default"]) : QubitReadout{});
    if (const auto qs = r["qubits"])
      for (const auto& kv : qs) model.set(kv.first.as<QubitId>(), parse_readout(kv.second));
    s.sim.readout = model;
  }
  for (const auto& t : yaml::seq(root, "tasks")) {
    yaml::check_keys(t, {"circuit", "mapping", "shots", "shot_period_ns", "pid", "submit_ns"});
    TaskSpec spec;
    spec.circuit_path = resolve(base, yaml::require<std::string>(t, "circuit"));
    spec.circuit = parse_circuit(read_file(spec.circuit_path), spec.circuit_path);
    yaml::get(t, "mapping", spec.mapping);
    yaml::get(t, "shots", spec.shots);
    yaml::get(t, "shot_period_ns", spec.shot_period_ns);
    if (t["pid"]) spec.pid = t["pid"].as<ProcessId>();
    yaml::get(t, "submit_ns", spec.submit_ns);
    s.tasks.push_back(std::move(spec));
  }
  if (const auto q = root["qla"]) {
    yaml::check_keys(q, {"usage_qubits", "max_processes", "shots", "shot_period_ns", "layers",
                         "host"});
    QlaBenchConfig c;
    c.name = s.name;
    yaml::get(q, "usage_qubits", c.usage_qubits);
    yaml::get(q, "max_processes", c.max_processes);
    yaml::get(q, "shots", c.shots);
    yaml::get(q, "shot_period_ns", c.shot_period_ns);
    yaml::get(q, "layers", c.layers);
    if (q["host"]) c.host = parse_host(q["host"]);
    c.sim = s.sim;
    c.sim.record = RecordMode::kNone;
    c.times = s.times;
    s.qla = c;
  }
  if (const auto q = root["clops"]) {
    yaml::check_keys(q, {"m", "k", "s", "d", "update_latency_ns", "region_qubits",
                         "host_compute_ns", "shot_period_ns", "processes"});
    ClopsBenchConfig c;
    c.name = s.name;
    yaml::get(q, "m", c.params.m);
    yaml::get(q, "k", c.params.k);
    yaml::get(q, "s", c.params.s);
    yaml::get(q, "d", c.params.d);
    yaml::get(q, "update_latency_ns", c.params.update_latency_ns);
    yaml::get(q, "region_qubits", c.region_qubits);
    yaml::get(q, "host_compute_ns", c.host_compute_ns);
    yaml::get(q, "shot_period_ns", c.shot_period_ns);
    yaml::get(q, "processes", c.processes);
    c.params.check();
    c.sim = s.sim;
    c.sim.record = RecordMode::kNone;
    c.times = s.times;
    s.clops = c;
  }
  return s;
}

}  // namespace

Scenario parse_scenario(std::string_view text, const std::string& base_dir) {
  return yaml::guarded([&] { return from_yaml(YAML::Load(std::string(text)), base_dir); });
}

Scenario load_scenario(const std::string& path) {
  const std::string text = read_file(path);
  return parse_scenario(text, fs::path(path).parent_path().string());
}

std::vector<CompiledTask> compile_scenario(const Scenario& s) {
  std::vector<CompiledTask> out;
  for (std::size_t i = 0; i < s.tasks.size(); ++i) {
    const TaskSpec& t = s.tasks[i];
    CompileOptions co;
    co.process_id = t.pid.value_or(static_cast<ProcessId>(i));
    co.shots = t.shots;
    co.shot_period_ns = t.shot_period_ns;
    co.mapping = t.mapping;
    out.push_back(compile(t.circuit, s.times, s.system, co));
  }
  return out;
}

RunResult run_scenario(const Scenario& s) {
  const auto tasks = compile_scenario(s);
  Simulator sim(s.system, s.sim);
  for (std::size_t i = 0; i < tasks.size(); ++i) sim.submit(tasks[i], s.tasks[i].submit_ns);
  return sim.run();
}

}  // namespace hima
