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

// Acceptance suite. Prints one PASS/FAIL line per criterion with its
// measured runtime against a pinned limit, and exits non-zero if any fail.

#include <fmt/core.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "hima/audit.hpp"
#include "hima/bench.hpp"
#include "hima/engine.hpp"
#include "hima/metrics.hpp"
#include "hima/oracle.hpp"
#include "hima/scenario.hpp"
#include "hima/topology_config.hpp"
#include "oracles.hpp"

namespace {

using namespace hima;

// Pinned tolerances and limits.
constexpr double kIsaLimitS = 1;
constexpr double kCapacityLimitS = 1;
constexpr double kOracleLimitS = 30;
constexpr double kRigidityLimitS = 60;
constexpr double kStaggerLimitS = 30;
constexpr double kSpeedupLimitS = 120;
constexpr double kQlaLimitS = 180;
constexpr double kClopsArithLimitS = 1;
constexpr double kClopsScaleLimitS = 180;
constexpr double kFeedbackLimitS = 60;
constexpr double kIssueLimitS = 1;

constexpr int kIsaCorpus = 50;
constexpr int kOracleCircuits = 200;
constexpr std::uint32_t kRigidityShots = 1024;
constexpr double kSpeedupLo = 4.5, kSpeedupHi = 5.0, kEfficiencyFloor = 0.90;
constexpr double kQlaRatioFloor = 3.5;
constexpr double kQlaSerialLo = 0.10, kQlaSerialHi = 0.25;
constexpr double kQlaParallelLo = 0.55, kQlaParallelHi = 0.75;
constexpr double kClopsRatioFloor = 3.0;
constexpr std::uint32_t kResetShots = 10'000;
constexpr std::int64_t kResetExpected = 7000, kResetTolerance = 150;
constexpr std::int64_t kStis[] = {5000, 10'000, 15'000, 20'000};

std::string scenario_path(const std::string& name) {
  return testing::data_path("scenarios/" + name + ".yaml");
}

Scenario load(const std::string& name) {
  Scenario s = load_scenario(scenario_path(name));
  s.sim.seed = s.seed.value_or(0);
  return s;
}

// Every recorded timeline goes through the sync audit for criterion 4.
struct SyncLog {
  std::size_t runs = 0;
  std::size_t latches = 0;
  std::vector<std::string> violations;
  void add(const EventTimeline& tl, std::int64_t period) {
    ++runs;
    latches += tl.count(EventKind::kTriggerLatched);
    auto v = audit_sync_alignment(tl, period);
    violations.insert(violations.end(), v.begin(), v.end());
  }
};
SyncLog g_sync;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int g_failures = 0;
std::map<int, std::string> g_lines;  // printed in id order at the end

void criterion(int id, const char* title, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, fmt::format("exception: {}", e.what())};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs < limit_s;
  const bool pass = o.pass && in_time;
  if (!pass) ++g_failures;
  g_lines[id] = fmt::format("{} {:>2} {}: {} [{:.2f} s, limit {:.0f} s{}]", pass ? "PASS" : "FAIL", id, title,
                            o.detail, secs, limit_s, in_time ? "" : ", too slow");
}

// ---------------------------------------------------------------------------

Outcome isa_conformance() {
  using S = UnitScope;
  const std::map<Opcode, std::set<S>> table = {
      {Opcode::kGate, {S::kDriveOrReadoutOutput}},
      {Opcode::kWait, {S::kController, S::kReadoutInput, S::kDriveOrReadoutOutput}},
      {Opcode::kMeasure, {S::kReadoutInput}},
      {Opcode::kTrigger, {S::kController}},
      {Opcode::kFeedback, {S::kController}},
      {Opcode::kBr, {S::kController, S::kReadoutInput, S::kDriveOrReadoutOutput}},
  };
  int cells = 0, agree = 0;
  for (Opcode op : kAllOpcodes)
    for (S s : kAllScopes) {
      ++cells;
      agree += is_legal(op, s) == (table.at(op).count(s) == 1);
    }
  std::mt19937_64 rng(1);
  int round_trips = 0;
  for (int i = 0; i < kIsaCorpus; ++i) {
    const S scope = kAllScopes[static_cast<std::size_t>(i) % kAllScopes.size()];
    const Program p = testing::random_program(rng, scope, 40);
    const Program back = parse_program(format_program(p), scope);
    round_trips += back.instructions == p.instructions;
  }
  return {cells == 18 && agree == 18 && round_trips == kIsaCorpus,
          fmt::format("{}/18 legality cells agree, {}/{} round trips", agree, round_trips, kIsaCorpus)};
}

Outcome capacity() {
  QccsTemplate two;
  two.qubits_per_qccs = 0;
  two.couplers = false;
  QccsTemplate three = two;
  three.mids = 8;
  const Hierarchy h2 = make_qccs_system(two).hierarchy;
  const Hierarchy h3 = make_qccs_system(three).hierarchy;
  const auto a = max_capacity(h2, kTunableChannels);
  const auto b = max_capacity(h2, kFixedFrequencyChannels);
  const auto c = max_capacity(h3, kFixedFrequencyChannels);
  return {a == 192 && b == 768 && c == 6144,
          fmt::format("tunable 2-layer {}, fixed 2-layer {}, fixed 3-layer {} (want 192/768/6144)", a, b, c)};
}

using Start = std::tuple<NodeId, std::int64_t, Opcode>;

Outcome oracle_equivalence(const System& sys) {
  std::mt19937_64 rng(2026);
  int equal = 0;
  std::size_t starts = 0;
  for (int i = 0; i < kOracleCircuits; ++i) {
    const QubitId base = static_cast<QubitId>(rng() % 3) * 24 + static_cast<QubitId>(rng() % 16);
    std::vector<QubitId> phys;
    for (QubitId q = base; q < base + 8; ++q) phys.push_back(q);
    const Circuit c = testing::random_circuit(rng, sys, phys);
    CompileOptions opt;
    opt.mapping.assign(phys.begin(), phys.begin() + c.num_qubits);
    const CompiledTask t = compile(c, GateTimeTable{}, sys, opt);
    SimOptions so;
    so.seed = static_cast<std::uint64_t>(i);
    const RunResult r = run({t}, sys, so);
    g_sync.add(r.timeline, sys.hierarchy.sync_period_ns());
    std::int64_t latch = -1;
    std::set<Start> got;
    for (const auto& e : r.timeline.events) {
      if (e.kind == EventKind::kTriggerLatched && e.a == 1 && latch < 0) latch = e.time;
      if (e.kind == EventKind::kGateStart) got.insert({e.node, e.time, Opcode::kGate});
      if (e.kind == EventKind::kMeasureStart) got.insert({e.node, e.time, Opcode::kMeasure});
    }
    std::set<Start> want;
    for (const auto& o : flat_oracle(t, latch)) want.insert({o.unit, o.time, o.ins.op});
    equal += got == want;
    starts += want.size();
  }
  return {equal == kOracleCircuits,
          fmt::format("{}/{} circuits match the flat oracle exactly ({} starts)", equal, kOracleCircuits, starts)};
}

Outcome sync_and_rigidity() {
  Scenario s = load("single");
  s.tasks[0].shots = kRigidityShots;
  const RunResult r = run_scenario(s);
  g_sync.add(r.timeline, s.system.hierarchy.sync_period_ns());
  const auto rigid = audit_rigidity(r.timeline, s.system.hierarchy, 0);
  const auto shots = r.timeline.count(EventKind::kShotEnd);
  return {g_sync.violations.empty() && rigid.empty() && shots == kRigidityShots,
          fmt::format("{} latches over {} runs off-grid: {}; rigidity violations over {} shots: {}", g_sync.latches,
                      g_sync.runs, g_sync.violations.size(), shots, rigid.size())};
}

Outcome staggering() {
  bool ok = true;
  std::string detail;
  for (std::int64_t sti : kStis) {
    const Scenario s = load(fmt::format("staggered_{}", sti));
    const RunResult r = run_scenario(s);
    g_sync.add(r.timeline, s.system.hierarchy.sync_period_ns());
    const auto v = audit_staggering(r.timeline, s.sim.scheduler.sti);
    std::int64_t min_gap = INT64_MAX;
    std::map<std::uint32_t, std::int64_t> last;
    for (const auto& e : r.timeline.of_kind(EventKind::kTriggerSent)) {
      if (e.a != 1) continue;
      for (const auto& [task, t] : last)
        if (task != e.task) min_gap = std::min(min_gap, e.time - t);
      last[e.task] = e.time;
    }
    ok = ok && v.empty() && min_gap >= sti && s.sim.scheduler.sti.get(0, 1) == sti;
    detail += fmt::format("STI {} min gap {}; ", sti, min_gap);
  }
  // Zero STI: each task behaves exactly as when run alone.
  const Scenario z = load("staggered_0");
  const auto tasks = compile_scenario(z);
  const RunResult both = run_scenario(z);
  g_sync.add(both.timeline, z.system.hierarchy.sync_period_ns());
  int same = 0;
  for (std::uint32_t i = 0; i < tasks.size(); ++i) {
    const RunResult solo = run({tasks[i]}, z.system, z.sim);
    g_sync.add(solo.timeline, z.system.hierarchy.sync_period_ns());
    same += task_projection(both.timeline, i) == task_projection(solo.timeline, 0);
  }
  ok = ok && same == static_cast<int>(tasks.size());
  detail += fmt::format("STI 0: {}/{} tasks equal their solo runs", same, tasks.size());
  return {ok, detail};
}

QlaBenchConfig qla_config(const Scenario& s) {
  QlaBenchConfig c = *s.qla;
  c.sim.seed = *s.seed;
  return c;
}

Outcome speedup_scaling() {
  const Scenario s = load("qla_sweep");
  const MetricsReport r = run_qla_point(qla_config(s), s.system, 14);
  const bool ok = r.processes == 5 && r.speedup >= kSpeedupLo && r.speedup <= kSpeedupHi &&
                  r.speedup_efficiency >= kEfficiencyFloor;
  return {ok, fmt::format("5 x 14-qubit tasks: speedup {:.3f} (want [{}, {}]), efficiency {:.4f} (want >= {})",
                          r.speedup, kSpeedupLo, kSpeedupHi, r.speedup_efficiency, kEfficiencyFloor)};
}

Outcome qla_improvement() {
  const Scenario s = load("qla_sweep");
  const auto reports = run_qla_benchmark(qla_config(s), s.system);
  int drops = 0;
  for (std::size_t i = 1; i < reports.size(); ++i)
    if (reports[i].processes == reports[i - 1].processes && reports[i].qla < reports[i - 1].qla) ++drops;
  const MetricsReport& low = reports.front();
  const double ratio = low.qla / low.qla_serial;
  const bool ok = drops == 0 && ratio >= kQlaRatioFloor && low.qla_serial >= kQlaSerialLo &&
                  low.qla_serial <= kQlaSerialHi && low.qla >= kQlaParallelLo && low.qla <= kQlaParallelHi;
  return {ok, fmt::format("{} points, {} in-zone drops; {} qubits: serial {:.4f}, parallel {:.4f}, ratio {:.2f}",
                          reports.size(), drops, low.task_qubits, low.qla_serial, low.qla, ratio)};
}

// Rounds to four significant digits.
double sig4(double v) {
  if (v == 0) return 0;
  const double scale = std::pow(10.0, std::floor(std::log10(std::fabs(v))) - 3);
  return std::round(v / scale) * scale;
}

Outcome clops_arithmetic() {
  const double mks = 100.0 * 10 * 100;
  struct Row {
    const char* name;
    std::uint32_t d;
    double published_clops;
    double published_factor;
  };
  const Row rows[] = {{"IBM", 9, 15'000, 1666.7}, {"HiMA", 5, 12'304, 2460.8}};
  int cells = 0, agree = 0;
  std::string detail;
  for (const auto& row : rows) {
    const ClopsParams p{100, 10, 100, row.d, 0};
    const double elapsed = mks * row.d / row.published_clops;
    const double c = clops_from_seconds(p, elapsed);
    const double f = efficiency_factor(c, row.d);
    cells += 2;
    agree += (sig4(c) == sig4(row.published_clops)) + (sig4(f) == sig4(row.published_factor));
    detail += fmt::format("{} CLOPS {:.1f} factor {:.1f}; ", row.name, c, f);
  }
  // Unpublished D: the factor can be at most the CLOPS itself.
  bool bound = true;
  for (std::uint32_t d = 1; d <= 64; ++d) bound = bound && efficiency_factor(892, d) <= 892;
  ++cells;
  agree += bound;
  detail += fmt::format("Rigetti <= 892 {}", bound ? "holds" : "violated");
  return {agree == cells, fmt::format("{}/{} cells: {}", agree, cells, detail)};
}

Outcome clops_scaling() {
  const Scenario s = load("clops");
  ClopsBenchConfig c = *s.clops;
  c.sim.seed = *s.seed;
  const auto reports = run_clops_sweep(c, s.system);
  bool ok = reports.size() == 5;
  std::string detail = "total/per-process:";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    if (i > 0)
      ok = ok && reports[i].clops > reports[i - 1].clops &&
           reports[i].clops_per_process <= reports[i - 1].clops_per_process;
    detail += fmt::format(" {}p {:.0f}/{:.0f}", reports[i].processes, reports[i].clops,
                          reports[i].clops_per_process);
  }
  const double ratio = reports.back().clops / reports.front().clops;
  ok = ok && ratio >= kClopsRatioFloor;
  return {ok, fmt::format("{}; 5p/1p {:.2f} (want >= {})", detail, ratio, kClopsRatioFloor)};
}

Outcome feedback_correctness() {
  Scenario s = load("reset_biased");
  s.tasks[0].shots = kResetShots;
  const RunResult r = run_scenario(s);
  g_sync.add(r.timeline, s.system.hierarchy.sync_period_ns());
  const NodeId xy = s.system.qcn(s.tasks[0].mapping.at(0)).xy_unit;
  std::int64_t ones = 0, pulses = 0;
  for (const auto& e : r.timeline.events) {
    if (e.kind == EventKind::kFeedbackCollected && e.b == 1) ++ones;
    if (e.kind == EventKind::kGateStart && e.node == xy) ++pulses;
  }
  const auto contract = audit_feedback_contract(r.timeline);
  const bool ok = std::llabs(pulses - kResetExpected) <= kResetTolerance && pulses == ones && contract.empty() &&
                  r.timeline.count(EventKind::kShotEnd) == kResetShots;
  return {ok, fmt::format("reset branch taken in {}/{} shots (want {} +/- {}), {} results read 1, "
                          "{} contract violations",
                          pulses, kResetShots, kResetExpected, kResetTolerance, ones, contract.size())};
}

Outcome issue_rate() {
  struct Case {
    const char* name;
    double rate;
    std::uint32_t fifo;
    bool underflow;
  };
  const Case cases[] = {{"20 ns/op, F=8", 50, 8, false}, {"40 ns/op, F=2", 25, 2, true}};
  Program p;
  for (int i = 0; i < 200; ++i) p.instructions.push_back(Instruction::gate(0, 30, i == 0));
  bool ok = true;
  std::string detail;
  for (const auto& c : cases) {
    PipelineParams pp;
    pp.parse_rate_ops_per_us = c.rate;
    pp.fifo = c.fifo;
    IssueRateOptions opt;
    opt.params = pp;
    const UnitIssueReport r = issue_rate_check(p, opt);
    const auto lead = static_cast<std::int64_t>(pp.buffer + pp.fifo) * pp.parse_cost_ns();
    const testing::QueueTrace q = testing::simulate_queues(p, pp, lead);
    const bool same = r.ready == q.ready && r.start == q.start && r.underflow == q.underflow &&
                      r.first_underflow == q.first_underflow && r.min_headroom == q.min_headroom;
    ok = ok && same && r.underflow == c.underflow;
    detail += fmt::format("{}{}: underflow {} at {}, headroom {}, oracle {}", detail.empty() ? "" : "; ", c.name, r.underflow,
                          r.first_underflow ? fmt::format("#{}", *r.first_underflow) : "-", r.min_headroom,
                          same ? "agrees" : "differs");
  }
  return {ok, detail};
}

// Artifacts written for one scenario: the timeline export and the report.
std::vector<std::string> artifacts(const std::string& name) {
  const Scenario s = load(name);
  if (s.qla) {
    const auto r = run_qla_benchmark(qla_config(s), s.system);
    const auto n = static_cast<std::uint32_t>(s.system.qcns.size());
    return {reports_to_csv(r, n), reports_to_json(r, n)};
  }
  if (s.clops) {
    ClopsBenchConfig c = *s.clops;
    c.sim.seed = *s.seed;
    const auto r = run_clops_sweep(c, s.system);
    const auto n = static_cast<std::uint32_t>(s.system.qcns.size());
    return {reports_to_csv(r, n), reports_to_json(r, n)};
  }
  const RunResult r = run_scenario(s);
  std::string stats;
  for (const auto& t : r.tasks)
    stats += fmt::format("{} {} {} {} {} {}\n", t.task, t.pid, t.admitted, t.done, t.shots_done, t.t_qpu);
  return {export_timeline(r.timeline, s.system.hierarchy), stats};
}

Outcome determinism() {
  const std::vector<std::string> names = {"single",          "reset_biased",    "staggered_0",
                                          "staggered_5000",  "staggered_10000", "staggered_15000",
                                          "staggered_20000", "qla_sweep",       "clops"};
  int same = 0;
  std::size_t bytes = 0;
  for (const auto& n : names) {
    const auto a = artifacts(n);
    const auto b = artifacts(n);
    same += a == b;
    for (const auto& f : a) bytes += f.size();
  }
  return {same == static_cast<int>(names.size()),
          fmt::format("{}/{} scenarios byte-identical on rerun ({} bytes compared)", same, names.size(), bytes)};
}

}  // namespace

int main() {
  const System origin = load_system(testing::data_path("topologies/origin72.cfg"));
  criterion(1, "ISA conformance", kIsaLimitS, isa_conformance);
  criterion(2, "Capacity arithmetic", kCapacityLimitS, capacity);
  criterion(3, "Oracle equivalence", kOracleLimitS, [&] { return oracle_equivalence(origin); });
  criterion(5, "Staggered trigger", kStaggerLimitS, staggering);
  criterion(10, "Feedback correctness", kFeedbackLimitS, feedback_correctness);
  // Sync alignment covers every timeline recorded above, so it runs after
  // the simulations it audits.
  criterion(4, "Sync alignment and rigidity", kRigidityLimitS, sync_and_rigidity);
  criterion(6, "Speedup scaling", kSpeedupLimitS, speedup_scaling);
  criterion(7, "QLA improvement", kQlaLimitS, qla_improvement);
  criterion(8, "CLOPS arithmetic", kClopsArithLimitS, clops_arithmetic);
  criterion(9, "CLOPS scaling shape", kClopsScaleLimitS, clops_scaling);
  criterion(11, "Issue-rate check", kIssueLimitS, issue_rate);
  criterion(12, "Determinism", kClopsScaleLimitS * 2, determinism);
  for (const auto& [id, line] : g_lines) fmt::print("{}\n", line);
  fmt::print("{} of {} criteria failed\n", g_failures, g_lines.size());
  return g_failures == 0 ? 0 : 1;
}
