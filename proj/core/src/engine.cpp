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

#include "hima/engine.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <queue>
#include <tuple>

#include <fmt/format.h>

#include "hima/error.hpp"

namespace hima {

namespace {

constexpr std::int64_t kNever = std::numeric_limits<std::int64_t>::min() / 4;

enum Cls : std::uint8_t { kControllerStep = 0, kCallbackCls = 1, kAdmissionCls = 2 };

struct QItem {
  std::int64_t time;
  std::uint8_t cls;
  std::uint64_t seq;
  std::function<void()> fn;
};

struct QLater {
  bool operator()(const QItem& a, const QItem& b) const {
    return std::tie(a.time, a.cls, a.seq) > std::tie(b.time, b.cls, b.seq);
  }
};

struct Delivery {
  std::uint32_t shot;
  std::int64_t time;
  std::uint32_t reg;
  std::int64_t value;
};

struct UnitRun {
  UnitRun(const UnitProgram* p, const PipelineParams& params, std::int64_t load, std::uint32_t regs)
      : up(p), pipe(params, load), registers(regs, 0) {}

  const UnitProgram* up;
  IssuePipeline pipe;
  std::vector<std::int64_t> registers;
  std::size_t pc = 0;
  std::uint32_t shot = 0;
  bool finished = false;
  std::deque<std::int64_t> triggers;
  std::deque<Delivery> deliveries;
  std::int64_t prev_end = kNever;
  bool staged = false;
  IssuePipeline::Staged cur;
  bool branch_parsed = false;
  // need[s]: deliveries this unit must hold before a BR in trigger segment s.
  std::vector<std::uint32_t> need;
  std::size_t trigs_seen = 0;
  std::uint32_t landed = 0;
  std::uint32_t measures = 0;
  std::uint32_t fb_measures = 0;
};

struct ResultKey {
  std::uint32_t shot;
  QubitId qubit;
  std::uint32_t ordinal;
  bool operator<(const ResultKey& o) const {
    return std::tie(shot, qubit, ordinal) < std::tie(o.shot, o.qubit, o.ordinal);
  }
};

struct TaskRun {
  CompiledTask task;
  std::uint32_t index = 0;
  ProcessId pid = 0;
  bool admitted = false;
  bool done = false;
  std::vector<UnitRun> units;
  std::map<NodeId, std::size_t> unit_index;
  std::vector<std::pair<NodeId, std::vector<std::size_t>>> fanout;  // module -> unit runs

  // Controller.
  std::size_t pc = 0;
  std::vector<std::int64_t> registers;
  bool expect_trigger0 = false;
  bool ctrl_done = false;
  std::int64_t ctrl_done_time = 0;
  bool waiting_feedback = false;
  bool step_pending = false;
  std::optional<std::int64_t> pending_grant;
  std::int64_t request_time = 0;

  // Shot bookkeeping.
  std::uint32_t shot = 0;
  std::optional<std::int64_t> grant;
  std::size_t units_finished = 0;
  std::int64_t units_end = kNever;
  bool shot_end_scheduled = false;
  std::map<ResultKey, std::pair<int, std::int64_t>> results;  // bit, arrival at root
};

}  // namespace

struct Simulator::Impl {
  Impl(Simulator& s, const System& system, SimOptions o)
      : self(s), sys(system), h(system.hierarchy), opt(std::move(o)), sched(opt.scheduler) {
    opt.pipeline.check();
    if (opt.decision_ns < 0 || opt.load_ns < 0)
      throw Error(Errc::kInvalidArgument, "latencies must be non-negative");
  }

  Simulator& self;
  const System& sys;
  const Hierarchy& h;
  SimOptions opt;
  Scheduler sched;
  std::priority_queue<QItem, std::vector<QItem>, QLater> queue;
  std::uint64_t qseq = 0;
  std::uint64_t evseq = 0;
  std::int64_t now = 0;
  RunResult result;
  std::vector<std::unique_ptr<TaskRun>> tasks;
  std::deque<std::uint32_t> admission;
  std::vector<DoneCallback> done_cbs;
  bool running = false;

  void push(std::int64_t t, std::uint8_t cls, std::function<void()> fn) {
    queue.push({t, cls, qseq++, std::move(fn)});
  }

  void record(EventKind kind, std::int64_t time, NodeId node, const TaskRun& t,
              std::uint32_t shot, std::int64_t a = 0, std::int64_t b = 0) {
    ++result.events_seen;
    if (opt.record == RecordMode::kNone) return;
    if (opt.record == RecordMode::kControl && !is_control_event(kind)) return;
    result.timeline.events.push_back({time, kind, node, t.pid, t.index, shot, a, b, evseq++});
  }

  TaskStats& stats(const TaskRun& t) { return result.tasks[t.index]; }

  // -------------------------------------------------------------------------
  // Admission

  void precheck_conflicts() {
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      auto ui = tasks[i]->task.units();
      for (std::size_t j = i + 1; j < tasks.size(); ++j) {
        auto uj = tasks[j]->task.units();
        std::vector<NodeId> common;
        std::set_intersection(ui.begin(), ui.end(), uj.begin(), uj.end(),
                              std::back_inserter(common));
        if (!common.empty())
          throw Error(Errc::kUnitConflict,
                      fmt::format("tasks {} and {} share unit {}", i, j, h.node(common[0]).name));
      }
    }
  }

  void try_admit() {
    while (!admission.empty()) {
      TaskRun& t = *tasks[admission.front()];
      auto r = sched.admit(t.task.qubits, t.task.units(), t.task.shots, t.task.process_id,
                           t.task.masks, h);
      if (!r.admitted) {
        if (opt.admission == AdmissionPolicy::kRejectOnConflict) {
          std::string who;
          for (auto p : r.blocking) who += fmt::format(" {}", p);
          throw Error(r.error, fmt::format("task {} cannot be admitted{}{}", t.index,
                                           r.blocking.empty() ? "" : ", blocked by process",
                                           who));
        }
        return;
      }
      admission.pop_front();
      start(t, r.pid);
    }
  }

  void start(TaskRun& t, ProcessId pid) {
    t.pid = pid;
    t.admitted = true;
    stats(t).pid = pid;
    stats(t).admitted = now;
    record(EventKind::kTaskAdmitted, now, h.root(), t, 0);
    t.registers.assign(opt.registers_per_unit, 0);
    for (const auto& up : t.task.programs) {
      if (up.program.empty()) continue;
      for (const auto& ins : up.program.instructions)
        if (ins.op == Opcode::kBr && ins.rs >= opt.registers_per_unit)
          throw Error(Errc::kProgramContract,
                      fmt::format("unit {} reads register {} of {}", up.program.unit_id, ins.rs,
                                  opt.registers_per_unit));
      t.unit_index[up.unit] = t.units.size();
      t.units.emplace_back(&up, opt.pipeline, now, opt.registers_per_unit);
      auto& need = t.units.back().need;
      std::uint32_t count = 0;
      for (const auto& e : t.task.feedback) {
        if (std::find(e.outputs.begin(), e.outputs.end(), up.unit) != e.outputs.end()) ++count;
        need.push_back(count);
      }
    }
    // Fan-out from the mask table: modules reached for this process, and
    // their participating units.
    const MaskTable& masks = sched.masks();
    std::vector<NodeId> stack{h.root()};
    std::vector<NodeId> modules;
    while (!stack.empty()) {
      NodeId n = stack.back();
      stack.pop_back();
      const Node& node = h.node(n);
      if (node.kind == NodeKind::kModule) {
        modules.push_back(n);
        continue;
      }
      const ChildMask* m = masks.find(n, pid);
      if (m == nullptr) continue;
      for (std::size_t i = m->find_first(); i != ChildMask::npos; i = m->find_next(i))
        stack.push_back(node.children[i]);
    }
    std::sort(modules.begin(), modules.end());
    for (NodeId mod : modules) {
      std::vector<std::size_t> runs;
      const ChildMask* m = masks.find(mod, pid);
      if (m != nullptr) {
        for (std::size_t i = m->find_first(); i != ChildMask::npos; i = m->find_next(i)) {
          auto it = t.unit_index.find(h.node(mod).children[i]);
          if (it != t.unit_index.end()) runs.push_back(it->second);
        }
      }
      t.fanout.emplace_back(mod, std::move(runs));
    }
    for (auto& u : t.units) advance(t, u);
    schedule_ctrl(t, now + opt.load_ns);
  }

  // -------------------------------------------------------------------------
  // Controller

  void schedule_ctrl(TaskRun& t, std::int64_t time) {
    t.step_pending = true;
    TaskRun* tp = &t;
    push(time, kControllerStep, [this, tp] { ctrl_step(*tp); });
  }

  void fire_trigger(TaskRun& t, std::int64_t grant, std::int64_t requested, bool start_flag) {
    record(EventKind::kTriggerSent, grant, h.root(), t, t.shot, start_flag ? 1 : 0, requested);
    if (start_flag) t.grant = grant;
    for (auto& [mod, runs] : t.fanout) {
      const std::int64_t latch = h.ceil_to_sync(grant + h.trigger_path_ns(mod));
      record(EventKind::kTriggerLatched, latch, mod, t, t.shot, start_flag ? 1 : 0);
      for (std::size_t ui : runs) {
        UnitRun& u = t.units[ui];
        u.triggers.push_back(latch + h.node(u.up->unit).trigger_latency_ns);
        advance(t, u);
      }
    }
  }

  void ctrl_step(TaskRun& t) {
    t.step_pending = false;
    const Program& p = t.task.controller;
    while (true) {
      if (t.pc >= p.size()) {
        if (!t.ctrl_done) {
          t.ctrl_done = true;
          t.ctrl_done_time = now;
          check_shot_end(t);
        }
        return;
      }
      const Instruction& ins = p.instructions[t.pc];
      if (t.expect_trigger0 &&
          (ins.op != Opcode::kTrigger || ins.start || ins.trig))
        throw Error(Errc::kMissingTrigger0AfterFeedback,
                    fmt::format("task {}: instruction {} after FEEDBACK is '{}', expected "
                                "'TRIGGER 0, 0'",
                                t.index, t.pc, format_instruction(ins)));
      switch (ins.op) {
        case Opcode::kTrigger: {
          std::int64_t grant;
          std::int64_t requested;
          if (t.pending_grant) {
            grant = *t.pending_grant;
            requested = t.request_time;
            t.pending_grant.reset();
          } else {
            grant = sched.arbitrate(t.pid, ins.start, now);
            requested = now;
            if (grant > now) {
              t.pending_grant = grant;
              t.request_time = now;
              schedule_ctrl(t, grant);
              return;
            }
          }
          t.expect_trigger0 = false;
          fire_trigger(t, grant, requested, ins.start);
          ++t.pc;
          break;
        }
        case Opcode::kWait:
          ++t.pc;
          if (ins.dur > 0) {
            schedule_ctrl(t, now + ins.dur);
            return;
          }
          break;
        case Opcode::kFeedback:
          feedback(t, ins);
          return;
        case Opcode::kBr: {
          if (ins.rs >= t.registers.size())
            throw Error(Errc::kProgramContract, "controller BR register out of range");
          const bool taken = t.registers[ins.rs] == ins.imm;
          const auto target = static_cast<std::int64_t>(t.pc) + (taken ? ins.offset : 1);
          if (target < 0) throw Error(Errc::kProgramContract, "controller branch before start");
          t.pc = static_cast<std::size_t>(target);
          break;
        }
        default:
          throw Error(Errc::kProgramContract,
                      fmt::format("{} is not executable by a controller", mnemonic(ins.op)));
      }
    }
  }

  /// Runs Steps 1 to 3, or parks the controller until results arrive.
  void feedback(TaskRun& t, const Instruction& ins) {
    if (ins.addr >= t.task.feedback.size())
      throw Error(Errc::kProgramContract, fmt::format("FEEDBACK entry {} missing", ins.addr));
    const FeedbackEntry& e = t.task.feedback[ins.addr];
    std::vector<int> bits;
    std::int64_t tc = now;
    for (std::size_t i = 0; i < e.input_mask.size(); ++i) {
      auto it = t.results.find({t.shot, e.input_mask[i], e.ordinals[i]});
      if (it == t.results.end()) {
        t.waiting_feedback = true;
        return;
      }
      bits.push_back(it->second.first);
      tc = std::max(tc, it->second.second);
    }
    t.waiting_feedback = false;
    if (tc > now) {
      schedule_ctrl(t, tc);
      return;
    }
    std::int64_t packed = 0;
    for (std::size_t i = 0; i < bits.size() && i < 62; ++i) packed |= std::int64_t{bits[i]} << i;
    record(EventKind::kFeedbackCollected, now, h.root(), t, t.shot,
           static_cast<std::int64_t>(e.addr), packed);
    const std::int64_t value = e.decide(bits);
    const std::int64_t decided = now + opt.decision_ns;
    std::int64_t completion = decided;
    for (NodeId unit : e.outputs) {
      const std::int64_t d = decided + h.feedback_path_ns(unit);
      record(EventKind::kFeedbackDelivered, d, unit, t, t.shot, value,
             static_cast<std::int64_t>(e.addr));
      completion = std::max(completion, d);
      auto it = t.unit_index.find(unit);
      if (it == t.unit_index.end()) continue;
      UnitRun& u = t.units[it->second];
      u.deliveries.push_back({t.shot, d, e.target_register, value});
      advance(t, u);
    }
    if (e.target_register < t.registers.size()) t.registers[e.target_register] = value;
    ++stats(t).feedbacks;
    ++t.pc;
    t.expect_trigger0 = true;
    schedule_ctrl(t, completion);
  }

  void on_result(TaskRun& t, std::uint32_t shot, QubitId q, std::uint32_t ordinal, int bit,
                 std::int64_t arrival) {
    t.results[{shot, q, ordinal}] = {bit, arrival};
    if (t.waiting_feedback && !t.step_pending) schedule_ctrl(t, now);
  }

  // -------------------------------------------------------------------------
  // Units

  void advance(TaskRun& t, UnitRun& u) {
    const Program& prog = u.up->program;
    const std::size_t n = prog.size();
    const NodeId unit = u.up->unit;
    while (!u.finished) {
      if (u.pc >= n) {
        ++t.units_finished;
        t.units_end = std::max(t.units_end, u.prev_end);
        while (!u.deliveries.empty() && u.deliveries.front().shot <= u.shot)
          u.deliveries.pop_front();
        ++u.shot;
        u.pc = 0;
        u.trigs_seen = 0;
        u.landed = 0;
        u.measures = 0;
        u.fb_measures = 0;
        if (u.shot >= t.task.shots) u.finished = true;
        check_shot_end(t);
        continue;
      }
      const Instruction& ins = prog.instructions[u.pc];
      if (ins.op == Opcode::kBr) {
        if (!u.branch_parsed) {
          u.pipe.parse_branch();
          u.branch_parsed = true;
        }
        // FEEDBACK j is issued in trigger segment j. A branch in segment s
        // reads its register once entries 0..s addressed to this unit landed.
        const std::size_t seg = u.trigs_seen == 0 ? 0 : u.trigs_seen - 1;
        const std::uint32_t need = u.need.empty() ? 0 : u.need[std::min(seg, u.need.size() - 1)];
        while (u.landed < need) {
          if (u.deliveries.empty() || u.deliveries.front().shot != u.shot) return;
          const Delivery d = u.deliveries.front();
          u.deliveries.pop_front();
          if (d.reg < u.registers.size()) u.registers[d.reg] = d.value;
          u.pipe.stall_parser_until(d.time);
          ++u.landed;
        }
        u.branch_parsed = false;
        const bool taken = u.registers[ins.rs] == ins.imm;
        const auto target = static_cast<std::int64_t>(u.pc) + (taken ? ins.offset : 1);
        if (target < 0 || target > static_cast<std::int64_t>(n))
          throw Error(Errc::kProgramContract,
                      fmt::format("unit {} branches out of bounds", prog.unit_id));
        u.pc = static_cast<std::size_t>(target);
        continue;
      }
      if (!u.staged) {
        u.cur = u.pipe.stage();
        u.staged = true;
      }
      std::int64_t due;
      std::int64_t begin;
      if (ins.trig) {
        if (u.triggers.empty()) return;
        ++u.trigs_seen;
        due = u.triggers.front();
        u.triggers.pop_front();
        if (u.prev_end > due) {
          record(EventKind::kTriggerOverrun, due, unit, t, u.shot, u.prev_end - due);
          ++stats(t).overruns;
          ++result.overruns;
        }
        begin = std::max({due, u.prev_end, u.cur.ready});
      } else {
        due = u.prev_end;
        begin = std::max(due, u.cur.ready);
      }
      if (u.cur.ready > due && (ins.trig || u.prev_end != kNever)) {
        record(EventKind::kFifoUnderflow, due, unit, t, u.shot, static_cast<std::int64_t>(u.pc),
               u.cur.ready - due);
        ++stats(t).underflows;
        ++result.underflows;
      }
      u.pipe.commit_start(begin);
      u.staged = false;
      const std::int64_t end = begin + ins.duration();
      const auto pc = static_cast<std::int64_t>(u.pc);
      switch (ins.op) {
        case Opcode::kGate:
          record(EventKind::kGateStart, begin, unit, t, u.shot, pc, static_cast<std::int64_t>(ins.addr));
          record(EventKind::kGateEnd, end, unit, t, u.shot, pc);
          break;
        case Opcode::kMeasure: {
          record(EventKind::kMeasureStart, begin, unit, t, u.shot, pc, ins.dtype);
          const QubitId q = u.up->measured_qubit.value_or(0);
          const int bit =
              opt.readout.sample(opt.seed, t.task.process_id, q, u.shot, u.measures++);
          record(EventKind::kMeasureResult, end, unit, t, u.shot, bit, ins.fb ? 1 : 0);
          if (ins.fb) on_result(t, u.shot, q, u.fb_measures++, bit, end + h.feedback_path_ns(unit));
          break;
        }
        case Opcode::kWait:
          break;
        default:
          throw Error(Errc::kProgramContract,
                      fmt::format("{} is not executable by unit {}", mnemonic(ins.op),
                                  prog.unit_id));
      }
      u.prev_end = end;
      ++u.pc;
    }
  }

  // -------------------------------------------------------------------------
  // Shots

  void check_shot_end(TaskRun& t) {
    if (t.shot_end_scheduled || !t.ctrl_done || t.units_finished < t.units.size()) return;
    std::int64_t end = std::max(t.ctrl_done_time, t.units_end);
    if (t.grant) end = std::max(end, *t.grant + t.task.shot_period_ns);
    end = std::max(end, now);
    t.shot_end_scheduled = true;
    TaskRun* tp = &t;
    push(end, kCallbackCls, [this, tp] { shot_end(*tp); });
  }

  void shot_end(TaskRun& t) {
    const std::int64_t length = t.grant ? now - *t.grant : 0;
    record(EventKind::kShotEnd, now, h.root(), t, t.shot, length);
    auto& st = stats(t);
    st.t_qpu += length;
    ++st.shots_done;
    t.results.erase(t.results.begin(), t.results.lower_bound({t.shot + 1, 0, 0}));
    ++t.shot;
    t.pc = 0;
    t.ctrl_done = false;
    t.units_finished = 0;
    t.units_end = kNever;
    t.grant.reset();
    t.shot_end_scheduled = false;
    t.expect_trigger0 = false;
    if (t.shot < t.task.shots) {
      ctrl_step(t);
      return;
    }
    t.done = true;
    st.done = now;
    record(EventKind::kTaskDone, now, h.root(), t, t.shot - 1);
    sched.mark_done(t.pid);
    sched.release(t.pid);
    for (auto& cb : done_cbs) cb(self, t.index, now);
    try_admit();
  }

  RunResult run() {
    if (running) throw Error(Errc::kInvalidArgument, "simulator already ran");
    running = true;
    if (opt.admission == AdmissionPolicy::kRejectOnConflict) precheck_conflicts();
    while (!queue.empty()) {
      QItem item = queue.top();
      queue.pop();
      now = item.time;
      item.fn();
    }
    result.end_time = now;
    std::vector<std::string> stuck;
    for (const auto& t : tasks)
      if (!t->done) stuck.push_back(fmt::format("task {} ({})", t->index,
                                                t->admitted ? "running" : "never admitted"));
    if (!stuck.empty()) {
      std::string msg = "event queue drained with unfinished work:";
      for (const auto& s : stuck) msg += " " + s;
      result.deadlock = msg;
    }
    result.timeline.sort();
    if (result.deadlock && opt.throw_on_deadlock) throw Error(Errc::kDeadlock, *result.deadlock);
    return std::move(result);
  }
};

Simulator::Simulator(const System& sys, SimOptions options)
    : impl_(std::make_unique<Impl>(*this, sys, std::move(options))) {}

Simulator::~Simulator() = default;

std::uint32_t Simulator::submit(CompiledTask task, std::int64_t at) {
  auto& im = *impl_;
  if (at < im.now) throw Error(Errc::kInvalidArgument, "cannot submit into the past");
  auto run = std::make_unique<TaskRun>();
  run->index = static_cast<std::uint32_t>(im.tasks.size());
  TaskStats st;
  st.task = run->index;
  st.name = task.name;
  st.n_qubits = task.qubits.size();
  st.submitted = at;
  run->task = std::move(task);
  im.result.tasks.push_back(st);
  const std::uint32_t idx = run->index;
  im.tasks.push_back(std::move(run));
  im.push(at, kAdmissionCls, [&im, idx] {
    im.admission.push_back(idx);
    im.try_admit();
  });
  return idx;
}

void Simulator::at(std::int64_t time, Callback fn) {
  auto& im = *impl_;
  if (time < im.now) throw Error(Errc::kInvalidArgument, "cannot schedule into the past");
  im.push(time, kCallbackCls, [this, f = std::move(fn)] { f(*this); });
}

void Simulator::on_task_done(DoneCallback fn) { impl_->done_cbs.push_back(std::move(fn)); }

RunResult Simulator::run() { return impl_->run(); }

std::int64_t Simulator::now() const { return impl_->now; }
const Scheduler& Simulator::scheduler() const { return impl_->sched; }
const System& Simulator::system() const { return impl_->sys; }

RunResult run(const std::vector<CompiledTask>& tasks, const System& sys, const SimOptions& options) {
  Simulator sim(sys, options);
  for (const auto& t : tasks) sim.submit(t, 0);
  return sim.run();
}

}  // namespace hima
