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

#include "hima/compiler.hpp"

#include <algorithm>
#include <limits>
#include <set>

#include <fmt/format.h>

#include "hima/error.hpp"

namespace hima {

std::int64_t GateTimeTable::duration(const Gate& g) const {
  if (auto it = overrides.find(g.name); it != overrides.end()) return it->second;
  switch (g.kind) {
    case Gate::Kind::kSingle: return single_ns;
    case Gate::Kind::kTwo: return two_ns;
    case Gate::Kind::kMeasure: return measure_ns;
  }
  return 0;
}

void GateTimeTable::check() const {
  if (grid_ns <= 0) throw Error(Errc::kInvalidArgument, "gate time grid must be positive");
  auto one = [&](std::string_view name, std::int64_t d) {
    if (d <= 0 || d % grid_ns != 0)
      throw Error(Errc::kInvalidArgument,
                  fmt::format("duration of '{}' ({} ns) must be positive and a multiple of {} ns",
                              name, d, grid_ns));
  };
  one("single-qubit", single_ns);
  one("two-qubit", two_ns);
  one("measure", measure_ns);
  for (const auto& [name, d] : overrides) one(name, d);
}

std::int64_t FeedbackEntry::decide(const std::vector<int>& bits) const {
  if (decision == Decision::kConstant) return constant;
  int parity = 0;
  for (int b : bits) parity ^= (b & 1);
  return parity;
}

std::vector<NodeId> CompiledTask::units() const {
  std::vector<NodeId> out;
  out.reserve(programs.size());
  for (const auto& p : programs) out.push_back(p.unit);
  return out;
}

const UnitProgram& CompiledTask::program_for(NodeId unit) const {
  auto it = std::lower_bound(programs.begin(), programs.end(), unit,
                             [](const UnitProgram& p, NodeId u) { return p.unit < u; });
  if (it == programs.end() || it->unit != unit)
    throw Error(Errc::kUnknownUnit, fmt::format("unit {} is not part of task '{}'", unit, name));
  return *it;
}

namespace {

struct Action {
  bool measure = false;
  bool fb = false;
  std::string waveform;
  std::int64_t dur = 0;
};

/// Per-unit instruction stream with WAIT coalescing and a pending trigger
/// hold that attaches to the next emitted instruction.
struct Stream {
  std::vector<Instruction> code;
  bool pending_trig = false;

  void wait(std::int64_t dur) {
    if (dur == 0 && !pending_trig) return;
    if (!pending_trig && !code.empty() && code.back().op == Opcode::kWait) {
      code.back().dur += dur;
      return;
    }
    code.push_back(Instruction::wait(dur, pending_trig));
    pending_trig = false;
  }
  void gate(std::uint64_t addr, std::int64_t dur) {
    code.push_back(Instruction::gate(addr, dur, pending_trig));
    pending_trig = false;
  }
  void measure(std::int64_t dur, bool fb) {
    code.push_back(Instruction::measure(dur, 0, fb, pending_trig));
    pending_trig = false;
  }
  void flush() {
    if (pending_trig) wait(0);
  }
};

class Lowerer {
 public:
  Lowerer(const Circuit& c, const GateTimeTable& t, const System& sys,
          const std::vector<QubitId>& phys, std::vector<UnitProgram>& programs)
      : circuit_(c), times_(t), sys_(sys), phys_(phys), programs_(programs) {
    for (std::size_t i = 0; i < programs_.size(); ++i) index_[programs_[i].unit] = i;
  }

  std::int64_t layer_duration(const Layer& l) const {
    std::int64_t d = 0;
    for (const auto& g : l.gates) d = std::max(d, times_.duration(g));
    return d;
  }

  struct Block {
    std::vector<std::vector<Instruction>> code;
    /// Register value known to hold when control falls off the end of the
    /// block, or nullopt when no conditional ran.
    std::optional<std::int64_t> exit_value;
  };

  /// Code for: `lead` layers, a `pad` wait, then circuit items from `from`.
  /// Every path runs to the end of the circuit, so the else path of a
  /// conditional closes with a branch to the program end that is always
  /// taken on that path.
  Block lower(std::size_t from, const std::vector<Layer>& lead, std::int64_t pad, bool trig,
              bool flush) {
    std::vector<Stream> s(programs_.size());
    for (auto& st : s) st.pending_trig = trig;
    for (const auto& l : lead) emit_layer(l, s);
    if (pad > 0)
      for (auto& st : s) st.wait(pad);
    for (std::size_t k = from; k < circuit_.items.size(); ++k) {
      const auto& item = circuit_.items[k];
      if (const auto* l = std::get_if<Layer>(&item)) {
        emit_layer(*l, s);
        continue;
      }
      const auto& cond = std::get<Conditional>(item);
      std::int64_t then_len = 0, else_len = 0;
      for (const auto& l : cond.then_layers) then_len += layer_duration(l);
      for (const auto& l : cond.else_layers) else_len += layer_duration(l);
      const std::int64_t longest = std::max(then_len, else_len);
      Block else_b = lower(k + 1, cond.else_layers, longest - else_len, true, true);
      Block then_b = lower(k + 1, cond.then_layers, longest - then_len, true, true);
      // Falling off the else block either left a later conditional's then
      // path (its value holds) or never branched again (parity is flipped).
      const std::int64_t else_exit = else_b.exit_value.value_or(1 - cond.value);
      for (std::size_t u = 0; u < s.size(); ++u) {
        s[u].flush();
        auto& code = s[u].code;
        const auto offset = static_cast<std::int64_t>(2 + else_b.code[u].size());
        code.push_back(Instruction::br(kFeedbackRegister, cond.value, offset));
        code.insert(code.end(), else_b.code[u].begin(), else_b.code[u].end());
        code.push_back(Instruction::br(kFeedbackRegister, else_exit, kEndOffset));
        code.insert(code.end(), then_b.code[u].begin(), then_b.code[u].end());
      }
      return {collect(s), then_b.exit_value.value_or(cond.value)};
    }
    if (flush)
      for (auto& st : s) st.flush();
    return {collect(s), std::nullopt};
  }

  /// Placeholder offset for branches to the program end, patched once the
  /// program length is known.
  static constexpr std::int64_t kEndOffset = std::numeric_limits<std::int64_t>::min();

  static void patch_end_jumps(std::vector<Instruction>& code) {
    const auto n = static_cast<std::int64_t>(code.size());
    for (std::int64_t i = 0; i < n; ++i)
      if (code[i].op == Opcode::kBr && code[i].offset == kEndOffset) code[i].offset = n - i;
  }

 private:
  static std::vector<std::vector<Instruction>> collect(std::vector<Stream>& s) {
    std::vector<std::vector<Instruction>> out;
    out.reserve(s.size());
    for (auto& st : s) out.push_back(std::move(st.code));
    return out;
  }

  std::size_t slot(NodeId unit) const { return index_.at(unit); }

  std::uint64_t waveform(std::size_t u, const std::string& name, std::int64_t dur) {
    auto& table = waves_[u];
    auto [it, inserted] = table.try_emplace({name, dur}, table.size());
    if (inserted) {
      programs_[u].waveforms[it->second] = dur;
      programs_[u].waveform_names[it->second] = name;
    }
    return it->second;
  }

  void emit_layer(const Layer& l, std::vector<Stream>& s) {
    const std::int64_t len = layer_duration(l);
    std::map<std::size_t, Action> acts;
    auto put = [&](NodeId unit, Action a) {
      if (unit != kNoNode) acts[slot(unit)] = std::move(a);
    };
    for (const auto& g : l.gates) {
      const std::int64_t d = times_.duration(g);
      const Qcn& a = sys_.qcn(phys_[g.q0]);
      switch (g.kind) {
        case Gate::Kind::kSingle:
          put(a.xy_unit, {false, false, g.name, d});
          break;
        case Gate::Kind::kTwo: {
          const Qcn& b = sys_.qcn(phys_[g.q1]);
          for (NodeId u : {a.xy_unit, b.xy_unit, a.z_unit, b.z_unit})
            put(u, {false, false, g.name, d});
          if (const Coupler* c = sys_.coupler_between(a.qubit, b.qubit))
            put(c->z_unit, {false, false, g.name, d});
          break;
        }
        case Gate::Kind::kMeasure:
          put(a.readout_output_unit, {false, false, kReadoutWaveform, d});
          put(a.readout_input_unit, {true, g.fb, "", d});
          break;
      }
    }
    for (std::size_t u = 0; u < s.size(); ++u) {
      auto it = acts.find(u);
      if (it == acts.end()) {
        s[u].wait(len);
        continue;
      }
      const Action& a = it->second;
      if (a.measure) {
        s[u].measure(a.dur, a.fb);
      } else {
        s[u].gate(waveform(u, a.waveform, a.dur), a.dur);
      }
      s[u].wait(len - a.dur);
    }
  }

  const Circuit& circuit_;
  const GateTimeTable& times_;
  const System& sys_;
  const std::vector<QubitId>& phys_;
  std::vector<UnitProgram>& programs_;
  std::map<NodeId, std::size_t> index_;
  std::map<std::size_t, std::map<std::pair<std::string, std::int64_t>, std::uint64_t>> waves_;
};

}  // namespace

CompiledTask compile(const Circuit& circuit, const GateTimeTable& times, const System& sys,
                     const CompileOptions& options) {
  times.check();
  check_circuit(circuit);
  if (options.shots == 0) throw Error(Errc::kInvalidArgument, "shots must be >= 1");

  std::vector<QubitId> phys = options.mapping;
  if (phys.empty())
    for (LogicalQubit q = 0; q < circuit.num_qubits; ++q) phys.push_back(q);
  if (phys.size() < circuit.num_qubits)
    throw Error(Errc::kUnmappedQubit,
                fmt::format("circuit uses {} qubits but the mapping lists {}", circuit.num_qubits,
                            phys.size()));
  phys.resize(circuit.num_qubits);
  if (std::set<QubitId>(phys.begin(), phys.end()).size() != phys.size())
    throw Error(Errc::kInvalidCircuit, "qubit mapping repeats a physical qubit");
  for (QubitId q : phys)
    if (sys.qcns.count(q) == 0)
      throw Error(Errc::kUnmappedQubit, fmt::format("physical qubit {} has no QCN", q));

  CompiledTask task;
  task.name = circuit.name;
  task.process_id = options.process_id;
  task.qubits = phys;
  task.shots = options.shots;
  task.shot_period_ns = options.shot_period_ns;
  task.depth = circuit.depth();

  const Hierarchy& h = sys.hierarchy;
  std::vector<NodeId> units = phys.empty() ? std::vector<NodeId>{} : sys.process_units(phys);
  std::map<NodeId, QubitId> readout_of;
  for (QubitId q : phys) readout_of[sys.qcn(q).readout_input_unit] = q;
  for (NodeId u : units) {
    UnitProgram up;
    up.unit = u;
    up.kind = h.node(u).unit_kind;
    up.scope = up.kind == UnitKind::kReadoutInput ? UnitScope::kReadoutInput
                                                  : UnitScope::kDriveOrReadoutOutput;
    up.program.unit_id = h.node(u).name;
    if (auto it = readout_of.find(u); it != readout_of.end()) up.measured_qubit = it->second;
    task.programs.push_back(std::move(up));
  }

  Lowerer lower(circuit, times, sys, phys, task.programs);
  auto code = lower.lower(0, {}, 0, true, false).code;
  for (std::size_t u = 0; u < code.size(); ++u) {
    Lowerer::patch_end_jumps(code[u]);
    task.programs[u].program.instructions = std::move(code[u]);
  }

  // Controller program, feedback table and trigger segments.
  task.controller.unit_id = "controller";
  task.controller.instructions.push_back(Instruction::trigger(true, false));
  std::map<LogicalQubit, std::uint32_t> fb_count;
  std::int64_t segment = 0;
  for (const auto& item : circuit.items) {
    if (const auto* l = std::get_if<Layer>(&item)) {
      segment += lower.layer_duration(*l);
      for (const auto& g : l->gates)
        if (g.kind == Gate::Kind::kMeasure && g.fb) ++fb_count[g.q0];
      continue;
    }
    const auto& cond = std::get<Conditional>(item);
    task.segments.push_back(segment);
    task.circuit_duration_ns += segment;
    FeedbackEntry e;
    e.addr = task.feedback.size();
    for (auto q : cond.qubits) {
      e.input_mask.push_back(phys[q]);
      e.ordinals.push_back(fb_count.at(q) - 1);
    }
    e.outputs = units;
    task.controller.instructions.push_back(Instruction::feedback(e.addr));
    task.controller.instructions.push_back(Instruction::trigger(false, false));
    task.feedback.push_back(std::move(e));
    std::int64_t then_len = 0, else_len = 0;
    for (const auto& l : cond.then_layers) then_len += lower.layer_duration(l);
    for (const auto& l : cond.else_layers) else_len += lower.layer_duration(l);
    segment = std::max(then_len, else_len);
  }
  task.segments.push_back(segment);
  task.circuit_duration_ns += segment;
  if (segment > 0) task.controller.instructions.push_back(Instruction::wait(segment, false));

  if (options.shot_period_ns < task.circuit_duration_ns)
    throw Error(Errc::kShotPeriodTooShort,
                fmt::format("shot period {} ns is shorter than the circuit ({} ns)",
                            options.shot_period_ns, task.circuit_duration_ns));

  task.masks = phys.empty() ? MaskTable{}
                            : compute_masks_for_units(h, options.process_id, units);
  return task;
}

std::vector<TimedInstruction> timeline_of(const Program& program) {
  std::vector<TimedInstruction> out;
  out.reserve(program.size());
  std::int64_t t = 0;
  for (std::size_t i = 0; i < program.size(); ++i) {
    out.push_back({t, i, program.instructions[i]});
    t += program.instructions[i].duration();
  }
  return out;
}

std::vector<TimedInstruction> timeline_of(const CompiledTask& task, NodeId unit) {
  return timeline_of(task.program_for(unit).program);
}

std::vector<PathStep> walk_path(const Program& program, const std::vector<std::int64_t>& values,
                                std::uint32_t target_register, std::uint32_t registers) {
  std::vector<PathStep> out;
  std::vector<std::int64_t> regs(registers, 0);
  std::size_t seg = 0;
  std::size_t applied = 0;
  std::int64_t t = 0;
  std::size_t pc = 0;
  bool started = false;
  const std::size_t n = program.size();
  while (pc < n) {
    const Instruction& ins = program.instructions[pc];
    if (ins.trig) {
      if (started) ++seg;
      t = 0;
    }
    started = true;
    out.push_back({seg, t, pc, ins});
    t += ins.duration();
    if (ins.op == Opcode::kBr) {
      for (; applied < values.size() && applied <= seg; ++applied)
        if (target_register < regs.size()) regs[target_register] = values[applied];
      const bool take = ins.rs < regs.size() && regs[ins.rs] == ins.imm;
      const auto target = static_cast<std::int64_t>(pc) + (take ? ins.offset : 1);
      if (target < 0) break;
      pc = static_cast<std::size_t>(target);
      continue;
    }
    ++pc;
  }
  return out;
}

std::string format_feedback(const Hierarchy& h, const std::vector<FeedbackEntry>& entries) {
  std::string out;
  for (const auto& e : entries) {
    out += fmt::format("entry {} mask", e.addr);
    for (std::size_t i = 0; i < e.input_mask.size(); ++i)
      out += fmt::format(" Q{}#{}", e.input_mask[i], e.ordinals[i]);
    out += e.decision == FeedbackEntry::Decision::kParity
               ? std::string(" decision parity")
               : fmt::format(" decision const {}", e.constant);
    out += fmt::format(" reg {} outputs", e.target_register);
    for (NodeId u : e.outputs) out += fmt::format(" {}", h.node(u).name);
    out += '\n';
  }
  return out;
}

}  // namespace hima
