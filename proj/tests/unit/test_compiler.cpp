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

#include <gtest/gtest.h>

#include <random>
#include <set>
#include <tuple>

#include "hima/compiler.hpp"
#include "hima/oracle.hpp"
#include "hima/topology_config.hpp"
#include "oracles.hpp"

namespace hima {
namespace {

const System& origin() {
  static const System s = load_system(testing::data_path("topologies/origin72.cfg"));
  return s;
}
const System& small() {
  static const System s = load_system(testing::data_path("topologies/small.cfg"));
  return s;
}

CompiledTask compile_text(std::string_view text, const System& sys, CompileOptions opt = {}) {
  return compile(parse_circuit(text), GateTimeTable{}, sys, opt);
}

Errc compile_error(std::string_view text, const System& sys, CompileOptions opt = {}) {
  try {
    compile_text(text, sys, std::move(opt));
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "compiled";
  return Errc::kIoError;
}

std::int64_t program_length(const Program& p) {
  std::int64_t t = 0;
  for (const auto& i : p.instructions) t += i.duration();
  return t;
}

// Starts of GATE / MEASURE per unit, computed straight from the circuit's
// layers without looking at any compiled program.
using Start = std::tuple<NodeId, std::int64_t, Opcode>;

std::set<Start> layer_schedule(const Circuit& c, const System& sys, const std::vector<QubitId>& phys,
                               const GateTimeTable& t) {
  std::set<Start> out;
  std::int64_t at = 0;
  for (const auto& item : c.items) {
    const Layer& l = std::get<Layer>(item);
    std::int64_t len = 0;
    for (const auto& g : l.gates) {
      len = std::max(len, t.duration(g));
      const Qcn& a = sys.qcn(phys[g.q0]);
      if (g.kind == Gate::Kind::kSingle) {
        out.insert({a.xy_unit, at, Opcode::kGate});
      } else if (g.kind == Gate::Kind::kMeasure) {
        out.insert({a.readout_output_unit, at, Opcode::kGate});
        out.insert({a.readout_input_unit, at, Opcode::kMeasure});
      } else {
        const Qcn& b = sys.qcn(phys[g.q1]);
        for (NodeId u : {a.xy_unit, a.z_unit, b.xy_unit, b.z_unit}) out.insert({u, at, Opcode::kGate});
        for (const auto& cp : sys.couplers)
          if ((cp.a == a.qubit && cp.b == b.qubit) || (cp.a == b.qubit && cp.b == a.qubit))
            out.insert({cp.z_unit, at, Opcode::kGate});
      }
    }
    at += len;
  }
  return out;
}

TEST(Compiler, TwoLayerAlignment) {
  const CompiledTask t = compile_text("qubits 2\nlayer h q0\nlayer cz q0 q1\n", small());
  const Qcn& q0 = small().qcn(0);
  const Qcn& q1 = small().qcn(1);
  const auto& p1 = t.program_for(q1.xy_unit).program.instructions;
  ASSERT_GE(p1.size(), 2u);
  EXPECT_EQ(p1[0], Instruction::wait(30, true));
  EXPECT_EQ(p1[1].op, Opcode::kGate);
  EXPECT_EQ(p1[1].dur, 40);
  EXPECT_EQ(program_length(t.program_for(q0.xy_unit).program), 70);
  EXPECT_EQ(program_length(t.program_for(q1.xy_unit).program), 70);
  EXPECT_EQ(t.circuit_duration_ns, 70);
  // The coupler's Z line takes part in the two-qubit gate.
  const auto tl = timeline_of(t, small().couplers[0].z_unit);
  ASSERT_EQ(tl.size(), 2u);
  EXPECT_EQ(tl[1].offset, 30);
  EXPECT_EQ(tl[1].ins.op, Opcode::kGate);
}

TEST(Compiler, MeasureLowersToReadoutPair) {
  const CompiledTask t = compile_text("qubits 1\nlayer measure q0\n", small());
  const Qcn& q = small().qcn(0);
  const auto out = timeline_of(t, q.readout_output_unit);
  const auto in = timeline_of(t, q.readout_input_unit);
  ASSERT_FALSE(out.empty());
  ASSERT_FALSE(in.empty());
  EXPECT_EQ(out[0].ins.op, Opcode::kGate);
  EXPECT_EQ(out[0].ins.dur, 1000);
  const auto& up = t.program_for(q.readout_output_unit);
  EXPECT_EQ(up.waveform_names.at(out[0].ins.addr), kReadoutWaveform);
  EXPECT_EQ(in[0].ins, Instruction::measure(1000, 0, false, true));
  EXPECT_EQ(in[0].offset, out[0].offset);
  EXPECT_EQ(t.program_for(q.readout_input_unit).measured_qubit, std::optional<QubitId>(0));
}

TEST(Compiler, EmptyCircuit) {
  const CompiledTask t = compile_text("qubits 1\n", small());
  ASSERT_EQ(t.controller.instructions.size(), 1u);
  EXPECT_EQ(t.controller.instructions[0].op, Opcode::kTrigger);
  EXPECT_TRUE(t.controller.instructions[0].start);
  for (const auto& p : t.programs) EXPECT_EQ(program_length(p.program), 0);
  EXPECT_EQ(t.circuit_duration_ns, 0);
}

TEST(Compiler, BellEmitsFiveOrMorePrograms) {
  const CompiledTask t =
      compile(parse_circuit(read_file(testing::data_path("circuits/bell.circ"))), GateTimeTable{}, origin(), {});
  std::size_t xy = 0, z = 0, ro_out = 0, ro_in = 0;
  for (const auto& p : t.programs) {
    xy += p.kind == UnitKind::kXy;
    z += p.kind == UnitKind::kZ;
    ro_out += p.kind == UnitKind::kReadoutOutput;
    ro_in += p.kind == UnitKind::kReadoutInput;
  }
  EXPECT_GE(t.programs.size(), 5u);
  EXPECT_EQ(xy, 2u);
  EXPECT_GE(z, 1u);
  EXPECT_GE(ro_out, 1u);
  EXPECT_GE(ro_in, 1u);
  EXPECT_EQ(t.units(), origin().process_units(t.qubits));
}

TEST(Compiler, TimelineOfPrefixSums) {
  Program p;
  p.instructions = {Instruction::wait(30, true), Instruction::gate(0, 40, false)};
  const auto tl = timeline_of(p);
  ASSERT_EQ(tl.size(), 2u);
  EXPECT_EQ(tl[0].offset, 0);
  EXPECT_EQ(tl[1].offset, 30);
  EXPECT_EQ(tl[1].index, 1u);
  const CompiledTask t = compile_text("qubits 1\nlayer h q0\n", small());
  try {
    timeline_of(t, small().qcn(1).xy_unit);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kUnknownUnit);
  }
}

TEST(Compiler, Errors) {
  CompileOptions opt;
  opt.mapping = {0};
  EXPECT_EQ(compile_error("qubits 2\nlayer h q0\n", small(), opt), Errc::kUnmappedQubit);
  opt.mapping = {0, 9};
  EXPECT_EQ(compile_error("qubits 2\nlayer h q0\n", small(), opt), Errc::kUnmappedQubit);
  CompileOptions shortp;
  shortp.shot_period_ns = 1500;
  EXPECT_EQ(compile_error("qubits 1\nlayer measure q0\nlayer measure q0\n", small(), shortp),
            Errc::kShotPeriodTooShort);
  shortp.shot_period_ns = 2000;
  EXPECT_NO_THROW(compile_text("qubits 1\nlayer measure q0\nlayer measure q0\n", small(), shortp));
  GateTimeTable bad;
  bad.single_ns = 0;
  EXPECT_THROW(compile(parse_circuit("qubits 1\nlayer h q0\n"), bad, small(), {}), Error);
  GateTimeTable grid;
  grid.grid_ns = 4;
  grid.single_ns = 30;
  EXPECT_THROW(grid.check(), Error);
}

TEST(Compiler, GateTimeOverrides) {
  GateTimeTable t;
  t.overrides["sx"] = 20;
  EXPECT_EQ(t.duration(Gate::single("sx", 0)), 20);
  EXPECT_EQ(t.duration(Gate::single("h", 0)), 30);
  EXPECT_EQ(t.duration(Gate::two("cz", 0, 1)), 40);
  EXPECT_EQ(t.duration(Gate::measure(0, false)), 1000);
  const CompiledTask c = compile(parse_circuit("qubits 2\nlayer sx q0; h q1\n"), t, small(), {});
  // Short gate is left-aligned and padded to the layer length.
  const auto& code = c.program_for(small().qcn(0).xy_unit).program.instructions;
  ASSERT_EQ(code.size(), 2u);
  EXPECT_EQ(code[1], Instruction::wait(10, false));
}

TEST(Compiler, Idempotent) {
  const std::string text = read_file(testing::data_path("circuits/teleport.circ"));
  CompileOptions opt;
  opt.mapping = {24, 25, 26};
  opt.process_id = 3;
  EXPECT_EQ(compile_text(text, origin(), opt), compile_text(text, origin(), opt));
}

// Alignment, oracle agreement and first-instruction trig over random
// feedback-free circuits.
TEST(Compiler, RandomCircuitsMatchLayerSchedule) {
  std::mt19937_64 rng(17);
  const GateTimeTable times;
  for (int i = 0; i < 150; ++i) {
    const QubitId base = static_cast<QubitId>(rng() % 3) * 24 + static_cast<QubitId>(rng() % 8);
    std::vector<QubitId> phys;
    for (QubitId q = base; q < base + 8; ++q) phys.push_back(q);
    const Circuit c = testing::random_circuit(rng, origin(), phys);
    CompileOptions opt;
    opt.mapping.assign(phys.begin(), phys.begin() + c.num_qubits);
    const CompiledTask t = compile(c, times, origin(), opt);

    std::set<Start> got;
    for (const auto& e : flat_oracle(t, 0)) got.insert({e.unit, e.time, e.ins.op});
    EXPECT_EQ(got, layer_schedule(c, origin(), opt.mapping, times)) << format_circuit(c);

    for (const auto& p : t.programs) {
      EXPECT_EQ(program_length(p.program), t.circuit_duration_ns);
      ASSERT_FALSE(p.program.instructions.empty());
      EXPECT_TRUE(p.program.instructions.front().trig);
      for (std::size_t k = 1; k < p.program.instructions.size(); ++k) EXPECT_FALSE(p.program.instructions[k].trig);
      EXPECT_TRUE(validate_program(p.program, p.scope).empty());
    }
  }
}

// ---------------------------------------------------------------------------
// Feedback lowering

std::vector<std::int64_t> gate_offsets(const std::vector<PathStep>& path, std::size_t segment) {
  std::vector<std::int64_t> out;
  for (const auto& s : path)
    if (s.segment == segment && (s.ins.op == Opcode::kGate || s.ins.op == Opcode::kMeasure))
      out.push_back(s.offset);
  return out;
}

TEST(Feedback, ResetLowering) {
  const CompiledTask t = compile(parse_circuit(read_file(testing::data_path("circuits/reset.circ"))),
                                 GateTimeTable{}, small(), {});
  ASSERT_EQ(t.feedback.size(), 1u);
  const FeedbackEntry& fe = t.feedback[0];
  EXPECT_EQ(fe.input_mask, std::vector<QubitId>{0});
  EXPECT_EQ(fe.target_register, kFeedbackRegister);
  EXPECT_EQ(fe.decide({1}), 1);
  EXPECT_EQ(fe.decide({0}), 0);
  // Controller: start trigger, FEEDBACK, then TRIGGER 0 0.
  const auto& cc = t.controller.instructions;
  ASSERT_GE(cc.size(), 3u);
  EXPECT_EQ(cc[0], Instruction::trigger(true, false));
  EXPECT_EQ(cc[1], Instruction::feedback(0));
  EXPECT_EQ(cc[2], Instruction::trigger(false, false));
  EXPECT_EQ(t.segments.size(), 2u);

  const Qcn& q = small().qcn(0);
  const auto& xy = t.program_for(q.xy_unit).program;
  // Read 1: the pi pulse plays first thing after the feedback trigger.
  EXPECT_EQ(gate_offsets(walk_path(xy, {1}), 1), std::vector<std::int64_t>{0});
  EXPECT_TRUE(gate_offsets(walk_path(xy, {0}), 1).empty());
  // The readout pair measures again 30 ns into the segment either way.
  const auto& ro = t.program_for(q.readout_input_unit).program;
  EXPECT_EQ(gate_offsets(walk_path(ro, {0}), 1), std::vector<std::int64_t>{30});
  EXPECT_EQ(gate_offsets(walk_path(ro, {1}), 1), std::vector<std::int64_t>{30});
  EXPECT_EQ(gate_offsets(walk_path(ro, {0}), 0), std::vector<std::int64_t>{0});
  // fb flag on the first measure only.
  const auto path = walk_path(ro, {0});
  EXPECT_TRUE(path[0].ins.fb);
}

TEST(Feedback, BranchesHaveEqualLength) {
  const std::string text =
      "qubits 2\nlayer measure q0 fb\nif q0 == 1\nlayer x q0\nlayer x q1\nelse\nlayer h q0\nend\n"
      "layer cz q0 q1\n";
  const CompiledTask t = compile_text(text, small());
  for (const auto& p : t.programs) {
    std::set<std::int64_t> lengths;
    for (std::int64_t v : {0, 1}) {
      std::int64_t len = 0;
      for (const auto& s : walk_path(p.program, {v})) len = std::max(len, s.offset + s.ins.duration());
      lengths.insert(len);
    }
    EXPECT_EQ(lengths.size(), 1u) << p.unit;
  }
  // The cz after the conditional starts at the same segment offset on both paths.
  const auto& cz = t.program_for(small().couplers[0].z_unit).program;
  EXPECT_EQ(gate_offsets(walk_path(cz, {0}), 1), std::vector<std::int64_t>{60});
  EXPECT_EQ(gate_offsets(walk_path(cz, {1}), 1), std::vector<std::int64_t>{60});
}

TEST(Feedback, SequentialConditionals) {
  const std::string text =
      "qubits 1\nlayer measure q0 fb\nif q0 == 1\nlayer x q0\nend\nlayer measure q0 fb\n"
      "if q0 == 0\nlayer h q0\nelse\nlayer x q0\nend\n";
  const CompiledTask t = compile_text(text, small());
  ASSERT_EQ(t.feedback.size(), 2u);
  EXPECT_EQ(t.feedback[1].ordinals, std::vector<std::uint32_t>{1});
  const auto& xy = t.program_for(small().qcn(0).xy_unit).program;
  for (std::int64_t a : {0, 1})
    for (std::int64_t b : {0, 1}) {
      const auto path = walk_path(xy, {a, b});
      const auto s1 = gate_offsets(path, 1);
      const auto s2 = gate_offsets(path, 2);
      EXPECT_EQ(s1.size(), static_cast<std::size_t>(a == 1));
      ASSERT_EQ(s2.size(), 1u);
      EXPECT_EQ(s2[0], 0);
      // The gate played in segment 2 follows the second decision.
      const auto& wf = t.program_for(small().qcn(0).xy_unit).waveform_names;
      for (const auto& s : path)
        if (s.segment == 2 && s.ins.op == Opcode::kGate) EXPECT_EQ(wf.at(s.ins.addr), b == 0 ? "h" : "x");
    }
}

TEST(Feedback, ParityOverTwoQubits) {
  FeedbackEntry e;
  e.input_mask = {0, 1};
  e.decision = FeedbackEntry::Decision::kParity;
  EXPECT_EQ(e.decide({0, 0}), 0);
  EXPECT_EQ(e.decide({1, 0}), 1);
  EXPECT_EQ(e.decide({1, 1}), 0);
  e.decision = FeedbackEntry::Decision::kConstant;
  e.constant = 0;
  EXPECT_EQ(e.decide({1, 0}), 0);
}

TEST(Feedback, RandomConditionalCircuitsStayAligned) {
  std::mt19937_64 rng(23);
  testing::CircuitShape shape;
  shape.max_qubits = 5;
  shape.max_layers = 8;
  shape.conditional_rate = 0.35;
  std::vector<QubitId> phys{0, 1, 2, 3, 4};
  int with_feedback = 0;
  for (int i = 0; i < 120; ++i) {
    const Circuit c = testing::random_circuit(rng, origin(), phys, shape);
    CompileOptions opt;
    opt.mapping.assign(phys.begin(), phys.begin() + c.num_qubits);
    const CompiledTask t = compile(c, GateTimeTable{}, origin(), opt);
    with_feedback += t.has_feedback();
    const std::size_t nf = t.feedback.size();
    for (std::uint32_t mask = 0; mask < (1u << std::min<std::size_t>(nf, 6)); ++mask) {
      std::vector<std::int64_t> values(nf);
      for (std::size_t j = 0; j < nf; ++j) values[j] = (mask >> (j % 6)) & 1;
      // Every unit reaches the end of each segment at the same offset.
      std::map<std::size_t, std::set<std::int64_t>> ends;
      std::set<std::size_t> segs;
      for (const auto& p : t.programs) {
        std::map<std::size_t, std::int64_t> end;
        for (const auto& s : walk_path(p.program, values)) end[s.segment] = std::max(end[s.segment], s.offset + s.ins.duration());
        for (const auto& [seg, e] : end) ends[seg].insert(e);
        for (std::size_t seg = 0; seg <= nf; ++seg) ends[seg].insert(end.count(seg) ? end[seg] : 0);
      }
      for (const auto& [seg, e] : ends) EXPECT_EQ(e.size(), 1u) << format_circuit(c) << " seg " << seg;
    }
    for (const auto& p : t.programs) EXPECT_TRUE(validate_program(p.program, p.scope).empty());
  }
  EXPECT_GT(with_feedback, 20);
}

}  // namespace
}  // namespace hima
