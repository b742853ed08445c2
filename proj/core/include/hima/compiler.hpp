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

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hima/circuit.hpp"
#include "hima/isa.hpp"
#include "hima/topology.hpp"

namespace hima {

struct GateTimeTable {
  std::int64_t single_ns = 30;
  std::int64_t two_ns = 40;
  std::int64_t measure_ns = 1000;
  std::int64_t grid_ns = 1;
  std::map<std::string, std::int64_t> overrides;  // by gate name

  std::int64_t duration(const Gate& g) const;
  /// Throws InvalidArgument unless every duration is positive and on the grid.
  void check() const;
};

/// The readout pulse played by a readout output unit.
inline constexpr const char* kReadoutWaveform = "readout";

struct UnitProgram {
  NodeId unit = kNoNode;
  UnitKind kind = UnitKind::kXy;
  UnitScope scope = UnitScope::kDriveOrReadoutOutput;
  Program program;
  std::map<std::uint64_t, std::int64_t> waveforms;  // addr -> duration stub
  std::map<std::uint64_t, std::string> waveform_names;
  std::optional<QubitId> measured_qubit;            // readout input units

  bool operator==(const UnitProgram&) const = default;
};

/// Register every compiled feedback decision is delivered to.
inline constexpr std::uint32_t kFeedbackRegister = 0;

struct FeedbackEntry {
  enum class Decision : std::uint8_t { kParity, kConstant };

  std::uint64_t addr = 0;
  std::vector<QubitId> input_mask;
  /// Which feedback measure of each masked qubit (0-based, per shot) to use.
  std::vector<std::uint32_t> ordinals;
  Decision decision = Decision::kParity;
  std::int64_t constant = 0;
  std::uint32_t target_register = kFeedbackRegister;
  std::vector<NodeId> outputs;

  /// Register value for the collected bits (parallel to input_mask).
  std::int64_t decide(const std::vector<int>& bits) const;
  bool operator==(const FeedbackEntry&) const = default;
};

struct CompileOptions {
  ProcessId process_id = 0;
  std::uint32_t shots = 1;
  std::int64_t shot_period_ns = 100'000;
  std::vector<QubitId> mapping;  // logical -> physical; empty means identity
};

struct CompiledTask {
  std::string name;
  ProcessId process_id = 0;
  std::vector<QubitId> qubits;        // physical, in logical order
  std::vector<UnitProgram> programs;  // sorted by unit id
  Program controller;
  MaskTable masks;
  std::vector<FeedbackEntry> feedback;
  std::vector<std::int64_t> segments;  // durations between trigger points
  std::uint32_t shots = 1;
  std::int64_t shot_period_ns = 100'000;
  std::int64_t circuit_duration_ns = 0;
  std::uint32_t depth = 0;

  std::vector<NodeId> units() const;
  const UnitProgram& program_for(NodeId unit) const;  // throws UnknownUnit
  bool has_feedback() const { return !feedback.empty(); }
  bool operator==(const CompiledTask&) const = default;
};

/// Lowers a layered circuit to per-unit programs plus a controller program.
/// Conditionals are lowered by duplicating the remainder of the circuit into
/// both branch paths. The else path ends in a BR on a register value known
/// to hold there, which jumps past the then path to the program end.
CompiledTask compile(const Circuit& circuit, const GateTimeTable& times, const System& sys,
                     const CompileOptions& options);

struct TimedInstruction {
  std::int64_t offset = 0;
  std::size_t index = 0;
  Instruction ins;
  bool operator==(const TimedInstruction&) const = default;
};

/// Prefix sums of durations in program order.
std::vector<TimedInstruction> timeline_of(const Program& program);
std::vector<TimedInstruction> timeline_of(const CompiledTask& task, NodeId unit);

/// Instructions executed along one path. `values[j]` is the register value
/// delivered by the j-th FEEDBACK of the shot. A BR in trigger segment s
/// reads its register once FEEDBACK 0..s have landed, which is the rule the
/// simulator applies. Offsets restart at 0 at each trigger
/// hold point; `segment` says which trigger segment a step belongs to.
struct PathStep {
  std::size_t segment = 0;
  std::int64_t offset = 0;  // within the segment
  std::size_t index = 0;
  Instruction ins;
};
std::vector<PathStep> walk_path(const Program& program, const std::vector<std::int64_t>& values,
                                std::uint32_t target_register = kFeedbackRegister,
                                std::uint32_t registers = 4);

/// Human-readable dump of feedback entries, one per line.
std::string format_feedback(const Hierarchy& h, const std::vector<FeedbackEntry>& entries);

}  // namespace hima
