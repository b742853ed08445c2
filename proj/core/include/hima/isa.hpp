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

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hima/error.hpp"

namespace hima {

enum class Opcode : std::uint8_t { kGate, kWait, kMeasure, kTrigger, kFeedback, kBr };

inline constexpr std::array<Opcode, 6> kAllOpcodes = {
    Opcode::kGate, Opcode::kWait, Opcode::kMeasure,
    Opcode::kTrigger, Opcode::kFeedback, Opcode::kBr};

std::string_view mnemonic(Opcode op);
std::optional<Opcode> opcode_from_mnemonic(std::string_view text);

/// Where a program runs: controller (C), qubit readout input unit (I), or a
/// drive / readout output unit (O).
enum class UnitScope : std::uint8_t { kController, kReadoutInput, kDriveOrReadoutOutput };

inline constexpr std::array<UnitScope, 3> kAllScopes = {
    UnitScope::kController, UnitScope::kReadoutInput, UnitScope::kDriveOrReadoutOutput};

char scope_letter(UnitScope scope);
std::optional<UnitScope> scope_from_letter(std::string_view text);

/// GATE->{O}; WAIT->{C,I,O}; MEASURE->{I}; TRIGGER->{C}; FEEDBACK->{C}; BR->{C,I,O}.
bool is_legal(Opcode op, UnitScope scope);

enum class MeasureData : std::uint8_t { kQubitState = 0, kIntermediate = 1, kRawInput = 2 };

/// One instruction. Only the operands of `op` are meaningful; the others stay
/// zero so that structural equality is well defined.
struct Instruction {
  Opcode op = Opcode::kWait;
  std::uint64_t addr = 0;   // GATE waveform index, FEEDBACK entry index
  std::int64_t dur = 0;     // ns
  bool trig = false;
  bool start = false;
  std::uint8_t dtype = 0;
  bool fb = false;
  std::uint32_t rs = 0;
  std::int64_t imm = 0;
  std::int64_t offset = 0;  // BR target = pc + offset

  static Instruction gate(std::uint64_t addr, std::int64_t dur, bool trig);
  static Instruction wait(std::int64_t dur, bool trig);
  static Instruction measure(std::int64_t dur, std::uint8_t dtype, bool fb, bool trig);
  static Instruction trigger(bool start, bool trig);
  static Instruction feedback(std::uint64_t addr);
  static Instruction br(std::uint32_t rs, std::int64_t imm, std::int64_t offset);

  /// Time the instruction occupies on its unit's timeline.
  std::int64_t duration() const;
  bool holds_for_trigger() const { return trig; }

  bool operator==(const Instruction&) const = default;
};

struct SourcePos {
  int line = 0;
  int column = 0;
};

struct Program {
  std::string unit_id;
  std::vector<Instruction> instructions;
  std::map<std::string, std::size_t> labels;  // assembly-time only
  std::vector<SourcePos> positions;           // parallel to instructions when parsed

  std::size_t size() const { return instructions.size(); }
  bool empty() const { return instructions.empty(); }
  std::int64_t timeline_length() const;

  /// Structural equality: unit id and instruction list. Labels and source
  /// positions are presentation details.
  friend bool operator==(const Program& a, const Program& b) {
    return a.unit_id == b.unit_id && a.instructions == b.instructions;
  }
};

struct Diagnostic {
  Errc code = Errc::kSyntaxError;
  std::string file;
  int line = 0;
  int column = 0;
  std::optional<std::size_t> index;
  std::string message;

  /// `file:line:col: code: message`
  std::string render() const;
  bool operator==(const Diagnostic&) const = default;
};

class AsmError : public Error {
 public:
  explicit AsmError(std::vector<Diagnostic> diagnostics);
  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

struct ParseOptions {
  std::string filename = "<input>";
};

/// Two-pass assembler. Grammar, one statement per line:
///   # comment
///   .unit <id>
///   <label>:
///   <label>: OPCODE op, op, ...
///   OPCODE op, op, ...
/// Operands are decimal (optionally signed) or 0x-hex integers; commas and
/// blanks both separate operands. The BR offset may name a label, which is
/// resolved to `target - pc`. Throws AsmError carrying every diagnostic.
Program parse_program(std::string_view text, UnitScope scope, const ParseOptions& options = {});

struct ValidateOptions {
  std::uint64_t addr_limit = std::uint64_t{1} << 16;
  std::uint32_t rs_limit = 64;
  std::string filename;
};

/// Checks scope legality, operand ranges, operand widths, and branch bounds.
/// A branch may target one past the last instruction (shot completion).
std::vector<Diagnostic> validate_program(const Program& program, UnitScope scope,
                                         const ValidateOptions& options = {});

/// Emits source that parses back to an equal Program. Branch targets get
/// synthetic `L<index>` labels.
std::string format_program(const Program& program);

std::string format_instruction(const Instruction& ins);

}  // namespace hima
