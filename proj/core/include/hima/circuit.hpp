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
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hima {

/// Logical qubit index inside a circuit (`q3` in text). The compiler maps it
/// to a physical QubitId.
using LogicalQubit = std::uint32_t;

struct Gate {
  enum class Kind : std::uint8_t { kSingle, kTwo, kMeasure };
  Kind kind = Kind::kSingle;
  std::string name;
  LogicalQubit q0 = 0;
  LogicalQubit q1 = 0;  // kTwo only
  bool fb = false;      // kMeasure only

  static Gate single(std::string name, LogicalQubit q);
  static Gate two(std::string name, LogicalQubit a, LogicalQubit b);
  static Gate measure(LogicalQubit q, bool fb);

  bool touches(LogicalQubit q) const { return q0 == q || (kind == Kind::kTwo && q1 == q); }
  bool operator==(const Gate&) const = default;
};

struct Layer {
  std::vector<Gate> gates;
  bool operator==(const Layer&) const = default;
};

/// `if <qubits> == value`: the condition holds when the parity of the latest
/// feedback-measured results of `qubits` equals `value`.
struct Conditional {
  std::vector<LogicalQubit> qubits;
  std::int64_t value = 1;
  std::vector<Layer> then_layers;
  std::vector<Layer> else_layers;
  bool operator==(const Conditional&) const = default;
};

using CircuitItem = std::variant<Layer, Conditional>;

struct Circuit {
  std::string name;
  std::uint32_t num_qubits = 0;
  std::vector<CircuitItem> items;

  bool operator==(const Circuit&) const = default;

  /// Number of layers along the longest path.
  std::uint32_t depth() const;
  bool has_feedback() const;
};

/// Text form, one statement per line, `#` starts a comment:
///   qubits 3
///   layer h q0; x q1
///   layer cz q0 q1
///   layer measure q0 fb; measure q1
///   if q0 == 1
///   layer x q0
///   else
///   layer id q0
///   end
/// Throws Error(InvalidCircuit) with "file:line:col: message".
Circuit parse_circuit(std::string_view text, std::string_view filename = "<circuit>");
std::string format_circuit(const Circuit& c);

/// Structural checks that do not need a topology: qubit indices in range,
/// one gate per qubit per layer, conditionals not nested, conditions only
/// after a feedback measure of each condition qubit.
void check_circuit(const Circuit& c);

}  // namespace hima
