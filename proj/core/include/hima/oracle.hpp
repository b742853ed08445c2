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
#include <vector>

#include "hima/compiler.hpp"

namespace hima {

struct OracleEntry {
  NodeId unit = kNoNode;
  std::int64_t time = 0;
  std::size_t index = 0;
  Instruction ins;
  bool operator==(const OracleEntry&) const = default;
};

/// Brute-force schedule that ignores the hierarchy: every unit's program is
/// laid at `trigger_time` plus prefix sums. Only GATE and MEASURE starts are
/// listed, sorted by (time, unit, index). Feedback-free tasks only.
std::vector<OracleEntry> flat_oracle(const CompiledTask& task, std::int64_t trigger_time);

/// Variant with supplied branch decisions: `values[i]` is the register value
/// delivered by the i-th feedback, and `segment_starts[s]` the time trigger
/// segment s begins.
std::vector<OracleEntry> flat_oracle(const CompiledTask& task,
                                     const std::vector<std::int64_t>& segment_starts,
                                     const std::vector<std::int64_t>& values);

}  // namespace hima
