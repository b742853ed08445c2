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

#include "hima/oracle.hpp"

#include <algorithm>
#include <tuple>

#include <fmt/format.h>

#include "hima/error.hpp"

namespace hima {

namespace {

void sort_entries(std::vector<OracleEntry>& out) {
  std::sort(out.begin(), out.end(), [](const OracleEntry& a, const OracleEntry& b) {
    return std::tie(a.time, a.unit, a.index) < std::tie(b.time, b.unit, b.index);
  });
}

constexpr std::uint32_t kMaxRegisters = 64;

bool emits(const Instruction& ins) {
  return ins.op == Opcode::kGate || ins.op == Opcode::kMeasure;
}

}  // namespace

std::vector<OracleEntry> flat_oracle(const CompiledTask& task, std::int64_t trigger_time) {
  std::vector<OracleEntry> out;
  for (const auto& up : task.programs) {
    std::int64_t t = trigger_time;
    for (std::size_t i = 0; i < up.program.size(); ++i) {
      const Instruction& ins = up.program.instructions[i];
      if (ins.op == Opcode::kBr)
        throw Error(Errc::kInvalidArgument,
                    "flat_oracle without decisions needs a feedback-free task");
      if (emits(ins)) out.push_back({up.unit, t, i, ins});
      t += ins.duration();
    }
  }
  sort_entries(out);
  return out;
}

std::vector<OracleEntry> flat_oracle(const CompiledTask& task,
                                     const std::vector<std::int64_t>& segment_starts,
                                     const std::vector<std::int64_t>& values) {
  if (values.size() < task.feedback.size())
    throw Error(Errc::kInvalidArgument, "one register value per feedback entry is required");
  std::vector<OracleEntry> out;
  for (const auto& up : task.programs) {
    const Program& p = up.program;
    std::int64_t regs[kMaxRegisters] = {};
    std::size_t pc = 0;
    std::size_t seg = 0;
    std::size_t landed = 0;
    std::int64_t offset = 0;
    bool started = false;
    while (pc < p.size()) {
      const Instruction& ins = p.instructions[pc];
      if (ins.op == Opcode::kBr) {
        // FEEDBACK j is issued in segment j; by the time a branch in segment
        // `seg` reads a register, entries 0..seg have been delivered.
        for (; landed < task.feedback.size() && landed <= seg; ++landed) {
          const auto r = task.feedback[landed].target_register;
          if (r < kMaxRegisters) regs[r] = values[landed];
        }
        const bool taken = ins.rs < kMaxRegisters && regs[ins.rs] == ins.imm;
        pc = static_cast<std::size_t>(static_cast<std::int64_t>(pc) + (taken ? ins.offset : 1));
        continue;
      }
      if (ins.trig) {
        if (started) ++seg;
        offset = 0;
      }
      started = true;
      if (seg >= segment_starts.size())
        throw Error(Errc::kInvalidArgument, "not enough segment start times supplied");
      if (emits(ins)) out.push_back({up.unit, segment_starts[seg] + offset, pc, ins});
      offset += ins.duration();
      ++pc;
    }
  }
  sort_entries(out);
  return out;
}

}  // namespace hima
