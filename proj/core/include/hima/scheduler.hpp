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
#include <utility>
#include <vector>

#include "hima/error.hpp"
#include "hima/topology.hpp"

namespace hima {

inline constexpr std::uint32_t kProcessCap = 32;

/// Minimum spacing between start-flagged triggers of two processes.
class StiTable {
 public:
  StiTable() = default;
  explicit StiTable(std::int64_t uniform) : default_(uniform) {}

  /// Sets both directions.
  void set(ProcessId a, ProcessId b, std::int64_t ns);
  /// Sets only a -> b (the spacing process `a` must keep after `b`).
  void set_directed(ProcessId a, ProcessId b, std::int64_t ns);
  std::int64_t get(ProcessId a, ProcessId b) const;
  std::int64_t default_ns() const { return default_; }
  bool empty() const { return default_ == 0 && table_.empty(); }

 private:
  std::int64_t default_ = 0;
  std::map<std::pair<ProcessId, ProcessId>, std::int64_t> table_;
};

enum class ProcessState : std::uint8_t { kLoaded, kRunning, kDone };

struct ProcessContext {
  ProcessId pid = 0;
  std::vector<QubitId> qubits;
  std::vector<NodeId> units;  // sorted
  ProcessState state = ProcessState::kLoaded;
  std::optional<std::int64_t> last_start;  // most recent start-flagged grant
  std::uint32_t shots_remaining = 0;

  /// Nanoseconds since the most recent start-flagged trigger.
  std::int64_t task_core_counter(std::int64_t now) const {
    return last_start ? now - *last_start : 0;
  }
};

struct AdmitResult {
  bool admitted = false;
  ProcessId pid = 0;
  Errc error = Errc::kUnitConflict;
  std::vector<ProcessId> blocking;  // for UnitConflict
};

struct SchedulerConfig {
  std::uint32_t max_processes = 5;
  StiTable sti;
};

/// Admission control and trigger arbitration. A passive state machine: the
/// simulator's event loop is its only caller.
class Scheduler {
 public:
  explicit Scheduler(SchedulerConfig config);

  /// Admits a process on `units`. Prefers `preferred_pid` when that slot is
  /// free, otherwise the lowest free slot.
  AdmitResult admit(const std::vector<QubitId>& qubits, std::vector<NodeId> units,
                    std::uint32_t shots, ProcessId preferred_pid, const MaskTable& masks,
                    const Hierarchy& h);

  /// Grant time for a trigger request. Start-flagged requests are held until
  /// every other running process's last start is at least STI behind.
  std::int64_t arbitrate(ProcessId pid, bool start, std::int64_t now);

  void mark_done(ProcessId pid);
  /// Frees the slot and retires its masks. Throws NotDone / NotRunning.
  void release(ProcessId pid);

  const ProcessContext& context(ProcessId pid) const;
  ProcessContext& context(ProcessId pid);
  bool has(ProcessId pid) const { return contexts_.count(pid) != 0; }
  std::size_t running() const;
  const MaskTable& masks() const { return masks_; }
  const SchedulerConfig& config() const { return config_; }

 private:
  SchedulerConfig config_;
  std::map<ProcessId, ProcessContext> contexts_;
  MaskTable masks_;
};

}  // namespace hima
