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
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hima/compiler.hpp"
#include "hima/pipeline.hpp"
#include "hima/readout.hpp"
#include "hima/scheduler.hpp"
#include "hima/timeline.hpp"
#include "hima/topology.hpp"

namespace hima {

enum class RecordMode : std::uint8_t { kAll, kControl, kNone };
enum class AdmissionPolicy : std::uint8_t {
  kQueue,            // FIFO, head-of-line blocking until a slot frees
  kRejectOnConflict  // any conflict or full table is an error
};

struct SimOptions {
  PipelineParams pipeline;
  std::int64_t decision_ns = 100;  // feedback Step 2
  std::int64_t load_ns = 0;        // admission to first controller step
  std::uint64_t seed = 0;
  ReadoutModel readout;
  RecordMode record = RecordMode::kAll;
  SchedulerConfig scheduler;
  AdmissionPolicy admission = AdmissionPolicy::kQueue;
  std::uint32_t registers_per_unit = 4;
  bool throw_on_deadlock = true;
};

struct TaskStats {
  std::uint32_t task = 0;
  std::string name;
  ProcessId pid = 0;
  std::size_t n_qubits = 0;
  std::int64_t submitted = 0;
  std::int64_t admitted = -1;
  std::int64_t done = -1;
  std::uint32_t shots_done = 0;
  std::int64_t t_qpu = 0;  // sum over shots of (ShotEnd - start grant)
  std::uint64_t underflows = 0;
  std::uint64_t overruns = 0;
  std::uint64_t feedbacks = 0;
};

struct RunResult {
  EventTimeline timeline;
  std::vector<TaskStats> tasks;
  std::int64_t end_time = 0;
  std::uint64_t events_seen = 0;  // including unrecorded ones
  std::uint64_t underflows = 0;
  std::uint64_t overruns = 0;
  std::optional<std::string> deadlock;
};

/// Discrete-event engine. Controllers step through the global event queue;
/// execution units run ahead between blocking points (a trigger hold or a
/// BR awaiting its feedback delivery), so a unit's events may be computed
/// before the queue reaches their timestamps. The recorded timeline is
/// sorted at the end. Single-threaded and deterministic.
class Simulator {
 public:
  using Callback = std::function<void(Simulator&)>;
  using DoneCallback = std::function<void(Simulator&, std::uint32_t task, std::int64_t time)>;

  Simulator(const System& sys, SimOptions options);
  ~Simulator();
  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  /// Queues `task` for admission at time `at`. Returns the task index.
  std::uint32_t submit(CompiledTask task, std::int64_t at = 0);
  void at(std::int64_t time, Callback fn);
  void on_task_done(DoneCallback fn);

  RunResult run();

  std::int64_t now() const;
  const Scheduler& scheduler() const;
  const System& system() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Convenience wrapper: submits every task at t=0 and runs.
RunResult run(const std::vector<CompiledTask>& tasks, const System& sys, const SimOptions& options);

}  // namespace hima
