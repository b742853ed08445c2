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
#include <string>
#include <vector>

#include "hima/timeline.hpp"

namespace hima {

/// Per-task time split. All values in ns of simulated time.
struct TaskTiming {
  std::string name;
  std::int64_t t_pre = 0;
  std::int64_t t_qcs = 0;  // admission queue entry to TaskDone
  std::int64_t t_qpu = 0;  // sum of shot intervals
  std::int64_t t_post = 0;
  std::int64_t t_send = 0;
  std::int64_t t_recv = 0;
  std::int64_t t_total = 0;
  std::uint32_t n_qubits = 0;

  bool operator==(const TaskTiming&) const = default;
};

/// Exact integer terms of the load average; `value()` divides once.
struct QlaTerms {
  long double numerator = 0;    // sum of t_qpu * n
  long double denominator = 0;  // t_total * N
  double value() const;
};

QlaTerms qla_terms(const std::vector<TaskTiming>& timings, std::uint32_t total_qubits,
                   std::int64_t window_ns);
/// Fraction of available qubit-time spent executing shots. Throws ZeroWindow
/// for a non-positive window and InvalidArgument when a task is wider than
/// the chip.
double qla(const std::vector<TaskTiming>& timings, std::uint32_t total_qubits,
           std::int64_t window_ns);

/// Same quantity computed from raw timeline intervals: every start-flagged
/// TriggerSent is paired with the next ShotEnd of that task. `task_qubits`
/// maps task index to qubit count.
double qla_from_timeline(const EventTimeline& tl, const std::map<std::uint32_t, std::uint32_t>& task_qubits,
                         std::uint32_t total_qubits, std::int64_t window_ns);

double speedup(std::int64_t t_single_ns, std::int64_t t_multi_ns);
double speedup_efficiency(double speedup, std::uint32_t processes);

struct ClopsParams {
  std::uint32_t m = 100;  // template instances
  std::uint32_t k = 10;   // iterations per instance
  std::uint32_t s = 100;  // shots per iteration
  std::uint32_t d = 5;    // layer count
  std::int64_t update_latency_ns = 0;

  void check() const;
  bool operator==(const ClopsParams&) const = default;
};

/// M*K*S*D divided by the elapsed seconds.
double clops(const ClopsParams& p, std::int64_t elapsed_ns);
double clops_from_seconds(const ClopsParams& p, double elapsed_s);
double efficiency_factor(double clops, std::uint32_t d);

struct MetricsReport {
  std::string scenario;
  std::uint32_t task_qubits = 0;
  std::uint32_t processes = 1;
  double qla = 0;  // parallel run
  double qla_serial = 0;
  double speedup = 1;
  double speedup_efficiency = 1;
  std::int64_t t_serial_ns = 0;
  std::int64_t t_parallel_ns = 0;
  double clops = 0;  // summed over processes
  double clops_per_process = 0;
  double efficiency_factor = 0;
  std::int64_t elapsed_ns = 0;
  std::vector<TaskTiming> tasks;
};

/// Column order is stable:
/// scenario,task_qubits,usage,processes,qla_serial,qla,speedup,
/// speedup_efficiency,t_serial_ns,t_parallel_ns,clops,clops_per_process,
/// efficiency_factor,elapsed_ns
std::string reports_to_csv(const std::vector<MetricsReport>& reports, std::uint32_t total_qubits);
std::string reports_to_json(const std::vector<MetricsReport>& reports, std::uint32_t total_qubits);

}  // namespace hima
