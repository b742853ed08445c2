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
#include <string>
#include <vector>

#include "hima/circuit.hpp"
#include "hima/compiler.hpp"
#include "hima/engine.hpp"
#include "hima/metrics.hpp"
#include "hima/topology.hpp"

namespace hima {

/// Classical host stages around each task. Preprocessing runs on a fixed
/// worker pool; postprocessing is unbounded.
struct HostModel {
  std::int64_t t_pre_ns = 2'000'000;
  std::int64_t t_post_ns = 1'000'000;
  std::uint32_t preprocess_workers = 5;
  std::int64_t t_send_ns = 0;
  std::int64_t t_recv_ns = 0;

  void check() const;
};

/// Simulator options used by the harnesses unless overridden: 5 us task
/// load, nothing recorded.
SimOptions bench_sim_options();

struct QlaBenchConfig {
  std::string name = "qla";
  std::vector<std::uint32_t> usage_qubits = {10, 12, 14, 16, 18, 20, 24, 28,
                                             32, 36, 42, 48, 56, 64, 72};
  std::uint32_t max_processes = 5;
  std::uint32_t shots = 1024;
  std::int64_t shot_period_ns = 100'000;
  std::uint32_t layers = 4;  // single-qubit layers before the readout layer
  HostModel host;
  SimOptions sim = bench_sim_options();
  GateTimeTable times;
};

/// Disjoint tasks of `task_qubits` that fit at once, capped by `max_processes`.
std::uint32_t qla_process_count(std::uint32_t total_qubits, std::uint32_t task_qubits,
                                std::uint32_t max_processes);

/// The bench workload: `layers` alternating single-qubit layers on every
/// qubit, then a readout layer.
Circuit bench_circuit(std::string name, std::uint32_t qubits, std::uint32_t layers,
                      const std::string& gate_prefix = "");

struct QlaRuns {
  RunResult serial;
  RunResult parallel;
};

/// One usage point: the same task set run once with a single process slot
/// and once with one slot per task.
MetricsReport run_qla_point(const QlaBenchConfig& cfg, const System& sys,
                            std::uint32_t task_qubits, QlaRuns* runs = nullptr);
std::vector<MetricsReport> run_qla_benchmark(const QlaBenchConfig& cfg, const System& sys);

struct ClopsBenchConfig {
  std::string name = "clops";
  ClopsParams params{100, 10, 100, 5, 26'485'000};
  std::uint32_t region_qubits = 4;
  /// Host work per returned result. Concurrent results share the host
  /// processor equally.
  std::int64_t host_compute_ns = 4'148'000;
  std::int64_t shot_period_ns = 100'000;
  std::vector<std::uint32_t> processes = {1, 2, 3, 4, 5};
  SimOptions sim = bench_sim_options();
  GateTimeTable times;
};

/// Runs the variational loop on `nproc` disjoint regions. Each region
/// submits M*K tasks of S shots back to back; the next iteration is
/// submitted once the host has processed the previous results and the
/// parameter update latency has passed.
MetricsReport run_clops_benchmark(const ClopsBenchConfig& cfg, std::uint32_t nproc,
                                  const System& sys);
std::vector<MetricsReport> run_clops_sweep(const ClopsBenchConfig& cfg, const System& sys);

}  // namespace hima
