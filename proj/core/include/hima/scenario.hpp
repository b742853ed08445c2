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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hima/bench.hpp"
#include "hima/circuit.hpp"
#include "hima/compiler.hpp"
#include "hima/engine.hpp"
#include "hima/topology.hpp"

namespace hima {

struct TaskSpec {
  std::string circuit_path;
  Circuit circuit;
  std::vector<QubitId> mapping;  // empty means identity
  std::uint32_t shots = 1024;
  std::int64_t shot_period_ns = 100'000;
  std::optional<ProcessId> pid;  // defaults to the task's position
  std::int64_t submit_ns = 0;
};

/// One reproducible run: a topology, tasks, and every knob that shapes the
/// timeline. Relative paths resolve against the scenario file's directory.
struct Scenario {
  std::string name;
  std::string topology_path;
  System system;
  std::optional<std::uint64_t> seed;
  bool has_sti = false;
  SimOptions sim;
  GateTimeTable times;
  std::vector<TaskSpec> tasks;
  std::optional<QlaBenchConfig> qla;
  std::optional<ClopsBenchConfig> clops;
};

/// Keys: name, topology, seed, admission (queue | reject), limits
/// {max_processes}, sti {default_ns, pairs: [{a, b, ns}]}, overrides
/// {decision_ns, load_ns, registers_per_unit, pipeline {buffer, fifo,
/// parse_rate}, gate_times {single_ns, two_ns, measure_ns, grid_ns, names}},
/// readout {default, qubits: {id: {p_excited, p1_given_0, p1_given_1}}},
/// tasks [{circuit, mapping, shots, shot_period_ns, pid, submit_ns}],
/// qla {...}, clops {...}.
Scenario parse_scenario(std::string_view text, const std::string& base_dir = ".");
Scenario load_scenario(const std::string& path);

std::vector<CompiledTask> compile_scenario(const Scenario& s);

/// Compiles the tasks and runs them with `s.sim`, each submitted at its
/// `submit_ns`. The caller sets the seed.
RunResult run_scenario(const Scenario& s);

}  // namespace hima
