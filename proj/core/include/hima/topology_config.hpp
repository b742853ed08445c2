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

#include <string>
#include <string_view>

#include "hima/topology.hpp"

namespace hima {

/// Topology documents are YAML. Either list the tree explicitly
/// (`controllers`, `modules`, `qubits`, `couplers`) or give a `generate`
/// block with QccsTemplate fields. `sync_period_ns`, `oscillator_periods_ps`
/// and `latency` apply to both forms. See README for the full schema.
TopologyConfig parse_topology_config(std::string_view text);
TopologyConfig load_topology_config(const std::string& path);
System load_system(const std::string& path);

std::string read_file(const std::string& path);

}  // namespace hima
