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
#include <string>
#include <string_view>
#include <vector>

#include <boost/dynamic_bitset.hpp>

namespace hima {

using NodeId = std::uint32_t;
using QubitId = std::uint32_t;
using ProcessId = std::uint32_t;

inline constexpr NodeId kNoNode = ~NodeId{0};

enum class NodeKind : std::uint8_t { kRoot, kMid, kLeaf, kModule, kUnit };
enum class ModuleKind : std::uint8_t { kXyDrive, kZDrive, kFeedlineIo };
enum class UnitKind : std::uint8_t { kXy, kZ, kReadoutOutput, kReadoutInput };

std::string_view to_string(NodeKind kind);
std::string_view to_string(ModuleKind kind);
std::string_view to_string(UnitKind kind);

struct Node {
  NodeId id = kNoNode;
  NodeKind kind = NodeKind::kRoot;
  std::string name;
  NodeId parent = kNoNode;
  std::uint32_t child_index = 0;  // position in the parent's child list
  std::vector<NodeId> children;
  // Edge to the parent.
  std::int64_t trigger_latency_ns = 0;
  std::int64_t feedback_latency_ns = 0;
  ModuleKind module_kind = ModuleKind::kXyDrive;  // kModule only
  UnitKind unit_kind = UnitKind::kXy;              // kUnit only
  std::int32_t feedline = -1;                      // readout units only
};

struct LatencyDefaults {
  std::int64_t cable_ns = 200;      // controller <-> controller
  std::int64_t backplane_ns = 100;  // leaf <-> module
  std::int64_t onboard_ns = 0;      // module <-> unit
  std::int64_t feedback_hop_ns = 200;
};

/// Controller tree plus execution modules and units, stored flat. Immutable
/// after construction.
class Hierarchy {
 public:
  Hierarchy() = default;
  Hierarchy(std::vector<Node> nodes, std::int64_t sync_period_ns);

  const Node& node(NodeId id) const { return nodes_.at(id); }
  const std::vector<Node>& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  NodeId root() const { return 0; }
  std::int64_t sync_period_ns() const { return sync_period_ns_; }

  std::optional<NodeId> find(std::string_view name) const;
  NodeId require(std::string_view name) const;

  std::vector<NodeId> of_kind(NodeKind kind) const;
  std::vector<NodeId> leaves() const { return of_kind(NodeKind::kLeaf); }
  std::vector<NodeId> mids() const { return of_kind(NodeKind::kMid); }
  std::vector<NodeId> units_under(NodeId id) const;

  /// Number of controller levels: 2 (root, leaf) or 3 (root, mid, leaf).
  int controller_depth() const;

  NodeId module_of(NodeId unit) const;
  NodeId leaf_of(NodeId id) const;
  /// Root-to-node path, root first.
  std::vector<NodeId> path_from_root(NodeId id) const;

  /// Sum of trigger edge latencies from the root down to `id`.
  std::int64_t trigger_path_ns(NodeId id) const;
  /// Sum of feedback edge latencies between `id` and the root (one way).
  std::int64_t feedback_path_ns(NodeId id) const;

  /// Smallest multiple of the sync period that is >= t.
  std::int64_t ceil_to_sync(std::int64_t t) const;

 private:
  std::vector<Node> nodes_;
  std::map<std::string, NodeId, std::less<>> by_name_;
  std::int64_t sync_period_ns_ = 10;
};

struct Qcn {
  QubitId qubit = 0;
  NodeId xy_unit = kNoNode;
  NodeId z_unit = kNoNode;  // kNoNode for fixed-frequency qubits without flux
  std::vector<NodeId> coupler_units;  // couplers this qubit is an endpoint of
  NodeId readout_output_unit = kNoNode;
  NodeId readout_input_unit = kNoNode;
  std::int32_t feedline = -1;
  bool tunable = true;
};

struct Feedline {
  std::int32_t id = -1;
  NodeId module = kNoNode;
  std::vector<QubitId> members;
  std::size_t capacity = 6;
};

struct Coupler {
  QubitId a = 0;
  QubitId b = 0;
  NodeId z_unit = kNoNode;  // kNoNode for fixed-frequency qubits without flux
};

/// A built system: hierarchy, qubit control nodes, feedlines and couplers.
struct System {
  Hierarchy hierarchy;
  std::map<QubitId, Qcn> qcns;
  std::vector<Feedline> feedlines;
  std::vector<Coupler> couplers;

  const Qcn& qcn(QubitId q) const;
  std::size_t qubit_count() const { return qcns.size(); }
  std::vector<QubitId> qubit_ids() const;
  const Coupler* coupler_between(QubitId a, QubitId b) const;
  /// Units a process on `qubits` occupies: each qubit's xy, z and readout
  /// pair, plus couplers whose endpoints are both in the set. Sorted.
  std::vector<NodeId> process_units(const std::vector<QubitId>& qubits) const;
};

// ---------------------------------------------------------------------------
// Configuration.

struct ControllerSpec {
  std::string name;
  std::string parent;                   // empty for the root
  std::optional<std::int64_t> latency_ns;  // edge to parent
};

struct ModuleSpec {
  std::string name;
  std::string leaf;
  ModuleKind kind = ModuleKind::kXyDrive;
  std::uint32_t units = 8;              // drive modules
  std::uint32_t feedlines = 0;          // feedline I/O modules
  std::uint32_t feedline_capacity = 6;
  std::optional<std::int64_t> latency_ns;
};

/// Unit references are "<module>.<index>"; feedline references are
/// "<readout module>.<feedline index>".
struct QubitSpec {
  QubitId id = 0;
  std::string xy;
  std::string z;
  std::string feedline;
  bool tunable = true;
};

struct CouplerSpec {
  QubitId a = 0;
  QubitId b = 0;
  std::string z;
};

struct TopologyConfig {
  std::int64_t sync_period_ns = 10;
  std::vector<std::int64_t> oscillator_periods_ps;
  LatencyDefaults latency;
  std::vector<ControllerSpec> controllers;
  std::vector<ModuleSpec> modules;
  std::vector<QubitSpec> qubits;
  std::vector<CouplerSpec> couplers;
};

/// Validates the config and builds the system. Node ids follow config order:
/// controllers top-down, then modules, then each module's units.
System build_hierarchy(const TopologyConfig& config);

/// Parameters of the generated QCCS-based systems.
struct QccsTemplate {
  std::uint32_t mids = 0;              // 0 gives a two-layer system
  std::uint32_t leaves_per_parent = 8;
  std::uint32_t z_boards = 8;
  std::uint32_t xy_boards = 3;
  std::uint32_t units_per_board = 8;
  std::uint32_t feedlines = 4;
  std::uint32_t feedline_capacity = 6;
  std::uint32_t qubits_per_qccs = 24;  // 0 leaves the channels unassigned
  std::uint32_t grid_rows = 4;         // coupler grid, rows * cols == qubits
  std::uint32_t grid_cols = 6;
  bool couplers = true;
  std::int64_t sync_period_ns = 10;
  LatencyDefaults latency;
};

TopologyConfig make_qccs_config(const QccsTemplate& tmpl);
inline System make_qccs_system(const QccsTemplate& tmpl) {
  return build_hierarchy(make_qccs_config(tmpl));
}

/// Channel-pool capacity: per leaf, floor((drive units + 2 * feedlines) /
/// channels_per_qubit), summed over leaves.
std::uint64_t max_capacity(const Hierarchy& h, std::uint32_t channels_per_qubit);

inline constexpr std::uint32_t kTunableChannels = 4;
inline constexpr std::uint32_t kFixedFrequencyChannels = 1;

// ---------------------------------------------------------------------------
// Masks.

using ChildMask = boost::dynamic_bitset<>;

/// node -> process -> bitmask over the node's children.
class MaskTable {
 public:
  const ChildMask* find(NodeId node, ProcessId pid) const;
  ChildMask mask(const Hierarchy& h, NodeId node, ProcessId pid) const;
  bool empty() const { return table_.empty(); }

  /// Adds every entry of `fragment`, OR-ing masks that already exist.
  void merge(const MaskTable& fragment);
  void retire(ProcessId pid);
  void set(NodeId node, ProcessId pid, ChildMask mask);

  const std::map<NodeId, std::map<ProcessId, ChildMask>>& entries() const { return table_; }

  /// Units reachable from the root through set bits for `pid`.
  std::vector<NodeId> reachable_units(const Hierarchy& h, ProcessId pid) const;

  bool operator==(const MaskTable&) const = default;

 private:
  std::map<NodeId, std::map<ProcessId, ChildMask>> table_;
};

/// Minimal masks for the units of `qubits`. Throws UnknownQubit.
MaskTable compute_masks(const System& sys, ProcessId pid, const std::vector<QubitId>& qubits);

/// Same, starting from an explicit unit set.
MaskTable compute_masks_for_units(const Hierarchy& h, ProcessId pid,
                                  const std::vector<NodeId>& units);

std::string dump_masks(const Hierarchy& h, const MaskTable& masks);

}  // namespace hima
