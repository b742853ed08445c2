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

#include "hima/topology.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <set>

#include <fmt/format.h>

#include "hima/error.hpp"

namespace hima {

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::kRoot: return "root";
    case NodeKind::kMid: return "mid";
    case NodeKind::kLeaf: return "leaf";
    case NodeKind::kModule: return "module";
    case NodeKind::kUnit: return "unit";
  }
  return "?";
}

std::string_view to_string(ModuleKind kind) {
  switch (kind) {
    case ModuleKind::kXyDrive: return "xy";
    case ModuleKind::kZDrive: return "z";
    case ModuleKind::kFeedlineIo: return "readout";
  }
  return "?";
}

std::string_view to_string(UnitKind kind) {
  switch (kind) {
    case UnitKind::kXy: return "xy";
    case UnitKind::kZ: return "z";
    case UnitKind::kReadoutOutput: return "ro_out";
    case UnitKind::kReadoutInput: return "ro_in";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Hierarchy

Hierarchy::Hierarchy(std::vector<Node> nodes, std::int64_t sync_period_ns)
    : nodes_(std::move(nodes)), sync_period_ns_(sync_period_ns) {
  for (const auto& n : nodes_) by_name_.emplace(n.name, n.id);
}

std::optional<NodeId> Hierarchy::find(std::string_view name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

NodeId Hierarchy::require(std::string_view name) const {
  auto id = find(name);
  if (!id) throw Error(Errc::kUnknownUnit, fmt::format("no node named '{}'", name));
  return *id;
}

std::vector<NodeId> Hierarchy::of_kind(NodeKind kind) const {
  std::vector<NodeId> out;
  for (const auto& n : nodes_)
    if (n.kind == kind) out.push_back(n.id);
  return out;
}

std::vector<NodeId> Hierarchy::units_under(NodeId id) const {
  std::vector<NodeId> out;
  std::vector<NodeId> stack{id};
  while (!stack.empty()) {
    NodeId cur = stack.back();
    stack.pop_back();
    const Node& n = nodes_.at(cur);
    if (n.kind == NodeKind::kUnit) out.push_back(cur);
    for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) stack.push_back(*it);
  }
  std::sort(out.begin(), out.end());
  return out;
}

int Hierarchy::controller_depth() const { return mids().empty() ? 2 : 3; }

NodeId Hierarchy::module_of(NodeId unit) const {
  const Node& n = nodes_.at(unit);
  if (n.kind != NodeKind::kUnit) throw Error(Errc::kInvalidArgument, "module_of expects a unit");
  return n.parent;
}

NodeId Hierarchy::leaf_of(NodeId id) const {
  NodeId cur = id;
  while (cur != kNoNode && nodes_.at(cur).kind != NodeKind::kLeaf) cur = nodes_.at(cur).parent;
  if (cur == kNoNode) throw Error(Errc::kInvalidArgument, "node has no leaf ancestor");
  return cur;
}

std::vector<NodeId> Hierarchy::path_from_root(NodeId id) const {
  std::vector<NodeId> path;
  for (NodeId cur = id; cur != kNoNode; cur = nodes_.at(cur).parent) path.push_back(cur);
  std::reverse(path.begin(), path.end());
  return path;
}

std::int64_t Hierarchy::trigger_path_ns(NodeId id) const {
  std::int64_t total = 0;
  for (NodeId cur = id; cur != kNoNode; cur = nodes_.at(cur).parent)
    total += nodes_.at(cur).trigger_latency_ns;
  return total;
}

std::int64_t Hierarchy::feedback_path_ns(NodeId id) const {
  std::int64_t total = 0;
  for (NodeId cur = id; cur != kNoNode; cur = nodes_.at(cur).parent)
    total += nodes_.at(cur).feedback_latency_ns;
  return total;
}

std::int64_t Hierarchy::ceil_to_sync(std::int64_t t) const {
  const std::int64_t p = sync_period_ns_;
  std::int64_t q = t / p;
  if (q * p < t) ++q;
  return q * p;
}

// ---------------------------------------------------------------------------
// System

const Qcn& System::qcn(QubitId q) const {
  auto it = qcns.find(q);
  if (it == qcns.end()) throw Error(Errc::kUnknownQubit, fmt::format("qubit {} is not mapped", q));
  return it->second;
}

std::vector<QubitId> System::qubit_ids() const {
  std::vector<QubitId> out;
  out.reserve(qcns.size());
  for (const auto& [q, _] : qcns) out.push_back(q);
  return out;
}

const Coupler* System::coupler_between(QubitId a, QubitId b) const {
  for (const auto& c : couplers)
    if ((c.a == a && c.b == b) || (c.a == b && c.b == a)) return &c;
  return nullptr;
}

std::vector<NodeId> System::process_units(const std::vector<QubitId>& qubits) const {
  std::set<QubitId> members(qubits.begin(), qubits.end());
  std::vector<NodeId> out;
  for (QubitId q : members) {
    const Qcn& c = qcn(q);
    out.insert(out.end(), {c.xy_unit, c.readout_output_unit, c.readout_input_unit});
    if (c.z_unit != kNoNode) out.push_back(c.z_unit);
  }
  for (const auto& c : couplers)
    if (members.count(c.a) != 0 && members.count(c.b) != 0) out.push_back(c.z_unit);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Construction

namespace {

[[noreturn]] void fail(Errc code, const std::string& message) { throw Error(code, message); }

struct UnitRef {
  std::string module;
  std::uint32_t index = 0;
};

UnitRef split_ref(const std::string& ref) {
  auto dot = ref.rfind('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 == ref.size())
    fail(Errc::kDanglingReference, fmt::format("malformed reference '{}'", ref));
  UnitRef out;
  out.module = ref.substr(0, dot);
  const char* first = ref.data() + dot + 1;
  const char* last = ref.data() + ref.size();
  auto [ptr, ec] = std::from_chars(first, last, out.index);
  if (ec != std::errc() || ptr != last)
    fail(Errc::kDanglingReference, fmt::format("malformed reference '{}'", ref));
  return out;
}

class Builder {
 public:
  explicit Builder(const TopologyConfig& cfg) : cfg_(cfg) {}

  System build() {
    check_timing();
    order_controllers();
    add_modules();
    System sys;
    sys.hierarchy = Hierarchy(std::move(nodes_), cfg_.sync_period_ns);
    sys.feedlines = std::move(feedlines_);
    add_qubits(sys);
    add_couplers(sys);
    return sys;
  }

 private:
  void check_timing() {
    if (cfg_.sync_period_ns <= 0)
      fail(Errc::kInvalidTopology, "sync_period_ns must be positive");
    for (auto ps : cfg_.oscillator_periods_ps) {
      if (ps <= 0) fail(Errc::kInvalidTopology, "oscillator period must be positive");
      if ((cfg_.sync_period_ns * 1000) % ps != 0)
        fail(Errc::kInvalidTopology,
             fmt::format("sync period {} ns is not a multiple of oscillator period {} ps",
                         cfg_.sync_period_ns, ps));
    }
  }

  NodeId add_node(Node n) {
    n.id = static_cast<NodeId>(nodes_.size());
    if (n.parent != kNoNode) {
      n.child_index = static_cast<std::uint32_t>(nodes_[n.parent].children.size());
      nodes_[n.parent].children.push_back(n.id);
    }
    names_.emplace(n.name, n.id);
    nodes_.push_back(std::move(n));
    return nodes_.back().id;
  }

  void order_controllers() {
    const auto& ctrls = cfg_.controllers;
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < ctrls.size(); ++i) {
      if (ctrls[i].name.empty()) fail(Errc::kInvalidTopology, "controller without a name");
      if (!index.emplace(ctrls[i].name, i).second)
        fail(Errc::kInvalidTopology, fmt::format("duplicate controller '{}'", ctrls[i].name));
    }
    for (const auto& c : ctrls) {
      if (!c.parent.empty() && index.count(c.parent) == 0)
        fail(Errc::kDanglingReference,
             fmt::format("controller '{}' names unknown parent '{}'", c.name, c.parent));
    }
    for (std::size_t i = 0; i < ctrls.size(); ++i) {
      std::set<std::size_t> seen;
      std::size_t cur = i;
      while (!ctrls[cur].parent.empty()) {
        if (!seen.insert(cur).second)
          fail(Errc::kCycleDetected,
               fmt::format("controller '{}' is on a parent cycle", ctrls[i].name));
        cur = index.at(ctrls[cur].parent);
      }
    }
    std::vector<std::size_t> roots;
    for (std::size_t i = 0; i < ctrls.size(); ++i)
      if (ctrls[i].parent.empty()) roots.push_back(i);
    if (roots.size() != 1)
      fail(Errc::kInvalidTopology,
           fmt::format("expected exactly one root controller, found {}", roots.size()));

    std::map<std::string, std::vector<std::size_t>> kids;
    for (std::size_t i = 0; i < ctrls.size(); ++i)
      if (!ctrls[i].parent.empty()) kids[ctrls[i].parent].push_back(i);

    std::set<std::string> has_modules;
    for (const auto& m : cfg_.modules) has_modules.insert(m.leaf);

    // Breadth-first, children in config order.
    std::deque<std::pair<std::size_t, int>> queue{{roots.front(), 0}};
    std::set<int> leaf_depths;
    while (!queue.empty()) {
      auto [i, depth] = queue.front();
      queue.pop_front();
      const auto& c = ctrls[i];
      const bool has_kids = kids.count(c.name) != 0;
      Node n;
      n.name = c.name;
      if (depth == 0) {
        n.kind = NodeKind::kRoot;
        if (!has_kids) fail(Errc::kInvalidTopology, "root controller has no children");
        if (has_modules.count(c.name) != 0)
          fail(Errc::kInvalidTopology, "modules must attach to leaf controllers");
      } else {
        n.parent = names_.at(c.parent);
        n.trigger_latency_ns = c.latency_ns.value_or(cfg_.latency.cable_ns);
        n.feedback_latency_ns = cfg_.latency.feedback_hop_ns;
        if (has_kids) {
          n.kind = NodeKind::kMid;
          if (has_modules.count(c.name) != 0)
            fail(Errc::kInvalidTopology,
                 fmt::format("controller '{}' has both controllers and modules", c.name));
        } else {
          n.kind = NodeKind::kLeaf;
          leaf_depths.insert(depth);
        }
      }
      if (n.trigger_latency_ns < 0) fail(Errc::kInvalidTopology, "negative link latency");
      add_node(std::move(n));
      if (has_kids)
        for (auto k : kids.at(c.name)) queue.emplace_back(k, depth + 1);
    }
    if (leaf_depths.size() != 1 || *leaf_depths.begin() > 2)
      fail(Errc::kInvalidTopology, "leaf controllers must all sit at depth 1 or all at depth 2");
  }

  void add_modules() {
    std::int32_t next_feedline = 0;
    for (const auto& m : cfg_.modules) {
      auto leaf = names_.find(m.leaf);
      if (leaf == names_.end())
        fail(Errc::kDanglingReference,
             fmt::format("module '{}' names unknown leaf '{}'", m.name, m.leaf));
      if (nodes_[leaf->second].kind != NodeKind::kLeaf)
        fail(Errc::kInvalidTopology, fmt::format("module '{}' parent is not a leaf", m.name));
      if (names_.count(m.name) != 0)
        fail(Errc::kInvalidTopology, fmt::format("duplicate node name '{}'", m.name));
      Node mod;
      mod.kind = NodeKind::kModule;
      mod.name = m.name;
      mod.parent = leaf->second;
      mod.module_kind = m.kind;
      mod.trigger_latency_ns = m.latency_ns.value_or(cfg_.latency.backplane_ns);
      mod.feedback_latency_ns = cfg_.latency.feedback_hop_ns;
      if (mod.trigger_latency_ns < 0) fail(Errc::kInvalidTopology, "negative link latency");
      NodeId mid = add_node(std::move(mod));

      auto unit = [&](std::string name, UnitKind kind, std::int32_t feedline) {
        Node u;
        u.kind = NodeKind::kUnit;
        u.name = std::move(name);
        u.parent = mid;
        u.unit_kind = kind;
        u.feedline = feedline;
        u.trigger_latency_ns = cfg_.latency.onboard_ns;
        add_node(std::move(u));
      };
      if (m.kind == ModuleKind::kFeedlineIo) {
        if (m.feedline_capacity == 0) fail(Errc::kInvalidTopology, "feedline capacity is zero");
        for (std::uint32_t f = 0; f < m.feedlines; ++f) {
          Feedline fl;
          fl.id = next_feedline++;
          fl.module = mid;
          fl.capacity = m.feedline_capacity;
          for (std::uint32_t s = 0; s < m.feedline_capacity; ++s) {
            unit(fmt::format("{}.f{}.out{}", m.name, f, s), UnitKind::kReadoutOutput, fl.id);
            unit(fmt::format("{}.f{}.in{}", m.name, f, s), UnitKind::kReadoutInput, fl.id);
          }
          feedline_index_[{m.name, f}] = feedlines_.size();
          feedlines_.push_back(std::move(fl));
        }
      } else {
        const UnitKind kind = m.kind == ModuleKind::kXyDrive ? UnitKind::kXy : UnitKind::kZ;
        for (std::uint32_t i = 0; i < m.units; ++i) unit(fmt::format("{}.{}", m.name, i), kind, -1);
      }
      modules_[m.name] = &m;
      module_ids_[m.name] = mid;
    }
  }

  NodeId drive_unit(const std::string& ref, ModuleKind want, std::string_view what) {
    UnitRef r = split_ref(ref);
    auto it = modules_.find(r.module);
    if (it == modules_.end())
      fail(Errc::kDanglingReference, fmt::format("{} '{}' names unknown module", what, ref));
    if (it->second->kind != want)
      fail(Errc::kInvalidTopology,
           fmt::format("{} '{}' is on a {} module", what, ref, to_string(it->second->kind)));
    if (r.index >= it->second->units)
      fail(Errc::kDanglingReference, fmt::format("{} '{}' index out of range", what, ref));
    NodeId id = names_.at(fmt::format("{}.{}", r.module, r.index));
    if (!used_units_.insert(id).second)
      fail(Errc::kInvalidTopology, fmt::format("unit '{}' assigned twice", ref));
    return id;
  }

  void add_qubits(System& sys) {
    const Hierarchy& h = sys.hierarchy;
    for (const auto& q : cfg_.qubits) {
      if (sys.qcns.count(q.id) != 0)
        fail(Errc::kInvalidTopology, fmt::format("qubit {} defined twice", q.id));
      Qcn c;
      c.qubit = q.id;
      c.tunable = q.tunable;
      c.xy_unit = drive_unit(q.xy, ModuleKind::kXyDrive, "xy unit");
      if (q.tunable) {
        c.z_unit = drive_unit(q.z, ModuleKind::kZDrive, "z unit");
      } else if (!q.z.empty()) {
        c.z_unit = drive_unit(q.z, ModuleKind::kZDrive, "z unit");
      }
      UnitRef r = split_ref(q.feedline);
      auto mod = modules_.find(r.module);
      if (mod == modules_.end() || mod->second->kind != ModuleKind::kFeedlineIo)
        fail(Errc::kDanglingReference,
             fmt::format("qubit {} names unknown feedline '{}'", q.id, q.feedline));
      auto fl_it = feedline_index_.find({r.module, r.index});
      if (fl_it == feedline_index_.end())
        fail(Errc::kDanglingReference,
             fmt::format("qubit {} names unknown feedline '{}'", q.id, q.feedline));
      Feedline& fl = sys.feedlines[fl_it->second];
      const std::size_t slot = fl.members.size();
      fl.members.push_back(q.id);
      if (fl.members.size() > fl.capacity)
        fail(Errc::kFeedlineOverflow,
             fmt::format("feedline '{}' has {} members, capacity {}", q.feedline,
                         fl.members.size(), fl.capacity));
      c.feedline = fl.id;
      c.readout_output_unit = h.require(fmt::format("{}.f{}.out{}", r.module, r.index, slot));
      c.readout_input_unit = h.require(fmt::format("{}.f{}.in{}", r.module, r.index, slot));
      sys.qcns.emplace(q.id, std::move(c));
    }
  }

  void add_couplers(System& sys) {
    for (const auto& cs : cfg_.couplers) {
      if (sys.qcns.count(cs.a) == 0 || sys.qcns.count(cs.b) == 0)
        fail(Errc::kDanglingReference,
             fmt::format("coupler ({}, {}) names an unknown qubit", cs.a, cs.b));
      if (cs.a == cs.b) fail(Errc::kInvalidTopology, "coupler endpoints must differ");
      if (sys.coupler_between(cs.a, cs.b) != nullptr)
        fail(Errc::kInvalidTopology, fmt::format("duplicate coupler ({}, {})", cs.a, cs.b));
      Coupler c{cs.a, cs.b, drive_unit(cs.z, ModuleKind::kZDrive, "coupler unit")};
      sys.qcns.at(cs.a).coupler_units.push_back(c.z_unit);
      sys.qcns.at(cs.b).coupler_units.push_back(c.z_unit);
      sys.couplers.push_back(c);
    }
  }

  const TopologyConfig& cfg_;
  std::vector<Node> nodes_;
  std::map<std::string, NodeId> names_;
  std::map<std::string, const ModuleSpec*> modules_;
  std::map<std::string, NodeId> module_ids_;
  std::map<std::pair<std::string, std::uint32_t>, std::size_t> feedline_index_;
  std::vector<Feedline> feedlines_;
  std::set<NodeId> used_units_;
};

}  // namespace

System build_hierarchy(const TopologyConfig& config) { return Builder(config).build(); }

TopologyConfig make_qccs_config(const QccsTemplate& t) {
  if (t.qubits_per_qccs > 0) {
    const std::uint32_t drive = t.units_per_board;
    if (t.qubits_per_qccs > t.xy_boards * drive || t.qubits_per_qccs > t.z_boards * drive ||
        t.qubits_per_qccs > t.feedlines * t.feedline_capacity)
      throw Error(Errc::kInvalidTopology, "QCCS template cannot host the requested qubits");
    if (t.couplers && t.grid_rows * t.grid_cols != t.qubits_per_qccs)
      throw Error(Errc::kInvalidTopology, "coupler grid does not match qubits per QCCS");
  }
  TopologyConfig cfg;
  cfg.sync_period_ns = t.sync_period_ns;
  cfg.latency = t.latency;
  cfg.controllers.push_back({"root", "", std::nullopt});

  std::vector<std::string> leaves;
  if (t.mids == 0) {
    for (std::uint32_t l = 0; l < t.leaves_per_parent; ++l) {
      leaves.push_back(fmt::format("leaf{}", l));
      cfg.controllers.push_back({leaves.back(), "root", std::nullopt});
    }
  } else {
    for (std::uint32_t m = 0; m < t.mids; ++m)
      cfg.controllers.push_back({fmt::format("mid{}", m), "root", std::nullopt});
    for (std::uint32_t m = 0; m < t.mids; ++m) {
      for (std::uint32_t l = 0; l < t.leaves_per_parent; ++l) {
        leaves.push_back(fmt::format("mid{}.leaf{}", m, l));
        cfg.controllers.push_back({leaves.back(), fmt::format("mid{}", m), std::nullopt});
      }
    }
  }

  QubitId next_qubit = 0;
  for (const auto& leaf : leaves) {
    for (std::uint32_t b = 0; b < t.z_boards; ++b)
      cfg.modules.push_back({fmt::format("{}.z{}", leaf, b), leaf, ModuleKind::kZDrive,
                             t.units_per_board, 0, 0, std::nullopt});
    for (std::uint32_t b = 0; b < t.xy_boards; ++b)
      cfg.modules.push_back({fmt::format("{}.xy{}", leaf, b), leaf, ModuleKind::kXyDrive,
                             t.units_per_board, 0, 0, std::nullopt});
    cfg.modules.push_back({fmt::format("{}.ro", leaf), leaf, ModuleKind::kFeedlineIo, 0,
                           t.feedlines, t.feedline_capacity, std::nullopt});

    const QubitId base = next_qubit;
    auto z_ref = [&](std::uint32_t k) {
      return fmt::format("{}.z{}.{}", leaf, k / t.units_per_board, k % t.units_per_board);
    };
    for (std::uint32_t k = 0; k < t.qubits_per_qccs; ++k) {
      QubitSpec q;
      q.id = base + k;
      q.xy = fmt::format("{}.xy{}.{}", leaf, k / t.units_per_board, k % t.units_per_board);
      q.z = z_ref(k);
      q.feedline = fmt::format("{}.ro.{}", leaf, k / t.feedline_capacity);
      cfg.qubits.push_back(std::move(q));
    }
    if (t.couplers && t.qubits_per_qccs > 0) {
      std::uint32_t z = t.qubits_per_qccs;
      const std::uint32_t z_total = t.z_boards * t.units_per_board;
      auto add = [&](std::uint32_t a, std::uint32_t b) {
        if (z >= z_total) return;  // out of flux channels; leave the pair uncoupled
        cfg.couplers.push_back({base + a, base + b, z_ref(z++)});
      };
      for (std::uint32_t r = 0; r < t.grid_rows; ++r)
        for (std::uint32_t c = 0; c + 1 < t.grid_cols; ++c)
          add(r * t.grid_cols + c, r * t.grid_cols + c + 1);
      for (std::uint32_t r = 0; r + 1 < t.grid_rows; ++r)
        for (std::uint32_t c = 0; c < t.grid_cols; ++c)
          add(r * t.grid_cols + c, (r + 1) * t.grid_cols + c);
    }
    next_qubit += t.qubits_per_qccs;
  }
  return cfg;
}

std::uint64_t max_capacity(const Hierarchy& h, std::uint32_t channels_per_qubit) {
  if (channels_per_qubit == 0)
    throw Error(Errc::kInvalidArgument, "channels_per_qubit must be >= 1");
  std::uint64_t total = 0;
  for (NodeId leaf : h.leaves()) {
    std::uint64_t pool = 0;
    for (NodeId m : h.node(leaf).children) {
      const Node& mod = h.node(m);
      if (mod.module_kind == ModuleKind::kFeedlineIo) {
        std::set<std::int32_t> lines;
        for (NodeId u : mod.children) lines.insert(h.node(u).feedline);
        pool += 2 * lines.size();
      } else {
        pool += mod.children.size();
      }
    }
    total += pool / channels_per_qubit;
  }
  return total;
}

// ---------------------------------------------------------------------------
// Masks

const ChildMask* MaskTable::find(NodeId node, ProcessId pid) const {
  auto it = table_.find(node);
  if (it == table_.end()) return nullptr;
  auto jt = it->second.find(pid);
  return jt == it->second.end() ? nullptr : &jt->second;
}

ChildMask MaskTable::mask(const Hierarchy& h, NodeId node, ProcessId pid) const {
  if (const ChildMask* m = find(node, pid)) return *m;
  return ChildMask(h.node(node).children.size());
}

void MaskTable::set(NodeId node, ProcessId pid, ChildMask mask) {
  if (mask.none()) {
    auto it = table_.find(node);
    if (it != table_.end()) {
      it->second.erase(pid);
      if (it->second.empty()) table_.erase(it);
    }
    return;
  }
  table_[node][pid] = std::move(mask);
}

void MaskTable::merge(const MaskTable& fragment) {
  for (const auto& [node, per_pid] : fragment.table_) {
    for (const auto& [pid, m] : per_pid) {
      auto& slot = table_[node][pid];
      if (slot.size() == 0) {
        slot = m;
      } else {
        slot |= m;
      }
    }
  }
}

void MaskTable::retire(ProcessId pid) {
  for (auto it = table_.begin(); it != table_.end();) {
    it->second.erase(pid);
    it = it->second.empty() ? table_.erase(it) : std::next(it);
  }
}

std::vector<NodeId> MaskTable::reachable_units(const Hierarchy& h, ProcessId pid) const {
  std::vector<NodeId> out;
  std::vector<NodeId> stack{h.root()};
  while (!stack.empty()) {
    NodeId cur = stack.back();
    stack.pop_back();
    const Node& n = h.node(cur);
    if (n.kind == NodeKind::kUnit) {
      out.push_back(cur);
      continue;
    }
    const ChildMask* m = find(cur, pid);
    if (m == nullptr) continue;
    for (std::size_t i = m->find_first(); i != ChildMask::npos; i = m->find_next(i))
      stack.push_back(n.children[i]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

MaskTable compute_masks_for_units(const Hierarchy& h, ProcessId pid,
                                  const std::vector<NodeId>& units) {
  std::map<NodeId, ChildMask> masks;
  for (NodeId u : units) {
    if (h.node(u).kind != NodeKind::kUnit)
      throw Error(Errc::kInvalidArgument, fmt::format("node {} is not a unit", h.node(u).name));
    for (NodeId cur = u; h.node(cur).parent != kNoNode; cur = h.node(cur).parent) {
      const Node& n = h.node(cur);
      auto [it, inserted] = masks.try_emplace(n.parent, h.node(n.parent).children.size());
      if (!inserted && it->second.test(n.child_index)) break;  // rest of the path already set
      it->second.set(n.child_index);
    }
  }
  MaskTable out;
  for (auto& [node, m] : masks) out.set(node, pid, std::move(m));
  return out;
}

MaskTable compute_masks(const System& sys, ProcessId pid, const std::vector<QubitId>& qubits) {
  if (qubits.empty()) throw Error(Errc::kInvalidArgument, "compute_masks needs at least one qubit");
  return compute_masks_for_units(sys.hierarchy, pid, sys.process_units(qubits));
}

std::string dump_masks(const Hierarchy& h, const MaskTable& masks) {
  std::string out;
  for (const auto& [node, per_pid] : masks.entries()) {
    for (const auto& [pid, m] : per_pid) {
      std::string bits;
      bits.reserve(m.size());
      for (std::size_t i = 0; i < m.size(); ++i) bits.push_back(m.test(i) ? '1' : '0');
      out += fmt::format("{} p{} {}\n", h.node(node).name, pid, bits);
    }
  }
  return out;
}

}  // namespace hima
