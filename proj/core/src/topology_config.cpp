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

#include "hima/topology_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "hima/error.hpp"
#include "yaml_util.hpp"

namespace hima {

namespace {

ModuleKind module_kind(const YAML::Node& n) {
  auto s = n.as<std::string>();
  if (s == "xy") return ModuleKind::kXyDrive;
  if (s == "z") return ModuleKind::kZDrive;
  if (s == "readout") return ModuleKind::kFeedlineIo;
  throw Error(Errc::kConfigError,
              fmt::format("line {}: unknown module kind '{}'", n.Mark().line + 1, s));
}

void read_latency(const YAML::Node& n, LatencyDefaults& lat) {
  if (!n) return;
  yaml::check_keys(n, {"cable_ns", "backplane_ns", "onboard_ns", "feedback_hop_ns"});
  yaml::get(n, "cable_ns", lat.cable_ns);
  yaml::get(n, "backplane_ns", lat.backplane_ns);
  yaml::get(n, "onboard_ns", lat.onboard_ns);
  yaml::get(n, "feedback_hop_ns", lat.feedback_hop_ns);
}

TopologyConfig from_yaml(const YAML::Node& root) {
  yaml::check_keys(root, {"sync_period_ns", "oscillator_periods_ps", "latency", "generate",
                          "controllers", "modules", "qubits", "couplers"});
  LatencyDefaults lat;
  read_latency(root["latency"], lat);
  std::int64_t sync = 10;
  yaml::get(root, "sync_period_ns", sync);

  TopologyConfig cfg;
  if (const auto g = root["generate"]) {
    if (root["controllers"] || root["modules"] || root["qubits"] || root["couplers"])
      throw Error(Errc::kConfigError, "'generate' cannot be combined with an explicit tree");
    yaml::check_keys(g, {"mids", "leaves", "z_boards", "xy_boards", "units_per_board",
                         "feedlines", "feedline_capacity", "qubits_per_qccs", "grid_rows",
                         "grid_cols", "couplers"});
    QccsTemplate t;
    yaml::get(g, "mids", t.mids);
    yaml::get(g, "leaves", t.leaves_per_parent);
    yaml::get(g, "z_boards", t.z_boards);
    yaml::get(g, "xy_boards", t.xy_boards);
    yaml::get(g, "units_per_board", t.units_per_board);
    yaml::get(g, "feedlines", t.feedlines);
    yaml::get(g, "feedline_capacity", t.feedline_capacity);
    yaml::get(g, "qubits_per_qccs", t.qubits_per_qccs);
    yaml::get(g, "grid_rows", t.grid_rows);
    yaml::get(g, "grid_cols", t.grid_cols);
    yaml::get(g, "couplers", t.couplers);
    t.sync_period_ns = sync;
    t.latency = lat;
    cfg = make_qccs_config(t);
  } else {
    cfg.sync_period_ns = sync;
    cfg.latency = lat;
    for (const auto& c : yaml::seq(root, "controllers")) {
      yaml::check_keys(c, {"name", "parent", "latency_ns"});
      ControllerSpec spec;
      spec.name = yaml::require<std::string>(c, "name");
      yaml::get(c, "parent", spec.parent);
      if (c["latency_ns"]) spec.latency_ns = c["latency_ns"].as<std::int64_t>();
      cfg.controllers.push_back(std::move(spec));
    }
    for (const auto& m : yaml::seq(root, "modules")) {
      yaml::check_keys(m, {"name", "leaf", "kind", "units", "feedlines", "feedline_capacity",
                           "latency_ns"});
      ModuleSpec spec;
      spec.name = yaml::require<std::string>(m, "name");
      spec.leaf = yaml::require<std::string>(m, "leaf");
      spec.kind = module_kind(m["kind"]);
      yaml::get(m, "units", spec.units);
      yaml::get(m, "feedlines", spec.feedlines);
      yaml::get(m, "feedline_capacity", spec.feedline_capacity);
      if (m["latency_ns"]) spec.latency_ns = m["latency_ns"].as<std::int64_t>();
      cfg.modules.push_back(std::move(spec));
    }
    for (const auto& q : yaml::seq(root, "qubits")) {
      yaml::check_keys(q, {"id", "xy", "z", "feedline", "tunable"});
      QubitSpec spec;
      spec.id = yaml::require<QubitId>(q, "id");
      spec.xy = yaml::require<std::string>(q, "xy");
      yaml::get(q, "z", spec.z);
      spec.feedline = yaml::require<std::string>(q, "feedline");
      yaml::get(q, "tunable", spec.tunable);
      cfg.qubits.push_back(std::move(spec));
    }
    for (const auto& c : yaml::seq(root, "couplers")) {
      yaml::check_keys(c, {"qubits", "z"});
      auto pair = yaml::require<std::vector<QubitId>>(c, "qubits");
      if (pair.size() != 2) throw Error(Errc::kConfigError, "coupler needs exactly two qubits");
      cfg.couplers.push_back({pair[0], pair[1], yaml::require<std::string>(c, "z")});
    }
  }
  cfg.sync_period_ns = sync;
  if (const auto osc = root["oscillator_periods_ps"])
    cfg.oscillator_periods_ps = osc.as<std::vector<std::int64_t>>();
  return cfg;
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIoError, fmt::format("cannot open '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TopologyConfig parse_topology_config(std::string_view text) {
  return yaml::guarded([&] { return from_yaml(YAML::Load(std::string(text))); });
}

TopologyConfig load_topology_config(const std::string& path) {
  try {
    return parse_topology_config(read_file(path));
  } catch (const Error& e) {
    if (e.code() == Errc::kConfigError)
      throw Error(Errc::kConfigError, fmt::format("{}: {}", path, e.what()));
    throw;
  }
}

System load_system(const std::string& path) { return build_hierarchy(load_topology_config(path)); }

}  // namespace hima
