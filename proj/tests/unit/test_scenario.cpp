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

#include <gtest/gtest.h>

#include "hima/scenario.hpp"
#include "oracles.hpp"

namespace hima {
namespace {

std::string scenario_dir() { return testing::data_path("scenarios"); }

Errc scenario_error(const std::string& text) {
  try {
    parse_scenario(text, scenario_dir());
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "accepted";
  return Errc::kIoError;
}

TEST(Scenario, SingleTask) {
  const Scenario s = load_scenario(testing::data_path("scenarios/single.yaml"));
  EXPECT_EQ(s.name, "single");
  ASSERT_EQ(s.tasks.size(), 1u);
  EXPECT_EQ(s.tasks[0].shots, 1024u);
  EXPECT_EQ(s.tasks[0].circuit.name, "bell");
  EXPECT_EQ(s.system.qcns.size(), 72u);
  const auto compiled = compile_scenario(s);
  ASSERT_EQ(compiled.size(), 1u);
  EXPECT_EQ(compiled[0].shots, 1024u);
  EXPECT_EQ(compiled[0].process_id, 0u);
}

TEST(Scenario, ReadoutAndSti) {
  const Scenario r = load_scenario(testing::data_path("scenarios/reset_biased.yaml"));
  EXPECT_EQ(r.seed, std::optional<std::uint64_t>(2024));
  EXPECT_DOUBLE_EQ(r.sim.readout.get(0).p_excited, 0.7);
  EXPECT_TRUE(r.has_sti);
  const Scenario s = load_scenario(testing::data_path("scenarios/staggered_15000.yaml"));
  EXPECT_EQ(s.sim.scheduler.sti.get(0, 1), 15'000);
  EXPECT_EQ(s.tasks[1].mapping, (std::vector<QubitId>{24, 25, 26}));
  EXPECT_EQ(s.tasks[1].shot_period_ns, 30'000);
}

TEST(Scenario, BenchBlocks) {
  const Scenario q = load_scenario(testing::data_path("scenarios/qla_sweep.yaml"));
  ASSERT_TRUE(q.qla.has_value());
  EXPECT_EQ(q.qla->usage_qubits.front(), 10u);
  EXPECT_EQ(q.qla->host.t_pre_ns, 2'000'000);
  EXPECT_EQ(q.qla->sim.load_ns, 5000);
  const Scenario c = load_scenario(testing::data_path("scenarios/clops.yaml"));
  ASSERT_TRUE(c.clops.has_value());
  EXPECT_EQ(c.clops->params, (ClopsParams{100, 10, 100, 5, 26'485'000}));
  EXPECT_EQ(c.clops->processes.size(), 5u);
}

TEST(Scenario, StiPairsAndOverrides) {
  const Scenario s = parse_scenario(
      "name: x\ntopology: ../topologies/small.cfg\nseed: 3\n"
      "sti:\n  default_ns: 100\n  pairs:\n    - {a: 0, b: 1, ns: 900}\n    - {a: 2, b: 0, ns: 50, directed: true}\n"
      "admission: reject\nlimits: {max_processes: 3}\n"
      "overrides: {decision_ns: 40, pipeline: {buffer: 4, fifo: 2, parse_rate: 10}, "
      "gate_times: {single_ns: 20, names: {sx: 10}}}\n"
      "tasks:\n  - {circuit: ../circuits/bell.circ, shots: 3, pid: 7, submit_ns: 50}\n",
      scenario_dir());
  const auto& sti = s.sim.scheduler.sti;
  EXPECT_EQ(sti.get(0, 1), 900);
  EXPECT_EQ(sti.get(1, 0), 900);
  EXPECT_EQ(sti.get(2, 0), 50);
  EXPECT_EQ(sti.get(0, 2), 100);
  EXPECT_EQ(s.sim.admission, AdmissionPolicy::kRejectOnConflict);
  EXPECT_EQ(s.sim.scheduler.max_processes, 3u);
  EXPECT_EQ(s.sim.decision_ns, 40);
  EXPECT_EQ(s.sim.pipeline.fifo, 2u);
  EXPECT_EQ(s.times.single_ns, 20);
  EXPECT_EQ(s.times.overrides.at("sx"), 10);
  EXPECT_EQ(s.tasks[0].pid, std::optional<ProcessId>(7));
  EXPECT_EQ(s.tasks[0].submit_ns, 50);
  EXPECT_EQ(compile_scenario(s)[0].process_id, 7u);
}

TEST(Scenario, NoStiBlock) {
  const Scenario s = parse_scenario(
      "name: x\ntopology: ../topologies/small.cfg\ntasks:\n  - {circuit: ../circuits/bell.circ}\n",
      scenario_dir());
  EXPECT_FALSE(s.has_sti);
  EXPECT_FALSE(s.seed.has_value());
  EXPECT_TRUE(s.sim.scheduler.sti.empty());
}

TEST(Scenario, Errors) {
  EXPECT_EQ(scenario_error("name: x\ntopology: ../topologies/small.cfg\nbogus: 1\n"), Errc::kConfigError);
  EXPECT_EQ(scenario_error("name: x\ntopology: ../topologies/none.cfg\n"), Errc::kIoError);
  EXPECT_EQ(scenario_error("name: x\ntopology: ../topologies/small.cfg\n"
                           "tasks:\n  - {circuit: ../circuits/none.circ}\n"),
            Errc::kIoError);
  EXPECT_EQ(scenario_error("name: x\ntopology: ../topologies/small.cfg\nadmission: maybe\n"),
            Errc::kConfigError);
  EXPECT_EQ(scenario_error("name: x\ntopology: ../topologies/small.cfg\nsti: {default_ns: -1}\n"),
            Errc::kConfigError);
  EXPECT_EQ(scenario_error(": : :\n"), Errc::kConfigError);
}

}  // namespace
}  // namespace hima
