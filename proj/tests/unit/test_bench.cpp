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

#include "hima/bench.hpp"
#include "hima/topology_config.hpp"
#include "oracles.hpp"

namespace hima {
namespace {

const System& origin() {
  static const System s = load_system(testing::data_path("topologies/origin72.cfg"));
  return s;
}

QlaBenchConfig ideal_qla() {
  QlaBenchConfig c;
  c.host = HostModel{0, 0, 5, 0, 0};
  c.sim.load_ns = 0;
  c.shots = 32;
  return c;
}

TEST(QlaBench, ProcessCount) {
  EXPECT_EQ(qla_process_count(72, 10, 5), 5u);
  EXPECT_EQ(qla_process_count(72, 14, 5), 5u);
  EXPECT_EQ(qla_process_count(72, 15, 5), 4u);
  EXPECT_EQ(qla_process_count(72, 36, 5), 2u);
  EXPECT_EQ(qla_process_count(72, 37, 5), 1u);
  EXPECT_EQ(qla_process_count(72, 72, 5), 1u);
  EXPECT_EQ(qla_process_count(72, 10, 32), 7u);
}

TEST(QlaBench, BenchCircuitShape) {
  const Circuit c = bench_circuit("w", 3, 4);
  EXPECT_EQ(c.num_qubits, 3u);
  EXPECT_EQ(c.depth(), 5u);
  const auto& last = std::get<Layer>(c.items.back());
  for (const auto& g : last.gates) EXPECT_EQ(g.kind, Gate::Kind::kMeasure);
}

TEST(QlaBench, ZeroOverheadIsIdeal) {
  const MetricsReport r = run_qla_point(ideal_qla(), origin(), 14);
  EXPECT_EQ(r.processes, 5u);
  EXPECT_NEAR(r.speedup, 5.0, 1e-3);
  EXPECT_NEAR(r.speedup_efficiency, 1.0, 1e-3);
  EXPECT_LE(r.speedup_efficiency, 1.0);
}

TEST(QlaBench, FullChipHasNoParallelism) {
  const MetricsReport r = run_qla_point(ideal_qla(), origin(), 72);
  EXPECT_EQ(r.processes, 1u);
  EXPECT_DOUBLE_EQ(r.speedup, 1.0);
  EXPECT_DOUBLE_EQ(r.qla, r.qla_serial);
}

TEST(QlaBench, DefaultOverheadsAtFourteenQubits) {
  QlaBenchConfig c;
  QlaRuns runs;
  const MetricsReport r = run_qla_point(c, origin(), 14, &runs);
  EXPECT_EQ(r.processes, 5u);
  EXPECT_GE(r.speedup, 4.5);
  EXPECT_LE(r.speedup, 5.0);
  EXPECT_EQ(r.tasks.size(), 5u);
  for (const auto& t : r.tasks) {
    EXPECT_EQ(t.t_qpu, 1024 * 100'000);
    EXPECT_GE(t.t_qcs, t.t_qpu);
    EXPECT_GE(t.t_total, t.t_qcs);
  }
  EXPECT_EQ(runs.parallel.timeline.events.size(), 0u);  // nothing recorded by default
}

TEST(QlaBench, MonotoneWithinProcessZones) {
  QlaBenchConfig c;
  c.shots = 64;
  const auto reports = run_qla_benchmark(c, origin());
  ASSERT_EQ(reports.size(), c.usage_qubits.size());
  for (std::size_t i = 1; i < reports.size(); ++i) {
    if (reports[i].processes != reports[i - 1].processes) continue;
    EXPECT_GE(reports[i].qla, reports[i - 1].qla) << reports[i].task_qubits;
  }
  for (const auto& r : reports) EXPECT_LE(r.speedup_efficiency, 1.0);
}

ClopsBenchConfig small_clops() {
  ClopsBenchConfig c;
  c.params.m = 10;
  return c;
}

TEST(ClopsBench, ZeroLatencyUpperBound) {
  ClopsBenchConfig c = small_clops();
  c.params.update_latency_ns = 0;
  c.host_compute_ns = 0;
  c.sim.load_ns = 0;
  const MetricsReport r = run_clops_benchmark(c, 1, origin());
  // M*K*S shots of 100 us: 1 s for 500 000 layer operations.
  EXPECT_NEAR(r.clops, 50'000.0, 50.0);
  EXPECT_LE(r.clops, 50'000.0);
  EXPECT_DOUBLE_EQ(r.efficiency_factor, r.clops / 5);
}

TEST(ClopsBench, HugeUpdateLatencyStarves) {
  ClopsBenchConfig c = small_clops();
  c.params.k = 2;
  c.params.update_latency_ns = 1'000'000'000'000;
  EXPECT_LT(run_clops_benchmark(c, 1, origin()).clops, 1.0);
}

TEST(ClopsBench, ScalingShape) {
  const auto reports = run_clops_sweep(small_clops(), origin());
  ASSERT_EQ(reports.size(), 5u);
  for (std::size_t i = 1; i < reports.size(); ++i) {
    EXPECT_GT(reports[i].clops, reports[i - 1].clops);
    EXPECT_LE(reports[i].clops_per_process, reports[i - 1].clops_per_process);
    EXPECT_NEAR(reports[i].clops_per_process * reports[i].processes, reports[i].clops, 1e-6);
  }
  EXPECT_GE(reports[4].clops, 3 * reports[0].clops);
}

TEST(ClopsBench, Deterministic) {
  const ClopsBenchConfig c = small_clops();
  const MetricsReport a = run_clops_benchmark(c, 3, origin());
  const MetricsReport b = run_clops_benchmark(c, 3, origin());
  EXPECT_EQ(a.elapsed_ns, b.elapsed_ns);
  EXPECT_EQ(a.clops, b.clops);
}

}  // namespace
}  // namespace hima
