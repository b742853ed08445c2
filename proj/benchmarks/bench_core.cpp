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

#include <benchmark/benchmark.h>

#include <random>

#include "hima/compiler.hpp"
#include "hima/engine.hpp"
#include "hima/isa.hpp"
#include "hima/pipeline.hpp"
#include "hima/topology_config.hpp"

namespace {

using namespace hima;

const System& origin() {
  static const System s = load_system(HIMA_DATA_DIR "/topologies/origin72.cfg");
  return s;
}

std::string drive_source(int n) {
  std::string src = ".unit xy\n";
  for (int i = 0; i < n; ++i) src += i % 3 == 0 ? "WAIT 30, 0\n" : "GATE 1, 30, 0\n";
  return src;
}

void BM_ParseProgram(benchmark::State& state) {
  const std::string src = drive_source(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(parse_program(src, UnitScope::kDriveOrReadoutOutput));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ParseProgram)->Arg(64)->Arg(4096);

Circuit layered(std::uint32_t qubits, int layers) {
  std::string text = "qubits " + std::to_string(qubits) + "\n";
  for (int l = 0; l < layers; ++l) {
    text += "layer";
    for (std::uint32_t q = 0; q < qubits; ++q) text += (q ? "; " : " ") + std::string(l % 2 ? "x q" : "h q") + std::to_string(q);
    text += "\n";
  }
  text += "layer";
  for (std::uint32_t q = 0; q < qubits; ++q) text += (q ? "; measure q" : " measure q") + std::to_string(q);
  return parse_circuit(text + "\n");
}

void BM_Compile(benchmark::State& state) {
  const Circuit c = layered(static_cast<std::uint32_t>(state.range(0)), 20);
  for (auto _ : state) benchmark::DoNotOptimize(compile(c, GateTimeTable{}, origin(), {}));
}
BENCHMARK(BM_Compile)->Arg(4)->Arg(24)->Arg(72);

void BM_ComputeMasks(benchmark::State& state) {
  const auto ids = origin().qubit_ids();
  const std::vector<QubitId> q(ids.begin(), ids.begin() + state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(compute_masks(origin(), 0, q));
}
BENCHMARK(BM_ComputeMasks)->Arg(1)->Arg(72);

void BM_IssueRateCheck(benchmark::State& state) {
  Program p;
  for (int i = 0; i < state.range(0); ++i) p.instructions.push_back(Instruction::gate(0, 30, i == 0));
  for (auto _ : state) benchmark::DoNotOptimize(issue_rate_check(p));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_IssueRateCheck)->Arg(1024);

// Simulated shots per second of wall time, with and without recording.
void BM_EngineShots(benchmark::State& state) {
  CompileOptions opt;
  opt.shots = 256;
  const CompiledTask t = compile(layered(static_cast<std::uint32_t>(state.range(0)), 4), GateTimeTable{}, origin(), opt);
  SimOptions so;
  so.record = state.range(1) ? RecordMode::kAll : RecordMode::kNone;
  for (auto _ : state) benchmark::DoNotOptimize(run({t}, origin(), so));
  state.SetItemsProcessed(state.iterations() * opt.shots);
}
BENCHMARK(BM_EngineShots)->Args({2, 0})->Args({24, 0})->Args({24, 1})->Unit(benchmark::kMillisecond);

void BM_EngineFeedback(benchmark::State& state) {
  CompileOptions opt;
  opt.shots = 256;
  opt.shot_period_ns = 20'000;
  const CompiledTask t = compile(
      parse_circuit("qubits 1\nlayer measure q0 fb\nif q0 == 1\nlayer x q0\nend\nlayer measure q0\n"),
      GateTimeTable{}, origin(), opt);
  SimOptions so;
  so.record = RecordMode::kNone;
  so.readout = ReadoutModel(QubitReadout{0.5, 0.0, 1.0});
  for (auto _ : state) benchmark::DoNotOptimize(run({t}, origin(), so));
  state.SetItemsProcessed(state.iterations() * opt.shots);
}
BENCHMARK(BM_EngineFeedback)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
