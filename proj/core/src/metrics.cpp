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

#include "hima/metrics.hpp"

#include <nlohmann/json.hpp>

#include <fmt/format.h>

#include "hima/error.hpp"

namespace hima {

double QlaTerms::value() const {
  if (numerator == 0) return 0.0;
  return static_cast<double>(numerator / denominator);
}

QlaTerms qla_terms(const std::vector<TaskTiming>& timings, std::uint32_t total_qubits,
                   std::int64_t window_ns) {
  if (window_ns <= 0) throw Error(Errc::kZeroWindow, "load average over an empty window");
  if (total_qubits == 0) throw Error(Errc::kInvalidArgument, "chip has no qubits");
  QlaTerms t;
  std::int64_t sum = 0;  // exact; 1e9 ns * 1e4 qubits * 1e3 tasks still fits
  for (const auto& x : timings) {
    if (x.n_qubits > total_qubits)
      throw Error(Errc::kInvalidArgument,
                  fmt::format("task '{}' uses {} of {} qubits", x.name, x.n_qubits, total_qubits));
    sum += x.t_qpu * static_cast<std::int64_t>(x.n_qubits);
  }
  t.numerator = static_cast<long double>(sum);
  t.denominator = static_cast<long double>(window_ns) * total_qubits;
  return t;
}

double qla(const std::vector<TaskTiming>& timings, std::uint32_t total_qubits,
           std::int64_t window_ns) {
  return qla_terms(timings, total_qubits, window_ns).value();
}

double qla_from_timeline(const EventTimeline& tl,
                         const std::map<std::uint32_t, std::uint32_t>& task_qubits,
                         std::uint32_t total_qubits, std::int64_t window_ns) {
  if (window_ns <= 0) throw Error(Errc::kZeroWindow, "load average over an empty window");
  std::map<std::uint32_t, std::int64_t> open;  // task -> start grant
  std::int64_t sum = 0;
  for (const auto& e : tl.events) {
    if (e.kind == EventKind::kTriggerSent && e.a == 1) {
      open[e.task] = e.time;
    } else if (e.kind == EventKind::kShotEnd) {
      auto it = open.find(e.task);
      if (it == open.end()) continue;
      auto n = task_qubits.find(e.task);
      if (n != task_qubits.end()) sum += (e.time - it->second) * n->second;
      open.erase(it);
    }
  }
  return static_cast<double>(static_cast<long double>(sum) /
                             (static_cast<long double>(window_ns) * total_qubits));
}

double speedup(std::int64_t t_single_ns, std::int64_t t_multi_ns) {
  if (t_single_ns <= 0 || t_multi_ns <= 0) throw Error(Errc::kZeroTime, "speedup of a zero time");
  return static_cast<double>(t_single_ns) / static_cast<double>(t_multi_ns);
}

double speedup_efficiency(double s, std::uint32_t processes) {
  if (processes == 0) throw Error(Errc::kInvalidArgument, "process count must be at least 1");
  return s / processes;
}

void ClopsParams::check() const {
  if (m == 0 || k == 0 || s == 0 || d == 0)
    throw Error(Errc::kInvalidArgument, "CLOPS parameters M, K, S and D must be at least 1");
  if (update_latency_ns < 0) throw Error(Errc::kInvalidArgument, "negative update latency");
}

double clops_from_seconds(const ClopsParams& p, double elapsed_s) {
  p.check();
  if (!(elapsed_s > 0)) throw Error(Errc::kZeroTime, "CLOPS over zero elapsed time");
  return static_cast<double>(p.m) * p.k * p.s * p.d / elapsed_s;
}

double clops(const ClopsParams& p, std::int64_t elapsed_ns) {
  if (elapsed_ns <= 0) throw Error(Errc::kZeroTime, "CLOPS over zero elapsed time");
  return clops_from_seconds(p, static_cast<double>(elapsed_ns) * 1e-9);
}

double efficiency_factor(double c, std::uint32_t d) {
  if (d == 0) throw Error(Errc::kInvalidArgument, "layer count must be at least 1");
  return c / d;
}

std::string reports_to_csv(const std::vector<MetricsReport>& reports, std::uint32_t total_qubits) {
  std::string out =
      "scenario,task_qubits,usage,processes,qla_serial,qla,speedup,speedup_efficiency,"
      "t_serial_ns,t_parallel_ns,clops,clops_per_process,efficiency_factor,elapsed_ns\n";
  for (const auto& r : reports) {
    const double usage = total_qubits ? static_cast<double>(r.task_qubits) / total_qubits : 0.0;
    out += fmt::format("{},{},{:.6f},{},{:.6f},{:.6f},{:.6f},{:.6f},{},{},{:.3f},{:.3f},{:.3f},{}\n",
                       r.scenario, r.task_qubits, usage, r.processes, r.qla_serial, r.qla,
                       r.speedup, r.speedup_efficiency, r.t_serial_ns, r.t_parallel_ns, r.clops,
                       r.clops_per_process, r.efficiency_factor, r.elapsed_ns);
  }
  return out;
}

std::string reports_to_json(const std::vector<MetricsReport>& reports, std::uint32_t total_qubits) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    nlohmann::ordered_json j;
    j["scenario"] = r.scenario;
    j["task_qubits"] = r.task_qubits;
    j["usage"] = total_qubits ? static_cast<double>(r.task_qubits) / total_qubits : 0.0;
    j["processes"] = r.processes;
    j["qla_serial"] = r.qla_serial;
    j["qla"] = r.qla;
    j["speedup"] = r.speedup;
    j["speedup_efficiency"] = r.speedup_efficiency;
    j["t_serial_ns"] = r.t_serial_ns;
    j["t_parallel_ns"] = r.t_parallel_ns;
    j["clops"] = r.clops;
    j["clops_per_process"] = r.clops_per_process;
    j["efficiency_factor"] = r.efficiency_factor;
    j["elapsed_ns"] = r.elapsed_ns;
    auto& tasks = j["tasks"] = nlohmann::ordered_json::array();
    for (const auto& t : r.tasks)
      tasks.push_back({{"name", t.name},
                       {"n_qubits", t.n_qubits},
                       {"t_pre", t.t_pre},
                       {"t_qcs", t.t_qcs},
                       {"t_qpu", t.t_qpu},
                       {"t_post", t.t_post},
                       {"t_send", t.t_send},
                       {"t_recv", t.t_recv},
                       {"t_total", t.t_total}});
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

}  // namespace hima
