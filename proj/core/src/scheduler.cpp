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

#include "hima/scheduler.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace hima {

void StiTable::set(ProcessId a, ProcessId b, std::int64_t ns) {
  set_directed(a, b, ns);
  set_directed(b, a, ns);
}

void StiTable::set_directed(ProcessId a, ProcessId b, std::int64_t ns) {
  if (ns < 0) throw Error(Errc::kInvalidArgument, "STI must be non-negative");
  table_[{a, b}] = ns;
}

std::int64_t StiTable::get(ProcessId a, ProcessId b) const {
  auto it = table_.find({a, b});
  return it == table_.end() ? default_ : it->second;
}

Scheduler::Scheduler(SchedulerConfig config) : config_(std::move(config)) {
  if (config_.max_processes == 0 || config_.max_processes > kProcessCap)
    throw Error(Errc::kInvalidArgument,
                fmt::format("max_processes must be in [1, {}]", kProcessCap));
  if (config_.sti.default_ns() < 0) throw Error(Errc::kInvalidArgument, "STI must be non-negative");
}

std::size_t Scheduler::running() const {
  return static_cast<std::size_t>(std::count_if(contexts_.begin(), contexts_.end(), [](const auto& kv) {
    return kv.second.state != ProcessState::kDone;
  }));
}

AdmitResult Scheduler::admit(const std::vector<QubitId>& qubits, std::vector<NodeId> units,
                             std::uint32_t shots, ProcessId preferred_pid,
                             const MaskTable& masks, const Hierarchy& h) {
  AdmitResult r;
  std::sort(units.begin(), units.end());
  for (const auto& [pid, ctx] : contexts_) {
    std::vector<NodeId> common;
    std::set_intersection(units.begin(), units.end(), ctx.units.begin(), ctx.units.end(),
                          std::back_inserter(common));
    if (!common.empty()) r.blocking.push_back(pid);
  }
  if (!r.blocking.empty()) {
    r.error = Errc::kUnitConflict;
    return r;
  }
  if (running() >= config_.max_processes) {
    r.error = Errc::kSlotsExhausted;
    return r;
  }
  ProcessId pid = preferred_pid;
  if (pid >= kProcessCap || contexts_.count(pid) != 0) {
    pid = 0;
    while (contexts_.count(pid) != 0) ++pid;
  }
  ProcessContext ctx;
  ctx.pid = pid;
  ctx.qubits = qubits;
  ctx.units = std::move(units);
  ctx.state = ProcessState::kRunning;
  ctx.shots_remaining = shots;
  // Masks were computed for the tentative id; re-tag them for the slot.
  if (pid == preferred_pid) {
    MaskTable own;
    for (const auto& [node, per_pid] : masks.entries())
      if (auto it = per_pid.find(preferred_pid); it != per_pid.end()) own.set(node, pid, it->second);
    masks_.merge(own);
  } else {
    masks_.merge(compute_masks_for_units(h, pid, ctx.units));
  }
  contexts_.emplace(pid, std::move(ctx));
  r.admitted = true;
  r.pid = pid;
  return r;
}

std::int64_t Scheduler::arbitrate(ProcessId pid, bool start, std::int64_t now) {
  ProcessContext& self = context(pid);
  if (self.state != ProcessState::kRunning)
    throw Error(Errc::kNotRunning, fmt::format("process {} is not running", pid));
  if (!start) return now;
  std::int64_t grant = now;
  for (const auto& [other, ctx] : contexts_) {
    if (other == pid || ctx.state != ProcessState::kRunning || !ctx.last_start) continue;
    grant = std::max(grant, *ctx.last_start + config_.sti.get(pid, other));
  }
  self.last_start = grant;
  return grant;
}

void Scheduler::mark_done(ProcessId pid) { context(pid).state = ProcessState::kDone; }

void Scheduler::release(ProcessId pid) {
  auto it = contexts_.find(pid);
  if (it == contexts_.end())
    throw Error(Errc::kNotRunning, fmt::format("process {} is not admitted", pid));
  if (it->second.state != ProcessState::kDone)
    throw Error(Errc::kNotDone, fmt::format("process {} has not finished", pid));
  contexts_.erase(it);
  masks_.retire(pid);
}

const ProcessContext& Scheduler::context(ProcessId pid) const {
  auto it = contexts_.find(pid);
  if (it == contexts_.end())
    throw Error(Errc::kNotRunning, fmt::format("process {} is not admitted", pid));
  return it->second;
}

ProcessContext& Scheduler::context(ProcessId pid) {
  return const_cast<ProcessContext&>(std::as_const(*this).context(pid));
}

}  // namespace hima
