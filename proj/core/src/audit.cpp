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

#include "hima/audit.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <tuple>

#include <fmt/format.h>

namespace hima {

std::vector<std::string> audit_sync_alignment(const EventTimeline& tl, std::int64_t sync_period_ns) {
  std::vector<std::string> out;
  for (const auto& e : tl.events)
    if (e.kind == EventKind::kTriggerLatched && e.time % sync_period_ns != 0)
      out.push_back(fmt::format("TriggerLatched at {} (node {}) is off the {} ns grid", e.time,
                                e.node, sync_period_ns));
  return out;
}

std::vector<std::string> audit_staggering(const EventTimeline& tl, const StiTable& sti) {
  std::vector<std::string> out;
  std::map<std::uint32_t, std::int64_t> done_at;
  for (const auto& e : tl.events)
    if (e.kind == EventKind::kTaskDone) done_at[e.task] = e.time;
  struct Last {
    ProcessId pid;
    std::int64_t time;
  };
  std::map<std::uint32_t, Last> last;  // by task
  for (const auto& e : tl.events) {
    if (e.kind != EventKind::kTriggerSent || e.a != 1) continue;
    for (const auto& [task, l] : last) {
      if (task == e.task) continue;
      auto d = done_at.find(task);
      if (d != done_at.end() && d->second <= e.time) continue;
      const std::int64_t need = sti.get(e.pid, l.pid);
      if (e.time - l.time < need)
        out.push_back(fmt::format("start trigger of p{} at {} is {} ns after p{} (STI {})", e.pid,
                                  e.time, e.time - l.time, l.pid, need));
    }
    last[e.task] = {e.pid, e.time};
  }
  return out;
}

std::vector<std::string> audit_feedback_contract(const EventTimeline& tl) {
  std::vector<std::string> out;
  std::map<std::uint32_t, std::int64_t> pending;  // task -> FeedbackCollected time
  for (const auto& e : tl.events) {
    switch (e.kind) {
      case EventKind::kFeedbackCollected:
        if (pending.count(e.task) != 0)
          out.push_back(fmt::format("task {}: FEEDBACK at {} before a trigger resynchronised the "
                                    "previous one",
                                    e.task, e.time));
        pending[e.task] = e.time;
        break;
      case EventKind::kTriggerSent:
        if (auto it = pending.find(e.task); it != pending.end()) {
          if (e.a != 0)
            out.push_back(fmt::format("task {}: trigger after FEEDBACK at {} has start=1", e.task,
                                      it->second));
          pending.erase(it);
        }
        break;
      case EventKind::kGateStart:
      case EventKind::kMeasureStart:
        if (auto it = pending.find(e.task); it != pending.end() && e.time > it->second)
          out.push_back(fmt::format("task {}: unit {} executes at {} between FEEDBACK and its "
                                    "trigger",
                                    e.task, e.node, e.time));
        break;
      default:
        break;
    }
  }
  for (const auto& [task, t] : pending)
    out.push_back(fmt::format("task {}: FEEDBACK at {} never followed by a trigger", task, t));
  return out;
}

std::vector<std::string> audit_rigidity(const EventTimeline& tl, const Hierarchy& h,
                                        std::uint32_t task) {
  std::vector<std::string> out;
  std::map<std::pair<std::uint32_t, NodeId>, std::int64_t> latch;  // (shot, module)
  for (const auto& e : tl.events)
    if (e.task == task && e.kind == EventKind::kTriggerLatched && e.a == 1)
      latch.try_emplace({e.shot, e.node}, e.time);

  using Key = std::tuple<NodeId, EventKind, std::int64_t, std::int64_t>;
  std::map<std::uint32_t, std::vector<Key>> per_shot;
  for (const auto& e : tl.events) {
    if (e.task != task || h.node(e.node).kind != NodeKind::kUnit) continue;
    auto it = latch.find({e.shot, h.node(e.node).parent});
    if (it == latch.end()) {
      out.push_back(fmt::format("shot {}: unit event without a start latch", e.shot));
      continue;
    }
    const std::int64_t a = e.kind == EventKind::kMeasureResult ? 0 : e.a;
    per_shot[e.shot].emplace_back(e.node, e.kind, e.time - it->second, a);
  }
  if (per_shot.empty()) return out;
  auto& ref = per_shot.begin()->second;
  std::sort(ref.begin(), ref.end());
  for (auto& [shot, keys] : per_shot) {
    std::sort(keys.begin(), keys.end());
    if (keys != ref)
      out.push_back(fmt::format("shot {}: unit offsets differ from shot {}", shot,
                                per_shot.begin()->first));
  }
  return out;
}

std::vector<SimEvent> task_projection(const EventTimeline& tl, std::uint32_t task) {
  std::vector<SimEvent> out;
  for (const auto& e : tl.events) {
    if (e.task != task) continue;
    SimEvent c = e;
    c.task = 0;
    c.seq = 0;
    out.push_back(c);
  }
  return out;
}

}  // namespace hima
