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

#include "hima/timeline.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <tuple>

#include <fmt/format.h>

namespace hima {

namespace {
constexpr std::array<std::string_view, kEventKindCount> kNames = {
    "TriggerSent",  "TriggerLatched",    "GateStart",         "GateEnd",
    "MeasureStart", "MeasureResult",     "FeedbackCollected", "FeedbackDelivered",
    "FifoUnderflow", "ShotEnd",          "TriggerOverrun",    "TaskAdmitted",
    "TaskDone"};
}  // namespace

std::string_view to_string(EventKind kind) { return kNames[static_cast<std::size_t>(kind)]; }

bool is_control_event(EventKind kind) {
  switch (kind) {
    case EventKind::kGateStart:
    case EventKind::kGateEnd:
    case EventKind::kMeasureStart:
    case EventKind::kMeasureResult:
      return false;
    default:
      return true;
  }
}

bool event_before(const SimEvent& x, const SimEvent& y) {
  return std::tie(x.time, x.node, x.seq) < std::tie(y.time, y.node, y.seq);
}

void EventTimeline::sort() { std::sort(events.begin(), events.end(), event_before); }

std::size_t EventTimeline::count(EventKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(events.begin(), events.end(), [&](const SimEvent& e) { return e.kind == kind; }));
}

std::vector<SimEvent> EventTimeline::of_kind(EventKind kind) const {
  std::vector<SimEvent> out;
  std::copy_if(events.begin(), events.end(), std::back_inserter(out),
               [&](const SimEvent& e) { return e.kind == kind; });
  return out;
}

std::vector<SimEvent> EventTimeline::of_task(std::uint32_t task) const {
  std::vector<SimEvent> out;
  std::copy_if(events.begin(), events.end(), std::back_inserter(out),
               [&](const SimEvent& e) { return e.task == task; });
  return out;
}

std::string format_event(const SimEvent& e, const Hierarchy& h) {
  return fmt::format("{} {} {} p{} t{} s{} a={} b={}", e.time, to_string(e.kind),
                     h.node(e.node).name, e.pid, e.task, e.shot, e.a, e.b);
}

std::string export_timeline(const EventTimeline& tl, const Hierarchy& h) {
  std::string out;
  out.reserve(tl.events.size() * 48 + 256);
  out += "# time kind node process task shot a b\n";
  std::array<std::size_t, kEventKindCount> counts{};
  std::map<std::uint32_t, std::pair<std::int64_t, std::int64_t>> span;
  for (const auto& e : tl.events) {
    out += format_event(e, h);
    out += '\n';
    ++counts[static_cast<std::size_t>(e.kind)];
    auto [it, fresh] = span.try_emplace(e.task, e.time, e.time);
    if (!fresh) {
      it->second.first = std::min(it->second.first, e.time);
      it->second.second = std::max(it->second.second, e.time);
    }
  }
  out += "# summary\n";
  out += fmt::format("# events {}\n", tl.events.size());
  for (std::size_t k = 0; k < kEventKindCount; ++k)
    if (counts[k] != 0)
      out += fmt::format("# count {} {}\n", kNames[k], counts[k]);
  for (const auto& [task, s] : span)
    out += fmt::format("# task {} first {} last {}\n", task, s.first, s.second);
  return out;
}

}  // namespace hima
