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
#include <string>
#include <string_view>
#include <vector>

#include "hima/topology.hpp"

namespace hima {

enum class EventKind : std::uint8_t {
  kTriggerSent,        // node=root, a=start flag, b=request time
  kTriggerLatched,     // node=module, a=start flag
  kGateStart,          // node=unit, a=pc, b=waveform addr
  kGateEnd,            // node=unit, a=pc
  kMeasureStart,       // node=unit, a=pc, b=dtype
  kMeasureResult,      // node=unit, a=bit, b=fb flag
  kFeedbackCollected,  // node=root, a=entry addr, b=collected bits (LSB = first qubit)
  kFeedbackDelivered,  // node=unit, a=register value, b=entry addr
  kFifoUnderflow,      // node=unit, a=pc, b=lateness ns
  kShotEnd,            // node=root, a=shot length from start grant
  kTriggerOverrun,     // node=unit, a=lateness ns
  kTaskAdmitted,       // node=root
  kTaskDone,           // node=root
};

inline constexpr std::size_t kEventKindCount = 13;

std::string_view to_string(EventKind kind);
bool is_control_event(EventKind kind);

struct SimEvent {
  std::int64_t time = 0;
  EventKind kind = EventKind::kTriggerSent;
  NodeId node = 0;
  ProcessId pid = 0;
  std::uint32_t task = 0;
  std::uint32_t shot = 0;
  std::int64_t a = 0;
  std::int64_t b = 0;
  std::uint64_t seq = 0;

  bool operator==(const SimEvent&) const = default;
};

/// Total order: time, then node id, then insertion sequence.
bool event_before(const SimEvent& x, const SimEvent& y);

struct EventTimeline {
  std::vector<SimEvent> events;

  void sort();
  std::size_t count(EventKind kind) const;
  std::vector<SimEvent> of_kind(EventKind kind) const;
  std::vector<SimEvent> of_task(std::uint32_t task) const;
};

/// One line per event with a stable field order, then a `# summary` block.
std::string export_timeline(const EventTimeline& tl, const Hierarchy& h);
std::string format_event(const SimEvent& e, const Hierarchy& h);

}  // namespace hima
