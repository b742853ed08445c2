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
#include <vector>

#include "hima/scheduler.hpp"
#include "hima/timeline.hpp"

namespace hima {

// ---------------------------------------------------------------------------
// Post-hoc timeline audits. Each returns human-readable violations; empty
// means the property holds.

std::vector<std::string> audit_sync_alignment(const EventTimeline& tl, std::int64_t sync_period_ns);

/// Every start-flagged TriggerSent of process a is at least sti(a, b) after
/// the latest start-flagged TriggerSent of every other still-running b.
std::vector<std::string> audit_staggering(const EventTimeline& tl, const StiTable& sti);

/// After each FeedbackCollected, the process's next TriggerSent has start=0
/// and no gate or measure of that process starts in between.
std::vector<std::string> audit_feedback_contract(const EventTimeline& tl);

/// Per unit, event offsets relative to the unit module's start TriggerLatched
/// are identical in every shot of `task`. Needs RecordMode::kAll.
std::vector<std::string> audit_rigidity(const EventTimeline& tl, const Hierarchy& h,
                                        std::uint32_t task);

/// Events of one task with the run-specific fields (task index, sequence)
/// cleared, for comparing a task's behaviour across runs.
std::vector<SimEvent> task_projection(const EventTimeline& tl, std::uint32_t task);

}  // namespace hima
