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

#include <stdexcept>
#include <string>
#include <string_view>

namespace hima {

/// Error codes shared by every module. The names double as the `code` field
/// of rendered diagnostics, so they are part of the textual interface.
enum class Errc {
  // isa
  kUnknownOpcode,
  kArityMismatch,
  kOperandOutOfRange,
  kUndefinedLabel,
  kDuplicateLabel,
  kSyntaxError,
  kScopeViolation,
  kBranchOutOfBounds,
  kWidthExceeded,
  // topology
  kDanglingReference,
  kFeedlineOverflow,
  kCycleDetected,
  kInvalidTopology,
  kUnknownQubit,
  // compiler
  kInvalidCircuit,
  kUnmappedQubit,
  kConditionWithoutMeasure,
  kShotPeriodTooShort,
  kUnknownUnit,
  // sim-core
  kDeadlock,
  kMissingTrigger0AfterFeedback,
  kIncompleteResults,
  kProgramContract,
  // scheduler
  kUnitConflict,
  kSlotsExhausted,
  kNotDone,
  kNotRunning,
  // metrics
  kZeroWindow,
  kZeroTime,
  // plumbing
  kInvalidArgument,
  kConfigError,
  kIoError,
};

std::string_view to_string(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace hima
