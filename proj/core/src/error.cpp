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

#include "hima/error.hpp"

#include <string>

namespace hima {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::kUnknownOpcode: return "UnknownOpcode";
    case Errc::kArityMismatch: return "ArityMismatch";
    case Errc::kOperandOutOfRange: return "OperandOutOfRange";
    case Errc::kUndefinedLabel: return "UndefinedLabel";
    case Errc::kDuplicateLabel: return "DuplicateLabel";
    case Errc::kSyntaxError: return "SyntaxError";
    case Errc::kScopeViolation: return "ScopeViolation";
    case Errc::kBranchOutOfBounds: return "BranchOutOfBounds";
    case Errc::kWidthExceeded: return "WidthExceeded";
    case Errc::kDanglingReference: return "DanglingReference";
    case Errc::kFeedlineOverflow: return "FeedlineOverflow";
    case Errc::kCycleDetected: return "CycleDetected";
    case Errc::kInvalidTopology: return "InvalidTopology";
    case Errc::kUnknownQubit: return "UnknownQubit";
    case Errc::kInvalidCircuit: return "InvalidCircuit";
    case Errc::kUnmappedQubit: return "UnmappedQubit";
    case Errc::kConditionWithoutMeasure: return "ConditionWithoutMeasure";
    case Errc::kShotPeriodTooShort: return "ShotPeriodTooShort";
    case Errc::kUnknownUnit: return "UnknownUnit";
    case Errc::kDeadlock: return "Deadlock";
    case Errc::kMissingTrigger0AfterFeedback: return "MissingTrigger0AfterFeedback";
    case Errc::kIncompleteResults: return "IncompleteResults";
    case Errc::kProgramContract: return "ProgramContract";
    case Errc::kUnitConflict: return "UnitConflict";
    case Errc::kSlotsExhausted: return "SlotsExhausted";
    case Errc::kNotDone: return "NotDone";
    case Errc::kNotRunning: return "NotRunning";
    case Errc::kZeroWindow: return "ZeroWindow";
    case Errc::kZeroTime: return "ZeroTime";
    case Errc::kInvalidArgument: return "InvalidArgument";
    case Errc::kConfigError: return "ConfigError";
    case Errc::kIoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace hima
