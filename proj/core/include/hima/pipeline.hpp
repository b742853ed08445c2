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
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "hima/isa.hpp"

namespace hima {

struct PipelineParams {
  std::uint32_t buffer = 16;              // quantum operation buffer, B
  std::uint32_t fifo = 8;                 // waveform FIFO, F
  double parse_rate_ops_per_us = 100.0;

  /// Nanoseconds to parse one instruction, rounded up.
  std::int64_t parse_cost_ns() const;
  void check() const;
};

/// Producer/consumer recurrence of a unit's issue path. For the k-th output
/// instruction (GATE, WAIT, MEASURE):
///   parsed  t_k = max(parser_free, ready_{k-B}) + c
///   ready   m_k = max(t_k, m_{k-1}, start_{k-F})
///   start   s_k = max(due_k, m_k)
/// BR costs parse time but holds no buffer or FIFO slot. The caller supplies
/// due_k and reports s_k back, so the same object drives the engine (where
/// due times arrive with triggers) and the static check.
class IssuePipeline {
 public:
  IssuePipeline(const PipelineParams& params, std::int64_t parser_start);

  struct Staged {
    std::int64_t parsed = 0;
    std::int64_t ready = 0;
  };

  /// Parses and stages the next output instruction. Requires that the start
  /// time of the instruction F places back has been committed.
  Staged stage();
  void commit_start(std::int64_t start);

  /// Parses a BR; returns its parse completion time.
  std::int64_t parse_branch();
  void stall_parser_until(std::int64_t t);

  std::uint64_t staged_count() const { return staged_; }
  std::int64_t parser_free() const { return parser_free_; }

 private:
  std::int64_t lookback(const std::deque<std::int64_t>& q, std::uint32_t back) const;

  PipelineParams params_;
  std::int64_t cost_;
  std::int64_t parser_free_;
  std::uint64_t staged_ = 0;
  std::uint64_t committed_ = 0;
  std::deque<std::int64_t> ready_;   // last B ready times
  std::deque<std::int64_t> starts_;  // last F start times
};

struct IssueRateOptions {
  PipelineParams params;
  /// Parser start relative to the shot trigger at t=0. Default (B+F)*c,
  /// i.e. the buffer and FIFO are primed before the trigger.
  std::optional<std::int64_t> lead_ns;
};

struct UnitIssueReport {
  std::string unit;
  std::int64_t min_headroom = 0;
  bool underflow = false;
  std::optional<std::size_t> first_underflow;  // instruction index
  std::vector<std::int64_t> ready;             // m_k per output instruction
  std::vector<std::int64_t> start;             // s_k
};

/// Replays a program in order against its nominal timeline. Headroom at
/// output instruction k is #{j : m_j <= due_k} - (k+1); underflow iff some
/// headroom is negative. An empty program reports headroom F.
UnitIssueReport issue_rate_check(const Program& program, const IssueRateOptions& options = {});

}  // namespace hima
