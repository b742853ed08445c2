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

#include "hima/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "hima/error.hpp"

namespace hima {

std::int64_t PipelineParams::parse_cost_ns() const {
  return static_cast<std::int64_t>(std::ceil(1000.0 / parse_rate_ops_per_us - 1e-9));
}

void PipelineParams::check() const {
  if (!(parse_rate_ops_per_us > 0.0))
    throw Error(Errc::kInvalidArgument, "parse rate must be positive");
  if (buffer == 0 || fifo == 0)
    throw Error(Errc::kInvalidArgument, "buffer and FIFO capacities must be >= 1");
}

IssuePipeline::IssuePipeline(const PipelineParams& params, std::int64_t parser_start)
    : params_(params), cost_(params.parse_cost_ns()), parser_free_(parser_start) {
  params_.check();
}

std::int64_t IssuePipeline::lookback(const std::deque<std::int64_t>& q,
                                     std::uint32_t back) const {
  // q holds the most recent entries, newest at the back.
  if (q.size() < back) return std::numeric_limits<std::int64_t>::min();
  return q[q.size() - back];
}

IssuePipeline::Staged IssuePipeline::stage() {
  if (staged_ >= committed_ + params_.fifo) {
    // start_{k-F} has not been committed yet.
    throw Error(Errc::kProgramContract, "pipeline staged past an uncommitted FIFO slot");
  }
  const std::int64_t buffer_free = lookback(ready_, params_.buffer);
  const std::int64_t parsed = std::max(parser_free_, buffer_free) + cost_;
  std::int64_t ready = parsed;
  if (!ready_.empty()) ready = std::max(ready, ready_.back());
  // start_{k-F}: starts_ has committed_ entries conceptually; index k-F.
  if (staged_ >= params_.fifo) {
    const std::uint64_t idx = staged_ - params_.fifo;  // absolute index
    const std::uint64_t back = committed_ - idx;        // 1 = newest
    ready = std::max(ready, starts_[starts_.size() - back]);
  }
  parser_free_ = parsed;
  ready_.push_back(ready);
  if (ready_.size() > params_.buffer) ready_.pop_front();
  ++staged_;
  return {parsed, ready};
}

void IssuePipeline::commit_start(std::int64_t start) {
  starts_.push_back(start);
  if (starts_.size() > params_.fifo) starts_.pop_front();
  ++committed_;
}

std::int64_t IssuePipeline::parse_branch() {
  parser_free_ += cost_;
  return parser_free_;
}

void IssuePipeline::stall_parser_until(std::int64_t t) { parser_free_ = std::max(parser_free_, t); }

UnitIssueReport issue_rate_check(const Program& program, const IssueRateOptions& options) {
  const auto& p = options.params;
  p.check();
  UnitIssueReport rep;
  rep.unit = program.unit_id;
  rep.min_headroom = p.fifo;
  const std::int64_t c = p.parse_cost_ns();
  const std::int64_t lead =
      options.lead_ns.value_or(static_cast<std::int64_t>(p.buffer + p.fifo) * c);

  IssuePipeline pipe(p, -lead);
  std::vector<std::int64_t> due;
  std::vector<std::size_t> index;
  std::int64_t offset = 0;
  for (std::size_t i = 0; i < program.size(); ++i) {
    const Instruction& ins = program.instructions[i];
    if (ins.op == Opcode::kBr) {
      pipe.parse_branch();
      continue;
    }
    if (ins.op == Opcode::kTrigger || ins.op == Opcode::kFeedback) continue;
    auto st = pipe.stage();
    const std::int64_t start = std::max(offset, st.ready);
    pipe.commit_start(start);
    due.push_back(offset);
    index.push_back(i);
    rep.ready.push_back(st.ready);
    rep.start.push_back(start);
    offset += ins.duration();
  }
  for (std::size_t k = 0; k < due.size(); ++k) {
    const auto avail = std::upper_bound(rep.ready.begin(), rep.ready.end(), due[k]) -
                       rep.ready.begin();
    const std::int64_t headroom = static_cast<std::int64_t>(avail) - static_cast<std::int64_t>(k + 1);
    if (k == 0 || headroom < rep.min_headroom) rep.min_headroom = headroom;
    if (headroom < 0 && !rep.underflow) {
      rep.underflow = true;
      rep.first_underflow = index[k];
    }
  }
  return rep;
}

}  // namespace hima
