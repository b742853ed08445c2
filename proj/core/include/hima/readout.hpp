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
#include <map>

#include "hima/topology.hpp"

namespace hima {

/// Per-qubit outcome distribution. The qubit is found in |1> with
/// probability `p_excited`; the assignment matrix then gives the read bit.
struct QubitReadout {
  double p_excited = 0.0;
  double p1_given_0 = 0.0;  // false positive
  double p1_given_1 = 1.0;

  double p_read_one() const;
  void check() const;
};

/// Readout sampling with a counter-based generator: each result is a pure
/// function of (seed, process, qubit, shot, measure index), so results do
/// not depend on the order in which the engine happens to evaluate them.
class ReadoutModel {
 public:
  ReadoutModel() = default;
  explicit ReadoutModel(QubitReadout fallback) : fallback_(fallback) {}

  void set(QubitId q, QubitReadout r);
  const QubitReadout& get(QubitId q) const;

  int sample(std::uint64_t seed, ProcessId pid, QubitId q, std::uint64_t shot,
             std::uint64_t measure_index) const;

 private:
  QubitReadout fallback_;
  std::map<QubitId, QubitReadout> per_qubit_;
};

std::uint64_t splitmix64(std::uint64_t x);
/// Uniform double in [0, 1) from the key tuple.
double counter_uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c,
                       std::uint64_t d);

}  // namespace hima
