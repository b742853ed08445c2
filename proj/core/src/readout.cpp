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

#include "hima/readout.hpp"

#include "hima/error.hpp"

namespace hima {

double QubitReadout::p_read_one() const {
  return p_excited * p1_given_1 + (1.0 - p_excited) * p1_given_0;
}

void QubitReadout::check() const {
  for (double p : {p_excited, p1_given_0, p1_given_1})
    if (!(p >= 0.0 && p <= 1.0))
      throw Error(Errc::kInvalidArgument, "readout probabilities must lie in [0, 1]");
}

void ReadoutModel::set(QubitId q, QubitReadout r) {
  r.check();
  per_qubit_[q] = r;
}

const QubitReadout& ReadoutModel::get(QubitId q) const {
  auto it = per_qubit_.find(q);
  return it == per_qubit_.end() ? fallback_ : it->second;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double counter_uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c,
                       std::uint64_t d) {
  std::uint64_t h = splitmix64(seed);
  for (std::uint64_t v : {a, b, c, d}) h = splitmix64(h ^ v);
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

int ReadoutModel::sample(std::uint64_t seed, ProcessId pid, QubitId q, std::uint64_t shot,
                         std::uint64_t measure_index) const {
  const double p = get(q).p_read_one();
  if (p <= 0.0) return 0;
  if (p >= 1.0) return 1;
  return counter_uniform(seed, pid, q, shot, measure_index) < p ? 1 : 0;
}

}  // namespace hima
