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

#include "oracles.hpp"

#include <deque>
#include <set>

namespace hima::testing {

Circuit random_circuit(std::mt19937_64& rng, const System& sys, const std::vector<QubitId>& phys,
                       const CircuitShape& shape) {
  auto uniform = [&](std::uint32_t lo, std::uint32_t hi) {
    return std::uniform_int_distribution<std::uint32_t>(lo, hi)(rng);
  };
  std::bernoulli_distribution coin(0.5);
  std::bernoulli_distribution cond_coin(shape.conditional_rate);

  Circuit c;
  c.name = "random";
  c.num_qubits = std::min<std::uint32_t>(uniform(shape.min_qubits, shape.max_qubits),
                                         static_cast<std::uint32_t>(phys.size()));
  const std::uint32_t layers = uniform(shape.min_layers, shape.max_layers);
  static const char* kSingles[] = {"x", "y", "h", "sx", "rz"};

  auto random_layer = [&](bool allow_fb) {
    Layer l;
    std::set<LogicalQubit> used;
    const int kind = static_cast<int>(uniform(0, 2));
    for (LogicalQubit q = 0; q < c.num_qubits; ++q) {
      if (used.count(q) || !coin(rng)) continue;
      if (kind == 2) {
        l.gates.push_back(Gate::measure(q, allow_fb && coin(rng)));
        used.insert(q);
      } else if (kind == 1 && q + 1 < c.num_qubits && !used.count(q + 1) &&
                 sys.coupler_between(phys[q], phys[q + 1]) != nullptr) {
        l.gates.push_back(Gate::two("cz", q, q + 1));
        used.insert(q);
        used.insert(q + 1);
      } else {
        l.gates.push_back(Gate::single(kSingles[uniform(0, 4)], q));
        used.insert(q);
      }
    }
    if (l.gates.empty()) l.gates.push_back(Gate::single("x", uniform(0, c.num_qubits - 1)));
    return l;
  };

  std::set<LogicalQubit> measured_fb;
  bool conditional_used = false;
  for (std::uint32_t i = 0; i < layers; ++i) {
    if (shape.conditional_rate > 0 && !measured_fb.empty() && cond_coin(rng)) {
      Conditional cond;
      for (LogicalQubit q : measured_fb)
        if (cond.qubits.empty() || coin(rng)) cond.qubits.push_back(q);
      cond.value = coin(rng) ? 1 : 0;
      const std::uint32_t then_n = uniform(0, 2);
      const std::uint32_t else_n = uniform(0, 2);
      for (std::uint32_t k = 0; k < then_n; ++k) cond.then_layers.push_back(random_layer(false));
      for (std::uint32_t k = 0; k < else_n; ++k) cond.else_layers.push_back(random_layer(false));
      c.items.emplace_back(std::move(cond));
      conditional_used = true;
      continue;
    }
    Layer l = random_layer(shape.conditional_rate > 0);
    for (const auto& g : l.gates)
      if (g.kind == Gate::Kind::kMeasure && g.fb) measured_fb.insert(g.q0);
    c.items.emplace_back(std::move(l));
  }
  (void)conditional_used;
  return c;
}

Program random_program(std::mt19937_64& rng, UnitScope scope, std::size_t max_len) {
  auto pick = [&](std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
  };
  std::vector<Opcode> legal;
  for (Opcode op : kAllOpcodes)
    if (is_legal(op, scope)) legal.push_back(op);
  Program p;
  p.unit_id = scope == UnitScope::kController ? "controller" : "leaf0.xy0.0";
  const auto n = static_cast<std::size_t>(pick(1, static_cast<std::int64_t>(max_len)));
  for (std::size_t i = 0; i < n; ++i) {
    const Opcode op = legal[static_cast<std::size_t>(pick(0, static_cast<std::int64_t>(legal.size()) - 1))];
    const bool trig = pick(0, 1) == 1;
    switch (op) {
      case Opcode::kGate:
        p.instructions.push_back(Instruction::gate(static_cast<std::uint64_t>(pick(0, 0xffff)), pick(1, 5000), trig));
        break;
      case Opcode::kWait:
        p.instructions.push_back(Instruction::wait(pick(0, 100000), trig));
        break;
      case Opcode::kMeasure:
        p.instructions.push_back(Instruction::measure(pick(1, 5000), static_cast<std::uint8_t>(pick(0, 2)), pick(0, 1) == 1, trig));
        break;
      case Opcode::kTrigger:
        p.instructions.push_back(Instruction::trigger(pick(0, 1) == 1, trig));
        break;
      case Opcode::kFeedback:
        p.instructions.push_back(Instruction::feedback(static_cast<std::uint64_t>(pick(0, 0xffff))));
        break;
      case Opcode::kBr: {
        const auto target = pick(0, static_cast<std::int64_t>(n));
        p.instructions.push_back(Instruction::br(static_cast<std::uint32_t>(pick(0, 63)), pick(-8, 8),
                                                 target - static_cast<std::int64_t>(i)));
        break;
      }
    }
  }
  return p;
}

QueueTrace simulate_queues(const Program& program, const PipelineParams& params,
                           std::int64_t lead_ns) {
  const std::int64_t c = params.parse_cost_ns();
  QueueTrace tr;

  // Output ops in program order, with nominal due times.
  std::vector<bool> is_output(program.size(), false);
  std::int64_t offset = 0;
  for (std::size_t i = 0; i < program.size(); ++i) {
    const Opcode op = program.instructions[i].op;
    if (op == Opcode::kBr || op == Opcode::kTrigger || op == Opcode::kFeedback) continue;
    is_output[i] = true;
    tr.index.push_back(i);
    tr.due.push_back(offset);
    offset += program.instructions[i].duration();
  }
  const std::size_t n_out = tr.index.size();
  tr.ready.assign(n_out, -1);
  tr.start.assign(n_out, -1);
  tr.min_headroom = params.fifo;
  if (n_out == 0) return tr;

  std::size_t next_parse = 0;   // instruction index
  std::size_t next_out = 0;     // output ordinal the parser reaches next
  bool parsing = false;
  bool parsing_output = false;
  std::int64_t parse_done = 0;
  std::deque<std::size_t> buffer;  // output ordinals holding a buffer slot
  std::size_t parsed_upto = 0;     // ordinals < this have finished parsing
  std::size_t fifo = 0;            // ops waiting in the FIFO
  std::size_t moved = 0;           // ordinals < this left the buffer
  std::size_t played = 0;          // ordinals < this started

  for (std::int64_t t = -lead_ns; played < n_out; ++t) {
    if (parsing && parse_done == t) {
      parsing = false;
      if (parsing_output) ++parsed_upto;
    }
    bool progress = true;
    while (progress) {
      progress = false;
      if (played < moved && t >= tr.due[played]) {
        tr.start[played++] = t;
        --fifo;
        progress = true;
      }
      if (!buffer.empty() && buffer.front() < parsed_upto && fifo < params.fifo) {
        tr.ready[buffer.front()] = t;
        buffer.pop_front();
        ++moved;
        ++fifo;
        progress = true;
      }
      if (!parsing && next_parse < program.size()) {
        if (!is_output[next_parse]) {
          parsing = true;
          parsing_output = false;
          parse_done = t + c;
          ++next_parse;
          progress = true;
        } else if (buffer.size() < params.buffer) {
          parsing = true;
          parsing_output = true;
          parse_done = t + c;
          buffer.push_back(next_out++);
          ++next_parse;
          progress = true;
        }
      }
    }
  }

  for (std::size_t k = 0; k < n_out; ++k) {
    std::int64_t avail = 0;
    for (std::size_t j = 0; j < n_out; ++j)
      if (tr.ready[j] <= tr.due[k]) ++avail;
    const std::int64_t headroom = avail - static_cast<std::int64_t>(k + 1);
    if (k == 0 || headroom < tr.min_headroom) tr.min_headroom = headroom;
    if (headroom < 0 && !tr.underflow) {
      tr.underflow = true;
      tr.first_underflow = tr.index[k];
    }
  }
  return tr;
}

}  // namespace hima::testing
