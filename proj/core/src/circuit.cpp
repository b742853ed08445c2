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

#include "hima/circuit.hpp"

#include <algorithm>
#include <charconv>
#include <optional>
#include <set>

#include <fmt/format.h>

#include "hima/error.hpp"

namespace hima {

Gate Gate::single(std::string name, LogicalQubit q) {
  Gate g;
  g.kind = Kind::kSingle;
  g.name = std::move(name);
  g.q0 = q;
  return g;
}

Gate Gate::two(std::string name, LogicalQubit a, LogicalQubit b) {
  Gate g;
  g.kind = Kind::kTwo;
  g.name = std::move(name);
  g.q0 = a;
  g.q1 = b;
  return g;
}

Gate Gate::measure(LogicalQubit q, bool fb) {
  Gate g;
  g.kind = Kind::kMeasure;
  g.name = "measure";
  g.q0 = q;
  g.fb = fb;
  return g;
}

std::uint32_t Circuit::depth() const {
  std::uint32_t d = 0;
  for (const auto& item : items) {
    if (const auto* l = std::get_if<Layer>(&item)) {
      (void)l;
      ++d;
    } else {
      const auto& c = std::get<Conditional>(item);
      d += static_cast<std::uint32_t>(std::max(c.then_layers.size(), c.else_layers.size()));
    }
  }
  return d;
}

bool Circuit::has_feedback() const {
  return std::any_of(items.begin(), items.end(), [](const CircuitItem& i) {
    return std::holds_alternative<Conditional>(i);
  });
}

namespace {

struct Tok {
  std::string_view text;
  int column;
};

std::vector<Tok> tokenize(std::string_view line) {
  std::vector<Tok> out;
  std::size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      continue;
    }
    if (c == ';') {
      out.push_back({line.substr(i, 1), static_cast<int>(i) + 1});
      ++i;
      continue;
    }
    std::size_t b = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r' &&
           line[i] != ';')
      ++i;
    out.push_back({line.substr(b, i - b), static_cast<int>(b) + 1});
  }
  return out;
}

class CircuitParser {
 public:
  explicit CircuitParser(std::string_view filename) : filename_(filename) {}

  Circuit run(std::string_view text) {
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t eol = text.find('\n', pos);
      if (eol == std::string_view::npos) eol = text.size();
      ++line_;
      std::string_view line = text.substr(pos, eol - pos);
      line = line.substr(0, line.find('#'));
      statement(tokenize(line));
      pos = eol + 1;
    }
    if (cond_) fail(line_, 1, "'if' block is missing 'end'");
    if (!have_qubits_) fail(1, 1, "missing 'qubits' declaration");
    check_circuit(circuit_);
    return std::move(circuit_);
  }

 private:
  [[noreturn]] void fail(int line, int col, const std::string& msg) const {
    throw Error(Errc::kInvalidCircuit, fmt::format("{}:{}:{}: {}", filename_, line, col, msg));
  }

  std::uint32_t number(const Tok& t) const {
    std::uint32_t v = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc() || p != t.text.data() + t.text.size())
      fail(line_, t.column, fmt::format("expected a non-negative integer, got '{}'", t.text));
    return v;
  }

  LogicalQubit qubit(const Tok& t) const {
    if (t.text.size() < 2 || (t.text[0] != 'q' && t.text[0] != 'Q'))
      fail(line_, t.column, fmt::format("expected a qubit like q0, got '{}'", t.text));
    Tok rest{t.text.substr(1), t.column + 1};
    LogicalQubit q = number(rest);
    if (have_qubits_ && q >= circuit_.num_qubits)
      fail(line_, t.column, fmt::format("qubit {} not declared (circuit has {})", t.text,
                                        circuit_.num_qubits));
    return q;
  }

  void statement(const std::vector<Tok>& toks) {
    if (toks.empty()) return;
    const Tok& head = toks.front();
    if (head.text == "qubits" || head.text == "name") {
      if (head.text == "name") {
        if (toks.size() != 2) fail(line_, head.column, "'name' takes one word");
        circuit_.name = std::string(toks[1].text);
        return;
      }
      if (have_qubits_) fail(line_, head.column, "duplicate 'qubits' declaration");
      if (toks.size() != 2) fail(line_, head.column, "'qubits' takes one count");
      circuit_.num_qubits = number(toks[1]);
      have_qubits_ = true;
      return;
    }
    if (!have_qubits_) fail(line_, head.column, "'qubits' must come first");
    if (head.text == "layer") {
      layer(toks);
    } else if (head.text == "if") {
      if (cond_) fail(line_, head.column, "nested 'if' is not supported");
      if (toks.size() < 4 || toks[toks.size() - 2].text != "==")
        fail(line_, head.column, "expected 'if q.. == value'");
      Conditional c;
      for (std::size_t i = 1; i + 2 < toks.size(); ++i) c.qubits.push_back(qubit(toks[i]));
      c.value = number(toks.back());
      if (c.value > 1) fail(line_, toks.back().column, "condition value must be 0 or 1");
      cond_ = std::move(c);
      in_else_ = false;
    } else if (head.text == "else") {
      if (!cond_ || in_else_) fail(line_, head.column, "'else' without 'if'");
      if (toks.size() != 1) fail(line_, toks[1].column, "unexpected token after 'else'");
      in_else_ = true;
    } else if (head.text == "end") {
      if (!cond_) fail(line_, head.column, "'end' without 'if'");
      if (toks.size() != 1) fail(line_, toks[1].column, "unexpected token after 'end'");
      circuit_.items.emplace_back(std::move(*cond_));
      cond_.reset();
    } else {
      fail(line_, head.column, fmt::format("unknown statement '{}'", head.text));
    }
  }

  void layer(const std::vector<Tok>& toks) {
    Layer l;
    std::size_t i = 1;
    while (i < toks.size()) {
      std::vector<Tok> stmt;
      while (i < toks.size() && toks[i].text != ";") stmt.push_back(toks[i++]);
      if (i < toks.size()) ++i;  // ';'
      if (stmt.empty()) fail(line_, toks[i - 1].column, "empty gate statement");
      l.gates.push_back(gate(stmt));
    }
    if (l.gates.empty()) fail(line_, toks.front().column, "empty layer");
    std::set<LogicalQubit> used;
    for (const auto& g : l.gates) {
      if (g.kind == Gate::Kind::kTwo && g.q0 == g.q1)
        fail(line_, toks.front().column, "two-qubit gate needs distinct qubits");
      bool fresh = used.insert(g.q0).second;
      if (g.kind == Gate::Kind::kTwo) fresh = used.insert(g.q1).second && fresh;
      if (!fresh) fail(line_, toks.front().column, "qubit used twice in a layer");
    }
    if (cond_) {
      (in_else_ ? cond_->else_layers : cond_->then_layers).push_back(std::move(l));
    } else {
      circuit_.items.emplace_back(std::move(l));
    }
  }

  Gate gate(const std::vector<Tok>& s) {
    std::string name(s[0].text);
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (name == "measure") {
      if (s.size() < 2 || s.size() > 3) fail(line_, s[0].column, "expected 'measure q [fb]'");
      bool fb = false;
      if (s.size() == 3) {
        if (s[2].text != "fb") fail(line_, s[2].column, "expected 'fb'");
        fb = true;
      }
      return Gate::measure(qubit(s[1]), fb);
    }
    if (s.size() == 2) return Gate::single(name, qubit(s[1]));
    if (s.size() == 3) return Gate::two(name, qubit(s[1]), qubit(s[2]));
    fail(line_, s[0].column, fmt::format("gate '{}' takes one or two qubits", name));
  }

  std::string filename_;
  int line_ = 0;
  Circuit circuit_;
  bool have_qubits_ = false;
  std::optional<Conditional> cond_;
  bool in_else_ = false;
};

void format_layer(std::string& out, const Layer& l) {
  out += "layer";
  for (std::size_t i = 0; i < l.gates.size(); ++i) {
    const Gate& g = l.gates[i];
    out += i == 0 ? " " : "; ";
    switch (g.kind) {
      case Gate::Kind::kSingle: out += fmt::format("{} q{}", g.name, g.q0); break;
      case Gate::Kind::kTwo: out += fmt::format("{} q{} q{}", g.name, g.q0, g.q1); break;
      case Gate::Kind::kMeasure: out += fmt::format("measure q{}{}", g.q0, g.fb ? " fb" : ""); break;
    }
  }
  out += '\n';
}

}  // namespace

Circuit parse_circuit(std::string_view text, std::string_view filename) {
  return CircuitParser(filename).run(text);
}

std::string format_circuit(const Circuit& c) {
  std::string out;
  if (!c.name.empty()) out += fmt::format("name {}\n", c.name);
  out += fmt::format("qubits {}\n", c.num_qubits);
  for (const auto& item : c.items) {
    if (const auto* l = std::get_if<Layer>(&item)) {
      format_layer(out, *l);
      continue;
    }
    const auto& cond = std::get<Conditional>(item);
    out += "if";
    for (auto q : cond.qubits) out += fmt::format(" q{}", q);
    out += fmt::format(" == {}\n", cond.value);
    for (const auto& l : cond.then_layers) format_layer(out, l);
    if (!cond.else_layers.empty()) {
      out += "else\n";
      for (const auto& l : cond.else_layers) format_layer(out, l);
    }
    out += "end\n";
  }
  return out;
}

void check_circuit(const Circuit& c) {
  auto bad = [](const std::string& msg) { throw Error(Errc::kInvalidCircuit, msg); };
  auto check_layer = [&](const Layer& l, bool in_branch) {
    if (l.gates.empty()) bad("empty layer");
    std::set<LogicalQubit> used;
    for (const auto& g : l.gates) {
      if (g.q0 >= c.num_qubits || (g.kind == Gate::Kind::kTwo && g.q1 >= c.num_qubits))
        bad(fmt::format("gate '{}' uses an undeclared qubit", g.name));
      if (g.kind == Gate::Kind::kTwo && g.q0 == g.q1)
        bad(fmt::format("gate '{}' needs distinct qubits", g.name));
      if (!used.insert(g.q0).second || (g.kind == Gate::Kind::kTwo && !used.insert(g.q1).second))
        bad("qubit used twice in a layer");
      if (in_branch && g.kind == Gate::Kind::kMeasure && g.fb)
        bad("feedback measures inside a conditional branch are not supported");
    }
  };
  std::set<LogicalQubit> measured;
  for (const auto& item : c.items) {
    if (const auto* l = std::get_if<Layer>(&item)) {
      check_layer(*l, false);
      for (const auto& g : l->gates)
        if (g.kind == Gate::Kind::kMeasure && g.fb) measured.insert(g.q0);
      continue;
    }
    const auto& cond = std::get<Conditional>(item);
    if (cond.qubits.empty()) bad("condition lists no qubits");
    for (auto q : cond.qubits) {
      if (q >= c.num_qubits) bad(fmt::format("condition uses undeclared qubit q{}", q));
      if (measured.count(q) == 0)
        throw Error(Errc::kConditionWithoutMeasure,
                    fmt::format("condition on q{} has no preceding feedback measure", q));
    }
    if (cond.value < 0 || cond.value > 1) bad("condition value must be 0 or 1");
    for (const auto& l : cond.then_layers) check_layer(l, true);
    for (const auto& l : cond.else_layers) check_layer(l, true);
  }
}

}  // namespace hima
