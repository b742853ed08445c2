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

#include "hima/isa.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <limits>
#include <set>
#include <tuple>

#include <fmt/format.h>

namespace hima {

namespace {

constexpr std::array<std::string_view, 6> kMnemonics = {"GATE", "WAIT", "MEASURE",
                                                        "TRIGGER", "FEEDBACK", "BR"};

std::size_t arity(Opcode op) {
  switch (op) {
    case Opcode::kGate: return 3;
    case Opcode::kWait: return 2;
    case Opcode::kMeasure: return 4;
    case Opcode::kTrigger: return 2;
    case Opcode::kFeedback: return 1;
    case Opcode::kBr: return 3;
  }
  return 0;
}

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}
bool is_blank(char c) { return c == ' ' || c == '\t' || c == '\r'; }

struct Token {
  std::string_view text;
  int column = 0;  // 1-based
};

std::optional<std::int64_t> parse_integer(std::string_view s) {
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  int base = 10;
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
    base = 16;
    s.remove_prefix(2);
  }
  if (s.empty()) return std::nullopt;
  std::uint64_t magnitude = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), magnitude, base);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  constexpr auto kMax = static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max());
  if (!negative && magnitude > kMax) return std::nullopt;
  if (negative && magnitude > kMax + 1) return std::nullopt;
  if (negative) return magnitude == kMax + 1 ? std::numeric_limits<std::int64_t>::min()
                                             : -static_cast<std::int64_t>(magnitude);
  return static_cast<std::int64_t>(magnitude);
}

bool looks_numeric(std::string_view s) {
  if (s.empty()) return false;
  char c = s.front();
  return std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+';
}

struct PendingLabelRef {
  std::size_t instruction;
  Token token;
};

class Assembler {
 public:
  Assembler(UnitScope scope, const ParseOptions& options) : scope_(scope), options_(options) {}

  Program run(std::string_view text) {
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t eol = text.find('\n', pos);
      if (eol == std::string_view::npos) eol = text.size();
      ++line_no;
      parse_line(text.substr(pos, eol - pos), line_no);
      pos = eol + 1;
    }
    resolve_labels();
    if (!diagnostics_.empty()) throw AsmError(std::move(diagnostics_));
    return std::move(program_);
  }

 private:
  void error(Errc code, int line, int column, std::string message,
             std::optional<std::size_t> index = std::nullopt) {
    diagnostics_.push_back({code, options_.filename, line, column, index, std::move(message)});
  }

  void parse_line(std::string_view raw, int line_no) {
    std::string_view line = raw.substr(0, raw.find('#'));
    std::size_t i = 0;
    auto skip_blank = [&] {
      while (i < line.size() && is_blank(line[i])) ++i;
    };
    skip_blank();
    if (i >= line.size()) return;

    if (line[i] == '.') {
      std::size_t begin = i;
      while (i < line.size() && !is_blank(line[i])) ++i;
      std::string_view directive = line.substr(begin, i - begin);
      skip_blank();
      std::size_t arg_begin = i;
      while (i < line.size() && !is_blank(line[i])) ++i;
      std::string_view arg = line.substr(arg_begin, i - arg_begin);
      skip_blank();
      if (directive != ".unit" || arg.empty() || i < line.size()) {
        error(Errc::kSyntaxError, line_no, static_cast<int>(begin) + 1,
              fmt::format("malformed directive '{}'", std::string(line.substr(begin))));
        return;
      }
      program_.unit_id = std::string(arg);
      return;
    }

    // Leading label(s).
    while (i < line.size() && is_ident_start(line[i])) {
      std::size_t begin = i;
      std::size_t j = i;
      while (j < line.size() && is_ident_char(line[j])) ++j;
      std::size_t k = j;
      while (k < line.size() && is_blank(line[k])) ++k;
      if (k < line.size() && line[k] == ':') {
        std::string name(line.substr(begin, j - begin));
        if (program_.labels.count(name) != 0) {
          error(Errc::kDuplicateLabel, line_no, static_cast<int>(begin) + 1,
                fmt::format("label '{}' defined twice", name));
        } else {
          program_.labels.emplace(std::move(name), program_.instructions.size());
        }
        i = k + 1;
        skip_blank();
        continue;
      }
      break;
    }
    if (i >= line.size()) return;

    std::size_t op_begin = i;
    while (i < line.size() && !is_blank(line[i]) && line[i] != ',') ++i;
    std::string_view word = line.substr(op_begin, i - op_begin);
    const int op_column = static_cast<int>(op_begin) + 1;
    auto op = opcode_from_mnemonic(word);
    if (!op) {
      error(Errc::kUnknownOpcode, line_no, op_column,
            fmt::format("unknown opcode '{}'", std::string(word)));
      return;
    }

    std::vector<Token> operands;
    bool ok = split_operands(line, i, line_no, operands);
    if (!ok) return;

    if (operands.size() != arity(*op)) {
      error(Errc::kArityMismatch, line_no, op_column,
            fmt::format("{} takes {} operand(s), got {}", mnemonic(*op), arity(*op),
                        operands.size()));
      return;
    }

    Instruction ins;
    ins.op = *op;
    const std::size_t index = program_.instructions.size();
    if (!decode_operands(ins, operands, line_no, index)) return;

    if (!is_legal(*op, scope_)) {
      error(Errc::kScopeViolation, line_no, op_column,
            fmt::format("{} is not legal in scope {}", mnemonic(*op), scope_letter(scope_)),
            index);
      return;
    }
    program_.instructions.push_back(ins);
    program_.positions.push_back({line_no, op_column});
  }

  bool split_operands(std::string_view line, std::size_t i, int line_no,
                      std::vector<Token>& out) {
    bool expect_operand = true;  // after opcode or a comma
    bool saw_comma = false;
    while (i < line.size()) {
      if (is_blank(line[i])) {
        ++i;
        continue;
      }
      if (line[i] == ',') {
        if (expect_operand) {
          error(Errc::kSyntaxError, line_no, static_cast<int>(i) + 1, "empty operand");
          return false;
        }
        expect_operand = true;
        saw_comma = true;
        ++i;
        continue;
      }
      std::size_t begin = i;
      while (i < line.size() && !is_blank(line[i]) && line[i] != ',') ++i;
      out.push_back({line.substr(begin, i - begin), static_cast<int>(begin) + 1});
      expect_operand = false;
    }
    if (saw_comma && expect_operand) {
      error(Errc::kSyntaxError, line_no, static_cast<int>(line.size()) + 1,
            "trailing comma");
      return false;
    }
    return true;
  }

  bool decode_operands(Instruction& ins, const std::vector<Token>& ops, int line_no,
                       std::size_t index) {
    std::vector<std::int64_t> values(ops.size(), 0);
    for (std::size_t k = 0; k < ops.size(); ++k) {
      const bool label_slot = ins.op == Opcode::kBr && k == 2;
      if (label_slot && is_ident_start(ops[k].text.front())) {
        label_refs_.push_back({index, ops[k]});
        continue;
      }
      auto value = parse_integer(ops[k].text);
      if (!value) {
        if (looks_numeric(ops[k].text)) {
          error(Errc::kOperandOutOfRange, line_no, ops[k].column,
                fmt::format("'{}' is not a representable integer", std::string(ops[k].text)),
                index);
        } else {
          error(Errc::kSyntaxError, line_no, ops[k].column,
                fmt::format("expected integer operand, got '{}'", std::string(ops[k].text)),
                index);
        }
        return false;
      }
      values[k] = *value;
    }

    bool ok = true;
    auto check = [&](std::size_t k, bool good, std::string_view what) {
      if (!good) {
        error(Errc::kOperandOutOfRange, line_no, ops[k].column,
              fmt::format("{} operand '{}' out of range", what, std::string(ops[k].text)), index);
        ok = false;
      }
    };
    auto flag = [&](std::size_t k, std::string_view what) {
      check(k, values[k] == 0 || values[k] == 1, what);
      return values[k] == 1;
    };

    switch (ins.op) {
      case Opcode::kGate:
        check(0, values[0] >= 0, "addr");
        check(1, values[1] > 0, "dur");
        ins.addr = static_cast<std::uint64_t>(values[0]);
        ins.dur = values[1];
        ins.trig = flag(2, "trig");
        break;
      case Opcode::kWait:
        check(0, values[0] >= 0, "dur");
        ins.dur = values[0];
        ins.trig = flag(1, "trig");
        break;
      case Opcode::kMeasure:
        check(0, values[0] > 0, "dur");
        check(1, values[1] >= 0 && values[1] <= 2, "dtype");
        ins.dur = values[0];
        ins.dtype = static_cast<std::uint8_t>(std::clamp<std::int64_t>(values[1], 0, 2));
        ins.fb = flag(2, "fb");
        ins.trig = flag(3, "trig");
        break;
      case Opcode::kTrigger:
        ins.start = flag(0, "start");
        ins.trig = flag(1, "trig");
        break;
      case Opcode::kFeedback:
        check(0, values[0] >= 0, "addr");
        ins.addr = static_cast<std::uint64_t>(values[0]);
        break;
      case Opcode::kBr:
        check(0, values[0] >= 0 && values[0] <= std::numeric_limits<std::uint32_t>::max(), "rs");
        ins.rs = static_cast<std::uint32_t>(std::max<std::int64_t>(values[0], 0));
        ins.imm = values[1];
        ins.offset = values[2];
        break;
    }
    return ok;
  }

  void resolve_labels() {
    for (const auto& ref : label_refs_) {
      // Instructions rejected after the ref was recorded never made it in.
      if (ref.instruction >= program_.instructions.size()) continue;
      auto it = program_.labels.find(std::string(ref.token.text));
      if (it == program_.labels.end()) {
        error(Errc::kUndefinedLabel, program_.positions[ref.instruction].line, ref.token.column,
              fmt::format("undefined label '{}'", std::string(ref.token.text)), ref.instruction);
        continue;
      }
      program_.instructions[ref.instruction].offset =
          static_cast<std::int64_t>(it->second) - static_cast<std::int64_t>(ref.instruction);
    }
    std::stable_sort(diagnostics_.begin(), diagnostics_.end(),
                     [](const Diagnostic& a, const Diagnostic& b) {
                       return std::tie(a.line, a.column) < std::tie(b.line, b.column);
                     });
  }

  UnitScope scope_;
  const ParseOptions& options_;
  Program program_;
  std::vector<Diagnostic> diagnostics_;
  std::vector<PendingLabelRef> label_refs_;
};

}  // namespace

std::string_view mnemonic(Opcode op) { return kMnemonics[static_cast<std::size_t>(op)]; }

std::optional<Opcode> opcode_from_mnemonic(std::string_view text) {
  std::string upper(text);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  for (std::size_t i = 0; i < kMnemonics.size(); ++i) {
    if (kMnemonics[i] == upper) return static_cast<Opcode>(i);
  }
  return std::nullopt;
}

char scope_letter(UnitScope scope) {
  switch (scope) {
    case UnitScope::kController: return 'C';
    case UnitScope::kReadoutInput: return 'I';
    case UnitScope::kDriveOrReadoutOutput: return 'O';
  }
  return '?';
}

std::optional<UnitScope> scope_from_letter(std::string_view text) {
  if (text == "C" || text == "c") return UnitScope::kController;
  if (text == "I" || text == "i") return UnitScope::kReadoutInput;
  if (text == "O" || text == "o") return UnitScope::kDriveOrReadoutOutput;
  return std::nullopt;
}

bool is_legal(Opcode op, UnitScope scope) {
  switch (op) {
    case Opcode::kGate: return scope == UnitScope::kDriveOrReadoutOutput;
    case Opcode::kWait: return true;
    case Opcode::kMeasure: return scope == UnitScope::kReadoutInput;
    case Opcode::kTrigger: return scope == UnitScope::kController;
    case Opcode::kFeedback: return scope == UnitScope::kController;
    case Opcode::kBr: return true;
  }
  return false;
}

Instruction Instruction::gate(std::uint64_t addr, std::int64_t dur, bool trig) {
  Instruction i;
  i.op = Opcode::kGate;
  i.addr = addr;
  i.dur = dur;
  i.trig = trig;
  return i;
}

Instruction Instruction::wait(std::int64_t dur, bool trig) {
  Instruction i;
  i.op = Opcode::kWait;
  i.dur = dur;
  i.trig = trig;
  return i;
}

Instruction Instruction::measure(std::int64_t dur, std::uint8_t dtype, bool fb, bool trig) {
  Instruction i;
  i.op = Opcode::kMeasure;
  i.dur = dur;
  i.dtype = dtype;
  i.fb = fb;
  i.trig = trig;
  return i;
}

Instruction Instruction::trigger(bool start, bool trig) {
  Instruction i;
  i.op = Opcode::kTrigger;
  i.start = start;
  i.trig = trig;
  return i;
}

Instruction Instruction::feedback(std::uint64_t addr) {
  Instruction i;
  i.op = Opcode::kFeedback;
  i.addr = addr;
  return i;
}

Instruction Instruction::br(std::uint32_t rs, std::int64_t imm, std::int64_t offset) {
  Instruction i;
  i.op = Opcode::kBr;
  i.rs = rs;
  i.imm = imm;
  i.offset = offset;
  return i;
}

std::int64_t Instruction::duration() const {
  switch (op) {
    case Opcode::kGate:
    case Opcode::kWait:
    case Opcode::kMeasure:
      return dur;
    default:
      return 0;
  }
}

std::int64_t Program::timeline_length() const {
  std::int64_t total = 0;
  for (const auto& ins : instructions) total += ins.duration();
  return total;
}

std::string Diagnostic::render() const {
  return fmt::format("{}:{}:{}: {}: {}", file.empty() ? "<input>" : file, line, column,
                     to_string(code), message);
}

AsmError::AsmError(std::vector<Diagnostic> diagnostics)
    : Error(diagnostics.empty() ? Errc::kSyntaxError : diagnostics.front().code,
            diagnostics.empty() ? std::string("assembly failed")
                                : diagnostics.front().render()),
      diagnostics_(std::move(diagnostics)) {}

Program parse_program(std::string_view text, UnitScope scope, const ParseOptions& options) {
  return Assembler(scope, options).run(text);
}

std::vector<Diagnostic> validate_program(const Program& program, UnitScope scope,
                                         const ValidateOptions& options) {
  std::vector<Diagnostic> out;
  const auto n = static_cast<std::int64_t>(program.instructions.size());
  const bool have_pos = program.positions.size() == program.instructions.size();
  const std::string& file = options.filename.empty() ? program.unit_id : options.filename;
  for (std::int64_t i = 0; i < n; ++i) {
    const Instruction& ins = program.instructions[static_cast<std::size_t>(i)];
    SourcePos pos = have_pos ? program.positions[static_cast<std::size_t>(i)] : SourcePos{};
    auto diag = [&](Errc code, std::string message) {
      out.push_back({code, file, pos.line, pos.column, static_cast<std::size_t>(i),
                     std::move(message)});
    };
    if (!is_legal(ins.op, scope)) {
      diag(Errc::kScopeViolation,
           fmt::format("{} is not legal in scope {}", mnemonic(ins.op), scope_letter(scope)));
    }
    switch (ins.op) {
      case Opcode::kGate:
        if (ins.dur <= 0) diag(Errc::kOperandOutOfRange, "GATE dur must be > 0");
        if (ins.addr >= options.addr_limit)
          diag(Errc::kWidthExceeded, fmt::format("addr {} exceeds width limit {}", ins.addr,
                                                 options.addr_limit));
        break;
      case Opcode::kMeasure:
        if (ins.dur <= 0) diag(Errc::kOperandOutOfRange, "MEASURE dur must be > 0");
        if (ins.dtype > 2) diag(Errc::kOperandOutOfRange, "dtype must be 0, 1 or 2");
        break;
      case Opcode::kWait:
        if (ins.dur < 0) diag(Errc::kOperandOutOfRange, "WAIT dur must be >= 0");
        break;
      case Opcode::kFeedback:
        if (ins.addr >= options.addr_limit)
          diag(Errc::kWidthExceeded, fmt::format("addr {} exceeds width limit {}", ins.addr,
                                                 options.addr_limit));
        break;
      case Opcode::kBr: {
        if (ins.rs >= options.rs_limit)
          diag(Errc::kWidthExceeded,
               fmt::format("rs {} exceeds register limit {}", ins.rs, options.rs_limit));
        const std::int64_t target = i + ins.offset;
        if (target < 0 || target > n)
          diag(Errc::kBranchOutOfBounds,
               fmt::format("branch target {} outside [0, {}]", target, n));
        break;
      }
      case Opcode::kTrigger:
        break;
    }
  }
  return out;
}

std::string format_instruction(const Instruction& ins) {
  switch (ins.op) {
    case Opcode::kGate:
      return fmt::format("GATE {}, {}, {}", ins.addr, ins.dur, int{ins.trig});
    case Opcode::kWait:
      return fmt::format("WAIT {}, {}", ins.dur, int{ins.trig});
    case Opcode::kMeasure:
      return fmt::format("MEASURE {}, {}, {}, {}", ins.dur, int{ins.dtype}, int{ins.fb},
                         int{ins.trig});
    case Opcode::kTrigger:
      return fmt::format("TRIGGER {}, {}", int{ins.start}, int{ins.trig});
    case Opcode::kFeedback:
      return fmt::format("FEEDBACK {}", ins.addr);
    case Opcode::kBr:
      return fmt::format("BR {}, {}, {}", ins.rs, ins.imm, ins.offset);
  }
  return {};
}

std::string format_program(const Program& program) {
  const auto n = static_cast<std::int64_t>(program.instructions.size());
  std::set<std::int64_t> targets;
  for (std::int64_t i = 0; i < n; ++i) {
    const auto& ins = program.instructions[static_cast<std::size_t>(i)];
    if (ins.op == Opcode::kBr && i + ins.offset >= 0 && i + ins.offset <= n)
      targets.insert(i + ins.offset);
  }
  std::string out;
  if (!program.unit_id.empty()) out += fmt::format(".unit {}\n", program.unit_id);
  for (std::int64_t i = 0; i <= n; ++i) {
    if (targets.count(i) != 0) out += fmt::format("L{}:\n", i);
    if (i == n) break;
    const auto& ins = program.instructions[static_cast<std::size_t>(i)];
    if (ins.op == Opcode::kBr && targets.count(i + ins.offset) != 0) {
      out += fmt::format("BR {}, {}, L{}\n", ins.rs, ins.imm, i + ins.offset);
    } else {
      out += format_instruction(ins);
      out += '\n';
    }
  }
  return out;
}

}  // namespace hima
