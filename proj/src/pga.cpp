#include "pgamech/pga.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <set>

#include "pgamech/error.hpp"

namespace pgamech {

namespace {

bool is_ident_start(char c) { return c >= 'a' && c <= 'z'; }

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '.';
}

constexpr std::string_view kOmega = "\xCF\x89";      // ω
constexpr std::string_view kUnicodeMinus = "\xE2\x88\x92";  // −

class PgaParser {
 public:
  explicit PgaParser(std::string_view text) : text_(text) {}

  InstrSeq parse() {
    skip_ws();
    if (at_end()) fail("empty sequence");

    std::vector<Instruction> prefix;
    if (peek() == '(') {
      auto cycle = parse_repetition();
      expect_end();
      return InstrSeq(std::move(prefix), std::move(cycle));
    }
    prefix.push_back(parse_instruction());
    for (;;) {
      skip_ws();
      if (at_end()) return InstrSeq(std::move(prefix));
      if (peek() != ';') fail("expected ';'");
      advance(1);
      skip_ws();
      if (!at_end() && peek() == '(') {
        auto cycle = parse_repetition();
        expect_end();
        return InstrSeq(std::move(prefix), std::move(cycle));
      }
      prefix.push_back(parse_instruction());
    }
  }

 private:
  std::vector<Instruction> parse_repetition() {
    advance(1);  // (
    std::vector<Instruction> body;
    skip_ws();
    body.push_back(parse_instruction());
    for (;;) {
      skip_ws();
      if (at_end()) fail("unterminated repetition");
      if (peek() == ')') break;
      if (peek() != ';') fail("expected ';' or ')'");
      advance(1);
      body.push_back(parse_instruction());
    }
    advance(1);  // )
    skip_ws();
    if (at_end() || peek() != '^') fail("expected '^' after ')'");
    advance(1);
    skip_ws();
    if (starts_with(kOmega)) {
      advance(kOmega.size());
    } else if (!at_end() && peek() == 'w') {
      advance(1);
    } else {
      fail("expected 'w' after '^'");
    }
    return body;
  }

  void expect_end() {
    skip_ws();
    if (!at_end()) fail("instructions after repetition");
  }

  Instruction parse_instruction() {
    skip_ws();
    if (at_end()) fail("expected instruction");
    const char c = peek();
    if (c == '!') {
      advance(1);
      return Instruction::termination();
    }
    if (c == '#') {
      advance(1);
      skip_ws();
      return Instruction::jump(parse_nat());
    }
    if (c == '+') {
      advance(1);
      skip_ws();
      return Instruction::pos_test(parse_ident());
    }
    if (c == '-' || starts_with(kUnicodeMinus)) {
      advance(c == '-' ? 1 : kUnicodeMinus.size());
      skip_ws();
      return Instruction::neg_test(parse_ident());
    }
    if (is_ident_start(c)) return Instruction::basic(parse_ident());
    fail("expected instruction");
  }

  std::uint64_t parse_nat() {
    if (at_end() || !std::isdigit(static_cast<unsigned char>(peek())))
      fail("expected jump counter");
    std::uint64_t value = 0;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) {
      const auto digit = static_cast<std::uint64_t>(peek() - '0');
      if (value > (std::numeric_limits<std::uint64_t>::max() - digit) / 10)
        fail("jump counter out of range");
      value = value * 10 + digit;
      advance(1);
    }
    return value;
  }

  std::string parse_ident() {
    if (at_end() || !is_ident_start(peek())) fail("expected action name");
    const std::size_t start = pos_;
    while (!at_end() && is_ident_char(peek())) advance(1);
    return std::string(text_.substr(start, pos_ - start));
  }

  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) {
      if (peek() == '\n') {
        ++line_;
        column_ = 1;
        ++pos_;
      } else {
        advance(1);
      }
    }
  }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  bool starts_with(std::string_view s) const { return text_.substr(pos_).starts_with(s); }

  void advance(std::size_t bytes) {
    pos_ += bytes;
    ++column_;
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(message, line_, column_);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

std::string join(const std::vector<Instruction>& instrs) {
  std::string out;
  for (std::size_t i = 0; i < instrs.size(); ++i) {
    if (i != 0) out += ';';
    out += instrs[i].to_string();
  }
  return out;
}

std::uint64_t reduce_cycle_counter(std::uint64_t k, std::size_t m) {
  if (k < m || k == 0) return k;
  const std::uint64_t r = k % m;
  return r == 0 ? m : r;
}

}  // namespace

bool is_valid_action_name(std::string_view name) {
  if (name.empty() || !is_ident_start(name.front())) return false;
  return std::all_of(name.begin(), name.end(), is_ident_char);
}

Instruction Instruction::basic(std::string action) {
  if (!is_valid_action_name(action))
    throw std::invalid_argument("invalid action name '" + action + "'");
  return Instruction(Opcode::Basic, std::move(action), 0);
}

Instruction Instruction::pos_test(std::string action) {
  if (!is_valid_action_name(action))
    throw std::invalid_argument("invalid action name '" + action + "'");
  return Instruction(Opcode::PosTest, std::move(action), 0);
}

Instruction Instruction::neg_test(std::string action) {
  if (!is_valid_action_name(action))
    throw std::invalid_argument("invalid action name '" + action + "'");
  return Instruction(Opcode::NegTest, std::move(action), 0);
}

Instruction Instruction::termination() { return Instruction(Opcode::Termination, {}, 0); }

Instruction Instruction::jump(std::uint64_t counter) {
  return Instruction(Opcode::Jump, {}, counter);
}

std::string Instruction::to_string() const {
  switch (opcode_) {
    case Opcode::Basic: return action_;
    case Opcode::PosTest: return "+" + action_;
    case Opcode::NegTest: return "-" + action_;
    case Opcode::Termination: return "!";
    case Opcode::Jump: return "#" + std::to_string(counter_);
  }
  return {};
}

std::string Site::to_string() const {
  return (region == Region::Prefix ? "prefix[" : "cycle[") + std::to_string(index) + "]";
}

InstrSeq::InstrSeq(std::vector<Instruction> prefix,
                   std::optional<std::vector<Instruction>> cycle)
    : prefix_(std::move(prefix)), cycle_(std::move(cycle)) {
  if (cycle_ && cycle_->empty())
    throw std::invalid_argument("repetition body must be nonempty");
  if (!cycle_ && prefix_.empty()) throw std::invalid_argument("empty sequence");
}

Position InstrSeq::canonical(Position p) const noexcept {
  if (!cycle_ || p.index < prefix_.size()) return p;
  const std::size_t n = prefix_.size();
  return Position{n + (p.index - n) % cycle_->size()};
}

const Instruction& InstrSeq::at(Position p) const {
  const Position c = canonical(p);
  if (c.index < prefix_.size()) return prefix_[c.index];
  if (!cycle_) throw std::out_of_range("position past end of finite sequence");
  return (*cycle_)[c.index - prefix_.size()];
}

Site InstrSeq::site(Position p) const {
  const Position c = canonical(p);
  if (c.index < prefix_.size() || !cycle_) return {Site::Region::Prefix, c.index};
  return {Site::Region::Cycle, c.index - prefix_.size()};
}

Position InstrSeq::position(Site s) const {
  return s.region == Site::Region::Prefix ? Position{s.index}
                                          : Position{prefix_.size() + s.index};
}

InstrSeq parse_pga(std::string_view text) { return PgaParser(text).parse(); }

std::string print_pga(const InstrSeq& seq) {
  std::string out = join(seq.prefix());
  if (seq.cycle()) {
    if (!out.empty()) out += ';';
    out += "(" + join(*seq.cycle()) + ")^w";
  }
  return out;
}

std::optional<Instruction> instruction_at(const InstrSeq& seq, Position p) {
  if (!seq.holds_instruction(p)) return std::nullopt;
  return seq.at(p);
}

JumpOutcome jump_target(const InstrSeq& seq, Position p) {
  if (!seq.holds_instruction(p) || !seq.at(p).is_jump())
    throw PreconditionError("not a jump");
  const std::uint64_t k = seq.at(p).counter();
  if (k == 0) return {JumpOutcome::Kind::ImmediateDivergence, {}};
  if (seq.is_finite() && k >= seq.prefix_length() - p.index)
    return {JumpOutcome::Kind::FallsOffEnd, {}};
  return {JumpOutcome::Kind::Target, Position{p.index + k}};
}

std::vector<Position> control_successors(const InstrSeq& seq, Position p) {
  std::vector<Position> out;
  if (!seq.holds_instruction(p)) return out;
  auto push = [&](std::size_t index) {
    const Position q{index};
    if (seq.holds_instruction(q)) out.push_back(seq.canonical(q));
  };
  const Instruction& instr = seq.at(p);
  switch (instr.opcode()) {
    case Opcode::Basic: push(p.index + 1); break;
    case Opcode::PosTest:
    case Opcode::NegTest:
      push(p.index + 1);
      push(p.index + 2);
      break;
    case Opcode::Termination: break;
    case Opcode::Jump: {
      const JumpOutcome j = jump_target(seq, p);
      if (j.kind == JumpOutcome::Kind::Target) out.push_back(seq.canonical(j.target));
      break;
    }
  }
  return out;
}

std::vector<Position> reachable_positions(const InstrSeq& seq) {
  std::vector<char> seen(seq.canonical_size(), 0);
  std::vector<Position> work{Position{0}};
  seen[0] = 1;
  while (!work.empty()) {
    const Position p = work.back();
    work.pop_back();
    for (const Position q : control_successors(seq, p)) {
      if (!seen[q.index]) {
        seen[q.index] = 1;
        work.push_back(q);
      }
    }
  }
  std::vector<Position> out;
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (seen[i]) out.push_back(Position{i});
  return out;
}

InstrSeq canonicalize(const InstrSeq& seq) {
  if (seq.is_finite()) return seq;
  std::vector<Instruction> cycle = *seq.cycle();
  // Shrinking the period can expose further counter reductions, so iterate.
  for (;;) {
    const std::size_t m = cycle.size();
    for (auto& instr : cycle) {
      if (instr.is_jump()) instr = Instruction::jump(reduce_cycle_counter(instr.counter(), m));
    }
    std::size_t period = m;
    for (std::size_t d = 1; d < m; ++d) {
      if (m % d != 0) continue;
      bool repeats = true;
      for (std::size_t i = d; i < m && repeats; ++i) repeats = cycle[i] == cycle[i % d];
      if (repeats) {
        period = d;
        break;
      }
    }
    if (period == m) break;
    cycle.erase(cycle.begin() + static_cast<std::ptrdiff_t>(period), cycle.end());
  }
  return InstrSeq(seq.prefix(), std::move(cycle));
}

}  // namespace pgamech
