#pragma once

// Instruction sequences of PGA: primitive instructions, finite and
// eventually periodic sequences, and position semantics over the infinite
// unfolding prefix;cycle;cycle;...

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pgamech {

enum class Opcode : std::uint8_t { Basic, PosTest, NegTest, Termination, Jump };

/// True when `name` matches [a-z][A-Za-z0-9_.]*.
bool is_valid_action_name(std::string_view name);

class Instruction {
 public:
  static Instruction basic(std::string action);
  static Instruction pos_test(std::string action);
  static Instruction neg_test(std::string action);
  static Instruction termination();
  static Instruction jump(std::uint64_t counter);

  Opcode opcode() const noexcept { return opcode_; }
  /// Empty for termination and jumps.
  const std::string& action() const noexcept { return action_; }
  /// Zero unless this is a jump.
  std::uint64_t counter() const noexcept { return counter_; }

  bool is_jump() const noexcept { return opcode_ == Opcode::Jump; }
  bool is_test() const noexcept {
    return opcode_ == Opcode::PosTest || opcode_ == Opcode::NegTest;
  }
  bool is_termination() const noexcept { return opcode_ == Opcode::Termination; }

  std::string to_string() const;

  friend bool operator==(const Instruction&, const Instruction&) = default;

 private:
  Instruction(Opcode op, std::string action, std::uint64_t counter)
      : opcode_(op), action_(std::move(action)), counter_(counter) {}

  Opcode opcode_;
  std::string action_;
  std::uint64_t counter_;
};

/// Index into the infinite unfolding of a sequence.
struct Position {
  std::size_t index = 0;

  friend auto operator<=>(const Position&, const Position&) = default;
};

/// Externally visible form of a position: a prefix index or a cycle slot.
struct Site {
  enum class Region : std::uint8_t { Prefix, Cycle };
  Region region = Region::Prefix;
  std::size_t index = 0;

  std::string to_string() const;
  friend bool operator==(const Site&, const Site&) = default;
};

/// prefix;(cycle)^w when a cycle is present, otherwise the finite prefix.
/// Never empty, and a present cycle is never empty.
class InstrSeq {
 public:
  explicit InstrSeq(std::vector<Instruction> prefix,
                    std::optional<std::vector<Instruction>> cycle = std::nullopt);

  static InstrSeq periodic(std::vector<Instruction> prefix,
                           std::vector<Instruction> cycle) {
    return InstrSeq(std::move(prefix), std::move(cycle));
  }

  const std::vector<Instruction>& prefix() const noexcept { return prefix_; }
  const std::optional<std::vector<Instruction>>& cycle() const noexcept {
    return cycle_;
  }

  bool is_finite() const noexcept { return !cycle_.has_value(); }
  std::size_t prefix_length() const noexcept { return prefix_.size(); }
  std::size_t cycle_length() const noexcept { return cycle_ ? cycle_->size() : 0; }
  /// Number of distinct canonical positions: prefix length plus cycle length.
  std::size_t canonical_size() const noexcept {
    return prefix_length() + cycle_length();
  }

  /// Maps an unfolding index onto [0, canonical_size()). For finite
  /// sequences positions past the end are returned unchanged.
  Position canonical(Position p) const noexcept;
  bool holds_instruction(Position p) const noexcept {
    return cycle_ || p.index < prefix_.size();
  }
  /// Instruction at a position known to exist.
  const Instruction& at(Position p) const;

  Site site(Position p) const;
  Position position(Site s) const;

  friend bool operator==(const InstrSeq&, const InstrSeq&) = default;

 private:
  std::vector<Instruction> prefix_;
  std::optional<std::vector<Instruction>> cycle_;
};

/// Parses the PGA text grammar. Throws ParseError.
InstrSeq parse_pga(std::string_view text);
std::string print_pga(const InstrSeq& seq);

std::optional<Instruction> instruction_at(const InstrSeq& seq, Position p);

struct JumpOutcome {
  enum class Kind : std::uint8_t { Target, ImmediateDivergence, FallsOffEnd };
  Kind kind = Kind::Target;
  /// Unfolding index of the target, meaningful only for Kind::Target.
  Position target{};

  friend bool operator==(const JumpOutcome&, const JumpOutcome&) = default;
};

/// Throws PreconditionError("not a jump") when p does not hold a jump.
JumpOutcome jump_target(const InstrSeq& seq, Position p);

/// Canonical positions control can move to after executing the instruction
/// at p (test branches, fall-through, jump target). Exits to termination or
/// inaction contribute nothing.
std::vector<Position> control_successors(const InstrSeq& seq, Position p);

/// Canonical positions executed by some run, in increasing order.
std::vector<Position> reachable_positions(const InstrSeq& seq);

/// Cycle jump counters reduced modulo the cycle length (never to zero) and
/// the cycle cut to its minimal literal period.
InstrSeq canonicalize(const InstrSeq& seq);

}  // namespace pgamech
