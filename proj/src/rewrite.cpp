#include <cstdint>
#include <optional>

#include "pgamech/error.hpp"
#include "pgamech/extraction.hpp"
#include "pgamech/transform.hpp"

namespace pgamech {

namespace {

// Mutable view of a sequence addressed by canonical index.
struct Layout {
  std::vector<Instruction> prefix;
  std::optional<std::vector<Instruction>> cycle;

  explicit Layout(const InstrSeq& seq) : prefix(seq.prefix()), cycle(seq.cycle()) {}

  Instruction& operator[](std::size_t canonical) {
    return canonical < prefix.size() ? prefix[canonical] : (*cycle)[canonical - prefix.size()];
  }
  InstrSeq build() const { return InstrSeq(prefix, cycle); }
};

InstrSeq with_instruction(const InstrSeq& seq, std::size_t canonical, Instruction instr) {
  Layout layout(seq);
  layout[canonical] = std::move(instr);
  return layout.build();
}

// Counter of a forward jump from canonical `from` to the nearest occurrence
// of canonical `to`.
std::optional<std::uint64_t> forward_distance(const InstrSeq& seq, std::size_t from,
                                              std::size_t to) {
  if (to > from) return to - from;
  if (seq.is_finite() || to < seq.prefix_length()) return std::nullopt;
  return to + seq.cycle_length() - from;
}

enum class ChainEnd { Lands, Diverges, FallsOff };

struct ChainResult {
  ChainEnd end;
  std::size_t landing = 0;  // canonical, when Lands
};

// Follows jumps starting at canonical `start` until a non-jump.
ChainResult follow_chain(const InstrSeq& seq, std::size_t start) {
  std::vector<char> visited(seq.canonical_size(), 0);
  std::size_t q = start;
  for (;;) {
    const Instruction& instr = seq.at(Position{q});
    if (!instr.is_jump()) return {ChainEnd::Lands, q};
    if (instr.counter() == 0 || visited[q]) return {ChainEnd::Diverges};
    visited[q] = 1;
    const JumpOutcome j = jump_target(seq, Position{q});
    if (j.kind == JumpOutcome::Kind::FallsOffEnd) return {ChainEnd::FallsOff};
    q = seq.canonical(j.target).index;
  }
}

std::optional<std::size_t> chained_jump(const InstrSeq& seq) {
  for (const Position p : reachable_positions(seq)) {
    const Instruction& instr = seq.at(p);
    if (!instr.is_jump() || instr.counter() == 0) continue;
    const JumpOutcome j = jump_target(seq, p);
    if (j.kind == JumpOutcome::Kind::Target && seq.at(j.target).is_jump()) return p.index;
  }
  return std::nullopt;
}

std::optional<std::size_t> jump_to_termination(const InstrSeq& seq) {
  for (const Position p : reachable_positions(seq)) {
    const Instruction& instr = seq.at(p);
    if (!instr.is_jump() || instr.counter() == 0) continue;
    const JumpOutcome j = jump_target(seq, p);
    if (j.kind == JumpOutcome::Kind::Target && seq.at(j.target).is_termination())
      return p.index;
  }
  return std::nullopt;
}

// Old-to-new position mapping of a splice. Unfolding indices outside the
// removed span keep their relative order; the first removed index maps to
// the first replacement instruction.
class SpliceMap {
 public:
  SpliceMap(const InstrSeq& seq, std::size_t at, std::size_t remove_count,
            std::size_t insert_count)
      : n_(seq.prefix_length()),
        m_(seq.cycle_length()),
        finite_(seq.is_finite()),
        remove_(remove_count),
        delta_(static_cast<std::int64_t>(insert_count) -
               static_cast<std::int64_t>(remove_count)) {
    if (finite_ || at < n_) {
      in_cycle_ = false;
      start_ = at;
      if (at + remove_count > n_)
        throw PreconditionError(finite_ ? "span runs past the end of the sequence"
                                        : "span crosses prefix/cycle boundary");
    } else {
      in_cycle_ = true;
      start_ = at - n_;
      if (start_ + remove_count > m_) throw PreconditionError("span crosses a cycle copy");
    }
    new_n_ = in_cycle_ ? n_ : shifted(n_);
    new_m_ = in_cycle_ ? shifted(m_) : m_;
    if (finite_ && new_n_ == 0) throw PreconditionError("splice leaves an empty sequence");
    if (!finite_ && new_m_ == 0) throw PreconditionError("splice leaves an empty repetition");
  }

  std::size_t new_prefix_length() const { return new_n_; }
  std::size_t new_cycle_length() const { return new_m_; }

  /// Image of an unfolding index; nullopt inside the removed span.
  std::optional<std::size_t> map(std::size_t x) const {
    if (!in_cycle_) {
      if (finite_ || x < n_) return map_local(x);
      return shifted(x);
    }
    if (x < n_) return x;
    const std::size_t copy = (x - n_) / m_;
    const auto slot = map_local((x - n_) % m_);
    if (!slot) return std::nullopt;
    return n_ + copy * new_m_ + *slot;
  }

  bool removed(std::size_t canonical) const {
    if (in_cycle_) {
      if (canonical < n_) return false;
      canonical -= n_;
    }
    return canonical >= start_ && canonical < start_ + remove_;
  }

 private:
  std::optional<std::size_t> map_local(std::size_t local) const {
    if (local < start_) return local;
    if (remove_ == 0) return shifted(local);
    if (local == start_) return local;
    if (local < start_ + remove_) return std::nullopt;
    return shifted(local);
  }
  std::size_t shifted(std::size_t x) const {
    return static_cast<std::size_t>(static_cast<std::int64_t>(x) + delta_);
  }

  std::size_t n_, m_;
  bool finite_;
  bool in_cycle_ = false;
  std::size_t start_ = 0;
  std::size_t remove_;
  std::int64_t delta_;
  std::size_t new_n_ = 0, new_m_ = 0;
};

struct TestFragment {
  std::string action;
  std::uint64_t counter;
};

// +b;#k;! at canonical p, entirely within the prefix or one cycle copy.
std::optional<TestFragment> positive_test_fragment(const InstrSeq& seq, std::size_t p) {
  const std::size_t n = seq.prefix_length();
  if (p < n || seq.is_finite()) {
    if (p + 3 > n) return std::nullopt;
  } else if (p - n + 3 > seq.cycle_length()) {
    return std::nullopt;
  }
  const Instruction& test = seq.at(Position{p});
  const Instruction& jump = seq.at(Position{p + 1});
  const Instruction& term = seq.at(Position{p + 2});
  if (test.opcode() != Opcode::PosTest || !jump.is_jump() || !term.is_termination())
    return std::nullopt;
  return TestFragment{test.action(), jump.counter()};
}

}  // namespace

RewriteStep verified_step(std::string rule, Site site, InstrSeq before, InstrSeq after) {
  const Verdict evidence = compare(extract_mechanistic(after), extract_mechanistic(before));
  if (evidence == Verdict::FunctionallyDifferent || evidence == Verdict::StrictlyImprovedBy ||
      evidence == Verdict::Incomparable) {
    throw VerificationError("rewrite '" + rule + "' at " + site.to_string() + " turned " +
                            print_pga(before) + " into " + print_pga(after) + " (" +
                            std::string(to_string(evidence)) + ")");
  }
  return RewriteStep{std::move(rule), site, std::move(before), std::move(after), evidence};
}

RewriteResult unchain(const InstrSeq& seq) {
  RewriteResult out{seq, {}};
  while (const auto p = chained_jump(out.result)) {
    const InstrSeq& current = out.result;
    const ChainResult chain = follow_chain(current, *p);
    Instruction replacement = Instruction::jump(0);
    if (chain.end == ChainEnd::FallsOff) {
      replacement = Instruction::jump(current.prefix_length() - *p);
    } else if (chain.end == ChainEnd::Lands) {
      replacement = Instruction::jump(*forward_distance(current, *p, chain.landing));
    }
    InstrSeq after = with_instruction(current, *p, replacement);
    RewriteStep step =
        verified_step("unchain", current.site(Position{*p}), current, std::move(after));
    out.result = step.after;
    out.steps.push_back(std::move(step));
  }
  return out;
}

RewriteResult eliminate_jump_to_termination(const InstrSeq& seq) {
  RewriteResult out{seq, {}};
  while (const auto p = jump_to_termination(out.result)) {
    const InstrSeq& current = out.result;
    InstrSeq after = with_instruction(current, *p, Instruction::termination());
    RewriteStep step = verified_step("no-jump-to-term", current.site(Position{*p}), current,
                                     std::move(after));
    out.result = step.after;
    out.steps.push_back(std::move(step));
  }
  return out;
}

InstrSeq rewrite_negtest_jump(const InstrSeq& seq, Position at) {
  const std::size_t n = seq.prefix_length();
  const std::size_t p = seq.canonical(at).index;
  if (!seq.holds_instruction(Position{p + 2}))
    throw PreconditionError("negtest rewrite runs past the end of the sequence");
  if (p < n && p + 2 >= n)
    throw PreconditionError("negtest rewrite crosses prefix/cycle boundary");
  if (p >= n && seq.cycle_length() < 3)
    throw PreconditionError("negtest rewrite needs three distinct cycle slots");

  const std::size_t p1 = seq.canonical(Position{p + 1}).index;
  const std::size_t p2 = seq.canonical(Position{p + 2}).index;
  const Instruction& test = seq.at(Position{p});
  const Instruction& term = seq.at(Position{p1});
  const Instruction& jump = seq.at(Position{p2});
  if (test.opcode() != Opcode::NegTest || !term.is_termination() || !jump.is_jump() ||
      jump.counter() == 0)
    throw PreconditionError("expected -b;!;#k with k >= 1");

  if (p1 == 0 || p2 == 0)
    throw PreconditionError("execution starts inside the rewritten fragment");
  for (const Position q : reachable_positions(seq)) {
    if (q.index == p) continue;
    for (const Position s : control_successors(seq, q)) {
      if (s.index == p1 || s.index == p2)
        throw PreconditionError("control enters the rewritten fragment from " +
                                seq.site(q).to_string());
    }
  }

  Layout layout(seq);
  layout[p] = Instruction::pos_test(test.action());
  layout[p1] = Instruction::jump(jump.counter() + 1);
  layout[p2] = Instruction::termination();
  return layout.build();
}

InstrSeq unroll(const InstrSeq& seq) {
  if (seq.is_finite()) throw PreconditionError("finite sequence has no repetition");
  std::vector<Instruction> doubled = *seq.cycle();
  doubled.insert(doubled.end(), seq.cycle()->begin(), seq.cycle()->end());
  return InstrSeq(seq.prefix(), std::move(doubled));
}

InstrSeq splice(const InstrSeq& seq, Position at, std::size_t remove_count,
                const std::vector<Instruction>& replacement) {
  const std::size_t a = seq.canonical(at).index;
  if (seq.is_finite() && a > seq.prefix_length())
    throw PreconditionError("splice position past the end of the sequence");
  const SpliceMap map(seq, a, remove_count, replacement.size());

  std::vector<Instruction> flat;
  for (std::size_t i = 0; i <= seq.canonical_size(); ++i) {
    if (i == a) {
      flat.insert(flat.end(), replacement.begin(), replacement.end());
    }
    if (i == seq.canonical_size()) break;
    if (map.removed(i)) continue;
    const Instruction& instr = seq.at(Position{i});
    if (instr.is_jump() && instr.counter() != 0) {
      const auto from = map.map(i);
      const auto to = map.map(i + instr.counter());
      if (!to) throw PreconditionError("jump into spliced region from " +
                                       seq.site(Position{i}).to_string());
      flat.push_back(Instruction::jump(*to - *from));
    } else {
      flat.push_back(instr);
    }
  }

  const std::size_t new_n = map.new_prefix_length();
  std::vector<Instruction> prefix(flat.begin(), flat.begin() + static_cast<std::ptrdiff_t>(new_n));
  if (seq.is_finite()) return InstrSeq(std::move(prefix));
  std::vector<Instruction> cycle(flat.begin() + static_cast<std::ptrdiff_t>(new_n), flat.end());
  return InstrSeq(std::move(prefix), std::move(cycle));
}

InstrSeq expand_test_chain(const InstrSeq& seq, Position at, std::size_t r,
                           Position new_target) {
  if (r == 0) throw PreconditionError("expansion count must be at least 1");
  const std::size_t p = seq.canonical(at).index;
  const auto fragment = seq.holds_instruction(Position{p}) ? positive_test_fragment(seq, p)
                                                            : std::nullopt;
  if (!fragment) throw PreconditionError("expected +b;#k;! at " + seq.site(at).to_string());

  const std::size_t t = seq.canonical(new_target).index;
  if (!seq.holds_instruction(Position{t}) || !seq.at(Position{t}).is_test() ||
      seq.at(Position{t}).action() != fragment->action)
    throw PreconditionError("newTarget does not hold a matching test");

  std::vector<Instruction> replacement;
  for (std::size_t i = 0; i < r; ++i) {
    replacement.push_back(Instruction::neg_test(fragment->action));
    replacement.push_back(Instruction::termination());
  }
  replacement.push_back(Instruction::pos_test(fragment->action));
  replacement.push_back(Instruction::jump(1));  // fixed below
  replacement.push_back(Instruction::termination());

  InstrSeq spliced = splice(seq, Position{p}, 3, replacement);
  const SpliceMap map(seq, p, 3, replacement.size());
  const std::size_t jump_at = p + 2 * r + 1;
  const auto target = map.map(t);
  const auto counter = forward_distance(spliced, jump_at, *target);
  if (!counter) throw PreconditionError("newTarget is not ahead of the rewritten jump");
  return with_instruction(spliced, jump_at, Instruction::jump(*counter));
}

// Largest number of -b;! copies tried per site.
constexpr std::size_t kMaxChainExpansion = 8;

std::optional<RewriteStep> improve_step(const InstrSeq& seq) {
  const ThreadGraph base = extract_mechanistic(seq);
  auto strictly_better = [&](const InstrSeq& candidate) {
    return compare(extract_mechanistic(candidate), base) == Verdict::StrictlyImproves;
  };
  auto accept = [&](std::string rule, Site site, InstrSeq after) {
    return verified_step(std::move(rule), site, seq, std::move(after));
  };

  if (auto r = unchain(seq); !r.steps.empty() && strictly_better(r.result))
    return accept("unchain", r.steps.front().site, r.result);
  if (auto r = eliminate_jump_to_termination(seq);
      !r.steps.empty() && strictly_better(r.result))
    return accept("no-jump-to-term", r.steps.front().site, r.result);

  for (std::size_t p = 0; p < seq.canonical_size(); ++p) {
    if (seq.at(Position{p}).opcode() != Opcode::NegTest) continue;
    try {
      const InstrSeq after = unchain(rewrite_negtest_jump(seq, Position{p})).result;
      if (strictly_better(after))
        return accept("negtest-jump+unchain", seq.site(Position{p}), after);
    } catch (const PreconditionError&) {
    }
  }

  std::vector<std::pair<std::string, InstrSeq>> variants{{"", seq}};
  if (!seq.is_finite()) variants.emplace_back("unroll+", unroll(seq));
  for (const auto& [tag, variant] : variants) {
    for (std::size_t p = 0; p < variant.canonical_size(); ++p) {
      const auto fragment = positive_test_fragment(variant, p);
      if (!fragment) continue;
      for (std::size_t r = 1; r <= kMaxChainExpansion; ++r) {
        for (std::size_t t = 0; t < variant.canonical_size(); ++t) {
          const Instruction& instr = variant.at(Position{t});
          if (!instr.is_test() || instr.action() != fragment->action) continue;
          try {
            const InstrSeq after = expand_test_chain(variant, Position{p}, r, Position{t});
            if (strictly_better(after)) {
              return accept(tag + "expand-test-chain(r=" + std::to_string(r) + ")",
                            variant.site(Position{p}), after);
            }
          } catch (const PreconditionError&) {
          }
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace pgamech
