#pragma once

// Behaviour-checked rewrites of instruction sequences, code generation from
// delay-free threads, and bounded enumeration of implementations.

#include <optional>
#include <string>
#include <vector>

#include "pgamech/improvement.hpp"
#include "pgamech/pga.hpp"
#include "pgamech/thread.hpp"

namespace pgamech {

/// One applied rewrite. `evidence` compares the mechanistic extraction of
/// `after` (left) with that of `before` (right).
struct RewriteStep {
  std::string rule;
  Site site;
  InstrSeq before;
  InstrSeq after;
  Verdict evidence;
};

struct RewriteResult {
  InstrSeq result;
  std::vector<RewriteStep> steps;
};

/// Builds a step and computes its evidence. Throws VerificationError when
/// `after` is functionally different from, or strictly worse than, `before`.
RewriteStep verified_step(std::string rule, Site site, InstrSeq before, InstrSeq after);

/// Redirects every reachable jump whose target holds another jump to the
/// end of the chain. Chains ending in divergence (#0 or a pure jump cycle)
/// become #0.
RewriteResult unchain(const InstrSeq& seq);

/// Replaces every reachable jump that lands on `!` by `!`.
RewriteResult eliminate_jump_to_termination(const InstrSeq& seq);

/// -b;!;#k at p becomes +b;#(k+1);!. Throws PreconditionError unless p..p+2
/// have that shape, nothing but p transfers control into p+1 or p+2, and
/// execution does not start there.
InstrSeq rewrite_negtest_jump(const InstrSeq& seq, Position p);

/// X;(C)^w becomes X;(C;C)^w. Throws PreconditionError on finite input.
InstrSeq unroll(const InstrSeq& seq);

/// Replaces `remove_count` instructions starting at `at` and recomputes every
/// other jump counter so it reaches the image of its old target. A jump to
/// `at` itself lands on the first replacement instruction; a jump strictly
/// inside the removed span is an error, as is a span that crosses the
/// prefix/cycle boundary or a cycle copy.
InstrSeq splice(const InstrSeq& seq, Position at, std::size_t remove_count,
                const std::vector<Instruction>& replacement);

/// +b;#k;! at p becomes r copies of -b;! followed by +b;#k';!, where #k'
/// lands on the next occurrence of `new_target` (a test on b).
InstrSeq expand_test_chain(const InstrSeq& seq, Position p, std::size_t r,
                           Position new_target);

/// First rewrite in the catalogue whose result strictly improves `seq`.
std::optional<RewriteStep> improve_step(const InstrSeq& seq);

/// One three-instruction block per node: S as !;!;!, D as #0;#0;#0, a
/// postconditional as +a;#t;#f. Acyclic graphs give a finite sequence,
/// cyclic ones a single repetition. Throws PreconditionError on delays.
InstrSeq codegen(const ThreadGraph& p);

struct SearchBounds {
  std::size_t max_prefix = 0;
  std::size_t max_cycle = 0;
  std::vector<std::string> alphabet;

  /// Throws PreconditionError when both bounds are zero or the alphabet is
  /// empty or holds an invalid name.
  void validate() const;
};

/// Every implementation of p within bounds. Jump counters range over one
/// representative per target: 0 up to the first counter leaving a finite
/// sequence, or up to the last distinct target in a repeating one. Ordered by
/// length, then prefix length, then text.
std::vector<InstrSeq> search_implementations(const ThreadGraph& p, const SearchBounds& bounds);

/// Members of `candidates` whose extraction no other member strictly improves.
std::vector<InstrSeq> pareto_front(const std::vector<InstrSeq>& candidates);

}  // namespace pgamech
