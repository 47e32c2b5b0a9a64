#pragma once

#include <cstdint>
#include <string_view>

#include "pgamech/pga.hpp"
#include "pgamech/thread.hpp"

namespace pgamech {

/// How a left thread relates to a right thread under the mechanistic
/// improvement ordering.
enum class Verdict : std::uint8_t {
  Equal,                 // delay-exact bisimilar
  StrictlyImproves,      // left improves right, not conversely
  StrictlyImprovedBy,    // right improves left, not conversely
  MutuallyEquivalent,    // each improves the other, yet not bisimilar
  Incomparable,          // functionally equivalent, neither improves
  FunctionallyDifferent,
};

std::string_view to_string(Verdict v);
/// True for the verdicts in which the left thread improves the right one.
bool left_improves(Verdict v);

bool functionally_equivalent(const ThreadGraph& p, const ThreadGraph& q);

/// p is a mechanistic improvement of q: q is obtained from p by adding
/// delays pointwise. Delays above divergence are free in both directions, so
/// sigma^n(D) and a delay loop all sit level with D. Decided as the greatest
/// fixpoint over the product of the two graphs.
bool improves(const ThreadGraph& p, const ThreadGraph& q);

/// improves(p, q) and p, q not bisimilar.
bool strictly_improves(const ThreadGraph& p, const ThreadGraph& q);

Verdict compare(const ThreadGraph& p, const ThreadGraph& q);

/// p is improved by (or equal to) the mechanistic extraction of x.
bool is_implementation(const InstrSeq& x, const ThreadGraph& p);

/// The mechanistic extraction of x is exactly p.
bool is_pre_extraction(const InstrSeq& x, const ThreadGraph& p);

}  // namespace pgamech
