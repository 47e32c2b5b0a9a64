#include "pgamech/improvement.hpp"

#include <limits>
#include <unordered_set>

#include "pgamech/extraction.hpp"

namespace pgamech {

namespace {

constexpr std::uint64_t kInfinite = std::numeric_limits<std::uint64_t>::max();
constexpr NodeId kNoCore = std::numeric_limits<NodeId>::max();

// Every node seen as sigma^delays(core); a delay loop has no core and
// infinitely many delays.
struct Decomposition {
  std::vector<std::uint64_t> delays;
  std::vector<NodeId> core;
};

Decomposition decompose(const ThreadGraph& g) {
  const std::size_t n = g.size();
  Decomposition d{std::vector<std::uint64_t>(n, 0), std::vector<NodeId>(n, kNoCore)};
  std::vector<char> done(n, 0);
  std::vector<NodeId> chain;
  for (NodeId start = 0; start < n; ++start) {
    if (done[start]) continue;
    chain.clear();
    NodeId id = start;
    // Walk delays until a known node, a non-delay, or a repeat.
    while (!done[id] && g.node(id).kind == NodeKind::Delay) {
      done[id] = 2;  // in progress
      chain.push_back(id);
      id = g.node(id).next;
    }
    std::uint64_t delays = 0;
    NodeId core = kNoCore;
    if (done[id] == 2) {
      delays = kInfinite;  // ran into the chain itself: a delay loop
    } else if (done[id] == 1) {
      delays = d.delays[id];
      core = d.core[id];
    } else {
      core = id;
      d.core[id] = id;
      done[id] = 1;
    }
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      if (delays != kInfinite) ++delays;
      d.delays[*it] = delays;
      d.core[*it] = core;
      done[*it] = 1;
    }
  }
  return d;
}

enum class CoreKind { Terminate, Divergent, Post };

CoreKind core_kind(const ThreadGraph& g, NodeId core) {
  if (core == kNoCore) return CoreKind::Divergent;
  switch (g.node(core).kind) {
    case NodeKind::Terminate: return CoreKind::Terminate;
    case NodeKind::Post: return CoreKind::Post;
    default: return CoreKind::Divergent;
  }
}

// sigma^d(X) below sigma^e(X): delays may only be added, except above a
// divergent core, where every delay count is the same as none.
bool delays_allowed(CoreKind kind, std::uint64_t d, std::uint64_t e) {
  return kind == CoreKind::Divergent || d <= e;
}

struct PairHash {
  std::size_t operator()(const std::pair<NodeId, NodeId>& p) const noexcept {
    return (static_cast<std::size_t>(p.first) << 32) ^ p.second;
  }
};

}  // namespace

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Equal: return "equal";
    case Verdict::StrictlyImproves: return "improves";
    case Verdict::StrictlyImprovedBy: return "improved-by";
    case Verdict::MutuallyEquivalent: return "mutually-equivalent";
    case Verdict::Incomparable: return "incomparable";
    case Verdict::FunctionallyDifferent: return "functionally-different";
  }
  return "";
}

bool left_improves(Verdict v) {
  return v == Verdict::Equal || v == Verdict::StrictlyImproves ||
         v == Verdict::MutuallyEquivalent;
}

bool functionally_equivalent(const ThreadGraph& p, const ThreadGraph& q) {
  return bisimilar(functional_abstraction(p), functional_abstraction(q));
}

bool improves(const ThreadGraph& p, const ThreadGraph& q) {
  const Decomposition dp = decompose(p);
  const Decomposition dq = decompose(q);

  // Each related pair of cores demands exactly its successor pairs, so the
  // greatest fixpoint holds iff every pair reachable from the roots passes
  // the local check.
  std::unordered_set<std::pair<NodeId, NodeId>, PairHash> seen;
  std::vector<std::pair<NodeId, NodeId>> work;
  auto relate = [&](NodeId x, NodeId y) {
    const CoreKind kx = core_kind(p, dp.core[x]);
    const CoreKind ky = core_kind(q, dq.core[y]);
    if (kx != ky) return false;
    if (!delays_allowed(kx, dp.delays[x], dq.delays[y])) return false;
    if (kx == CoreKind::Post && seen.emplace(dp.core[x], dq.core[y]).second)
      work.emplace_back(dp.core[x], dq.core[y]);
    return true;
  };

  if (!relate(p.root(), q.root())) return false;
  while (!work.empty()) {
    const auto [x, y] = work.back();
    work.pop_back();
    const Node& nx = p.node(x);
    const Node& ny = q.node(y);
    if (nx.action != ny.action) return false;
    if (!relate(nx.on_true, ny.on_true) || !relate(nx.on_false, ny.on_false)) return false;
  }
  return true;
}

bool strictly_improves(const ThreadGraph& p, const ThreadGraph& q) {
  return improves(p, q) && !bisimilar(p, q);
}

Verdict compare(const ThreadGraph& p, const ThreadGraph& q) {
  if (!functionally_equivalent(p, q)) return Verdict::FunctionallyDifferent;
  if (bisimilar(p, q)) return Verdict::Equal;
  const bool forward = improves(p, q);
  const bool backward = improves(q, p);
  if (forward && backward) return Verdict::MutuallyEquivalent;
  if (forward) return Verdict::StrictlyImproves;
  if (backward) return Verdict::StrictlyImprovedBy;
  return Verdict::Incomparable;
}

bool is_implementation(const InstrSeq& x, const ThreadGraph& p) {
  return improves(p, extract_mechanistic(x));
}

bool is_pre_extraction(const InstrSeq& x, const ThreadGraph& p) {
  return bisimilar(p, extract_mechanistic(x));
}

}  // namespace pgamech
