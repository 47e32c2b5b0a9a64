#include "rule_oracle.hpp"

#include <map>
#include <stdexcept>
#include <tuple>

namespace testsupport {

using namespace pgamech;

namespace {

constexpr std::uint32_t kNone = UINT32_MAX;

}  // namespace

std::uint32_t RuleOracle::intern(Term t) {
  terms_.push_back(t);
  sigma_of_.push_back(kNone);
  return static_cast<std::uint32_t>(terms_.size() - 1);
}

RuleOracle::RuleOracle(int height, int max_run, std::vector<std::string> actions)
    : actions_(std::move(actions)) {
  std::vector<int> run;  // trailing delay run
  std::vector<std::uint32_t> upto;   // height below the current level
  std::vector<std::uint32_t> exact;  // height exactly one below
  std::vector<int> term_height;

  for (Term::Kind k : {Term::S, Term::D}) {
    exact.push_back(intern({k}));
    run.push_back(0);
    term_height.push_back(1);
  }
  upto = exact;

  for (int h = 2; h <= height; ++h) {
    std::vector<std::uint32_t> fresh;
    for (std::uint32_t t : exact) {
      if (run[t] >= max_run) continue;
      const std::uint32_t u = intern({Term::Sigma, 0, t, 0});
      sigma_of_[t] = u;
      run.push_back(run[t] + 1);
      term_height.push_back(h);
      fresh.push_back(u);
    }
    for (std::size_t a = 0; a < actions_.size(); ++a) {
      for (std::uint32_t p : upto) {
        for (std::uint32_t q : upto) {
          if (term_height[p] != h - 1 && term_height[q] != h - 1) continue;
          fresh.push_back(intern({Term::Post, static_cast<std::uint8_t>(a), p, q}));
          run.push_back(0);
          term_height.push_back(h);
        }
      }
    }
    upto.insert(upto.end(), fresh.begin(), fresh.end());
    exact = std::move(fresh);
  }

  // Functional abstraction of each term, as an id into a hash-consed table.
  std::map<std::tuple<int, int, std::size_t, std::size_t>, std::size_t> fa_table;
  class_of_.resize(terms_.size());
  slot_.resize(terms_.size());
  for (std::uint32_t t = 0; t < terms_.size(); ++t) {
    const Term& term = terms_[t];
    std::size_t cls = 0;
    if (term.kind == Term::Sigma) {
      cls = class_of_[term.left];
    } else {
      const auto key = term.kind == Term::Post
                           ? std::make_tuple(int(term.kind), int(term.action),
                                             class_of_[term.left], class_of_[term.right])
                           : std::make_tuple(int(term.kind), 0, std::size_t{0}, std::size_t{0});
      const auto [it, added] = fa_table.emplace(key, classes_.size());
      if (added) classes_.emplace_back();
      cls = it->second;
    }
    class_of_[t] = cls;
    slot_[t] = static_cast<std::uint32_t>(classes_[cls].size());
    classes_[cls].push_back(t);
    if (classes_[cls].size() > 64) throw std::length_error("class too large for the oracle");
  }
  close();
}

bool RuleOracle::related(std::uint32_t x, std::uint32_t y) const {
  if (class_of_[x] != class_of_[y]) return false;
  return (below_[class_of_[x]][slot_[x]] >> slot_[y]) & 1;
}

void RuleOracle::close() {
  below_.resize(classes_.size());
  for (std::size_t c = 0; c < classes_.size(); ++c) below_[c].assign(classes_[c].size(), 0);
  auto add = [&](std::uint32_t x, std::uint32_t y) {
    std::uint64_t& row = below_[class_of_[x]][slot_[x]];
    const std::uint64_t bit = std::uint64_t{1} << slot_[y];
    if (row & bit) return false;
    row |= bit;
    return true;
  };

  std::uint32_t d = kNone;
  for (std::uint32_t t = 0; t < terms_.size(); ++t) {
    add(t, t);
    if (sigma_of_[t] != kNone) add(t, sigma_of_[t]);
    if (terms_[t].kind == Term::D) d = t;
  }
  if (sigma_of_[d] != kNone) add(sigma_of_[d], d);

  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t c = 0; c < classes_.size(); ++c) {
      const auto& m = classes_[c];
      for (std::uint32_t x : m) {
        for (std::uint32_t y : m) {
          const Term& tx = terms_[x];
          const Term& ty = terms_[y];
          if (tx.kind != ty.kind) continue;
          bool derived = false;
          if (tx.kind == Term::Post) {
            derived = tx.action == ty.action && related(tx.left, ty.left) &&
                      related(tx.right, ty.right);
          } else if (tx.kind == Term::Sigma) {
            derived = related(tx.left, ty.left);
          }
          if (derived && add(x, y)) changed = true;
        }
      }
      auto& rows = below_[c];
      for (std::size_t k = 0; k < rows.size(); ++k) {
        for (std::size_t i = 0; i < rows.size(); ++i) {
          if (!((rows[i] >> k) & 1)) continue;
          const std::uint64_t merged = rows[i] | rows[k];
          if (merged != rows[i]) {
            rows[i] = merged;
            changed = true;
          }
        }
      }
    }
  }
}

ThreadGraph RuleOracle::graph(std::uint32_t t) const {
  ThreadBuilder b;
  auto build = [&](auto&& self, std::uint32_t id) -> NodeId {
    const Term& term = terms_[id];
    switch (term.kind) {
      case Term::S: return b.terminate();
      case Term::D: return b.deadlock();
      case Term::Sigma: return b.delay(self(self, term.left));
      case Term::Post: {
        const NodeId on_true = self(self, term.left);
        const NodeId on_false = self(self, term.right);
        return b.post(actions_[term.action], on_true, on_false);
      }
    }
    return 0;
  };
  return b.build(build(build, t));
}

std::string RuleOracle::text(std::uint32_t t) const {
  const Term& term = terms_[t];
  switch (term.kind) {
    case Term::S: return "S";
    case Term::D: return "D";
    case Term::Sigma: return "sigma(" + text(term.left) + ")";
    case Term::Post:
      return actions_[term.action] + "(" + text(term.left) + ", " + text(term.right) + ")";
  }
  return {};
}

}  // namespace testsupport
