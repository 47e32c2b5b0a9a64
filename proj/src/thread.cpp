#include "pgamech/thread.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <stdexcept>
#include <tuple>

namespace pgamech {

namespace {

constexpr NodeId kUnassigned = static_cast<NodeId>(-1);

template <typename F>
void for_each_successor(const Node& n, F&& f) {
  switch (n.kind) {
    case NodeKind::Delay: f(n.next); break;
    case NodeKind::Post:
      f(n.on_true);
      f(n.on_false);
      break;
    default: break;
  }
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[a] = b;
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

ThreadGraph::ThreadGraph(std::vector<Node> nodes, NodeId root) {
  const std::size_t n = nodes.size();
  if (root >= n) throw std::invalid_argument("thread root is not a node");
  for (const Node& node : nodes) {
    for_each_successor(node, [&](NodeId s) {
      if (s >= n) throw std::invalid_argument("thread edge targets a missing node");
    });
  }

  std::vector<NodeId> renumber(n, kUnassigned);
  std::vector<NodeId> order;
  order.reserve(n);
  renumber[root] = 0;
  order.push_back(root);
  for (std::size_t head = 0; head < order.size(); ++head) {
    for_each_successor(nodes[order[head]], [&](NodeId s) {
      if (renumber[s] == kUnassigned) {
        renumber[s] = static_cast<NodeId>(order.size());
        order.push_back(s);
      }
    });
  }

  nodes_.reserve(order.size());
  for (const NodeId old : order) {
    Node node = std::move(nodes[old]);
    switch (node.kind) {
      case NodeKind::Delay: node.next = renumber[node.next]; break;
      case NodeKind::Post:
        node.on_true = renumber[node.on_true];
        node.on_false = renumber[node.on_false];
        break;
      default: break;
    }
    nodes_.push_back(std::move(node));
  }
}

bool ThreadGraph::has_delays() const {
  return std::any_of(nodes_.begin(), nodes_.end(),
                     [](const Node& n) { return n.kind == NodeKind::Delay; });
}

std::set<std::string> ThreadGraph::actions() const {
  std::set<std::string> out;
  for (const Node& n : nodes_)
    if (n.kind == NodeKind::Post) out.insert(n.action);
  return out;
}

NodeId ThreadBuilder::reserve() {
  nodes_.push_back(Node::deadlock());
  defined_.push_back(0);
  return static_cast<NodeId>(nodes_.size() - 1);
}

void ThreadBuilder::set(NodeId id, Node node) {
  nodes_.at(id) = std::move(node);
  defined_.at(id) = 1;
}

NodeId ThreadBuilder::add(Node node) {
  nodes_.push_back(std::move(node));
  defined_.push_back(1);
  return static_cast<NodeId>(nodes_.size() - 1);
}

NodeId ThreadBuilder::delays(std::size_t n, NodeId next) {
  for (std::size_t i = 0; i < n; ++i) next = delay(next);
  return next;
}

ThreadGraph ThreadBuilder::build(NodeId root) const {
  for (std::size_t i = 0; i < defined_.size(); ++i)
    if (!defined_[i]) throw std::logic_error("reserved thread node never defined");
  return ThreadGraph(nodes_, root);
}

bool bisimilar(const ThreadGraph& g1, const ThreadGraph& g2) {
  // Both graphs are deterministic, so bisimilarity of the roots is decided
  // by merging classes along matched edges and checking labels.
  const std::size_t offset = g1.size();
  UnionFind classes(g1.size() + g2.size());
  auto node_of = [&](std::size_t id) -> const Node& {
    return id < offset ? g1.node(static_cast<NodeId>(id))
                       : g2.node(static_cast<NodeId>(id - offset));
  };
  std::vector<std::pair<std::size_t, std::size_t>> work;
  classes.unite(g1.root(), offset + g2.root());
  work.emplace_back(g1.root(), offset + g2.root());
  while (!work.empty()) {
    const auto [a, b] = work.back();
    work.pop_back();
    const Node& x = node_of(a);
    const Node& y = node_of(b);
    if (x.kind != y.kind) return false;
    auto relate = [&](std::size_t s, std::size_t t) {
      if (classes.unite(s, t)) work.emplace_back(s, t);
    };
    if (x.kind == NodeKind::Delay) {
      relate(x.next, offset + y.next);
    } else if (x.kind == NodeKind::Post) {
      if (x.action != y.action) return false;
      relate(x.on_true, offset + y.on_true);
      relate(x.on_false, offset + y.on_false);
    }
  }
  return true;
}

NormalizedThread collapse_divergence(const ThreadGraph& g) {
  const std::size_t n = g.size();
  // live: S or a postconditional is reachable. Only delay edges can lead
  // from a non-live node, so propagate backwards along delays.
  std::vector<char> live(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const NodeKind k = g.node(static_cast<NodeId>(i)).kind;
    live[i] = k == NodeKind::Terminate || k == NodeKind::Post;
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      const Node& node = g.node(static_cast<NodeId>(i));
      if (!live[i] && node.kind == NodeKind::Delay && live[node.next]) {
        live[i] = 1;
        changed = true;
      }
    }
  }

  std::vector<Node> nodes(g.nodes().begin(), g.nodes().end());
  const auto dead = static_cast<NodeId>(nodes.size());
  nodes.push_back(Node::deadlock());
  auto redirect = [&](NodeId id) { return live[id] ? id : dead; };
  for (Node& node : nodes) {
    if (node.kind == NodeKind::Delay) node.next = redirect(node.next);
    if (node.kind == NodeKind::Post) {
      node.on_true = redirect(node.on_true);
      node.on_false = redirect(node.on_false);
    }
  }
  return NormalizedThread(ThreadGraph(std::move(nodes), redirect(g.root())));
}

ThreadGraph functional_abstraction(const ThreadGraph& g) {
  const ThreadGraph normalized = collapse_divergence(g).graph();
  const std::size_t n = normalized.size();
  auto core = [&](NodeId id) {
    for (std::size_t steps = 0; normalized.node(id).kind == NodeKind::Delay; ++steps) {
      if (steps > n) throw std::logic_error("delay cycle survived normalization");
      id = normalized.node(id).next;
    }
    return id;
  };
  std::vector<Node> nodes(normalized.nodes().begin(), normalized.nodes().end());
  for (Node& node : nodes) {
    if (node.kind == NodeKind::Post) {
      node.on_true = core(node.on_true);
      node.on_false = core(node.on_false);
    }
  }
  return ThreadGraph(std::move(nodes), core(normalized.root()));
}

ThreadGraph minimize(const ThreadGraph& input, bool normalize) {
  const ThreadGraph g = normalize ? collapse_divergence(input).graph() : input;
  const std::size_t n = g.size();

  // Moore-style refinement: start from labels, split by successor classes.
  std::vector<std::size_t> block(n);
  {
    std::map<std::pair<int, std::string>, std::size_t> initial;
    for (std::size_t i = 0; i < n; ++i) {
      const Node& node = g.node(static_cast<NodeId>(i));
      const auto key = std::make_pair(static_cast<int>(node.kind), node.action);
      block[i] = initial.try_emplace(key, initial.size()).first->second;
    }
  }
  for (std::size_t count = 0;;) {
    using Signature = std::tuple<std::size_t, std::size_t, std::size_t>;
    std::map<Signature, std::size_t> split;
    std::vector<std::size_t> next(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Node& node = g.node(static_cast<NodeId>(i));
      Signature sig{block[i], 0, 0};
      if (node.kind == NodeKind::Delay) std::get<1>(sig) = block[node.next] + 1;
      if (node.kind == NodeKind::Post) {
        std::get<1>(sig) = block[node.on_true] + 1;
        std::get<2>(sig) = block[node.on_false] + 1;
      }
      next[i] = split.try_emplace(sig, split.size()).first->second;
    }
    block = std::move(next);
    if (split.size() == count) break;
    count = split.size();
  }

  std::size_t blocks = 0;
  for (const std::size_t b : block) blocks = std::max(blocks, b + 1);
  std::vector<Node> quotient(blocks);
  std::vector<char> filled(blocks, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (filled[block[i]]) continue;
    filled[block[i]] = 1;
    Node node = g.node(static_cast<NodeId>(i));
    if (node.kind == NodeKind::Delay) node.next = static_cast<NodeId>(block[node.next]);
    if (node.kind == NodeKind::Post) {
      node.on_true = static_cast<NodeId>(block[node.on_true]);
      node.on_false = static_cast<NodeId>(block[node.on_false]);
    }
    quotient[block[i]] = std::move(node);
  }
  return ThreadGraph(std::move(quotient), static_cast<NodeId>(block[g.root()]));
}

}  // namespace pgamech
