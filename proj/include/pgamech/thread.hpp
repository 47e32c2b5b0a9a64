#pragma once

// Regular threads with delays, represented as finite rooted graphs.

#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace pgamech {

using NodeId = std::uint32_t;

enum class NodeKind : std::uint8_t {
  Terminate,  // S
  Deadlock,   // D
  Delay,      // sigma(next)
  Post,       // on_true <| action |> on_false
};

struct Node {
  NodeKind kind = NodeKind::Deadlock;
  std::string action;
  NodeId next = 0;
  NodeId on_true = 0;
  NodeId on_false = 0;

  static Node terminate() { return Node{NodeKind::Terminate, {}, 0, 0, 0}; }
  static Node deadlock() { return Node{NodeKind::Deadlock, {}, 0, 0, 0}; }
  static Node delay(NodeId next) { return Node{NodeKind::Delay, {}, next, 0, 0}; }
  static Node post(std::string action, NodeId on_true, NodeId on_false) {
    return Node{NodeKind::Post, std::move(action), 0, on_true, on_false};
  }

  friend bool operator==(const Node&, const Node&) = default;
};

/// A finite rooted graph. Construction validates every edge, drops nodes
/// unreachable from the root and renumbers the rest breadth-first (true
/// branch before false branch), so the root is always node 0 and two graphs
/// built from the same reachable structure compare equal.
class ThreadGraph {
 public:
  ThreadGraph(std::vector<Node> nodes, NodeId root);

  static ThreadGraph terminate() { return ThreadGraph({Node::terminate()}, 0); }
  static ThreadGraph deadlock() { return ThreadGraph({Node::deadlock()}, 0); }

  NodeId root() const noexcept { return 0; }
  std::size_t size() const noexcept { return nodes_.size(); }
  const Node& node(NodeId id) const { return nodes_.at(id); }
  std::span<const Node> nodes() const noexcept { return nodes_; }

  bool has_delays() const;
  std::set<std::string> actions() const;

  friend bool operator==(const ThreadGraph&, const ThreadGraph&) = default;

 private:
  std::vector<Node> nodes_;
};

/// Incremental construction with forward references, for cyclic graphs.
class ThreadBuilder {
 public:
  /// Allocates a node to be defined later with set().
  NodeId reserve();
  void set(NodeId id, Node node);

  NodeId terminate() { return add(Node::terminate()); }
  NodeId deadlock() { return add(Node::deadlock()); }
  NodeId delay(NodeId next) { return add(Node::delay(next)); }
  /// sigma^n(next)
  NodeId delays(std::size_t n, NodeId next);
  NodeId post(std::string action, NodeId on_true, NodeId on_false) {
    return add(Node::post(std::move(action), on_true, on_false));
  }
  /// action . next, i.e. next <| action |> next.
  NodeId prefix(std::string action, NodeId next) {
    return post(std::move(action), next, next);
  }

  NodeId add(Node node);
  ThreadGraph build(NodeId root) const;

 private:
  std::vector<Node> nodes_;
  std::vector<char> defined_;
};

/// A thread in which every delay chain ends in S or a postconditional
/// within size() steps. Only collapse_divergence produces one.
class NormalizedThread {
 public:
  const ThreadGraph& graph() const noexcept { return graph_; }

 private:
  explicit NormalizedThread(ThreadGraph g) : graph_(std::move(g)) {}
  friend NormalizedThread collapse_divergence(const ThreadGraph& g);

  ThreadGraph graph_;
};

/// Parses thread equations. Throws ParseError.
ThreadGraph parse_thread(std::string_view text);
std::string print_thread(const ThreadGraph& g);
nlohmann::json to_json(const ThreadGraph& g);
std::string to_dot(const ThreadGraph& g);

/// Delay-exact bisimilarity of the two roots.
bool bisimilar(const ThreadGraph& g1, const ThreadGraph& g2);

/// Replaces every node from which neither S nor a postconditional is
/// reachable by a single shared D.
NormalizedThread collapse_divergence(const ThreadGraph& g);

/// Removes all delays; delay loops become D.
ThreadGraph functional_abstraction(const ThreadGraph& g);

/// Bisimulation quotient. With `normalize`, divergence is collapsed first.
ThreadGraph minimize(const ThreadGraph& g, bool normalize = false);

}  // namespace pgamech
