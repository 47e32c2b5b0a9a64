#include <algorithm>

#include "pgamech/error.hpp"
#include "pgamech/transform.hpp"

namespace pgamech {

namespace {

constexpr std::size_t kBlockWidth = 3;

// Reverse postorder from the root, or nullopt when a cycle is reachable.
std::optional<std::vector<NodeId>> topological_order(const ThreadGraph& g) {
  enum : char { White, Grey, Black };
  std::vector<char> colour(g.size(), White);
  std::vector<NodeId> postorder;
  std::vector<std::pair<NodeId, int>> stack{{g.root(), 0}};
  colour[g.root()] = Grey;
  while (!stack.empty()) {
    auto& [id, next_edge] = stack.back();
    const Node& node = g.node(id);
    const int edges = node.kind == NodeKind::Post ? 2 : 0;
    if (next_edge == edges) {
      colour[id] = Black;
      postorder.push_back(id);
      stack.pop_back();
      continue;
    }
    const NodeId succ = next_edge++ == 0 ? node.on_true : node.on_false;
    if (colour[succ] == Grey) return std::nullopt;
    if (colour[succ] == White) {
      colour[succ] = Grey;
      stack.emplace_back(succ, 0);
    }
  }
  std::reverse(postorder.begin(), postorder.end());
  return postorder;
}

}  // namespace

InstrSeq codegen(const ThreadGraph& p) {
  if (p.has_delays())
    throw PreconditionError("thread contains delays; apply functional abstraction first");

  const auto topo = topological_order(p);
  std::vector<NodeId> order;
  if (topo) {
    order = *topo;
  } else {
    for (NodeId i = 0; i < p.size(); ++i) order.push_back(i);
  }
  std::vector<std::size_t> start(p.size());
  for (std::size_t i = 0; i < order.size(); ++i) start[order[i]] = kBlockWidth * i;
  const std::size_t length = kBlockWidth * order.size();

  auto jump_to = [&](std::size_t from, NodeId target) {
    const std::size_t to = start[target];
    if (topo) return Instruction::jump(to - from);
    return Instruction::jump((to + length - from) % length);
  };

  std::vector<Instruction> code;
  code.reserve(length);
  for (const NodeId id : order) {
    const Node& node = p.node(id);
    const std::size_t base = start[id];
    switch (node.kind) {
      case NodeKind::Terminate:
        code.insert(code.end(), kBlockWidth, Instruction::termination());
        break;
      case NodeKind::Deadlock:
        code.insert(code.end(), kBlockWidth, Instruction::jump(0));
        break;
      case NodeKind::Post:
        code.push_back(Instruction::pos_test(node.action));
        code.push_back(jump_to(base + 1, node.on_true));
        code.push_back(jump_to(base + 2, node.on_false));
        break;
      case NodeKind::Delay: break;  // excluded above
    }
  }
  if (topo) return InstrSeq(std::move(code));
  return InstrSeq({}, std::move(code));
}

}  // namespace pgamech
