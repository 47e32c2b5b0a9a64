#include "pgamech/extraction.hpp"

namespace pgamech {

namespace {

enum class Mode { Functional, Mechanistic };

// One node per canonical position, plus shared S and D nodes. A finite
// sequence behaves as seq;#0, so running off the end is D.
class Extractor {
 public:
  Extractor(const InstrSeq& seq, Mode mode)
      : seq_(seq), mode_(mode), size_(seq.canonical_size()) {}

  ThreadGraph run() {
    const auto terminate = static_cast<NodeId>(size_);
    const auto deadlock = static_cast<NodeId>(size_ + 1);
    std::vector<Node> nodes(size_ + 2);
    nodes[terminate] = Node::terminate();
    nodes[deadlock] = Node::deadlock();

    // Node standing for "execution continues at unfolding index i".
    auto at = [&](std::size_t i) -> NodeId {
      const Position p{i};
      if (!seq_.holds_instruction(p)) return deadlock;
      return node_for(seq_.canonical(p).index, terminate, deadlock);
    };

    for (std::size_t i = 0; i < size_; ++i) {
      const Instruction& instr = seq_.at(Position{i});
      switch (instr.opcode()) {
        case Opcode::Basic:
          nodes[i] = Node::post(instr.action(), at(i + 1), at(i + 1));
          break;
        case Opcode::PosTest:
          nodes[i] = Node::post(instr.action(), at(i + 1), at(i + 2));
          break;
        case Opcode::NegTest:
          nodes[i] = Node::post(instr.action(), at(i + 2), at(i + 1));
          break;
        case Opcode::Termination: nodes[i] = Node::terminate(); break;
        case Opcode::Jump: {
          if (mode_ == Mode::Functional) {
            // Only referenced through aliases; never reachable by itself.
            nodes[i] = Node::deadlock();
            break;
          }
          const JumpOutcome j = jump_target(seq_, Position{i});
          switch (j.kind) {
            case JumpOutcome::Kind::ImmediateDivergence: nodes[i] = Node::deadlock(); break;
            case JumpOutcome::Kind::FallsOffEnd: nodes[i] = Node::delay(deadlock); break;
            case JumpOutcome::Kind::Target: nodes[i] = Node::delay(at(j.target.index)); break;
          }
          break;
        }
      }
    }
    return ThreadGraph(std::move(nodes), at(0));
  }

 private:
  // In mechanistic mode every position is its own node. In functional mode
  // a jump is an alias for wherever its chain of jumps ends.
  NodeId node_for(std::size_t canonical, NodeId terminate, NodeId deadlock) {
    if (mode_ == Mode::Mechanistic) {
      const Instruction& instr = seq_.at(Position{canonical});
      if (instr.is_termination()) return terminate;
      return static_cast<NodeId>(canonical);
    }
    std::vector<char> visited(size_, 0);
    std::size_t p = canonical;
    for (;;) {
      const Instruction& instr = seq_.at(Position{p});
      if (instr.is_termination()) return terminate;
      if (!instr.is_jump()) return static_cast<NodeId>(p);
      if (visited[p]) return deadlock;  // pure jump cycle
      visited[p] = 1;
      const JumpOutcome j = jump_target(seq_, Position{p});
      if (j.kind != JumpOutcome::Kind::Target) return deadlock;
      p = seq_.canonical(j.target).index;
    }
  }

  const InstrSeq& seq_;
  Mode mode_;
  std::size_t size_;
};

}  // namespace

ThreadGraph extract_functional(const InstrSeq& seq) {
  return Extractor(seq, Mode::Functional).run();
}

ThreadGraph extract_mechanistic(const InstrSeq& seq) {
  return Extractor(seq, Mode::Mechanistic).run();
}

}  // namespace pgamech
