#include <cctype>
#include <map>
#include <optional>
#include <sstream>

#include "pgamech/error.hpp"
#include "pgamech/pga.hpp"
#include "pgamech/thread.hpp"

namespace pgamech {

namespace {

struct Token {
  enum class Kind { Word, Symbol };
  Kind kind;
  std::string text;
  std::size_t column;
};

bool is_name(std::string_view s) {
  if (s.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (const char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

bool is_reserved(std::string_view s) { return s == "S" || s == "D" || s == "sigma"; }

struct Reference {
  std::string name;
  std::size_t line;
  std::size_t column;
};

// One parsed right-hand side; successor names are resolved after all
// equations are read.
struct Equation {
  std::string name;
  std::size_t line;
  NodeKind kind;
  std::string action;
  std::vector<Reference> refs;
};

class ThreadParser {
 public:
  explicit ThreadParser(std::string_view text) : text_(text) {}

  ThreadGraph parse() {
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text_.size()) {
      const std::size_t end = std::min(text_.find('\n', start), text_.size());
      ++line_no;
      parse_line(text_.substr(start, end - start), line_no);
      start = end + 1;
    }
    if (equations_.empty()) throw ParseError("no equations", 1, 1);
    return resolve();
  }

 private:
  void parse_line(std::string_view line, std::size_t line_no) {
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    // ';' separates equations written on one line.
    std::size_t offset = 0;
    while (offset <= line.size()) {
      const std::size_t end = std::min(line.find(';', offset), line.size());
      auto tokens = tokenize(line.substr(offset, end - offset), line_no, offset);
      if (!tokens.empty()) parse_equation(tokens, line_no);
      offset = end + 1;
    }
  }

  std::vector<Token> tokenize(std::string_view s, std::size_t line_no,
                              std::size_t column_offset) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
      const char c = s[i];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
        continue;
      }
      const std::size_t column = column_offset + i + 1;
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
        const std::size_t begin = i;
        while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) ||
                                s[i] == '_' || s[i] == '.'))
          ++i;
        out.push_back({Token::Kind::Word, std::string(s.substr(begin, i - begin)), column});
        continue;
      }
      if (c == '=' || c == '(' || c == ')' || c == '?' || c == ':' || c == '.') {
        out.push_back({Token::Kind::Symbol, std::string(1, c), column});
        ++i;
        continue;
      }
      throw ParseError(std::string("unexpected character '") + c + "'", line_no, column);
    }
    return out;
  }

  void parse_equation(std::vector<Token>& tokens, std::size_t line_no) {
    // "a.P" lexes as one word; split it into action, '.', name.
    if (tokens.size() == 3 && tokens[2].kind == Token::Kind::Word &&
        tokens[2].text.find('.') != std::string::npos) {
      const Token word = tokens[2];
      const std::size_t dot = word.text.rfind('.');
      tokens.pop_back();
      tokens.push_back({Token::Kind::Word, word.text.substr(0, dot), word.column});
      tokens.push_back({Token::Kind::Symbol, ".", word.column + dot});
      tokens.push_back({Token::Kind::Word, word.text.substr(dot + 1), word.column + dot + 1});
    }

    std::size_t pos = 0;
    auto fail = [&](const std::string& msg) -> void {
      const std::size_t column = pos < tokens.size() ? tokens[pos].column
                                 : tokens.empty()    ? 1
                                                     : tokens.back().column + 1;
      throw ParseError(msg, line_no, column);
    };
    auto word = [&](const char* what) -> const Token& {
      if (pos >= tokens.size() || tokens[pos].kind != Token::Kind::Word)
        fail(std::string("expected ") + what);
      return tokens[pos++];
    };
    auto symbol = [&](char c) {
      if (pos >= tokens.size() || tokens[pos].kind != Token::Kind::Symbol ||
          tokens[pos].text[0] != c)
        fail(std::string("expected '") + c + "'");
      ++pos;
    };
    auto name_ref = [&]() -> Reference {
      const Token& t = word("name");
      if (!is_name(t.text) || is_reserved(t.text)) {
        --pos;
        fail("invalid name '" + t.text + "'");
      }
      return {t.text, line_no, t.column};
    };

    const Token& lhs = word("name");
    if (!is_name(lhs.text) || is_reserved(lhs.text)) {
      --pos;
      fail("invalid equation name '" + lhs.text + "'");
    }
    Equation eq{lhs.text, line_no, NodeKind::Deadlock, {}, {}};
    symbol('=');
    const Token& head = word("right-hand side");
    const bool more = pos < tokens.size();
    if (head.text == "S" && !more) {
      eq.kind = NodeKind::Terminate;
    } else if (head.text == "D" && !more) {
      eq.kind = NodeKind::Deadlock;
    } else if (head.text == "sigma" && more && tokens[pos].text == "(") {
      eq.kind = NodeKind::Delay;
      symbol('(');
      eq.refs.push_back(name_ref());
      symbol(')');
    } else {
      if (!is_valid_action_name(head.text)) {
        --pos;
        fail("invalid action name '" + head.text + "'");
      }
      eq.kind = NodeKind::Post;
      eq.action = head.text;
      if (pos < tokens.size() && tokens[pos].text == ".") {
        symbol('.');
        const Reference next = name_ref();
        eq.refs = {next, next};
      } else {
        symbol('?');
        eq.refs.push_back(name_ref());
        symbol(':');
        eq.refs.push_back(name_ref());
      }
    }
    if (pos != tokens.size()) fail("unexpected trailing input");

    if (index_.contains(eq.name))
      throw ParseError("duplicate definition of '" + eq.name + "'", line_no, lhs.column);
    index_.emplace(eq.name, static_cast<NodeId>(equations_.size()));
    equations_.push_back(std::move(eq));
  }

  ThreadGraph resolve() const {
    auto lookup = [&](const Reference& r) {
      const auto it = index_.find(r.name);
      if (it == index_.end())
        throw ParseError("undefined name '" + r.name + "'", r.line, r.column);
      return it->second;
    };
    std::vector<Node> nodes;
    nodes.reserve(equations_.size());
    for (const Equation& eq : equations_) {
      switch (eq.kind) {
        case NodeKind::Terminate: nodes.push_back(Node::terminate()); break;
        case NodeKind::Deadlock: nodes.push_back(Node::deadlock()); break;
        case NodeKind::Delay: nodes.push_back(Node::delay(lookup(eq.refs[0]))); break;
        case NodeKind::Post:
          nodes.push_back(Node::post(eq.action, lookup(eq.refs[0]), lookup(eq.refs[1])));
          break;
      }
    }
    return ThreadGraph(std::move(nodes), 0);
  }

  std::string_view text_;
  std::vector<Equation> equations_;
  std::map<std::string, NodeId, std::less<>> index_;
};

std::string node_name(NodeId id) { return "T" + std::to_string(id); }

}  // namespace

ThreadGraph parse_thread(std::string_view text) { return ThreadParser(text).parse(); }

std::string print_thread(const ThreadGraph& g) {
  std::string out;
  for (NodeId i = 0; i < g.size(); ++i) {
    const Node& n = g.node(i);
    if (i != 0) out += '\n';
    out += node_name(i) + " = ";
    switch (n.kind) {
      case NodeKind::Terminate: out += "S"; break;
      case NodeKind::Deadlock: out += "D"; break;
      case NodeKind::Delay: out += "sigma(" + node_name(n.next) + ")"; break;
      case NodeKind::Post:
        out += n.action + " ? " + node_name(n.on_true) + " : " + node_name(n.on_false);
        break;
    }
  }
  return out;
}

nlohmann::json to_json(const ThreadGraph& g) {
  nlohmann::json nodes = nlohmann::json::array();
  for (NodeId i = 0; i < g.size(); ++i) {
    const Node& n = g.node(i);
    nlohmann::json entry = {{"id", i}};
    switch (n.kind) {
      case NodeKind::Terminate: entry["kind"] = "S"; break;
      case NodeKind::Deadlock: entry["kind"] = "D"; break;
      case NodeKind::Delay:
        entry["kind"] = "delay";
        entry["next"] = n.next;
        break;
      case NodeKind::Post:
        entry["kind"] = "post";
        entry["action"] = n.action;
        entry["true"] = n.on_true;
        entry["false"] = n.on_false;
        break;
    }
    nodes.push_back(std::move(entry));
  }
  return {{"root", g.root()}, {"nodes", std::move(nodes)}};
}

std::string to_dot(const ThreadGraph& g) {
  std::ostringstream out;
  out << "digraph thread {\n";
  out << "  start [shape=point];\n";
  for (NodeId i = 0; i < g.size(); ++i) {
    const Node& n = g.node(i);
    out << "  n" << i << " [";
    switch (n.kind) {
      case NodeKind::Terminate: out << "label=\"S\", shape=box"; break;
      case NodeKind::Deadlock: out << "label=\"D\", shape=box"; break;
      case NodeKind::Delay: out << "label=\"\xCF\x83\", shape=circle"; break;
      case NodeKind::Post: out << "label=\"" << n.action << "\", shape=ellipse"; break;
    }
    out << "];\n";
  }
  out << "  start -> n" << g.root() << ";\n";
  for (NodeId i = 0; i < g.size(); ++i) {
    const Node& n = g.node(i);
    if (n.kind == NodeKind::Delay) out << "  n" << i << " -> n" << n.next << ";\n";
    if (n.kind == NodeKind::Post) {
      out << "  n" << i << " -> n" << n.on_true << ";\n";
      out << "  n" << i << " -> n" << n.on_false << " [style=dashed];\n";
    }
  }
  out << "}\n";
  return out.str();
}

}  // namespace pgamech
