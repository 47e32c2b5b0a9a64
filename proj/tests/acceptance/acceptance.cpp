// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
// failure or blown time budget.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>

#include "generators.hpp"
#include "interpreter.hpp"
#include "pgamech/cli.hpp"
#include "pgamech/error.hpp"
#include "pgamech/extraction.hpp"
#include "pgamech/improvement.hpp"
#include "pgamech/transform.hpp"
#include "rule_oracle.hpp"

using namespace pgamech;

namespace {

// Collects failures for one criterion; the first few are printed.
struct Check {
  std::vector<std::string> failures;
  std::string note;

  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

ThreadGraph thread(const char* text) { return parse_thread(text); }
ThreadGraph mextr(const InstrSeq& x) { return extract_mechanistic(x); }
ThreadGraph mextr(const char* text) { return mextr(parse_pga(text)); }

const char* const kX = "(+a;#4;+b;#4;!)^w";
const char* const kY = "(+a;#6;-b;!;+b;#4;!)^w";
const char* const kZPrinted = "(+a;#8;-b;!;-b;!;-b;!;#6;!;+a;#6;-b;!;+b;#4;!)^w";
const char* const kZ = "(+a;#10;-b;!;-b;!;-b;!;+b;#4;!;+a;#6;-b;!;+b;#4;!)^w";

// Every rewrite step seen by any criterion, for the safety net.
std::size_t g_steps = 0;
std::vector<std::string> g_bad_steps;

void audit(const RewriteStep& s) {
  ++g_steps;
  if (s.evidence == Verdict::FunctionallyDifferent || s.evidence == Verdict::StrictlyImprovedBy)
    g_bad_steps.push_back(s.rule + ": " + print_pga(s.before) + " -> " + print_pga(s.after) +
                          " (" + std::string(to_string(s.evidence)) + ")");
}

void c1(Check& c) {
  const ThreadGraph p = thread("P = sigma(Q)\nQ = a . P");
  c.expect(bisimilar(extract_functional(parse_pga("#1;#1;a;!")), thread("P = a . T\nT = S")),
           "fextr(#1;#1;a;!) != a.S");
  c.expect(bisimilar(mextr("(#1;a)^w"), p), "mextr((#1;a)^w)");
  c.expect(bisimilar(mextr("(#2;#1;a)^w"), p), "mextr((#2;#1;a)^w)");
  c.expect(bisimilar(mextr("(#1;#1;a)^w"), thread("P = sigma(Q)\nQ = sigma(R)\nR = a . P")),
           "mextr((#1;#1;a)^w)");
  c.expect(bisimilar(mextr("(#2;a)^w"), thread("P = sigma(P)")), "mextr((#2;a)^w)");
}

void c2(Check& c) {
  testsupport::Rng rng(2002);
  const int runs = 10000;
  for (int i = 0; i < runs; ++i) {
    const InstrSeq x = testsupport::random_seq(rng, 8, 6, {"a", "b", "c"});
    const ThreadGraph m = mextr(x);
    c.expect(bisimilar(extract_functional(x), functional_abstraction(m)), print_pga(x));
    // independent check of the mechanistic side against direct execution
    if (i % 10 == 0)
      c.expect(testsupport::first_disagreement(x, m, true, 5, 30).empty(),
               "interpreter: " + print_pga(x));
  }
  c.note = std::to_string(runs) + " sequences";
}

void c3(Check& c) {
  c.expect(compare(mextr("+a;#3;c;!;b;!"), mextr("-a;#3;b;!;c;!")) == Verdict::Incomparable,
           "witness pair");
  const ThreadGraph q = thread("Q = a ? J : B\nJ = sigma(Q)\nB = b . T\nT = S");
  const ThreadGraph q2 =
      thread("R = a ? Q : K\nQ = a ? J : B\nJ = sigma(Q)\nB = b . T\nT = S\nK = sigma(B)");
  c.expect(compare(q, q2) == Verdict::Incomparable, "Q vs Q'");
}

void c4(Check& c) {
  ThreadBuilder b;
  const ThreadGraph s1 = b.build(b.delays(1, b.prefix("a", b.terminate())));
  ThreadBuilder b2;
  const ThreadGraph s2 = b2.build(b2.delays(2, b2.prefix("a", b2.terminate())));
  c.expect(strictly_improves(s1, s2), "sigma(a.S) vs sigma^2(a.S)");
  const ThreadGraph as = thread("P = a . T\nT = S");
  const InstrSeq x = parse_pga("a;!");
  c.expect(is_pre_extraction(x, as), "a;! pre-extraction");
  c.expect(strictly_improves(mextr(x), s1), "a;! vs sigma(a.S)");
  c.expect(strictly_improves(mextr(x), s2), "a;! vs sigma^2(a.S)");
  c.expect(strictly_improves(mextr(x), mextr("#1;a;!")), "a;! vs #1;a;!");
  c.expect(strictly_improves(mextr(x), mextr("#1;#1;a;!")), "a;! vs #1;#1;a;!");
}

void c5(Check& c) {
  const ThreadGraph x = mextr(kX), y = mextr(kY);
  c.expect(strictly_improves(y, x), "Y over X");
  c.expect(strictly_improves(mextr(kZ), y), "Z over Y");
  c.expect(compare(mextr(kZPrinted), y) == Verdict::FunctionallyDifferent,
           "printed Z text expected to be functionally different");

  std::ostringstream out, err;
  const int code = cli::run({"rewrite", "improve", "--steps", "3", "--trace", "--pga", kX}, out, err);
  c.expect(code == 0, "cli exit " + std::to_string(code) + ": " + err.str());
  std::vector<InstrSeq> chain{parse_pga(kX)};
  std::istringstream lines(out.str());
  std::string line;
  while (std::getline(lines, line)) {
    const auto arrow = line.find(" -> ");
    if (arrow == std::string::npos) continue;
    c.expect(line.find(": improves -> ") != std::string::npos, "step verdict: " + line);
    chain.push_back(parse_pga(line.substr(arrow + 4)));
  }
  c.expect(chain.size() >= 4, "chain has " + std::to_string(chain.size() - 1) + " steps");
  for (std::size_t i = 1; i < chain.size(); ++i) {
    const ThreadGraph cur = mextr(chain[i]);
    c.expect(strictly_improves(cur, mextr(chain[i - 1])), "step " + std::to_string(i));
    c.expect(functionally_equivalent(cur, x), "step " + std::to_string(i) + " not ~f X");
    for (std::size_t j = 0; j + 1 < i; ++j)
      c.expect(strictly_improves(cur, mextr(chain[j])),
               "not transitive " + std::to_string(j) + "->" + std::to_string(i));
  }
  InstrSeq cur = parse_pga(kX);
  for (int k = 0; k < 3; ++k)
    if (auto s = improve_step(cur)) {
      audit(*s);
      cur = s->after;
    }
  c.note = std::to_string(chain.size() - 1) + " steps, Z checked with corrected counters";
}

// Two delay nodes in a row reachable from the root.
bool has_stacked_delays(const ThreadGraph& g) {
  for (const Node& n : g.nodes())
    if (n.kind == NodeKind::Delay && g.node(n.next).kind == NodeKind::Delay) return true;
  return false;
}

void c6(Check& c) {
  const RewriteResult r = unchain(parse_pga("#2;a;#1;b;!"));
  c.expect(r.result == parse_pga("#3;a;#1;b;!"), "golden gave " + print_pga(r.result));
  testsupport::Rng rng(2006);
  const int runs = 10000;
  for (int i = 0; i < runs; ++i) {
    const InstrSeq x = testsupport::random_seq(rng, 8, 6, {"a", "b"});
    const RewriteResult u = unchain(x);
    for (const RewriteStep& s : u.steps) audit(s);
    // minimize keeps only reachable nodes
    const ThreadGraph m = minimize(mextr(u.result));
    c.expect(!has_stacked_delays(m), "stacked delays: " + print_pga(x));
    c.expect(improves(m, mextr(x)), "lost: " + print_pga(x));
  }
  c.note = std::to_string(runs) + " sequences";
}

void c7(Check& c) {
  const testsupport::RuleOracle oracle(4, 2, {"a", "b"});
  std::vector<ThreadGraph> graphs;
  graphs.reserve(oracle.size());
  for (std::uint32_t t = 0; t < oracle.size(); ++t) graphs.push_back(oracle.graph(t));

  std::size_t pairs = 0, related = 0;
  for (std::size_t k = 0; k < oracle.class_count(); ++k)
    for (const std::uint32_t x : oracle.members(k))
      for (const std::uint32_t y : oracle.members(k)) {
        ++pairs;
        related += oracle.related(x, y);
        if (improves(graphs[x], graphs[y]) != oracle.related(x, y))
          c.expect(false, oracle.text(x) + " vs " + oracle.text(y));
      }
  // across classes both sides must say no
  testsupport::Rng rng(2007);
  std::size_t cross = 0;
  while (cross < 100000) {
    const auto x = static_cast<std::uint32_t>(rng() % oracle.size());
    const auto y = static_cast<std::uint32_t>(rng() % oracle.size());
    if (oracle.class_of(x) == oracle.class_of(y)) continue;
    ++cross;
    c.expect(!oracle.related(x, y), "oracle relates classes");
    if (improves(graphs[x], graphs[y])) c.expect(false, oracle.text(x) + " vs " + oracle.text(y));
  }
  c.note = std::to_string(oracle.size()) + " terms, " + std::to_string(pairs) +
           " same-class pairs (" + std::to_string(related) + " related), " + std::to_string(cross) + " cross-class pairs";
}

void c8(Check& c) {
  const ThreadGraph p = thread("P = a ? B : C\nB = b . T\nC = c . T\nT = S");
  const ThreadGraph w1 = mextr("+a;#3;c;!;b;!"), w2 = mextr("-a;#3;b;!;c;!");
  c.expect(is_implementation(parse_pga("+a;#3;c;!;b;!"), p), "witness 1 not an implementation");
  c.expect(is_implementation(parse_pga("-a;#3;b;!;c;!"), p), "witness 2 not an implementation");
  const auto found = search_implementations(p, SearchBounds{6, 0, {"a", "b", "c"}});
  c.expect(!found.empty(), "no implementations found");
  for (const InstrSeq& x : found) {
    const ThreadGraph m = mextr(x);
    c.expect(!strictly_improves(m, w1), print_pga(x) + " beats witness 1");
    c.expect(!strictly_improves(m, w2), print_pga(x) + " beats witness 2");
  }
  c.note = std::to_string(found.size()) + " implementations";
}

void c9(Check& c) {
  testsupport::Rng rng(2009);
  const int runs = 500;
  for (int i = 0; i < runs; ++i) {
    const ThreadGraph p = testsupport::random_thread(rng, 6, {"a", "b", "c"}, false);
    const InstrSeq x = codegen(p);
    c.expect(bisimilar(extract_functional(x), p), print_thread(p));
    c.expect(is_implementation(x, p), "not an implementation: " + print_thread(p));
  }
  c.note = std::to_string(runs) + " threads";
}

void c10(Check& c) {
  testsupport::Rng rng(2010);
  for (int i = 0; i < 20000; ++i) {
    const InstrSeq x = testsupport::random_seq(rng, 6, 6, {"a", "b"});
    try {
      for (const auto& s : unchain(x).steps) audit(s);
      for (const auto& s : eliminate_jump_to_termination(x).steps) audit(s);
      if (!x.is_finite())
        audit(verified_step("unroll", Site{Site::Region::Cycle, 0}, x, unroll(x)));
      for (std::size_t p = 0; p < x.canonical_size(); ++p) {
        try {
          audit(verified_step("negtest", x.site(Position{p}), x,
                              rewrite_negtest_jump(x, Position{p})));
        } catch (const PreconditionError&) {
        }
      }
      InstrSeq cur = x;
      for (int k = 0; k < 3; ++k) {
        const auto s = improve_step(cur);
        if (!s) break;
        audit(*s);
        cur = s->after;
      }
    } catch (const VerificationError& e) {
      c.expect(false, std::string("verification: ") + e.what());
    }
  }
  for (const std::string& b : g_bad_steps) c.expect(false, b);
  c.expect(g_steps > 0, "no rewrite steps exercised");
  c.note = std::to_string(g_steps) + " steps audited";
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<void(Check&)> body;
  };
  const std::vector<Criterion> all{
      {1, "extraction goldens", 1, c1},
      {2, "functional = fa(mechanistic), random", 30, c2},
      {3, "incomparability goldens", 1, c3},
      {4, "improvement goldens", 1, c4},
      {5, "non-optimality chain", 10, c5},
      {6, "unchaining", 30, c6},
      {7, "ordering vs rule-closure oracle", 60, c7},
      {8, "bounded optimality of the witnesses", 60, c8},
      {9, "codegen soundness", 30, c9},
      {10, "rewrite safety net", 60, c10},
  };
  int failed = 0;
  for (const Criterion& cr : all) {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      cr.body(c);
    } catch (const std::exception& e) {
      c.failures.push_back(std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > cr.budget_s) c.failures.push_back("over time budget");
    const bool ok = c.failures.empty();
    failed += !ok;
    std::printf("%s  %2d  %-38s %7.2fs  %s\n", ok ? "PASS" : "FAIL", cr.id, cr.name, secs,
                c.note.c_str());
    for (std::size_t i = 0; i < c.failures.size() && i < 5; ++i)
      std::printf("        %s\n", c.failures[i].c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
  return failed == 0 ? 0 : 1;
}
