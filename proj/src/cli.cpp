#include "pgamech/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "pgamech/error.hpp"
#include "pgamech/extraction.hpp"
#include "pgamech/improvement.hpp"
#include "pgamech/transform.hpp"

namespace pgamech::cli {

namespace {

// Raised for bad input that CLI11 itself cannot detect.
struct UsageFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageFailure("cannot read '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

struct ThreadSource {
  std::string inline_text;
  std::string path;

  void attach(CLI::App& cmd) {
    auto* t = cmd.add_option("--thread", inline_text, "thread equations, ';' or newline separated");
    auto* f = cmd.add_option("--thread-file", path, "file of thread equations");
    t->excludes(f);
  }
  ThreadGraph load() const {
    if (!path.empty()) return parse_thread(read_file(path));
    if (!inline_text.empty()) return parse_thread(inline_text);
    throw UsageFailure("a thread is required (--thread or --thread-file)");
  }
};

struct ExtractOptions {
  bool functional = false;
  bool mechanistic = false;
  std::string pga;
  std::string file;
  std::string format = "eqn";
  bool minimized = false;
};

int cmd_extract(const ExtractOptions& o, std::ostream& out) {
  if (o.functional == o.mechanistic) throw UsageFailure("choose --functional or --mechanistic");
  if (o.pga.empty() && o.file.empty()) throw UsageFailure("a sequence is required (--pga or --file)");
  const InstrSeq seq = parse_pga(o.file.empty() ? o.pga : read_file(o.file));
  ThreadGraph g = o.functional ? extract_functional(seq) : extract_mechanistic(seq);
  if (o.minimized) g = minimize(g);
  if (o.format == "dot") {
    out << to_dot(g);
  } else if (o.format == "json") {
    out << to_json(g).dump(2) << '\n';
  } else {
    out << print_thread(g) << '\n';
  }
  return Success;
}

struct CompareOptions {
  std::vector<std::string> pga;
  std::vector<std::string> thread;
  std::vector<std::string> thread_file;
  bool functional = false;
  bool json = false;
};

int cmd_compare(const CompareOptions& o, const CLI::App& cmd, std::ostream& out) {
  // Operands keep their command-line order even when --pga and --thread mix.
  std::map<std::string, std::size_t> used;
  std::vector<ThreadGraph> sides;
  for (const CLI::Option* opt : cmd.parse_order()) {
    const std::string name = opt->get_name();
    const std::size_t k = used[name]++;
    if (name == "--pga") {
      const InstrSeq seq = parse_pga(o.pga.at(k));
      sides.push_back(o.functional ? extract_functional(seq) : extract_mechanistic(seq));
    } else if (name == "--thread") {
      sides.push_back(parse_thread(o.thread.at(k)));
    } else if (name == "--thread-file") {
      sides.push_back(parse_thread(read_file(o.thread_file.at(k))));
    }
  }
  if (sides.size() != 2) throw UsageFailure("compare needs exactly two operands");
  if (o.functional) {
    for (auto& side : sides) side = functional_abstraction(side);
  }
  const Verdict v = compare(sides[0], sides[1]);
  if (o.json) {
    nlohmann::json doc{{"verdict", std::string(to_string(v))},
                       {"left_improves_right", left_improves(v)},
                       {"left", to_json(sides[0])},
                       {"right", to_json(sides[1])}};
    out << doc.dump(2) << '\n';
  } else {
    out << to_string(v) << '\n';
  }
  return left_improves(v) ? Success : RelationFails;
}

struct CheckOptions {
  std::string mode;
  std::string pga;
  ThreadSource thread;
};

int cmd_check(const CheckOptions& o, std::ostream& out) {
  const InstrSeq seq = parse_pga(o.pga);
  const ThreadGraph p = o.thread.load();
  const bool holds = o.mode == "implements" ? is_implementation(seq, p) : is_pre_extraction(seq, p);
  out << (holds ? "yes" : "no") << '\n';
  return holds ? Success : RelationFails;
}

struct RewriteOptions {
  std::string rule;
  std::string pga;
  std::size_t steps = 1;
  bool trace = false;
};

void print_step(const RewriteStep& s, std::ostream& out) {
  out << s.rule << " at " << s.site.to_string() << ": " << to_string(s.evidence) << " -> "
      << print_pga(s.after) << '\n';
}

int cmd_rewrite(const RewriteOptions& o, std::ostream& out) {
  const InstrSeq seq = parse_pga(o.pga);
  RewriteResult r{seq, {}};
  bool stalled = false;
  if (o.rule == "unchain") {
    r = unchain(seq);
  } else if (o.rule == "no-jump-to-term") {
    r = eliminate_jump_to_termination(seq);
  } else if (o.rule == "unroll") {
    if (seq.is_finite()) throw UsageFailure("unroll needs a repeating sequence");
    RewriteStep step = verified_step("unroll", Site{Site::Region::Cycle, 0}, seq, unroll(seq));
    r.result = step.after;
    r.steps.push_back(std::move(step));
  } else {
    for (std::size_t i = 0; i < o.steps; ++i) {
      auto step = improve_step(r.result);
      if (!step) {
        stalled = true;
        break;
      }
      r.result = step->after;
      r.steps.push_back(std::move(*step));
    }
  }
  if (o.trace) {
    for (const RewriteStep& s : r.steps) print_step(s, out);
  }
  if (stalled && r.steps.empty()) out << "note: no improvement found\n";
  out << print_pga(r.result) << '\n';
  return Success;
}

struct CodegenOptions {
  ThreadSource thread;
  bool fa = false;
};

int cmd_codegen(const CodegenOptions& o, std::ostream& out) {
  ThreadGraph p = o.thread.load();
  if (o.fa) p = functional_abstraction(p);
  const InstrSeq x = codegen(minimize(p));
  if (!bisimilar(extract_functional(x), p) || !is_implementation(x, p))
    throw VerificationError("generated sequence does not implement the thread");
  out << print_pga(x) << '\n';
  return Success;
}

struct SearchOptions {
  ThreadSource thread;
  std::size_t max_prefix = 0;
  std::size_t max_cycle = 0;
  std::vector<std::string> alphabet;
  bool pareto = false;
};

int cmd_search(const SearchOptions& o, std::ostream& out) {
  const ThreadGraph p = o.thread.load();
  std::vector<InstrSeq> found =
      search_implementations(p, SearchBounds{o.max_prefix, o.max_cycle, o.alphabet});
  if (o.pareto) found = pareto_front(found);
  for (const InstrSeq& x : found) out << print_pga(x) << '\n';
  return Success;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Functional and mechanistic behaviour of PGA instruction sequences", "pga-mech"};
  app.require_subcommand(1);

  ExtractOptions ex;
  auto* extract = app.add_subcommand("extract", "extract the thread of a sequence");
  auto* fn = extract->add_flag("--functional", ex.functional, "functional extraction");
  auto* mech = extract->add_flag("--mechanistic", ex.mechanistic, "extraction with delays");
  fn->excludes(mech);
  auto* pga_opt = extract->add_option("--pga", ex.pga, "sequence text");
  auto* file_opt = extract->add_option("--file", ex.file, "file holding the sequence");
  pga_opt->excludes(file_opt);
  extract->add_option("--format", ex.format)->check(CLI::IsMember({"eqn", "dot", "json"}));
  extract->add_flag("--minimize", ex.minimized, "minimise before printing");

  CompareOptions cmp;
  auto* compare_cmd = app.add_subcommand("compare", "compare two behaviours");
  compare_cmd->add_option("--pga", cmp.pga)->allow_extra_args(false);
  compare_cmd->add_option("--thread", cmp.thread)->allow_extra_args(false);
  compare_cmd->add_option("--thread-file", cmp.thread_file)->allow_extra_args(false);
  compare_cmd->add_flag("--functional", cmp.functional, "compare functional extractions");
  compare_cmd->add_flag("--json", cmp.json, "print the verdict as JSON");

  CheckOptions chk;
  auto* check = app.add_subcommand("check", "check a sequence against a thread");
  check->add_option("mode", chk.mode)->required()->check(CLI::IsMember({"implements", "pre-extracts"}));
  check->add_option("--pga", chk.pga)->required();
  chk.thread.attach(*check);

  RewriteOptions rw;
  auto* rewrite = app.add_subcommand("rewrite", "apply verified rewrites");
  rewrite->add_option("rule", rw.rule)
      ->required()
      ->check(CLI::IsMember({"unchain", "no-jump-to-term", "unroll", "improve"}));
  rewrite->add_option("--pga", rw.pga)->required();
  rewrite->add_option("--steps", rw.steps, "improvement steps (improve only)")
      ->check(CLI::PositiveNumber);
  rewrite->add_flag("--trace", rw.trace, "print each step");

  CodegenOptions cg;
  auto* codegen_cmd = app.add_subcommand("codegen", "generate an implementation of a thread");
  cg.thread.attach(*codegen_cmd);
  codegen_cmd->add_flag("--fa", cg.fa, "apply functional abstraction first");

  SearchOptions so;
  auto* search = app.add_subcommand("search", "enumerate implementations within bounds");
  so.thread.attach(*search);
  search->add_option("--max-prefix", so.max_prefix)->required();
  search->add_option("--max-cycle", so.max_cycle)->required();
  search->add_option("--alphabet", so.alphabet)->required()->delimiter(',');
  search->add_flag("--pareto", so.pareto, "keep only sequences nobody strictly improves");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? Success : UsageError;
  }

  try {
    if (*extract) return cmd_extract(ex, out);
    if (*compare_cmd) return cmd_compare(cmp, *compare_cmd, out);
    if (*check) return cmd_check(chk, out);
    if (*rewrite) return cmd_rewrite(rw, out);
    if (*codegen_cmd) return cmd_codegen(cg, out);
    if (*search) return cmd_search(so, out);
  } catch (const VerificationError& e) {
    err << "verification failed: " << e.what() << '\n';
    return VerificationFailed;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return UsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return UsageError;
  }
  return UsageError;
}

}  // namespace pgamech::cli
