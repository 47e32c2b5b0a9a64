#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pgamech/cli.hpp"

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = pgamech::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp_file(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("pgamech_" + name);
  std::ofstream(path) << text;
  return path.string();
}

const char* const kXyz = "P = a ? B : C\nB = b . T\nC = c . T\nT = S\n";

}  // namespace

TEST_CASE("cli extract") {
  Run r = run({"extract", "--mechanistic", "--pga", "(#1;a)^w", "--format", "eqn"});
  CHECK(r.code == 0);
  CHECK(r.out == "T0 = sigma(T1)\nT1 = a ? T0 : T0\n");
  CHECK(r.err.empty());

  r = run({"extract", "--functional", "--pga", "#1;#1;a;!"});
  CHECK(r.code == 0);
  CHECK(r.out == "T0 = a ? T1 : T1\nT1 = S\n");

  r = run({"extract", "--functional", "--pga", "a;;b"});
  CHECK(r.code == 2);
  CHECK(r.err.find("1:3") != std::string::npos);

  r = run({"extract", "--mechanistic", "--pga", "(#1;a)^w", "--format", "json"});
  CHECK(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["nodes"].size() == 2);

  r = run({"extract", "--functional", "--pga", "a;!", "--format", "dot"});
  CHECK(r.out.rfind("digraph", 0) == 0);

  const std::string file = temp_file("seq.pga", "(a;a)^w\n");
  r = run({"extract", "--functional", "--file", file, "--minimize"});
  CHECK(r.out == "T0 = a ? T0 : T0\n");

  CHECK(run({"extract", "--pga", "a;!"}).code == 2);  // no mode
  CHECK(run({"extract", "--functional", "--mechanistic", "--pga", "a;!"}).code == 2);
  CHECK(run({"extract", "--functional", "--file", "/nonexistent/x"}).code == 2);
}

TEST_CASE("cli compare") {
  Run r = run({"compare", "--pga", "#1;a;!", "--pga", "#1;#1;a;!"});
  CHECK(r.out == "improves\n");
  CHECK(r.code == 0);

  r = run({"compare", "--pga", "+a;#3;c;!;b;!", "--pga", "-a;#3;b;!;c;!"});
  CHECK(r.out == "incomparable\n");
  CHECK(r.code == 1);

  r = run({"compare", "--pga", "a;!", "--pga", "a;!"});
  CHECK(r.out == "equal\n");
  CHECK(r.code == 0);

  // operands keep their order across kinds
  r = run({"compare", "--thread", "P = sigma(Q); Q = a . T; T = S", "--pga", "a;!"});
  CHECK(r.out == "improved-by\n");
  CHECK(r.code == 1);
  r = run({"compare", "--pga", "a;!", "--thread", "P = sigma(Q); Q = a . T; T = S"});
  CHECK(r.out == "improves\n");

  r = run({"compare", "--functional", "--pga", "#1;a;!", "--pga", "a;!"});
  CHECK(r.out == "equal\n");

  r = run({"compare", "--json", "--pga", "a;!", "--pga", "b;!"});
  CHECK(r.code == 1);
  CHECK(nlohmann::json::parse(r.out)["verdict"] == "functionally-different");

  CHECK(run({"compare", "--pga", "a;!"}).code == 2);
  CHECK(run({"compare", "--pga", "a;!", "--thread", "P = Q"}).code == 2);
}

TEST_CASE("cli check") {
  const std::string file = temp_file("xyz.thread", kXyz);
  Run r = run({"check", "implements", "--pga", "+a;#3;c;!;b;!", "--thread-file", file});
  CHECK(r.out == "yes\n");
  CHECK(r.code == 0);
  r = run({"check", "pre-extracts", "--pga", "+a;#3;c;!;b;!", "--thread-file", file});
  CHECK(r.out == "no\n");
  CHECK(r.code == 1);
  r = run({"check", "implements", "--pga", "b;!", "--thread", "P = a . T; T = S"});
  CHECK(r.out == "no\n");
  CHECK(r.code == 1);
  CHECK(run({"check", "implements", "--pga", "a;!", "--thread-file", "/nonexistent"}).code == 2);
  CHECK(run({"check", "bogus", "--pga", "a;!", "--thread", "P = S"}).code == 2);
}

TEST_CASE("cli rewrite") {
  Run r = run({"rewrite", "unchain", "--pga", "#2;a;#1;b;!"});
  CHECK(r.out == "#3;a;#1;b;!\n");
  CHECK(r.code == 0);

  r = run({"rewrite", "improve", "--steps", "2", "--pga", "(+a;#4;+b;#4;!)^w", "--trace"});
  CHECK(r.code == 0);
  std::istringstream lines(r.out);
  std::string line;
  int improving = 0;
  while (std::getline(lines, line))
    if (line.find(": improves -> ") != std::string::npos) ++improving;
  CHECK(improving == 2);

  r = run({"rewrite", "improve", "--pga", "a;!"});
  CHECK(r.out == "note: no improvement found\na;!\n");
  CHECK(r.code == 0);

  r = run({"rewrite", "unroll", "--pga", "(a)^w", "--trace"});
  CHECK(r.out == "unroll at cycle[0]: equal -> (a;a)^w\n(a;a)^w\n");
  CHECK(run({"rewrite", "unroll", "--pga", "a;!"}).code == 2);
  CHECK(run({"rewrite", "no-jump-to-term", "--pga", "#2;a;!"}).out == "!;a;!\n");
  CHECK(run({"rewrite", "improve", "--steps", "0", "--pga", "a;!"}).code == 2);
}

TEST_CASE("cli codegen") {
  Run r = run({"codegen", "--thread-file", temp_file("ass.thread", "P = a ? T : T\nT = S\n")});
  CHECK(r.out == "+a;#2;#1;!;!;!\n");
  CHECK(r.code == 0);
  r = run({"codegen", "--thread", "P = D"});
  CHECK(r.out == "#0;#0;#0\n");
  r = run({"codegen", "--thread", "P = sigma(Q); Q = a . P"});
  CHECK(r.code == 2);
  CHECK(r.err.find("apply functional abstraction first") != std::string::npos);
  r = run({"codegen", "--fa", "--thread", "P = sigma(Q); Q = a . P"});
  CHECK(r.code == 0);
  CHECK(r.out == "(+a;#2;#1)^w\n");
}

TEST_CASE("cli search") {
  const std::string file = temp_file("xyz2.thread", kXyz);
  Run r = run({"search", "--thread-file", file, "--max-prefix", "6", "--max-cycle", "0",
               "--alphabet", "a,b,c", "--pareto"});
  CHECK(r.code == 0);
  CHECK(r.out.find("+a;#3;c;!;b;!\n") != std::string::npos);
  CHECK(r.out.find("-a;#3;b;!;c;!\n") != std::string::npos);

  r = run({"search", "--thread", "P = a . T; T = S", "--max-prefix", "2", "--max-cycle", "0",
           "--alphabet", "a,b,c", "--pareto"});
  CHECK(r.out == "a;!\n");

  r = run({"search", "--thread", "P = a . T; T = S", "--max-prefix", "0", "--max-cycle", "0",
           "--alphabet", "a"});
  CHECK(r.code == 2);
}

TEST_CASE("cli usage errors and determinism") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"--help"}).code == 0);
  const std::vector<std::string> args{"compare", "--pga", "(+a;#6;-b;!;+b;#4;!)^w", "--pga",
                                      "(+a;#4;+b;#4;!)^w", "--json"};
  CHECK(run(args).out == run(args).out);
}
