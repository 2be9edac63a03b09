// Copyright 2026 The wcfg Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <doctest.h>

#include "suite.hpp"

using namespace wcfg_tests;

namespace {

struct CliResult {
  int exit_code;
  std::string out;
};

CliResult run_cli(const std::string& args) {
  std::string cmd = std::string(WCFG_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  size_t got;
  while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) out.append(buf, got);
  int status = pclose(pipe);
  return {WEXITSTATUS(status), out};
}

std::filesystem::path write_temp(const std::string& name, const std::string& content) {
  auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream f(path);
  f << content;
  return path;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("parse prints 12-significant-digit weights") {
    auto g = write_temp("wcfg_cli_g1.txt", kG1Text);
    auto r = run_cli("parse --grammar " + g.string() + " --input \"a a\"");
    CHECK(r.exit_code == 0);
    CHECK(r.out == "0.147\n");

    auto pre = run_cli("prefix --grammar " + g.string() + " --input \"a a\" --backend earley");
    CHECK(pre.exit_code == 0);
    CHECK(pre.out == "0.3\n");
  }

  TEST_CASE("strings files produce one line per string") {
    auto g = write_temp("wcfg_cli_g2.txt", kG2Text);
    auto strings = write_temp("wcfg_cli_strings.txt", "a b\nb\na a\n");
    auto r = run_cli("parse --grammar " + g.string() + " --strings " + strings.string());
    CHECK(r.exit_code == 0);
    CHECK(r.out == "0.6\n0.4\n0\n");
  }

  TEST_CASE("count-ops appends a tab-separated count") {
    auto g = write_temp("wcfg_cli_g1.txt", kG1Text);
    auto r = run_cli("parse --grammar " + g.string() + " --input \"a a\" --count-ops");
    CHECK(r.exit_code == 0);
    REQUIRE(r.out.find('\t') != std::string::npos);
    CHECK(r.out.substr(0, r.out.find('\t')) == "0.147");
    CHECK(std::stoull(r.out.substr(r.out.find('\t') + 1)) > 0);
  }

  TEST_CASE("next-token output is sorted with EOS last") {
    auto g = write_temp("wcfg_cli_g2.txt", kG2Text);
    auto r = run_cli("next-token --grammar " + g.string() + " --input \"\"");
    CHECK(r.exit_code == 0);
    CHECK(r.out == "a\t0.6\nb\t0.4\n");

    auto withe = run_cli("next-token --grammar " + g.string() + " --input \"\" --eos");
    CHECK(withe.exit_code == 0);
    CHECK(withe.out == "a\t0.6\nb\t0.4\n<EOS>\t0\n");
  }

  TEST_CASE("boolean semiring prints 1/0") {
    auto g = write_temp("wcfg_cli_g3.txt", kG3Text);
    auto yes = run_cli("parse --grammar " + g.string() + " --semiring boolean --input \"( )\"");
    CHECK(yes.exit_code == 0);
    CHECK(yes.out == "1\n");
    auto no = run_cli("parse --grammar " + g.string() + " --semiring boolean --input \"( (\"");
    CHECK(no.out == "0\n");
    auto pre = run_cli("prefix --grammar " + g.string() +
                       " --semiring boolean --backend earley --input \"( (\"");
    CHECK(pre.out == "1\n");
  }

  TEST_CASE("transform emits the grammar file format") {
    auto g = write_temp("wcfg_cli_g1.txt", kG1Text);
    auto r = run_cli("transform --grammar " + g.string() + " --pipeline ctf,prefix");
    CHECK(r.exit_code == 0);
    auto reparsed = wcfg::parse_grammar_text<wcfg::RealSemiring>(r.out);
    CHECK(reparsed.size() == 15);
    CHECK(reparsed.name(reparsed.start()) == "S<");

    // Identity pipeline reproduces the canonical serialization.
    auto id = run_cli("transform --grammar " + g.string() + " --pipeline deadrules");
    CHECK(id.out == wcfg::serialize_grammar(g1()));
  }

  TEST_CASE("transform --report writes CSV rows to stderr") {
    auto g = write_temp("wcfg_cli_g1.txt", kG1Text);
    std::string cmd = std::string(WCFG_CLI_PATH) + " transform --grammar " + g.string() +
                      " --pipeline ctf,prefix --report 2>&1 1>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string err;
    char buf[4096];
    size_t got;
    while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) err.append(buf, got);
    pclose(pipe);
    CHECK(err.find("name,input_size") != std::string::npos);
    CHECK(err.find("ctf,5,") != std::string::npos);
    CHECK(err.find("prefix,5,") != std::string::npos);
  }

  TEST_CASE("exit codes: usage 1, input 2, non-convergence 3") {
    auto usage = run_cli("");
    CHECK(usage.exit_code == 1);

    auto missing = run_cli("parse --grammar /nonexistent.txt --input \"a\"");
    CHECK(missing.exit_code == 2);

    auto bad = write_temp("wcfg_cli_bad.txt", "x -> y\n");
    auto syntax = run_cli("parse --grammar " + bad.string() + " --input \"a\"");
    CHECK(syntax.exit_code == 2);

    auto divergent = write_temp("wcfg_cli_div.txt", "1.0: S -> S S\n1.0: S -> a\n");
    auto diverge = run_cli("prefix --grammar " + divergent.string() + " --input \"a\"");
    CHECK(diverge.exit_code == 3);
  }

  TEST_CASE("bench CSV shape") {
    auto g = write_temp("wcfg_cli_g1.txt", kG1Text);
    auto strings = write_temp("wcfg_cli_bench.txt", "a a a a\n");
    auto r = run_cli("bench --grammar " + g.string() + " --strings " + strings.string() +
                     " --algo parse --repeats 1 --count-ops --seed 7");
    CHECK(r.exit_code == 0);
    CHECK(r.out.rfind("n,algo,backend,seconds,ops\n", 0) == 0);
    int data_rows = 0;
    std::istringstream lines(r.out);
    std::string line;
    std::getline(lines, line);
    while (std::getline(lines, line)) {
      if (!line.empty() && line[0] != '#') ++data_rows;
    }
    CHECK(data_rows == 5);
    CHECK(r.out.find("# fit a=") != std::string::npos);
  }

  TEST_CASE("hidden oracle subcommand") {
    auto g = write_temp("wcfg_cli_g1.txt", kG1Text);
    auto r = run_cli("oracle --grammar " + g.string() + " --input \"a a a\" --max-height 6");
    CHECK(r.exit_code == 0);
    CHECK(r.out == "0.06174\n");
    auto p = run_cli("oracle --grammar " + g.string() +
                     " --input \"a\" --max-height 25 --prefix-weight");
    CHECK(p.exit_code == 0);
    CHECK(p.out.substr(0, 5) == "0.999");
  }

  TEST_CASE("round-trip: emitted prefix grammar reproduces in-process weights") {
    auto g = write_temp("wcfg_cli_g1.txt", kG1Text);
    auto emitted = run_cli("transform --grammar " + g.string() + " --pipeline ctf,prefix");
    REQUIRE(emitted.exit_code == 0);
    auto pg = write_temp("wcfg_cli_g1_prefix.txt", emitted.out);

    // Plain parsing with the emitted grammar is prefix parsing of G1.
    auto from_file = run_cli("parse --grammar " + pg.string() + " --input \"a a\"");
    wcfg::ParserSession<wcfg::RealSemiring> session(g1());
    std::vector<std::string> aa = {"a", "a"};
    auto in_process =
        wcfg::format_significant(session.prefix_parse(aa, wcfg::Backend::kCky), 12) + "\n";
    CHECK(from_file.out == in_process);
  }
}
