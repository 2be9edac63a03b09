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

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "wcfg/bench.hpp"
#include "wcfg/grammar_text.hpp"
#include "wcfg/oracle.hpp"
#include "wcfg/session.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitNonConvergence = 3;

struct Options {
  std::string command;
  std::string grammar_path;
  std::string semiring = "real";
  std::string backend = "cky";
  std::string input;
  bool has_input = false;
  std::string strings_path;
  bool eos = false;
  bool report = false;
  bool count_ops = false;
  std::uint64_t seed = 0;
  std::string pipeline;
  std::string algo = "parse";
  int repeats = 3;
  bool parallel = false;
  int max_height = 25;
  bool prefix_mode = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw wcfg::Error("cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

std::vector<std::vector<std::string>> load_inputs(const Options& opts) {
  std::vector<std::vector<std::string>> inputs;
  if (opts.has_input) {
    inputs.push_back(tokenize(opts.input));
    return inputs;
  }
  if (opts.strings_path.empty()) {
    throw wcfg::Error("provide --input or --strings");
  }
  std::istringstream in(read_file(opts.strings_path));
  std::string line;
  while (std::getline(in, line)) {
    auto toks = tokenize(line);
    if (!toks.empty()) inputs.push_back(std::move(toks));
  }
  return inputs;
}

template <wcfg::Semiring S>
std::string weight12(const S& sr, typename S::Value v) {
  return wcfg::format_significant(sr.to_real(v), 12);
}

void print_report_header(std::ostream& out) {
  out << "name,input_size,input_rules,input_nonterminals,input_terminals,"
         "output_size,output_rules,output_nonterminals,output_terminals,bound\n";
}

void print_report_row(std::ostream& out, const wcfg::TransformReport& rep) {
  out << rep.name << ',' << rep.input_stats.size << ',' << rep.input_stats.rule_count << ','
      << rep.input_stats.nonterminal_count << ',' << rep.input_stats.terminal_count << ','
      << rep.output_stats.size << ',' << rep.output_stats.rule_count << ','
      << rep.output_stats.nonterminal_count << ',' << rep.output_stats.terminal_count << ','
      << rep.bound << '\n';
}

template <wcfg::Semiring S>
int run_transform(const wcfg::WeightedGrammar<S>& input, const Options& opts) {
  using G = wcfg::WeightedGrammar<S>;
  std::vector<std::string> steps;
  {
    std::istringstream ss(opts.pipeline);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) steps.push_back(item);
    }
  }
  if (steps.empty()) throw wcfg::Error("transform needs --pipeline with at least one step");

  if (opts.report) print_report_header(std::cerr);
  G current = input;
  for (const auto& step : steps) {
    G next = [&]() -> G {
      if (step == "deadrules") return wcfg::eliminate_dead_rules(current);
      if (step == "ctf") return wcfg::ensure_ctf(current);
      if (step == "nullary") return wcfg::ensure_nullary_free(current);
      if (step == "unary") return wcfg::ensure_unary_free(current);
      if (step == "unarycycle") return wcfg::ensure_unary_cycle_free(current);
      if (step == "termsep") return wcfg::ensure_terminal_sep(current);
      if (step == "cnf") return wcfg::ensure_cnf(current);
      if (step == "prefix") return wcfg::prefix_grammar(current).grammar;
      if (step == "eos") return wcfg::eos_augment(current);
      throw wcfg::Error("unknown pipeline step '" + step + "'");
    }();
    if (opts.report) print_report_row(std::cerr, wcfg::make_report(step, current, next));
    current = std::move(next);
  }
  std::cout << wcfg::serialize_grammar(current);
  return kExitOk;
}

template <wcfg::Semiring S>
int run_with_semiring(const Options& opts) {
  S sr{};
  auto grammar = wcfg::parse_grammar_text<S>(read_file(opts.grammar_path), sr);

  if (opts.command == "transform") return run_transform(grammar, opts);

  if (opts.command == "oracle") {
    auto tokens = tokenize(opts.input);
    auto w = opts.prefix_mode ? wcfg::oracle_prefix_weight(grammar, tokens, opts.max_height)
                              : wcfg::oracle_weight(grammar, tokens, opts.max_height);
    std::cout << weight12(sr, w) << '\n';
    return kExitOk;
  }

  wcfg::Backend backend = wcfg::backend_from_string(opts.backend);

  if (opts.command == "parse" || opts.command == "prefix") {
    auto base = opts.eos ? wcfg::eos_augment(grammar) : grammar;
    wcfg::ParserSession<S> session(std::move(base));
    for (const auto& tokens : load_inputs(opts)) {
      wcfg::OpCounter counter;
      wcfg::OpCounter* ops = opts.count_ops ? &counter : nullptr;
      auto w = opts.command == "parse" ? session.parse(tokens, backend, ops)
                                       : session.prefix_parse(tokens, backend, ops);
      std::cout << weight12(sr, w);
      if (opts.count_ops) std::cout << '\t' << counter.total();
      std::cout << '\n';
    }
    return kExitOk;
  }

  if (opts.command == "next-token") {
    if (!opts.has_input) throw wcfg::Error("next-token needs --input");
    wcfg::ParserSession<S> session(std::move(grammar));
    auto tokens = tokenize(opts.input);
    wcfg::OpCounter counter;
    wcfg::OpCounter* ops = opts.count_ops ? &counter : nullptr;
    auto vec = session.next_token(tokens, backend, opts.eos, ops);
    for (const auto& [tok, w] : vec.weights) {
      std::cout << tok << '\t' << weight12(sr, w) << '\n';
    }
    if (vec.eos_weight.has_value()) {
      std::cout << wcfg::kEosToken << '\t' << weight12(sr, *vec.eos_weight) << '\n';
    }
    if (opts.count_ops) std::cerr << "# ops " << counter.total() << '\n';
    return kExitOk;
  }

  if (opts.command == "bench") {
    wcfg::ParserSession<S> session(std::move(grammar));
    wcfg::BenchOptions bopts;
    bopts.algo = opts.algo;
    bopts.backend = backend;
    bopts.repeats = opts.repeats;
    bopts.count_ops = opts.count_ops;
    bopts.seed = opts.seed;
    bopts.threads =
        opts.parallel ? static_cast<int>(std::max(1u, std::thread::hardware_concurrency())) : 1;
    auto records = wcfg::run_bench(session, load_inputs(opts), bopts);
    wcfg::write_bench_csv(std::cout, records);
    return kExitOk;
  }

  throw wcfg::Error("unknown command '" + opts.command + "'");
}

void add_shared_flags(CLI::App* cmd, Options& opts, bool needs_grammar = true) {
  auto* g = cmd->add_option("--grammar", opts.grammar_path, "grammar file");
  if (needs_grammar) g->required();
  cmd->add_option("--semiring", opts.semiring, "weight semiring")
      ->check(CLI::IsMember({"real", "logreal", "boolean"}));
  cmd->add_option("--backend", opts.backend, "parser backend")
      ->check(CLI::IsMember({"cky", "earley"}));
  cmd->add_option("--input", opts.input, "space-separated tokens")
      ->each([&opts](const std::string&) { opts.has_input = true; });
  cmd->add_option("--strings", opts.strings_path, "file with one string per line");
  cmd->add_flag("--eos", opts.eos, "include the <EOS> end-of-string component");
  cmd->add_flag("--report", opts.report, "emit transformation reports (CSV on stderr)");
  cmd->add_flag("--count-ops", opts.count_ops, "count semiring operations");
  cmd->add_option("--seed", opts.seed, "seed for measurement-order shuffling");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weighted CFG toolkit: parsing, prefix parsing, next-token weights"};
  app.require_subcommand(1);
  Options opts;

  auto* parse_cmd = app.add_subcommand("parse", "string weight under the grammar");
  add_shared_flags(parse_cmd, opts);
  auto* prefix_cmd = app.add_subcommand("prefix", "prefix weight via the prefix grammar");
  add_shared_flags(prefix_cmd, opts);
  auto* next_cmd = app.add_subcommand("next-token", "next-token weight vector");
  add_shared_flags(next_cmd, opts);
  auto* transform_cmd = app.add_subcommand("transform", "apply grammar transformations");
  add_shared_flags(transform_cmd, opts);
  transform_cmd->add_option("--pipeline", opts.pipeline,
                            "comma list over deadrules,ctf,nullary,unary,unarycycle,termsep,"
                            "cnf,prefix,eos");
  auto* bench_cmd = app.add_subcommand("bench", "per-prefix runtime measurements (CSV)");
  add_shared_flags(bench_cmd, opts);
  bench_cmd->add_option("--algo", opts.algo, "parse | prefix | next-token")
      ->check(CLI::IsMember({"parse", "prefix", "next-token"}));
  bench_cmd->add_option("--repeats", opts.repeats, "best-of-k repetitions");
  bench_cmd->add_flag("--parallel", opts.parallel, "parallelize across strings");
  auto* oracle_cmd = app.add_subcommand("oracle", "brute-force reference weight");
  oracle_cmd->group("");  // hidden; debugging aid
  add_shared_flags(oracle_cmd, opts);
  oracle_cmd->add_option("--max-height", opts.max_height, "derivation height bound");
  oracle_cmd->add_flag("--prefix-weight", opts.prefix_mode, "prefix weight instead of exact");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  for (auto* cmd : {parse_cmd, prefix_cmd, next_cmd, transform_cmd, bench_cmd, oracle_cmd}) {
    if (cmd->parsed()) opts.command = cmd->get_name();
  }

  try {
    if (opts.semiring == "real") return run_with_semiring<wcfg::RealSemiring>(opts);
    if (opts.semiring == "logreal") return run_with_semiring<wcfg::LogRealSemiring>(opts);
    return run_with_semiring<wcfg::BooleanSemiring>(opts);
  } catch (const wcfg::TotalsNotConverged& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNonConvergence;
  } catch (const wcfg::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
}
