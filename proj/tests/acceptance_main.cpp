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

// Acceptance suite: one line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "suite.hpp"
#include "wcfg/bench.hpp"
#include "wcfg/oracle.hpp"
#include "wcfg/session.hpp"

using namespace wcfg;
using namespace wcfg_tests;

namespace {

int failures = 0;

void report(int number, const std::string& name, bool ok, const std::string& detail) {
  std::printf("%s criterion %2d: %s%s%s\n", ok ? "PASS" : "FAIL", number, name.c_str(),
              detail.empty() ? "" : " — ", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

void criterion(int number, const std::string& name,
               const std::function<bool(std::string&)>& body) {
  std::string detail;
  bool ok = false;
  try {
    ok = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  report(number, name, ok, detail);
}

std::string run_cli(const std::string& args, int* exit_code = nullptr) {
  std::string cmd = std::string(WCFG_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) throw Error("popen failed");
  std::string out;
  char buf[4096];
  size_t got;
  while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) out.append(buf, got);
  int status = pclose(pipe);
  if (exit_code != nullptr) *exit_code = WEXITSTATUS(status);
  return out;
}

struct MaxTracker {
  double value = 0.0;
  void feed(double v) { value = std::max(value, v); }
  std::string text(const char* label) const {
    return std::string(label) + " " + format_significant(value, 3);
  }
};

}  // namespace

int main() {
  const auto strings = short_strings(4);
  RealSemiring sr;

  std::printf("building random suites (seeded)...\n");
  SuiteConfig prefix_cfg;  // 200 grammars, weights <= 0.5
  auto suite = random_suite(prefix_cfg);
  SuiteConfig transform_cfg;
  transform_cfg.max_weight = 0.9;
  transform_cfg.seed = 600613;
  auto transform_suite = random_suite(transform_cfg);

  std::vector<std::unique_ptr<ParserSession<RealSemiring>>> sessions;
  sessions.reserve(suite.size());
  for (auto& g : suite) sessions.push_back(std::make_unique<ParserSession<RealSemiring>>(g));

  // Oracle prefix references at height 25, shared by criteria 1 and 3.
  std::vector<std::vector<double>> oracle_prefix(suite.size());
  for (size_t gi = 0; gi < suite.size(); ++gi) {
    for (const auto& x : strings) {
      oracle_prefix[gi].push_back(oracle_prefix_weight(suite[gi], x, 25));
    }
  }

  criterion(1, "prefix correctness (Prop. 1) on 200 grammars x 31 strings x 2 backends",
            [&](std::string& detail) {
              auto t0 = std::chrono::steady_clock::now();
              MaxTracker dev;
              for (size_t gi = 0; gi < suite.size(); ++gi) {
                for (size_t si = 0; si < strings.size(); ++si) {
                  for (auto b : {Backend::kCky, Backend::kEarley}) {
                    double got = sessions[gi]->prefix_parse(strings[si], b);
                    dev.feed(std::abs(got - oracle_prefix[gi][si]));
                  }
                }
              }
              double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                                .count();
              detail = dev.text("max |dev|") + ", " + format_significant(secs, 3) + " s";
              return dev.value <= 1e-7 && secs < 60.0;
            });

  criterion(2, "prefix grammar size bound (Prop. 2); |G1 prefix| = 15",
            [&](std::string& detail) {
              bool ok = true;
              double worst_ratio = 0.0;
              for (auto& g : suite) {
                auto ctf = ensure_ctf(g);
                auto pg = prefix_grammar(ctf);
                ok = ok && 3 * pg.grammar.size() <= 8 * ctf.size() + 9;
                worst_ratio = std::max(
                    worst_ratio, static_cast<double>(pg.grammar.size()) /
                                     static_cast<double>(std::max<std::int64_t>(1, ctf.size())));
              }
              auto g1_prefix = prefix_grammar(g1());
              ok = ok && g1_prefix.grammar.size() == 15;
              detail = "max size ratio " + format_significant(worst_ratio, 3) + ", |G1 prefix| " +
                       std::to_string(g1_prefix.grammar.size());
              return ok;
            });

  criterion(3, "construction agreement (Def. 1 vs composition) within 1e-9",
            [&](std::string& detail) {
              MaxTracker dev;
              for (size_t gi = 0; gi < suite.size(); ++gi) {
                ParserSession<RealSemiring> composed(compose_prefix(suite[gi]));
                for (size_t si = 0; si < strings.size(); ++si) {
                  double direct = sessions[gi]->prefix_parse(strings[si], Backend::kCky);
                  dev.feed(std::abs(composed.parse(strings[si], Backend::kCky) - direct));
                }
              }
              detail = dev.text("max |dev|");
              return dev.value <= 1e-9;
            });

  criterion(4, "next-token correctness: AD vs naive baseline; pinned G1/G2 vectors",
            [&](std::string& detail) {
              MaxTracker dev;
              for (size_t gi = 0; gi < suite.size(); ++gi) {
                auto& s = *sessions[gi];
                const auto& g = suite[gi];
                for (const auto& x : strings) {
                  auto vc = s.next_token(x, Backend::kCky);
                  auto ve = s.next_token(x, Backend::kEarley);
                  for (auto t : g.terminal_ids()) {
                    auto ext = x;
                    ext.push_back(g.name(t));
                    double naive = s.prefix_parse(ext, Backend::kCky);
                    dev.feed(std::abs(vc.weights.at(g.name(t)) - naive));
                    dev.feed(std::abs(ve.weights.at(g.name(t)) - naive));
                  }
                }
              }
              bool ok = dev.value <= 1e-8;

              ParserSession<RealSemiring> s1(g1()), s2(g2());
              std::vector<std::string> empty, a = {"a"}, b = {"b"}, aa = {"a", "a"};
              auto close = [](double x, double y) { return std::abs(x - y) <= 1e-9; };
              ok = ok && close(s1.next_token(empty, Backend::kCky).weights.at("a"), 1.0);
              ok = ok && close(s1.next_token(a, Backend::kCky).weights.at("a"), 0.3);
              ok = ok && close(s1.next_token(aa, Backend::kEarley).weights.at("a"), 0.153);
              auto w0 = s2.next_token(empty, Backend::kCky);
              ok = ok && close(w0.weights.at("a"), 0.6) && close(w0.weights.at("b"), 0.4);
              auto w1 = s2.next_token(a, Backend::kEarley);
              ok = ok && close(w1.weights.at("a"), 0.0) && close(w1.weights.at("b"), 0.6);
              auto w2 = s2.next_token(b, Backend::kEarley);
              ok = ok && close(w2.weights.at("a"), 0.0) && close(w2.weights.at("b"), 0.0);
              auto d1 = s1.conditional(a, Backend::kCky);
              ok = ok && close(d1.probs.at("a"), 0.3) && close(d1.probs.at(kEosToken), 0.7);
              auto d2 = s2.conditional(empty, Backend::kCky);
              ok = ok && close(d2.probs.at("a"), 0.6) && close(d2.probs.at("b"), 0.4) &&
                   close(d2.probs.at(kEosToken), 0.0);
              auto d3 = s2.conditional(a, Backend::kEarley);
              ok = ok && close(d3.probs.at("b"), 1.0) && close(d3.probs.at("a"), 0.0);
              detail = dev.text("max |AD - naive|");
              return ok;
            });

  criterion(5, "meta-theorem (Thm. 4): backward ops <= 4x forward lattice ops",
            [&](std::string& detail) {
              double worst = 0.0;
              auto check_grammar = [&](ParserSession<RealSemiring>& s,
                                       const std::vector<std::vector<std::string>>& xs) {
                auto cg = s.cnf_prefix();
                auto eg = s.earley_prefix();
                std::vector<double> cdense(static_cast<size_t>(cg->grammar.num_symbols()), 0.0);
                for (auto t : cg->grammar.terminal_ids()) cdense[static_cast<size_t>(t)] = 1.0;
                std::vector<double> edense(static_cast<size_t>(eg->grammar.num_symbols()), 0.0);
                for (auto t : eg->grammar.terminal_ids()) edense[static_cast<size_t>(t)] = 1.0;
                bool ok = true;
                for (const auto& x : xs) {
                  auto state = incr_cky(cg, sr, x);
                  OpCounter fwd, bwd;
                  (void)cky_lattice_value(*cg, Counting<RealSemiring>{sr, &fwd}, state, cdense);
                  (void)cky_next_token_weights(*cg, Counting<RealSemiring>{sr, &bwd}, state);
                  ok = ok && bwd.total() <= 4 * fwd.total();
                  if (fwd.total() > 0) {
                    worst = std::max(worst, static_cast<double>(bwd.total()) /
                                                static_cast<double>(fwd.total()));
                  }
                  auto estate = earley(eg, sr, x);
                  OpCounter efwd, ebwd;
                  (void)earley_lattice_value(*eg, Counting<RealSemiring>{sr, &efwd}, estate,
                                             edense);
                  (void)earley_next_token_weights(*eg, Counting<RealSemiring>{sr, &ebwd}, estate);
                  ok = ok && ebwd.total() <= 4 * efwd.total();
                  if (efwd.total() > 0) {
                    worst = std::max(worst, static_cast<double>(ebwd.total()) /
                                                static_cast<double>(efwd.total()));
                  }
                }
                return ok;
              };

              bool ok = true;
              for (size_t gi = 0; gi < suite.size(); ++gi) {
                ok = ok && check_grammar(*sessions[gi], strings);
              }
              ParserSession<RealSemiring> synth(ambiguous_grammar());
              std::vector<std::vector<std::string>> lengths;
              for (int n : {8, 16, 32, 64}) {
                lengths.push_back(std::vector<std::string>(static_cast<size_t>(n), "a"));
              }
              ok = ok && check_grammar(synth, lengths);
              detail = "max backward/forward ratio " + format_significant(worst, 3);
              return ok;
            });

  criterion(6, "runtime shape (Thm. 3): parse vs prefix exponents within 0.3, ratio drift < 2x",
            [&](std::string& detail) {
              ParserSession<RealSemiring> synth(ambiguous_grammar());
              std::ostringstream note;
              bool ok = true;
              for (auto b : {Backend::kCky, Backend::kEarley}) {
                std::vector<std::pair<double, double>> parse_pts, prefix_pts;
                double min_ratio = 1e300, max_ratio = 0.0;
                for (int n = 4; n <= 64; n += 4) {
                  std::vector<std::string> x(static_cast<size_t>(n), "a");
                  OpCounter pc, qc;
                  (void)synth.parse(x, b, &pc);
                  (void)synth.prefix_parse(x, b, &qc);
                  parse_pts.emplace_back(n, static_cast<double>(pc.total()));
                  prefix_pts.emplace_back(n, static_cast<double>(qc.total()));
                  double ratio = static_cast<double>(qc.total()) / static_cast<double>(pc.total());
                  min_ratio = std::min(min_ratio, ratio);
                  max_ratio = std::max(max_ratio, ratio);
                }
                auto pf = fit_power_law(parse_pts);
                auto qf = fit_power_law(prefix_pts);
                ok = ok && std::abs(pf.b - qf.b) < 0.3 && (max_ratio / min_ratio) < 2.0;
                note << (b == Backend::kCky ? "cky" : "earley") << " b=("
                     << format_significant(pf.b, 3) << "," << format_significant(qf.b, 3)
                     << ") ratio drift " << format_significant(max_ratio / min_ratio, 3) << "; ";
              }
              detail = note.str();
              return ok;
            });

  criterion(7, "transformation bounds and language preservation (App. B.2)",
            [&](std::string& detail) {
              using G = WeightedGrammar<RealSemiring>;
              const std::vector<std::pair<std::string, std::function<G(const G&)>>> transforms = {
                  {"deadrules", [](const G& g) { return eliminate_dead_rules(g); }},
                  {"ctf", [](const G& g) { return ensure_ctf(g); }},
                  {"nullary", [](const G& g) { return ensure_nullary_free(ensure_ctf(g)); }},
                  {"unary", [](const G& g) { return ensure_unary_free(g); }},
                  {"unarycycle", [](const G& g) { return ensure_unary_cycle_free(g); }},
                  {"termsep", [](const G& g) { return ensure_terminal_sep(g); }},
                  {"cnf", [](const G& g) { return ensure_cnf(g); }},
              };
              MaxTracker dev;
              bool bounds_ok = true;
              for (auto& g : transform_suite) {
                std::vector<double> reference;
                for (const auto& x : strings) reference.push_back(oracle_weight(g, x, 25));
                for (const auto& [name, apply] : transforms) {
                  const G input = name == "nullary" ? ensure_ctf(g) : g;
                  G out = apply(g);
                  auto rep = make_report(name, input, out);
                  bounds_ok = bounds_ok && rep.output_stats.size <= rep.bound;
                  ParserSession<RealSemiring> after(out);
                  for (size_t si = 0; si < strings.size(); ++si) {
                    dev.feed(std::abs(after.parse(strings[si], Backend::kCky) - reference[si]));
                  }
                }
              }
              detail = dev.text("max |dev|") + std::string(bounds_ok ? "" : "; bound violated");
              return bounds_ok && dev.value <= 1e-8;
            });

  criterion(8, "totals: G1 = 1, supercritical variant = 3/7, terminals = 1",
            [&](std::string& detail) {
              auto t1 = total_weights(g1(), sr);
              bool ok = t1.converged && std::abs(t1[g1().start()] - 1.0) <= 1e-9;
              auto super = parse_grammar_text<RealSemiring>("0.7: S -> S S\n0.3: S -> a\n");
              auto t2 = total_weights(super, sr);
              ok = ok && t2.converged && std::abs(t2[super.start()] - 3.0 / 7.0) <= 1e-6;
              for (auto& g : suite) {
                auto t = total_weights(g, sr);
                for (auto term : g.terminal_ids()) ok = ok && t[term] == 1.0;
              }
              detail = "Z_G1(S) = " + format_significant(t1[g1().start()], 12) +
                       ", Z_super(S) = " + format_significant(t2[super.start()], 12);
              return ok;
            });

  criterion(9, "factorization (Eq. 2) and conditional mass conservation",
            [&](std::string& detail) {
              auto pcfgs = random_pcfg_suite(30);
              MaxTracker sum_dev, chain_dev;
              for (auto& g : pcfgs) {
                ParserSession<RealSemiring> s(g);
                for (const auto& x : strings) {
                  double lam = s.prefix_parse(x, Backend::kCky);
                  if (lam > 1e-9) {
                    auto dist = s.conditional(x, Backend::kCky);
                    double total = 0.0;
                    for (const auto& [tok, p] : dist.probs) total += p;
                    sum_dev.feed(std::abs(total - 1.0));
                  }
                  double w = s.parse(x, Backend::kCky);
                  if (w > 1e-12) {
                    double chain = 1.0;
                    for (size_t k = 0; k < x.size(); ++k) {
                      std::vector<std::string> prefix(x.begin(),
                                                      x.begin() + static_cast<std::int64_t>(k));
                      chain *= s.conditional(prefix, Backend::kCky).probs.at(x[k]);
                    }
                    chain *= s.conditional(x, Backend::kCky).probs.at(kEosToken);
                    chain_dev.feed(std::abs(chain - w));
                  }
                }
              }
              detail = sum_dev.text("max |sum-1|") + ", " + chain_dev.text("max |chain-w|");
              return sum_dev.value <= 1e-7 && chain_dev.value <= 1e-7;
            });

  criterion(10, "finite-difference gradient check (Eq. 8) on 50 random triples",
            [&](std::string& detail) {
              std::mt19937_64 rng(4242);
              std::uniform_real_distribution<double> theta_dist(0.25, 2.0);
              std::uniform_int_distribution<size_t> gdist(0, suite.size() - 1);
              auto short3 = short_strings(3);
              std::uniform_int_distribution<size_t> xdist(0, short3.size() - 1);
              const double h = 1e-3;
              MaxTracker dev;
              for (int trial = 0; trial < 50; ++trial) {
                size_t gi = gdist(rng);
                const auto& g = suite[gi];
                auto& s = *sessions[gi];
                const auto& x = short3[xdist(rng)];
                std::uniform_int_distribution<size_t> tdist(0, g.terminal_ids().size() - 1);
                auto sigma = g.name(g.terminal_ids()[tdist(rng)]);
                ParameterVector<RealSemiring> theta;
                for (auto t : g.terminal_ids()) theta.values[g.name(t)] = theta_dist(rng);
                auto up = theta, down = theta;
                up.values[sigma] += h;
                down.values[sigma] -= h;
                double fd = (s.lattice_value(x, up, Backend::kCky) -
                             s.lattice_value(x, down, Backend::kCky)) /
                            (2 * h);
                auto vec = s.next_token(x, Backend::kCky);
                dev.feed(std::abs(fd - vec.weights.at(sigma)));
              }
              detail = dev.text("max |fd - J|");
              return dev.value <= 1e-5;
            });

  criterion(11, "CLI round-trip: emitted prefix grammar reproduces in-process weights bit-for-bit",
            [&](std::string& detail) {
              namespace fs = std::filesystem;
              auto dir = fs::temp_directory_path();
              auto gpath = dir / "wcfg_acceptance_g1.txt";
              std::ofstream(gpath) << kG1Text;

              int code = 0;
              auto emitted = run_cli("transform --grammar " + gpath.string() +
                                         " --pipeline ctf,prefix",
                                     &code);
              if (code != 0) {
                detail = "transform exited with " + std::to_string(code);
                return false;
              }
              auto pgpath = dir / "wcfg_acceptance_g1_prefix.txt";
              std::ofstream(pgpath) << emitted;

              ParserSession<RealSemiring> in_process(g1());
              ParserSession<RealSemiring> double_prefix(
                  prefix_grammar(ensure_ctf(g1())).grammar);

              std::vector<std::vector<std::string>> probes = {
                  {}, {"a"}, {"a", "a"}, {"a", "a", "a"}};
              for (const auto& x : probes) {
                std::string input;
                for (size_t i = 0; i < x.size(); ++i) input += (i ? " " : "") + x[i];

                // Ordinary parsing of the emitted grammar = prefix parsing of G1.
                auto from_cli = run_cli("parse --grammar " + pgpath.string() + " --input \"" +
                                            input + "\"",
                                        &code);
                auto expected =
                    format_significant(in_process.prefix_parse(x, Backend::kCky), 12) + "\n";
                if (code != 0 || from_cli != expected) {
                  detail = "parse mismatch on '" + input + "': CLI '" + from_cli + "' vs '" +
                           expected + "'";
                  return false;
                }

                // The prefix subcommand on the emitted grammar matches the
                // in-memory prefix pipeline applied to the same grammar.
                auto prefix_cli = run_cli("prefix --grammar " + pgpath.string() + " --input \"" +
                                              input + "\"",
                                          &code);
                auto expected2 =
                    format_significant(double_prefix.prefix_parse(x, Backend::kCky), 12) + "\n";
                if (code != 0 || prefix_cli != expected2) {
                  detail = "prefix mismatch on '" + input + "': CLI '" + prefix_cli + "' vs '" +
                           expected2 + "'";
                  return false;
                }
              }
              detail = "4 probes, parse and prefix surfaces";
              return true;
            });

  if (failures == 0) {
    std::printf("all 11 acceptance criteria passed\n");
  } else {
    std::printf("%d acceptance criteria FAILED\n", failures);
  }
  return failures;
}
