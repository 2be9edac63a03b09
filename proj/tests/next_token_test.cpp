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

#include <random>

#include <doctest.h>

#include "suite.hpp"
#include "wcfg/oracle.hpp"
#include "wcfg/session.hpp"

using namespace wcfg;
using namespace wcfg_tests;

TEST_SUITE("next-token") {
  TEST_CASE("pinned vectors on G1 and G2") {
    ParserSession<RealSemiring> s1(g1());
    std::vector<std::string> empty, a = {"a"}, aa = {"a", "a"};
    auto v0 = next_token_cky(s1, empty);
    REQUIRE(v0.weights.size() == 1);
    CHECK(v0.weights.at("a") == doctest::Approx(1.0));
    CHECK(!v0.eos_weight.has_value());

    auto v1 = next_token_cky(s1, a);
    CHECK(v1.weights.at("a") == doctest::Approx(0.3));

    // lambda("a a a") = 1 - 0.7 - 0.147 = 0.153.
    auto v2 = next_token_earley(s1, aa);
    CHECK(v2.weights.at("a") == doctest::Approx(0.153));
    std::vector<std::string> aaa = {"a", "a", "a"};
    CHECK(std::abs(v2.weights.at("a") - oracle_prefix_weight(g1(), aaa, 30)) <= 1e-6);

    ParserSession<RealSemiring> s2(g2());
    auto w0 = next_token_cky(s2, empty);
    CHECK(w0.weights.at("a") == doctest::Approx(0.6));
    CHECK(w0.weights.at("b") == doctest::Approx(0.4));

    auto w1 = next_token_earley(s2, a);
    CHECK(w1.weights.at("a") == doctest::Approx(0.0));
    CHECK(w1.weights.at("b") == doctest::Approx(0.6));

    std::vector<std::string> b = {"b"};
    auto w2 = next_token_earley(s2, b);
    CHECK(w2.weights.at("a") == doctest::Approx(0.0));
    CHECK(w2.weights.at("b") == doctest::Approx(0.0));
  }

  TEST_CASE("eos component carries the string weight") {
    ParserSession<RealSemiring> s(g1());
    std::vector<std::string> a = {"a"};
    auto v = s.next_token(a, Backend::kCky, /*with_eos=*/true);
    REQUIRE(v.eos_weight.has_value());
    CHECK(*v.eos_weight == doctest::Approx(0.7));  // w("a")
    CHECK(v.weights.at("a") == doctest::Approx(0.3));
    CHECK(v.weights.count(kEosToken) == 0);
  }

  TEST_CASE("conditional distributions") {
    ParserSession<RealSemiring> s1(g1());
    std::vector<std::string> a = {"a"};
    auto d1 = conditional_distribution(s1, a);
    CHECK(d1.probs.at("a") == doctest::Approx(0.3));
    CHECK(d1.probs.at(kEosToken) == doctest::Approx(0.7));

    ParserSession<RealSemiring> s2(g2());
    std::vector<std::string> empty;
    auto d2 = conditional_distribution(s2, empty, Backend::kEarley);
    CHECK(d2.probs.at("a") == doctest::Approx(0.6));
    CHECK(d2.probs.at("b") == doctest::Approx(0.4));
    CHECK(d2.probs.at(kEosToken) == doctest::Approx(0.0));

    auto d3 = conditional_distribution(s2, a);
    CHECK(d3.probs.at("b") == doctest::Approx(1.0));
    CHECK(d3.probs.at("a") == doctest::Approx(0.0));
    CHECK(d3.probs.at(kEosToken) == doctest::Approx(0.0));

    std::vector<std::string> ba = {"b", "a"};
    CHECK_THROWS_AS(conditional_distribution(s2, ba), ZeroPrefixMass);
  }

  TEST_CASE("AD equals the naive per-symbol baseline") {
    SuiteConfig cfg;
    cfg.count = 20;
    cfg.seed = 1234;
    auto strings = short_strings(3);
    for (auto& g : random_suite(cfg)) {
      ParserSession<RealSemiring> s(g);
      for (const auto& x : strings) {
        auto vc = next_token_cky(s, x);
        auto ve = next_token_earley(s, x);
        for (auto t : g.terminal_ids()) {
          auto ext = x;
          ext.push_back(g.name(t));
          double naive = s.prefix_parse(ext, Backend::kCky);
          CHECK(std::abs(vc.weights.at(g.name(t)) - naive) <= 1e-8);
          CHECK(std::abs(ve.weights.at(g.name(t)) - naive) <= 1e-8);
        }
      }
    }
  }

  TEST_CASE("backward sweep costs at most 4x the forward lattice pass") {
    RealSemiring sr;
    ParserSession<RealSemiring> s(ambiguous_grammar());
    auto theta = ones_parameters(ambiguous_grammar());
    auto g = s.cnf_prefix();
    auto dense = [&] {
      std::vector<double> d(static_cast<size_t>(g->grammar.num_symbols()), 0.0);
      for (auto t : g->grammar.terminal_ids()) d[static_cast<size_t>(t)] = 1.0;
      return d;
    }();
    auto eg = s.earley_prefix();

    for (int n : {0, 2, 5, 9}) {
      std::vector<std::string> x(static_cast<size_t>(n), "a");

      auto state = incr_cky(g, sr, x);
      OpCounter fwd, bwd;
      (void)cky_lattice_value(*g, Counting<RealSemiring>{sr, &fwd}, state, dense);
      (void)cky_next_token_weights(*g, Counting<RealSemiring>{sr, &bwd}, state);
      CHECK(bwd.total() <= 4 * fwd.total());

      auto estate = earley(eg, sr, x);
      std::vector<double> edense(static_cast<size_t>(eg->grammar.num_symbols()), 0.0);
      for (auto t : eg->grammar.terminal_ids()) edense[static_cast<size_t>(t)] = 1.0;
      OpCounter efwd, ebwd;
      (void)earley_lattice_value(*eg, Counting<RealSemiring>{sr, &efwd}, estate, edense);
      (void)earley_next_token_weights(*eg, Counting<RealSemiring>{sr, &ebwd}, estate);
      CHECK(ebwd.total() <= 4 * efwd.total());
    }
  }

  TEST_CASE("finite differences of the aggregation recover the gradient") {
    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> dist(0.5, 1.5);
    auto g = g2();
    ParserSession<RealSemiring> s(g);
    const double h = 1e-3;
    for (const auto& x : short_strings(2)) {
      ParameterVector<RealSemiring> theta;
      for (auto t : g.terminal_ids()) theta.values[g.name(t)] = dist(rng);
      auto vec = next_token_cky(s, x);
      for (auto t : g.terminal_ids()) {
        auto up = theta, down = theta;
        up.values[g.name(t)] += h;
        down.values[g.name(t)] -= h;
        double fd = (s.lattice_value(x, up, Backend::kCky) -
                     s.lattice_value(x, down, Backend::kCky)) /
                    (2 * h);
        CHECK(std::abs(fd - vec.weights.at(g.name(t))) <= 1e-5);
      }
    }
  }

  TEST_CASE("factorization and mass conservation on tight PCFGs") {
    for (auto& g : random_pcfg_suite(5)) {
      ParserSession<RealSemiring> s(g);
      for (const auto& x : short_strings(4)) {
        double w = s.parse(x, Backend::kCky);
        if (w <= 1e-12) continue;
        double lam = s.prefix_parse(x, Backend::kCky);
        auto vec = s.next_token(x, Backend::kCky, /*with_eos=*/true);
        double mass = *vec.eos_weight;
        for (const auto& [tok, jw] : vec.weights) mass += jw;
        CHECK(std::abs(mass - lam) <= 1e-7);

        // Chain rule: product of conditionals reproduces the string weight.
        double chain = 1.0;
        for (size_t k = 0; k < x.size(); ++k) {
          std::vector<std::string> prefix(x.begin(), x.begin() + static_cast<std::int64_t>(k));
          auto dist_k = s.conditional(prefix, Backend::kCky);
          chain *= dist_k.probs.at(x[k]);
        }
        chain *= s.conditional(x, Backend::kCky).probs.at(kEosToken);
        CHECK(std::abs(chain - w) <= 1e-7);
      }
    }
  }

  TEST_CASE("boolean next-token marks exactly the viable continuations") {
    ParserSession<BooleanSemiring> s(g3());
    std::vector<std::string> open = {"("};
    auto v = s.next_token(open, Backend::kEarley);
    CHECK(v.weights.at("(") == true);
    CHECK(v.weights.at(")") == true);
    std::vector<std::string> closed = {"(", ")"};
    auto v2 = s.next_token(closed, Backend::kCky);
    CHECK(v2.weights.at("(") == false);
    CHECK(v2.weights.at(")") == false);
  }
}
