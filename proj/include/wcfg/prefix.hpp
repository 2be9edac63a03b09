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

#ifndef WCFG_PREFIX_HPP_
#define WCFG_PREFIX_HPP_

#include <string>
#include <unordered_map>
#include <vector>

#include "wcfg/automata.hpp"
#include "wcfg/grammar.hpp"
#include "wcfg/totals.hpp"
#include "wcfg/transforms.hpp"

namespace wcfg {

inline constexpr const char* kEosToken = "<EOS>";

/// The prefix grammar of G together with the prime-symbol map and the totals
/// it was built from. The grammar's weighted language is the prefix language
/// of G.
template <Semiring S>
struct PrefixGrammar {
  WeightedGrammar<S> grammar;
  std::unordered_map<std::string, std::string> prime_map;  // identity on terminals
  TotalWeights<S> totals_used;
};

/// Builds the prefix grammar: keeps every original rule, adds the prefix
/// start with its exit rule weighted by Z(start), and for each rule and each
/// border position k adds the prime rule whose tail is summarized by totals.
/// Prime rules with weight exactly zero are dropped.
template <Semiring S>
PrefixGrammar<S> prefix_grammar(const WeightedGrammar<S>& g, const TotalWeights<S>& totals) {
  if (!totals.converged) {
    throw TotalsNotConverged("prefix construction requires converged total weights");
  }
  const S& sr = g.semiring();

  std::unordered_map<std::string, std::string> prime_map;
  for (auto t : g.terminal_ids()) prime_map[g.name(t)] = g.name(t);
  for (auto nt : g.nonterminal_ids()) {
    std::string prime = g.name(nt) + "'";
    if (g.symbols().contains(prime)) {
      throw SymbolCollision("prime symbol '" + prime + "' collides with a grammar symbol");
    }
    prime_map[g.name(nt)] = prime;
  }
  std::string pre_start = g.name(g.start()) + "<";
  if (g.symbols().contains(pre_start)) {
    throw SymbolCollision("prefix start symbol '" + pre_start + "' collides with a grammar symbol");
  }

  typename WeightedGrammar<S>::Builder b(sr);
  b.set_start(pre_start);

  for (const auto& r : g.rules()) {
    std::vector<std::string> rhs_names;
    for (auto s : r.rhs) rhs_names.push_back(g.name(s));
    b.rule(g.name(r.lhs), rhs_names, r.weight);
  }

  b.rule(pre_start, {prime_map[g.name(g.start())]}, sr.one());
  b.rule(pre_start, {}, totals[g.start()]);

  for (const auto& r : g.rules()) {
    const size_t arity = r.rhs.size();
    for (size_t k = 0; k < arity; ++k) {
      typename S::Value w = r.weight;
      for (size_t t = k + 1; t < arity; ++t) w = sr.mul(w, totals[r.rhs[t]]);
      if (sr.is_zero(w)) continue;  // zero prime rules are dead weight
      std::vector<std::string> rhs_names;
      for (size_t t = 0; t < k; ++t) rhs_names.push_back(g.name(r.rhs[t]));
      rhs_names.push_back(prime_map[g.name(r.rhs[k])]);
      b.rule(prime_map[g.name(r.lhs)], rhs_names, w);
    }
  }

  return PrefixGrammar<S>{b.build(), std::move(prime_map), totals};
}

template <Semiring S>
PrefixGrammar<S> prefix_grammar(const WeightedGrammar<S>& g, const TotalsOptions& opts = {}) {
  return prefix_grammar(g, total_weights(g, g.semiring(), opts));
}

/// The two-state prefix transducer: q_copy relays symbols, q_erase consumes
/// the suffix; realizes the indicator of the prefix relation.
template <Semiring S>
WeightedTransducer<S> prefix_transducer(const std::vector<std::string>& alphabet, const S& sr = {}) {
  if (alphabet.empty()) throw Error("prefix transducer needs a non-empty alphabet");
  WeightedTransducer<S> t;
  t.sr = sr;
  t.num_states = 2;  // 0 = copy, 1 = erase
  t.initial = {sr.one(), sr.one()};
  t.final = {sr.zero(), sr.one()};
  for (const auto& sym : alphabet) {
    t.arcs.push_back({0, sym, sym, sr.one(), 0});
    t.arcs.push_back({0, sym, sym, sr.one(), 1});
    t.arcs.push_back({1, sym, "", sr.one(), 1});
  }
  return t;
}

/// Composition-based prefix grammar over triple-indexed nonterminals
/// [s,xi,s'] with the hard-coded prefix-transducer states (copy, erase);
/// [erase,.,copy] nonterminals are omitted and dead rules eliminated.
/// The construction itself needs no totals; the totals argument is accepted
/// for signature parity with the direct construction.
template <Semiring S>
WeightedGrammar<S> compose_prefix(const WeightedGrammar<S>& g,
                                  const TotalWeights<S>* /*totals*/ = nullptr) {
  const S& sr = g.semiring();
  auto tri = [&](char s1, std::int32_t sym, char s2) {
    return std::string("[") + s1 + "," + g.name(sym) + "," + s2 + "]";
  };
  std::string pre_start = g.name(g.start()) + "<";

  typename WeightedGrammar<S>::Builder b(sr);
  b.set_start(pre_start);

  b.rule(pre_start, {tri('c', g.start(), 'e')}, sr.one());
  b.rule(pre_start, {tri('e', g.start(), 'e')}, sr.one());

  for (const auto& r : g.rules()) {
    const size_t arity = r.rhs.size();
    std::vector<std::string> cc, ee;
    for (auto s : r.rhs) {
      cc.push_back(tri('c', s, 'c'));
      ee.push_back(tri('e', s, 'e'));
    }
    b.rule(tri('c', r.lhs, 'c'), cc, r.weight);
    b.rule(tri('e', r.lhs, 'e'), ee, r.weight);
    for (size_t k = 0; k < arity; ++k) {
      std::vector<std::string> rhs;
      for (size_t t = 0; t < k; ++t) rhs.push_back(cc[t]);
      rhs.push_back(tri('c', r.rhs[k], 'e'));
      for (size_t t = k + 1; t < arity; ++t) rhs.push_back(ee[t]);
      b.rule(tri('c', r.lhs, 'e'), rhs, r.weight);
    }
  }
  for (auto t : g.terminal_ids()) {
    b.rule(tri('c', t, 'c'), {g.name(t)}, sr.one());
    b.rule(tri('c', t, 'e'), {g.name(t)}, sr.one());
    b.rule(tri('e', t, 'e'), {}, sr.one());
  }

  return eliminate_dead_rules(b.build());
}

/// Appends a distinguished EOS terminal: fresh start S$ with S$ -> S <EOS>,
/// so the augmented grammar weighs x<EOS> exactly as G weighs x.
template <Semiring S>
WeightedGrammar<S> eos_augment(const WeightedGrammar<S>& g, const std::string& eos = kEosToken) {
  if (g.symbols().contains(eos)) {
    throw EosCollision("EOS token '" + eos + "' collides with a grammar symbol");
  }
  const S& sr = g.semiring();
  NameAllocator names(g.symbols());
  std::string fresh_start = names.fresh(g.name(g.start()) + "$");

  typename WeightedGrammar<S>::Builder b(sr);
  b.set_start(fresh_start);
  b.rule(fresh_start, {g.name(g.start()), eos}, sr.one());
  for (const auto& r : g.rules()) {
    std::vector<std::string> rhs_names;
    for (auto s : r.rhs) rhs_names.push_back(g.name(s));
    b.rule(g.name(r.lhs), rhs_names, r.weight);
  }
  return b.build();
}

}  // namespace wcfg

#endif  // WCFG_PREFIX_HPP_
