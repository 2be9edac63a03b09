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

#ifndef WCFG_GRAMMAR_HPP_
#define WCFG_GRAMMAR_HPP_

#include <algorithm>
#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wcfg/errors.hpp"
#include "wcfg/semiring.hpp"
#include "wcfg/symbol_table.hpp"

namespace wcfg {

struct GrammarStats {
  std::int64_t size = 0;  // sum over rules of 1 + arity
  std::int64_t rule_count = 0;
  std::int64_t nonterminal_count = 0;
  std::int64_t terminal_count = 0;
};

/// A weighted context-free grammar over a commutative semiring S.
///
/// Immutable after construction and safe to share across threads. Symbols
/// are interned to dense ids in lexicographic name order and rules are kept
/// sorted by (lhs, rhs) with duplicates consolidated (weights added), so two
/// grammars built from the same rule multiset are representation-identical.
template <Semiring S>
class WeightedGrammar {
  static_assert(std::same_as<typename S::Base, S>, "grammars are typed on a plain semiring");

 public:
  using Value = typename S::Value;

  struct Rule {
    std::int32_t lhs;
    std::vector<std::int32_t> rhs;
    Value weight;

    std::int64_t arity() const { return static_cast<std::int64_t>(rhs.size()); }
  };

  class Builder {
   public:
    explicit Builder(S sr = {}) : sr_(sr) {}

    /// Adds a rule by symbol names. The first rule's LHS becomes the start
    /// symbol unless set_start is called.
    void rule(std::string_view lhs, const std::vector<std::string>& rhs, Value weight) {
      Rule r;
      r.lhs = symbols_.intern(lhs);
      r.rhs.reserve(rhs.size());
      for (const auto& tok : rhs) r.rhs.push_back(symbols_.intern(tok));
      r.weight = weight;
      if (!start_.has_value()) start_ = r.lhs;
      rules_.push_back(std::move(r));
    }

    void set_start(std::string_view name) { start_ = symbols_.intern(name); }

    bool has_start() const { return start_.has_value(); }

    WeightedGrammar build() const {
      if (!start_.has_value()) throw Error("grammar has no start symbol");
      return WeightedGrammar(symbols_, rules_, *start_, sr_);
    }

   private:
    S sr_;
    SymbolTable symbols_;
    std::vector<Rule> rules_;
    std::optional<std::int32_t> start_;
  };

  const SymbolTable& symbols() const { return symbols_; }
  const std::string& name(std::int32_t id) const { return symbols_.name(id); }
  std::int32_t num_symbols() const { return symbols_.size(); }
  std::int32_t start() const { return start_; }
  std::span<const Rule> rules() const { return rules_; }
  const S& semiring() const { return sr_; }

  bool is_nonterminal(std::int32_t id) const { return is_nonterminal_[static_cast<size_t>(id)]; }
  bool is_terminal(std::int32_t id) const { return !is_nonterminal(id); }

  const std::vector<std::int32_t>& nonterminal_ids() const { return nonterminals_; }
  const std::vector<std::int32_t>& terminal_ids() const { return terminals_; }

  std::int64_t size() const {
    std::int64_t total = 0;
    for (const auto& r : rules_) total += 1 + r.arity();
    return total;
  }

  std::int64_t max_arity() const {
    std::int64_t m = 0;
    for (const auto& r : rules_) m = std::max(m, r.arity());
    return m;
  }

 private:
  WeightedGrammar(const SymbolTable& raw_symbols, const std::vector<Rule>& raw_rules,
                  std::int32_t raw_start, S sr)
      : sr_(sr) {
    // Canonical renumbering: symbols in lexicographic name order. Only
    // symbols that occur in a rule (or as start) survive.
    std::vector<bool> used(static_cast<size_t>(raw_symbols.size()), false);
    used[static_cast<size_t>(raw_start)] = true;
    for (const auto& r : raw_rules) {
      used[static_cast<size_t>(r.lhs)] = true;
      for (auto s : r.rhs) used[static_cast<size_t>(s)] = true;
    }
    std::vector<std::string> names;
    for (std::int32_t id = 0; id < raw_symbols.size(); ++id) {
      if (used[static_cast<size_t>(id)]) names.push_back(raw_symbols.name(id));
    }
    std::sort(names.begin(), names.end());
    for (const auto& n : names) symbols_.intern(n);

    auto remap = [&](std::int32_t old_id) { return *symbols_.find(raw_symbols.name(old_id)); };

    rules_.reserve(raw_rules.size());
    for (const auto& r : raw_rules) {
      Rule nr;
      nr.lhs = remap(r.lhs);
      nr.rhs.reserve(r.rhs.size());
      for (auto s : r.rhs) nr.rhs.push_back(remap(s));
      nr.weight = r.weight;
      rules_.push_back(std::move(nr));
    }
    start_ = remap(raw_start);

    std::stable_sort(rules_.begin(), rules_.end(), [](const Rule& a, const Rule& b) {
      if (a.lhs != b.lhs) return a.lhs < b.lhs;
      return a.rhs < b.rhs;
    });

    // Consolidate duplicate (lhs, rhs) rules by adding their weights.
    std::vector<Rule> merged;
    for (auto& r : rules_) {
      if (!merged.empty() && merged.back().lhs == r.lhs && merged.back().rhs == r.rhs) {
        merged.back().weight = sr_.add(merged.back().weight, r.weight);
      } else {
        merged.push_back(std::move(r));
      }
    }
    rules_ = std::move(merged);

    // A symbol is a nonterminal iff it appears on some rule's LHS; the start
    // symbol is a nonterminal even in the degenerate rule-less grammar.
    is_nonterminal_.assign(static_cast<size_t>(symbols_.size()), false);
    for (const auto& r : rules_) is_nonterminal_[static_cast<size_t>(r.lhs)] = true;
    is_nonterminal_[static_cast<size_t>(start_)] = true;
    for (std::int32_t id = 0; id < symbols_.size(); ++id) {
      (is_nonterminal_[static_cast<size_t>(id)] ? nonterminals_ : terminals_).push_back(id);
    }
  }

  S sr_;
  SymbolTable symbols_;
  std::vector<Rule> rules_;
  std::int32_t start_ = 0;
  std::vector<bool> is_nonterminal_;
  std::vector<std::int32_t> nonterminals_;
  std::vector<std::int32_t> terminals_;
};

template <Semiring S>
GrammarStats grammar_stats(const WeightedGrammar<S>& g) {
  GrammarStats st;
  st.size = g.size();
  st.rule_count = static_cast<std::int64_t>(g.rules().size());
  st.nonterminal_count = static_cast<std::int64_t>(g.nonterminal_ids().size());
  st.terminal_count = static_cast<std::int64_t>(g.terminal_ids().size());
  return st;
}

/// A node of a derivation tree. Terminal leaves have rule_index -1; internal
/// nodes (including childless nonterminals from nullary rules) reference the
/// rule connecting them to their children.
struct DerivationTree {
  std::int32_t symbol;
  std::int32_t rule_index = -1;
  std::vector<std::shared_ptr<const DerivationTree>> children;
};

using TreePtr = std::shared_ptr<const DerivationTree>;

inline TreePtr make_leaf(std::int32_t symbol) {
  auto t = std::make_shared<DerivationTree>();
  t->symbol = symbol;
  return t;
}

inline TreePtr make_node(std::int32_t symbol, std::int32_t rule_index,
                         std::vector<TreePtr> children) {
  auto t = std::make_shared<DerivationTree>();
  t->symbol = symbol;
  t->rule_index = rule_index;
  t->children = std::move(children);
  return t;
}

/// Left-to-right concatenation of terminal leaves; childless nonterminals
/// contribute nothing.
template <Semiring S>
std::vector<std::string> derivation_yield_tokens(const WeightedGrammar<S>& g,
                                                 const DerivationTree& t) {
  std::vector<std::string> out;
  auto walk = [&](auto&& self, const DerivationTree& node) -> void {
    if (node.rule_index < 0 && node.children.empty() && g.is_terminal(node.symbol)) {
      out.push_back(g.name(node.symbol));
      return;
    }
    for (const auto& c : node.children) self(self, *c);
  };
  walk(walk, t);
  return out;
}

template <Semiring S>
std::string derivation_yield(const WeightedGrammar<S>& g, const DerivationTree& t) {
  auto toks = derivation_yield_tokens(g, t);
  std::string out;
  for (size_t i = 0; i < toks.size(); ++i) {
    if (i) out += ' ';
    out += toks[i];
  }
  return out;
}

/// Product of applied-rule weights; terminal leaves contribute one.
template <Semiring S>
typename S::Value derivation_weight(const WeightedGrammar<S>& g, const DerivationTree& t) {
  const S& sr = g.semiring();
  auto walk = [&](auto&& self, const DerivationTree& node) -> typename S::Value {
    if (node.rule_index < 0) {
      if (!node.children.empty() || !g.is_terminal(node.symbol)) {
        throw UnknownRule("nonterminal node '" + g.name(node.symbol) + "' has no applied rule");
      }
      return sr.one();
    }
    if (node.rule_index >= static_cast<std::int32_t>(g.rules().size())) {
      throw UnknownRule("rule index out of range");
    }
    const auto& rule = g.rules()[static_cast<size_t>(node.rule_index)];
    if (rule.lhs != node.symbol || rule.rhs.size() != node.children.size()) {
      throw UnknownRule("node does not match its applied rule");
    }
    typename S::Value w = rule.weight;
    for (size_t i = 0; i < node.children.size(); ++i) {
      if (node.children[i]->symbol != rule.rhs[i]) {
        throw UnknownRule("child symbol does not match the applied rule");
      }
      w = sr.mul(w, self(self, *node.children[i]));
    }
    return w;
  };
  return walk(walk, t);
}

}  // namespace wcfg

#endif  // WCFG_GRAMMAR_HPP_
