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

#ifndef WCFG_EARLEY_HPP_
#define WCFG_EARLEY_HPP_

#include <cassert>
#include <map>
#include <memory>
#include <queue>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "wcfg/cky.hpp"
#include "wcfg/grammar.hpp"
#include "wcfg/transforms.hpp"

namespace wcfg {

/// An Earley item <i, X/alpha>: X started at i and is missing the suffix
/// alpha to complete. Suffixes are interned so that rules sharing a tail
/// collapse into one item.
struct EarleyItem {
  std::int32_t origin;
  std::int32_t lhs;
  std::int32_t suffix;  // interned suffix id; 0 = empty
};

inline std::uint64_t earley_key(std::int64_t origin, std::int32_t lhs, std::int32_t suffix) {
  return (static_cast<std::uint64_t>(origin) << 44) |
         (static_cast<std::uint64_t>(static_cast<std::uint32_t>(lhs)) << 22) |
         static_cast<std::uint64_t>(static_cast<std::uint32_t>(suffix));
}

/// Grammar preprocessed for Earley parsing: nullary-free (except a start
/// epsilon rule with the start off every rhs) and unary-cycle-free, with
/// suffix interning, a left-corner closure for Predict pruning, and a
/// unary-topological pop rank so completed items pop after their same-span
/// dependencies.
template <Semiring S>
struct EarleyGrammar {
  using Value = typename S::Value;

  struct LhsRule {
    std::int32_t suffix;
    Value w;
  };

  WeightedGrammar<S> grammar;
  std::int32_t start;
  std::vector<std::vector<std::int32_t>> suffix_syms;  // id -> symbols; id 0 = empty
  std::vector<std::int32_t> suffix_first;              // -1 for the empty suffix
  std::vector<std::int32_t> suffix_rest;
  std::vector<std::vector<LhsRule>> rules_by_lhs;  // indexed by symbol id
  std::vector<int> pop_rank;                       // indexed by symbol id
  std::vector<std::vector<std::int32_t>> left_corner;  // NT id -> predictable NT ids

  explicit EarleyGrammar(WeightedGrammar<S> g) : grammar(std::move(g)), start(grammar.start()) {
    if (!is_nullary_free(grammar)) {
      throw PreconditionViolated("Earley requires a nullary-free grammar");
    }
    if (!has_acyclic_unary_graph(grammar)) {
      throw PreconditionViolated("Earley requires a unary-cycle-free grammar");
    }
    const auto nsym = static_cast<size_t>(grammar.num_symbols());
    if (nsym >= (1u << 22)) throw Error("grammar too large for item packing");

    // Intern every tail of every rhs.
    std::map<std::vector<std::int32_t>, std::int32_t> intern;
    suffix_syms.push_back({});
    suffix_first.push_back(-1);
    suffix_rest.push_back(0);
    intern.emplace(std::vector<std::int32_t>{}, 0);
    auto intern_suffix = [&](auto&& self, std::span<const std::int32_t> tail) -> std::int32_t {
      std::vector<std::int32_t> key(tail.begin(), tail.end());
      auto it = intern.find(key);
      if (it != intern.end()) return it->second;
      std::int32_t rest = self(self, tail.subspan(1));
      auto id = static_cast<std::int32_t>(suffix_syms.size());
      suffix_syms.push_back(key);
      suffix_first.push_back(tail[0]);
      suffix_rest.push_back(rest);
      intern.emplace(std::move(key), id);
      return id;
    };

    rules_by_lhs.resize(nsym);
    for (const auto& r : grammar.rules()) {
      std::int32_t sid = intern_suffix(intern_suffix, std::span<const std::int32_t>(r.rhs));
      rules_by_lhs[static_cast<size_t>(r.lhs)].push_back({sid, r.weight});
    }
    if (suffix_syms.size() >= (1u << 22)) throw Error("too many distinct suffixes");

    // Pop ranks: DFS postorder of the unary-rule DAG, so a unary child
    // always ranks below its parents.
    std::vector<std::vector<std::int32_t>> unary_out(nsym);
    for (const auto& r : grammar.rules()) {
      if (r.rhs.size() == 1 && grammar.is_nonterminal(r.rhs[0])) {
        unary_out[static_cast<size_t>(r.lhs)].push_back(r.rhs[0]);
      }
    }
    pop_rank.assign(nsym, -1);
    int next_rank = 0;
    auto dfs = [&](auto&& self, std::int32_t x) -> void {
      if (pop_rank[static_cast<size_t>(x)] != -1) return;  // ranked or on the stack
      pop_rank[static_cast<size_t>(x)] = -2;
      for (auto y : unary_out[static_cast<size_t>(x)]) self(self, y);
      pop_rank[static_cast<size_t>(x)] = next_rank++;
    };
    for (std::int32_t id = 0; id < grammar.num_symbols(); ++id) dfs(dfs, id);

    // Reflexive-transitive left-corner closure over nonterminals.
    left_corner.resize(nsym);
    std::vector<std::vector<std::int32_t>> lc_edge(nsym);
    for (const auto& r : grammar.rules()) {
      if (!r.rhs.empty() && grammar.is_nonterminal(r.rhs[0])) {
        lc_edge[static_cast<size_t>(r.lhs)].push_back(r.rhs[0]);
      }
    }
    for (auto a : grammar.nonterminal_ids()) {
      std::vector<bool> seen(nsym, false);
      std::vector<std::int32_t> stack{a};
      seen[static_cast<size_t>(a)] = true;
      while (!stack.empty()) {
        auto x = stack.back();
        stack.pop_back();
        for (auto y : lc_edge[static_cast<size_t>(x)]) {
          if (!seen[static_cast<size_t>(y)]) {
            seen[static_cast<size_t>(y)] = true;
            stack.push_back(y);
          }
        }
      }
      auto& out = left_corner[static_cast<size_t>(a)];
      for (std::int32_t id = 0; id < grammar.num_symbols(); ++id) {
        if (seen[static_cast<size_t>(id)] && grammar.is_nonterminal(id)) out.push_back(id);
      }
    }
  }

  std::int32_t token_id(const std::string& tok) const {
    auto id = grammar.symbols().find(tok);
    if (id.has_value() && grammar.is_terminal(*id)) return *id;
    return -1;
  }
};

template <Semiring S>
struct EarleyColumn {
  std::unordered_map<std::uint64_t, typename S::Value> chart;
  std::unordered_map<std::int32_t, std::vector<EarleyItem>> waiting;
};

template <Semiring S>
struct EarleyState {
  using Value = typename S::Value;

  std::shared_ptr<const EarleyGrammar<S>> grammar;
  std::vector<std::string> tokens;
  std::vector<std::int32_t> token_ids;
  std::vector<std::shared_ptr<const EarleyColumn<S>>> columns;

  Value goal(const S& sr) const {
    const auto& chart = columns.back()->chart;
    auto it = chart.find(earley_key(0, grammar->start, 0));
    return it == chart.end() ? sr.zero() : it->second;
  }
};

namespace detail {

struct EarleyQEntry {
  std::int64_t span;
  int rank;
  std::int64_t origin;
  std::int32_t lhs;
  auto operator<=>(const EarleyQEntry&) const = default;
};

using EarleyQueue =
    std::priority_queue<EarleyQEntry, std::vector<EarleyQEntry>, std::greater<EarleyQEntry>>;

}  // namespace detail

/// Incremental Earley (Scan, Attach, Predict per column). Completed items
/// are scheduled once, popped in (span, unary rank) order, and attach reads
/// their weight at pop time. Predict is pruned by the left-corner closure of
/// the symbols currently waited for.
template <Semiring SR>
EarleyState<base_semiring_t<SR>> earley(
    std::shared_ptr<const EarleyGrammar<base_semiring_t<SR>>> g, const SR& sr,
    std::span<const std::string> tokens,
    const EarleyState<base_semiring_t<SR>>* cached = nullptr) {
  using S = base_semiring_t<SR>;
  using V = typename S::Value;

  EarleyState<S> state;
  state.grammar = g;
  state.tokens.assign(tokens.begin(), tokens.end());
  for (const auto& t : state.tokens) state.token_ids.push_back(g->token_id(t));

  if (cached != nullptr) {
    if (cached->grammar.get() != g.get() || cached->tokens.size() > tokens.size()) {
      throw Error("cached Earley state does not match this parse");
    }
    for (size_t i = 0; i < cached->tokens.size(); ++i) {
      if (cached->tokens[i] != state.tokens[i]) {
        throw Error("cached Earley state is not a prefix of the input");
      }
    }
    state.columns = cached->columns;
  }

  for (std::int64_t k = static_cast<std::int64_t>(state.columns.size());
       k <= static_cast<std::int64_t>(tokens.size()); ++k) {
    auto col = std::make_shared<EarleyColumn<S>>();
    detail::EarleyQueue queue;
#ifndef NDEBUG
    std::unordered_set<std::uint64_t> popped;
#endif

    auto update = [&](EarleyItem item, V v) {
      auto key = earley_key(item.origin, item.lhs, item.suffix);
      auto [it, inserted] = col->chart.try_emplace(key, sr.zero());
      if (inserted) {
        if (item.suffix == 0) {
          queue.push({k - item.origin, g->pop_rank[static_cast<size_t>(item.lhs)], item.origin,
                      item.lhs});
        } else {
          col->waiting[g->suffix_first[static_cast<size_t>(item.suffix)]].push_back(item);
        }
      }
#ifndef NDEBUG
      assert(!(item.suffix == 0 && popped.count(key)) && "update to an already-popped item");
#endif
      it->second = sr.add(it->second, v);
    };

    if (k > 0) {
      const auto& prev = *state.columns[static_cast<size_t>(k - 1)];
      const std::int32_t tid = state.token_ids[static_cast<size_t>(k - 1)];
      if (tid >= 0) {  // Scan
        auto wit = prev.waiting.find(tid);
        if (wit != prev.waiting.end()) {
          for (const auto& item : wit->second) {
            V val = prev.chart.at(earley_key(item.origin, item.lhs, item.suffix));
            update({item.origin, item.lhs, g->suffix_rest[static_cast<size_t>(item.suffix)]}, val);
          }
        }
      }
      while (!queue.empty()) {  // Attach
        auto e = queue.top();
        queue.pop();
#ifndef NDEBUG
        popped.insert(earley_key(e.origin, e.lhs, 0));
#endif
        V completed = col->chart.at(earley_key(e.origin, e.lhs, 0));
        if (e.origin >= k) {
          throw Error("zero-span completion; grammar is not nullary-free");
        }
        const auto& origin_col = *state.columns[static_cast<size_t>(e.origin)];
        auto wit = origin_col.waiting.find(e.lhs);
        if (wit == origin_col.waiting.end()) continue;
        for (const auto& item : wit->second) {
          V parent = origin_col.chart.at(earley_key(item.origin, item.lhs, item.suffix));
          update({item.origin, item.lhs, g->suffix_rest[static_cast<size_t>(item.suffix)]},
                 sr.mul(parent, completed));
        }
      }
    }

    // Predict: rules whose LHS is in the left-corner closure of a symbol
    // some item in this column is waiting for (the start symbol at k = 0).
    std::vector<bool> needed(static_cast<size_t>(g->grammar.num_symbols()), false);
    auto mark = [&](std::int32_t nt) {
      for (auto x : g->left_corner[static_cast<size_t>(nt)]) needed[static_cast<size_t>(x)] = true;
    };
    if (k == 0) {
      mark(g->start);
    } else {
      for (auto nt : g->grammar.nonterminal_ids()) {
        if (col->waiting.count(nt)) mark(nt);
      }
    }
    for (auto nt : g->grammar.nonterminal_ids()) {
      if (!needed[static_cast<size_t>(nt)]) continue;
      for (const auto& lr : g->rules_by_lhs[static_cast<size_t>(nt)]) {
        update({static_cast<std::int32_t>(k), nt, lr.suffix}, lr.w);
      }
    }

    state.columns.push_back(std::move(col));
  }
  return state;
}

/// Lattice forward pass over a parsed prefix: scans every terminal at the
/// final position weighted by theta, attaches only items with one remaining
/// symbol, and omits Predict. theta is indexed by symbol id.
template <Semiring SR>
typename SR::Value earley_lattice_value(const EarleyGrammar<base_semiring_t<SR>>& g, const SR& sr,
                                        const EarleyState<base_semiring_t<SR>>& state,
                                        const std::vector<typename SR::Value>& theta) {
  using V = typename SR::Value;
  const std::int64_t n = static_cast<std::int64_t>(state.tokens.size());
  const auto& last = *state.columns[static_cast<size_t>(n)];

  std::unordered_map<std::uint64_t, V> fwd;
  detail::EarleyQueue queue;
  auto push_val = [&](std::int32_t origin, std::int32_t lhs, V v) {
    auto key = cky_key(origin, lhs);
    auto [it, inserted] = fwd.try_emplace(key, sr.zero());
    if (inserted) {
      queue.push({n + 1 - origin, g.pop_rank[static_cast<size_t>(lhs)], origin, lhs});
    }
    it->second = sr.add(it->second, v);
  };

  for (auto tid : g.grammar.terminal_ids()) {  // Scan
    auto wit = last.waiting.find(tid);
    if (wit == last.waiting.end()) continue;
    for (const auto& item : wit->second) {
      if (g.suffix_rest[static_cast<size_t>(item.suffix)] != 0) continue;
      V inside = last.chart.at(earley_key(item.origin, item.lhs, item.suffix));
      push_val(item.origin, item.lhs, sr.mul(inside, theta[static_cast<size_t>(tid)]));
    }
  }
  while (!queue.empty()) {  // Attach
    auto e = queue.top();
    queue.pop();
    V completed = fwd.at(cky_key(e.origin, e.lhs));
    const auto& origin_col = *state.columns[static_cast<size_t>(e.origin)];
    auto wit = origin_col.waiting.find(e.lhs);
    if (wit == origin_col.waiting.end()) continue;
    for (const auto& item : wit->second) {
      if (g.suffix_rest[static_cast<size_t>(item.suffix)] != 0) continue;
      V parent = origin_col.chart.at(earley_key(item.origin, item.lhs, item.suffix));
      push_val(item.origin, item.lhs, sr.mul(parent, completed));
    }
  }
  auto it = fwd.find(cky_key(0, g.start));
  return it == fwd.end() ? sr.zero() : it->second;
}

/// Gradient of the lattice pass: backward values computed by a memoized
/// recursion over the waiting structure, then folded with the preterminal
/// scan edges into per-terminal next-token weights.
template <Semiring SR>
std::vector<typename SR::Value> earley_next_token_weights(
    const EarleyGrammar<base_semiring_t<SR>>& g, const SR& sr,
    const EarleyState<base_semiring_t<SR>>& state) {
  using V = typename SR::Value;
  const std::int64_t n = static_cast<std::int64_t>(state.tokens.size());
  const auto& last = *state.columns[static_cast<size_t>(n)];

  std::unordered_map<std::uint64_t, V> memo;
  auto backward = [&](auto&& self, std::int32_t j, std::int32_t lhs) -> V {
    if (j == 0 && lhs == g.start) return sr.one();
    auto key = cky_key(j, lhs);
    auto found = memo.find(key);
    if (found != memo.end()) return found->second;
    V v = sr.zero();
    const auto& origin_col = *state.columns[static_cast<size_t>(j)];
    auto wit = origin_col.waiting.find(lhs);
    if (wit != origin_col.waiting.end()) {
      for (const auto& item : wit->second) {
        if (g.suffix_rest[static_cast<size_t>(item.suffix)] != 0) continue;
        V parent = origin_col.chart.at(earley_key(item.origin, item.lhs, item.suffix));
        v = sr.add(v, sr.mul(parent, self(self, item.origin, item.lhs)));
      }
    }
    memo.emplace(key, v);
    return v;
  };

  std::vector<V> weights(static_cast<size_t>(g.grammar.num_symbols()), sr.zero());
  for (auto tid : g.grammar.terminal_ids()) {
    auto wit = last.waiting.find(tid);
    if (wit == last.waiting.end()) continue;
    for (const auto& item : wit->second) {
      if (g.suffix_rest[static_cast<size_t>(item.suffix)] != 0) continue;
      V inside = last.chart.at(earley_key(item.origin, item.lhs, item.suffix));
      const auto slot = static_cast<size_t>(tid);
      weights[slot] = sr.add(weights[slot], sr.mul(inside, backward(backward, item.origin, item.lhs)));
    }
  }
  return weights;
}

}  // namespace wcfg

#endif  // WCFG_EARLEY_HPP_
