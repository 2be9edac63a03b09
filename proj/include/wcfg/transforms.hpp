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

#ifndef WCFG_TRANSFORMS_HPP_
#define WCFG_TRANSFORMS_HPP_

#include <queue>
#include <string>
#include <unordered_set>
#include <vector>

#include "wcfg/grammar.hpp"
#include "wcfg/totals.hpp"

namespace wcfg {

/// Deterministic fresh-name allocation against a grammar's symbol set.
class NameAllocator {
 public:
  explicit NameAllocator(const SymbolTable& symbols) {
    for (std::int32_t id = 0; id < symbols.size(); ++id) taken_.insert(symbols.name(id));
  }

  std::string fresh(std::string base) {
    while (taken_.count(base)) base += "~";
    taken_.insert(base);
    return base;
  }

  bool taken(const std::string& name) const { return taken_.count(name) != 0; }

 private:
  std::unordered_set<std::string> taken_;
};

struct TransformReport {
  GrammarStats input_stats;
  GrammarStats output_stats;
  std::int64_t bound = 0;
  std::string name;
};

/// Worst-case output size of a named transformation evaluated on the input
/// statistics. Integer-exact: out <= bound iff the rational bound holds.
inline std::int64_t transform_bound(const std::string& name, const GrammarStats& in) {
  const std::int64_t g = in.size, n = in.nonterminal_count, r = in.rule_count,
                     a = in.terminal_count;
  if (name == "deadrules") return g;
  if (name == "ctf") return 3 * g;
  if (name == "nullary") return (7 * g + 9) / 3;
  if (name == "unary") return n * g;
  if (name == "unarycycle") return g + 2 * n * n;
  if (name == "termsep") return g + 2 * a;
  if (name == "cnf") return (n + g - r + 1) * (7 * g + 3) + 2 * a;
  if (name == "prefix") return (8 * g + 9) / 3;  // applies to CTF inputs
  if (name == "eos") return g + 3;
  throw Error("unknown transformation '" + name + "'");
}

template <Semiring S>
bool is_ctf(const WeightedGrammar<S>& g) {
  return g.max_arity() <= 2;
}

template <Semiring S>
bool is_nullary_free(const WeightedGrammar<S>& g) {
  bool start_on_rhs = false;
  bool has_start_eps = false;
  for (const auto& r : g.rules()) {
    if (r.rhs.empty()) {
      if (r.lhs != g.start()) return false;
      has_start_eps = true;
    }
    for (auto s : r.rhs) {
      if (s == g.start()) start_on_rhs = true;
    }
  }
  return !(has_start_eps && start_on_rhs);
}

template <Semiring S>
bool has_acyclic_unary_graph(const WeightedGrammar<S>& g) {
  // Kahn's algorithm on edges lhs -> rhs[0] restricted to unary NT rules.
  const auto n = static_cast<size_t>(g.num_symbols());
  std::vector<std::vector<std::int32_t>> out(n);
  std::vector<int> indeg(n, 0);
  size_t edges = 0;
  for (const auto& r : g.rules()) {
    if (r.rhs.size() == 1 && g.is_nonterminal(r.rhs[0])) {
      out[static_cast<size_t>(r.lhs)].push_back(r.rhs[0]);
      ++indeg[static_cast<size_t>(r.rhs[0])];
      ++edges;
    }
  }
  std::queue<std::int32_t> q;
  for (size_t i = 0; i < n; ++i) {
    if (indeg[i] == 0) q.push(static_cast<std::int32_t>(i));
  }
  size_t removed = 0;
  while (!q.empty()) {
    auto v = q.front();
    q.pop();
    for (auto w : out[static_cast<size_t>(v)]) {
      ++removed;
      if (--indeg[static_cast<size_t>(w)] == 0) q.push(w);
    }
  }
  return removed == edges;
}

template <Semiring S>
bool is_unary_free(const WeightedGrammar<S>& g) {
  for (const auto& r : g.rules()) {
    if (r.rhs.size() == 1 && g.is_nonterminal(r.rhs[0])) return false;
  }
  return true;
}

template <Semiring S>
bool is_terminal_separated(const WeightedGrammar<S>& g) {
  for (const auto& r : g.rules()) {
    if (r.rhs.size() < 2) continue;
    for (auto s : r.rhs) {
      if (g.is_terminal(s)) return false;
    }
  }
  return true;
}

/// CNF: every rule is X -> Y Z (nonterminals), X -> sigma, or start -> eps;
/// a start epsilon rule additionally requires the start off every rhs.
template <Semiring S>
bool is_cnf(const WeightedGrammar<S>& g) {
  bool has_start_eps = false;
  bool start_on_rhs = false;
  for (const auto& r : g.rules()) {
    for (auto s : r.rhs) {
      if (s == g.start()) start_on_rhs = true;
    }
    if (r.rhs.empty()) {
      if (r.lhs != g.start()) return false;
      has_start_eps = true;
    } else if (r.rhs.size() == 1) {
      if (!g.is_terminal(r.rhs[0])) return false;
    } else if (r.rhs.size() == 2) {
      if (!g.is_nonterminal(r.rhs[0]) || !g.is_nonterminal(r.rhs[1])) return false;
    } else {
      return false;
    }
  }
  return !(has_start_eps && start_on_rhs);
}

/// Canonical two-form: right-branching binarization of rules with arity > 2.
/// Intermediate nonterminals carry weight one; the first split rule keeps the
/// original weight. Fresh names derive from (rule index, split position).
template <Semiring S>
WeightedGrammar<S> ensure_ctf(const WeightedGrammar<S>& g) {
  if (is_ctf(g)) return g;
  const S& sr = g.semiring();
  NameAllocator names(g.symbols());
  typename WeightedGrammar<S>::Builder b(sr);
  b.set_start(g.name(g.start()));
  for (size_t ri = 0; ri < g.rules().size(); ++ri) {
    const auto& r = g.rules()[ri];
    const auto arity = r.rhs.size();
    std::vector<std::string> rhs_names;
    rhs_names.reserve(arity);
    for (auto s : r.rhs) rhs_names.push_back(g.name(s));
    if (arity <= 2) {
      b.rule(g.name(r.lhs), rhs_names, r.weight);
      continue;
    }
    std::string lhs = g.name(r.lhs);
    typename S::Value w = r.weight;
    for (size_t k = 0; k + 2 < arity; ++k) {
      std::string next =
          names.fresh(g.name(r.lhs) + "@" + std::to_string(ri) + "." + std::to_string(k + 1));
      b.rule(lhs, {rhs_names[k], next}, w);
      lhs = next;
      w = sr.one();
    }
    b.rule(lhs, {rhs_names[arity - 2], rhs_names[arity - 1]}, w);
  }
  return b.build();
}

/// Nullary removal on a CTF grammar: null weights come from the restricted
/// totals system, nullable children are distributed over the <= 2-arity
/// rules, and a fresh start carries the residual epsilon weight if any.
template <Semiring S>
WeightedGrammar<S> ensure_nullary_free(const WeightedGrammar<S>& g) {
  if (!is_ctf(g)) {
    throw PreconditionViolated("nullary removal requires canonical two-form (arity <= 2)");
  }
  if (is_nullary_free(g)) return g;
  const S& sr = g.semiring();

  auto nulls = null_weights(g, sr);
  if (!nulls.converged) {
    throw TotalsNotConverged("null-weight fixed point did not converge");
  }

  NameAllocator names(g.symbols());
  typename WeightedGrammar<S>::Builder b(sr);
  const std::string start_name = g.name(g.start());

  for (const auto& r : g.rules()) {
    if (r.rhs.empty()) continue;
    std::vector<std::string> rhs_names;
    for (auto s : r.rhs) rhs_names.push_back(g.name(s));
    b.rule(g.name(r.lhs), rhs_names, r.weight);
    if (r.rhs.size() == 2) {
      const auto n0 = nulls[r.rhs[0]];
      const auto n1 = nulls[r.rhs[1]];
      if (!sr.is_zero(n1)) b.rule(g.name(r.lhs), {rhs_names[0]}, sr.mul(r.weight, n1));
      if (!sr.is_zero(n0)) b.rule(g.name(r.lhs), {rhs_names[1]}, sr.mul(r.weight, n0));
    }
  }

  const auto start_null = nulls[g.start()];
  if (!sr.is_zero(start_null)) {
    std::string fresh_start = names.fresh(start_name + "0");
    b.rule(fresh_start, {start_name}, sr.one());
    b.rule(fresh_start, {}, start_null);
    b.set_start(fresh_start);
  } else {
    b.set_start(start_name);
  }
  return b.build();
}

namespace detail {

/// Lehmann's all-pairs closure of the unary-rule weight matrix over the
/// nonterminals: U = I + A^n where A^k folds paths through pivot k.
template <Semiring S>
std::vector<std::vector<typename S::Value>> unary_closure(const WeightedGrammar<S>& g) {
  using V = typename S::Value;
  const S& sr = g.semiring();
  const auto& nts = g.nonterminal_ids();
  const size_t n = nts.size();
  std::vector<std::int32_t> pos(static_cast<size_t>(g.num_symbols()), -1);
  for (size_t i = 0; i < n; ++i) pos[static_cast<size_t>(nts[i])] = static_cast<std::int32_t>(i);

  std::vector<std::vector<V>> m(n, std::vector<V>(n, sr.zero()));
  for (const auto& r : g.rules()) {
    if (r.rhs.size() == 1 && g.is_nonterminal(r.rhs[0])) {
      auto i = static_cast<size_t>(pos[static_cast<size_t>(r.lhs)]);
      auto j = static_cast<size_t>(pos[static_cast<size_t>(r.rhs[0])]);
      m[i][j] = sr.add(m[i][j], r.weight);
    }
  }
  auto next = m;
  for (size_t k = 0; k < n; ++k) {
    V d = semiring_star(sr, m[k][k]);
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = 0; j < n; ++j) {
        next[i][j] = sr.add(m[i][j], sr.mul(sr.mul(m[i][k], d), m[k][j]));
      }
    }
    m.swap(next);
  }
  for (size_t i = 0; i < n; ++i) m[i][i] = sr.add(sr.one(), m[i][i]);
  return m;
}

}  // namespace detail

/// Unary removal: folds unary-nonterminal chains (including convergent
/// cycles) into copies of the non-unary rules, weighted by the closure.
template <Semiring S>
WeightedGrammar<S> ensure_unary_free(const WeightedGrammar<S>& g) {
  if (is_unary_free(g)) return g;
  const S& sr = g.semiring();
  auto closure = detail::unary_closure(g);
  const auto& nts = g.nonterminal_ids();

  std::vector<std::int32_t> pos(static_cast<size_t>(g.num_symbols()), -1);
  for (size_t i = 0; i < nts.size(); ++i) {
    pos[static_cast<size_t>(nts[i])] = static_cast<std::int32_t>(i);
  }

  typename WeightedGrammar<S>::Builder b(sr);
  b.set_start(g.name(g.start()));
  for (const auto& r : g.rules()) {
    if (r.rhs.size() == 1 && g.is_nonterminal(r.rhs[0])) continue;
    std::vector<std::string> rhs_names;
    for (auto s : r.rhs) rhs_names.push_back(g.name(s));
    auto j = static_cast<size_t>(pos[static_cast<size_t>(r.lhs)]);
    for (size_t i = 0; i < nts.size(); ++i) {
      const auto u = closure[i][j];
      if (sr.is_zero(u)) continue;
      b.rule(g.name(nts[i]), rhs_names, sr.mul(u, r.weight));
    }
  }
  return b.build();
}

/// Unary cycle removal: splits each nonterminal X into X (chain entry) and
/// X~ (rule host). X -> Y~ carries the closed chain weight from X to Y and
/// Y~ hosts Y's non-unary rules, so the unary graph becomes one-layer.
template <Semiring S>
WeightedGrammar<S> ensure_unary_cycle_free(const WeightedGrammar<S>& g) {
  if (has_acyclic_unary_graph(g)) return g;
  const S& sr = g.semiring();
  auto closure = detail::unary_closure(g);
  const auto& nts = g.nonterminal_ids();

  bool start_on_rhs = false;
  for (const auto& r : g.rules()) {
    for (auto s : r.rhs) start_on_rhs = start_on_rhs || s == g.start();
  }
  // A start epsilon rule is only ever applied at the root when the start is
  // off every rhs, so it stays on the start symbol and the grammar remains
  // nullary-free.
  auto keep_on_start = [&](const typename WeightedGrammar<S>::Rule& r) {
    return r.rhs.empty() && r.lhs == g.start() && !start_on_rhs;
  };

  NameAllocator names(g.symbols());
  std::vector<std::string> tilde(nts.size());
  std::vector<bool> hosts_rules(nts.size(), false);
  std::vector<std::int32_t> pos(static_cast<size_t>(g.num_symbols()), -1);
  for (size_t i = 0; i < nts.size(); ++i) {
    pos[static_cast<size_t>(nts[i])] = static_cast<std::int32_t>(i);
    tilde[i] = names.fresh(g.name(nts[i]) + "~");
  }
  for (const auto& r : g.rules()) {
    if (r.rhs.size() == 1 && g.is_nonterminal(r.rhs[0])) continue;
    if (keep_on_start(r)) continue;
    hosts_rules[static_cast<size_t>(pos[static_cast<size_t>(r.lhs)])] = true;
  }

  typename WeightedGrammar<S>::Builder b(sr);
  b.set_start(g.name(g.start()));
  for (size_t i = 0; i < nts.size(); ++i) {
    for (size_t j = 0; j < nts.size(); ++j) {
      if (!hosts_rules[j] || sr.is_zero(closure[i][j])) continue;
      b.rule(g.name(nts[i]), {tilde[j]}, closure[i][j]);
    }
  }
  for (const auto& r : g.rules()) {
    if (r.rhs.size() == 1 && g.is_nonterminal(r.rhs[0])) continue;
    std::vector<std::string> rhs_names;
    for (auto s : r.rhs) rhs_names.push_back(g.name(s));
    if (keep_on_start(r)) {
      b.rule(g.name(r.lhs), rhs_names, r.weight);
    } else {
      b.rule(tilde[static_cast<size_t>(pos[static_cast<size_t>(r.lhs)])], rhs_names, r.weight);
    }
  }
  return b.build();
}

/// Terminal separation: lifts terminals out of rules of arity >= 2 through
/// fresh preterminals A_<sigma>.
template <Semiring S>
WeightedGrammar<S> ensure_terminal_sep(const WeightedGrammar<S>& g) {
  if (is_terminal_separated(g)) return g;
  const S& sr = g.semiring();
  NameAllocator names(g.symbols());
  std::vector<std::string> lifted(static_cast<size_t>(g.num_symbols()));

  typename WeightedGrammar<S>::Builder b(sr);
  b.set_start(g.name(g.start()));
  for (const auto& r : g.rules()) {
    std::vector<std::string> rhs_names;
    for (auto s : r.rhs) {
      if (r.rhs.size() >= 2 && g.is_terminal(s)) {
        auto& slot = lifted[static_cast<size_t>(s)];
        if (slot.empty()) {
          slot = names.fresh("A_" + g.name(s));
          b.rule(slot, {g.name(s)}, sr.one());
        }
        rhs_names.push_back(slot);
      } else {
        rhs_names.push_back(g.name(s));
      }
    }
    b.rule(g.name(r.lhs), rhs_names, r.weight);
  }
  return b.build();
}

/// CNF conversion; the stage order matters (nullary removal before unary
/// removal, terminal separation last).
template <Semiring S>
WeightedGrammar<S> ensure_cnf(const WeightedGrammar<S>& g) {
  if (is_cnf(g)) return g;
  return ensure_terminal_sep(ensure_unary_free(ensure_nullary_free(ensure_ctf(g))));
}

/// Drops rules that use nongenerating symbols or whose LHS is unreachable
/// from the start. Two boolean fixpoints; weights are ignored.
template <Semiring S>
WeightedGrammar<S> eliminate_dead_rules(const WeightedGrammar<S>& g) {
  const auto n = static_cast<size_t>(g.num_symbols());
  std::vector<bool> generating(n, false);
  for (auto t : g.terminal_ids()) generating[static_cast<size_t>(t)] = true;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& r : g.rules()) {
      if (generating[static_cast<size_t>(r.lhs)]) continue;
      bool all = true;
      for (auto s : r.rhs) all = all && generating[static_cast<size_t>(s)];
      if (all) {
        generating[static_cast<size_t>(r.lhs)] = true;
        changed = true;
      }
    }
  }

  auto rule_alive = [&](const typename WeightedGrammar<S>::Rule& r) {
    for (auto s : r.rhs) {
      if (!generating[static_cast<size_t>(s)]) return false;
    }
    return true;
  };

  std::vector<bool> reachable(n, false);
  reachable[static_cast<size_t>(g.start())] = true;
  changed = true;
  while (changed) {
    changed = false;
    for (const auto& r : g.rules()) {
      if (!reachable[static_cast<size_t>(r.lhs)] || !rule_alive(r)) continue;
      for (auto s : r.rhs) {
        if (!reachable[static_cast<size_t>(s)]) {
          reachable[static_cast<size_t>(s)] = true;
          changed = true;
        }
      }
    }
  }

  size_t kept = 0;
  for (const auto& r : g.rules()) {
    if (reachable[static_cast<size_t>(r.lhs)] && rule_alive(r)) ++kept;
  }
  if (kept == g.rules().size()) return g;

  typename WeightedGrammar<S>::Builder b(g.semiring());
  b.set_start(g.name(g.start()));
  for (const auto& r : g.rules()) {
    if (!reachable[static_cast<size_t>(r.lhs)] || !rule_alive(r)) continue;
    std::vector<std::string> rhs_names;
    for (auto s : r.rhs) rhs_names.push_back(g.name(s));
    b.rule(g.name(r.lhs), rhs_names, r.weight);
  }
  return b.build();
}

template <Semiring S>
TransformReport make_report(const std::string& name, const WeightedGrammar<S>& in,
                            const WeightedGrammar<S>& out) {
  TransformReport rep;
  rep.name = name;
  rep.input_stats = grammar_stats(in);
  rep.output_stats = grammar_stats(out);
  rep.bound = transform_bound(name, rep.input_stats);
  return rep;
}

}  // namespace wcfg

#endif  // WCFG_TRANSFORMS_HPP_
