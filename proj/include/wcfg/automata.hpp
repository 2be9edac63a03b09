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

#ifndef WCFG_AUTOMATA_HPP_
#define WCFG_AUTOMATA_HPP_

#include <map>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "wcfg/errors.hpp"
#include "wcfg/grammar.hpp"

namespace wcfg {

/// Acyclic WFSA used as a word lattice. Labels are token strings; epsilon
/// transitions are not permitted here (the next-token lattice needs none).
template <Semiring S>
struct WeightedAutomaton {
  using Value = typename S::Value;

  struct Arc {
    int src;
    std::string label;
    Value weight;
    int dst;
  };

  int num_states = 0;
  std::vector<Arc> arcs;
  std::vector<Value> initial;
  std::vector<Value> final;
  S sr{};
};

/// WFST; label components may be empty strings (epsilon).
template <Semiring S>
struct WeightedTransducer {
  using Value = typename S::Value;

  struct Arc {
    int src;
    std::string in;
    std::string out;
    Value weight;
    int dst;
  };

  int num_states = 0;
  std::vector<Arc> arcs;
  std::vector<Value> initial;
  std::vector<Value> final;
  S sr{};
};

/// Formal parameter vector theta over an alphabet, keyed by token.
template <Semiring S>
struct ParameterVector {
  std::map<std::string, typename S::Value> values;

  typename S::Value at(const std::string& token) const {
    auto it = values.find(token);
    if (it == values.end()) throw UnknownTerminal("no parameter for terminal '" + token + "'");
    return it->second;
  }
};

template <Semiring S>
ParameterVector<S> ones_parameters(const WeightedGrammar<S>& g) {
  ParameterVector<S> theta;
  for (auto t : g.terminal_ids()) theta.values[g.name(t)] = g.semiring().one();
  return theta;
}

/// Topological order of the states; throws if the automaton is cyclic.
template <Semiring S>
std::vector<int> topological_order(const WeightedAutomaton<S>& a) {
  std::vector<std::vector<int>> out(static_cast<size_t>(a.num_states));
  std::vector<int> indeg(static_cast<size_t>(a.num_states), 0);
  for (const auto& arc : a.arcs) {
    out[static_cast<size_t>(arc.src)].push_back(arc.dst);
    ++indeg[static_cast<size_t>(arc.dst)];
  }
  std::queue<int> q;
  for (int s = 0; s < a.num_states; ++s) {
    if (indeg[static_cast<size_t>(s)] == 0) q.push(s);
  }
  std::vector<int> order;
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    order.push_back(v);
    for (int w : out[static_cast<size_t>(v)]) {
      if (--indeg[static_cast<size_t>(w)] == 0) q.push(w);
    }
  }
  if (order.size() != static_cast<size_t>(a.num_states)) {
    throw Error("automaton is cyclic; lattices must be acyclic");
  }
  return order;
}

/// The next-token lattice for prefix x: a chain reading x with weight one
/// followed by a parallel bundle of sigma/theta_sigma transitions, so it
/// accepts exactly {x sigma} with weight theta_sigma.
template <Semiring S>
WeightedAutomaton<S> next_token_lattice(const WeightedGrammar<S>& g,
                                        std::span<const std::string> x,
                                        const ParameterVector<S>& theta) {
  const S& sr = g.semiring();
  const int n = static_cast<int>(x.size());
  WeightedAutomaton<S> a;
  a.sr = sr;
  a.num_states = n + 2;
  a.initial.assign(static_cast<size_t>(a.num_states), sr.zero());
  a.final.assign(static_cast<size_t>(a.num_states), sr.zero());
  a.initial[0] = sr.one();
  a.final[static_cast<size_t>(n + 1)] = sr.one();
  for (int i = 0; i < n; ++i) {
    auto id = g.symbols().find(x[static_cast<size_t>(i)]);
    if (!id.has_value() || !g.is_terminal(*id)) {
      throw UnknownTerminal("'" + x[static_cast<size_t>(i)] + "' is not in the alphabet");
    }
    a.arcs.push_back({i, x[static_cast<size_t>(i)], sr.one(), i + 1});
  }
  for (auto t : g.terminal_ids()) {
    a.arcs.push_back({n, g.name(t), theta.at(g.name(t)), n + 1});
  }
  topological_order(a);  // acyclicity check
  return a;
}

/// Path-sum weight of a string in an acyclic epsilon-free WFSA: one forward
/// sweep over string positions.
template <Semiring S>
typename S::Value wfsa_weight(const WeightedAutomaton<S>& a, std::span<const std::string> s) {
  const S& sr = a.sr;
  std::vector<typename S::Value> cur = a.initial;
  std::vector<typename S::Value> next(static_cast<size_t>(a.num_states));
  for (const auto& tok : s) {
    for (auto& v : next) v = sr.zero();
    for (const auto& arc : a.arcs) {
      if (arc.label != tok) continue;
      const typename S::Value from = cur[static_cast<size_t>(arc.src)];
      if (sr.is_zero(from)) continue;
      const auto dst = static_cast<size_t>(arc.dst);
      next[dst] = sr.add(next[dst], sr.mul(from, arc.weight));
    }
    cur.swap(next);
  }
  typename S::Value total = sr.zero();
  for (int q = 0; q < a.num_states; ++q) {
    total = sr.add(total, sr.mul(cur[static_cast<size_t>(q)], a.final[static_cast<size_t>(q)]));
  }
  return total;
}

/// Weighted relation value of a transducer on a string pair. Requires every
/// transition to consume input or output (no eps:eps), which makes the
/// (i, j) progress measure strictly increasing.
template <Semiring S>
typename S::Value relation_weight(const WeightedTransducer<S>& t,
                                  std::span<const std::string> input,
                                  std::span<const std::string> output) {
  const S& sr = t.sr;
  for (const auto& arc : t.arcs) {
    if (arc.in.empty() && arc.out.empty()) {
      throw Error("relation_weight does not support eps:eps transitions");
    }
  }
  const size_t ni = input.size(), no = output.size();
  const size_t states = static_cast<size_t>(t.num_states);
  // dp[i][j][q]: weight of paths consuming input[0..i) and emitting output[0..j).
  std::vector<typename S::Value> dp((ni + 1) * (no + 1) * states, sr.zero());
  auto idx = [&](size_t i, size_t j, size_t q) { return (i * (no + 1) + j) * states + q; };
  for (size_t q = 0; q < states; ++q) dp[idx(0, 0, q)] = t.initial[q];
  for (size_t i = 0; i <= ni; ++i) {
    for (size_t j = 0; j <= no; ++j) {
      for (const auto& arc : t.arcs) {
        const typename S::Value from = dp[idx(i, j, static_cast<size_t>(arc.src))];
        if (sr.is_zero(from)) continue;
        size_t i2 = i, j2 = j;
        if (!arc.in.empty()) {
          if (i >= ni || input[i] != arc.in) continue;
          i2 = i + 1;
        }
        if (!arc.out.empty()) {
          if (j >= no || output[j] != arc.out) continue;
          j2 = j + 1;
        }
        const size_t slot = idx(i2, j2, static_cast<size_t>(arc.dst));
        dp[slot] = sr.add(dp[slot], sr.mul(from, arc.weight));
      }
    }
  }
  typename S::Value total = sr.zero();
  for (size_t q = 0; q < states; ++q) {
    total = sr.add(total, sr.mul(dp[idx(ni, no, q)], t.final[q]));
  }
  return total;
}

}  // namespace wcfg

#endif  // WCFG_AUTOMATA_HPP_
