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

#ifndef WCFG_CKY_HPP_
#define WCFG_CKY_HPP_

#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "wcfg/grammar.hpp"
#include "wcfg/transforms.hpp"

namespace wcfg {

inline std::uint64_t cky_key(std::int64_t i, std::int32_t sym) {
  return (static_cast<std::uint64_t>(i) << 32) | static_cast<std::uint32_t>(sym);
}

/// A CNF grammar packed for the CKY inner loops. Rules are held in canonical
/// order, so two instances built from representation-identical grammars run
/// identical operation sequences.
template <Semiring S>
struct CnfGrammar {
  using Value = typename S::Value;

  struct BinaryRule {
    std::int32_t lhs, y, z;
    Value w;
  };
  struct PretermRule {
    std::int32_t lhs, term;
    Value w;
  };

  WeightedGrammar<S> grammar;
  std::int32_t start;
  bool has_epsilon = false;
  Value epsilon_weight;
  std::vector<BinaryRule> binary;
  std::vector<PretermRule> preterm;
  std::vector<std::vector<std::int32_t>> preterm_by_terminal;  // symbol id -> preterm indices

  explicit CnfGrammar(WeightedGrammar<S> g) : grammar(std::move(g)), start(grammar.start()) {
    if (!is_cnf(grammar)) throw PreconditionViolated("CKY requires a CNF grammar");
    epsilon_weight = grammar.semiring().zero();
    preterm_by_terminal.resize(static_cast<size_t>(grammar.num_symbols()));
    for (const auto& r : grammar.rules()) {
      if (r.rhs.empty()) {
        has_epsilon = true;
        epsilon_weight = r.weight;
      } else if (r.rhs.size() == 1) {
        preterm_by_terminal[static_cast<size_t>(r.rhs[0])].push_back(
            static_cast<std::int32_t>(preterm.size()));
        preterm.push_back({r.lhs, r.rhs[0], r.weight});
      } else {
        binary.push_back({r.lhs, r.rhs[0], r.rhs[1], r.weight});
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
struct CkyColumn {
  std::unordered_map<std::uint64_t, typename S::Value> cells;
};

/// Inside-weight columns for a parsed prefix. Sealed columns are immutable
/// and shared between a cached state and its extensions, so concurrent
/// extensions of one state are safe.
template <Semiring S>
struct CkyState {
  using Value = typename S::Value;

  std::shared_ptr<const CnfGrammar<S>> grammar;
  std::vector<std::string> tokens;
  std::vector<std::int32_t> token_ids;
  std::vector<std::shared_ptr<const CkyColumn<S>>> columns;  // columns 0..N

  Value goal(const S& sr) const {
    const auto& cells = columns.back()->cells;
    auto it = cells.find(cky_key(0, grammar->start));
    return it == cells.end() ? sr.zero() : it->second;
  }
};

namespace detail {

template <class Map>
const typename Map::mapped_type* cell_find(const Map& m, std::uint64_t key) {
  auto it = m.find(key);
  return it == m.end() ? nullptr : &it->second;
}

template <class Map, Semiring SR>
void cell_add(Map& m, std::uint64_t key, typename SR::Value v, const SR& sr) {
  auto [it, inserted] = m.try_emplace(key, sr.zero());
  it->second = sr.add(it->second, v);
}

}  // namespace detail

/// Incremental CKY: reuses the cached state's sealed columns for a prefix of
/// the input and computes only the missing columns. Column N costs
/// O(|binary| * N^2) semiring operations.
template <Semiring SR>
CkyState<base_semiring_t<SR>> incr_cky(std::shared_ptr<const CnfGrammar<base_semiring_t<SR>>> g,
                                       const SR& sr, std::span<const std::string> tokens,
                                       const CkyState<base_semiring_t<SR>>* cached = nullptr) {
  using S = base_semiring_t<SR>;
  using V = typename S::Value;

  CkyState<S> state;
  state.grammar = g;
  state.tokens.assign(tokens.begin(), tokens.end());
  state.token_ids.reserve(tokens.size());
  for (const auto& t : state.tokens) state.token_ids.push_back(g->token_id(t));

  if (cached != nullptr) {
    if (cached->grammar.get() != g.get() || cached->tokens.size() > tokens.size()) {
      throw Error("cached CKY state does not match this parse");
    }
    for (size_t i = 0; i < cached->tokens.size(); ++i) {
      if (cached->tokens[i] != state.tokens[i]) {
        throw Error("cached CKY state is not a prefix of the input");
      }
    }
    state.columns = cached->columns;
  }

  if (state.columns.empty()) {
    auto col0 = std::make_shared<CkyColumn<S>>();
    if (g->has_epsilon) {
      detail::cell_add(col0->cells, cky_key(0, g->start), g->epsilon_weight, sr);
    }
    state.columns.push_back(std::move(col0));
  }

  for (std::int64_t k = static_cast<std::int64_t>(state.columns.size());
       k <= static_cast<std::int64_t>(tokens.size()); ++k) {
    auto col = std::make_shared<CkyColumn<S>>();
    const std::int32_t tid = state.token_ids[static_cast<size_t>(k - 1)];
    if (tid >= 0) {
      for (auto idx : g->preterm_by_terminal[static_cast<size_t>(tid)]) {
        const auto& pr = g->preterm[static_cast<size_t>(idx)];
        detail::cell_add(col->cells, cky_key(k - 1, pr.lhs), pr.w, sr);
      }
    }
    for (std::int64_t i = k - 2; i >= 0; --i) {
      for (std::int64_t j = i + 1; j <= k - 1; ++j) {
        const auto& left = state.columns[static_cast<size_t>(j)]->cells;
        for (const auto& br : g->binary) {
          const V* a = detail::cell_find(left, cky_key(i, br.y));
          if (a == nullptr) continue;
          const V* b = detail::cell_find(col->cells, cky_key(j, br.z));
          if (b == nullptr) continue;
          detail::cell_add(col->cells, cky_key(i, br.lhs), sr.mul(sr.mul(br.w, *a), *b), sr);
        }
      }
    }
    state.columns.push_back(std::move(col));
  }
  return state;
}

/// Lattice forward pass over a parsed prefix: scans the whole alphabet at
/// position N+1 weighted by theta and aggregates Z_x(theta) into z(0, start).
/// theta is indexed by symbol id.
template <Semiring SR>
typename SR::Value cky_lattice_value(const CnfGrammar<base_semiring_t<SR>>& g, const SR& sr,
                                     const CkyState<base_semiring_t<SR>>& state,
                                     const std::vector<typename SR::Value>& theta) {
  using V = typename SR::Value;
  const std::int64_t n = static_cast<std::int64_t>(state.tokens.size());
  std::unordered_map<std::uint64_t, V> fwd;

  for (const auto& pr : g.preterm) {
    detail::cell_add(fwd, cky_key(n, pr.lhs), sr.mul(pr.w, theta[static_cast<size_t>(pr.term)]),
                     sr);
  }
  for (std::int64_t i = n; i >= 0; --i) {
    for (std::int64_t j = i + 1; j <= n; ++j) {
      const auto& left = state.columns[static_cast<size_t>(j)]->cells;
      for (const auto& br : g.binary) {
        const V* a = detail::cell_find(left, cky_key(i, br.y));
        if (a == nullptr) continue;
        auto it = fwd.find(cky_key(j, br.z));
        V zv = it == fwd.end() ? sr.zero() : it->second;
        detail::cell_add(fwd, cky_key(i, br.lhs), sr.mul(sr.mul(br.w, *a), zv), sr);
      }
    }
  }
  auto it = fwd.find(cky_key(0, g.start));
  return it == fwd.end() ? sr.zero() : it->second;
}

/// Reverse sweep of the lattice pass: backward values disaggregate the
/// aggregation into per-terminal next-token weights. Mirrors the forward
/// loop structure exactly (the goal adjoint is an initialization, not an
/// arithmetic operation).
template <Semiring SR>
std::vector<typename SR::Value> cky_next_token_weights(
    const CnfGrammar<base_semiring_t<SR>>& g, const SR& sr,
    const CkyState<base_semiring_t<SR>>& state) {
  using V = typename SR::Value;
  const std::int64_t n = static_cast<std::int64_t>(state.tokens.size());
  std::unordered_map<std::uint64_t, V> bwd;
  bwd.emplace(cky_key(0, g.start), sr.one());

  for (std::int64_t i = 0; i <= n - 1; ++i) {
    for (std::int64_t j = i + 1; j <= n; ++j) {
      const auto& left = state.columns[static_cast<size_t>(j)]->cells;
      for (const auto& br : g.binary) {
        const V* a = detail::cell_find(left, cky_key(i, br.y));
        if (a == nullptr) continue;
        auto it = bwd.find(cky_key(i, br.lhs));
        V d = it == bwd.end() ? sr.zero() : it->second;
        detail::cell_add(bwd, cky_key(j, br.z), sr.mul(sr.mul(br.w, *a), d), sr);
      }
    }
  }

  std::vector<V> weights(static_cast<size_t>(g.grammar.num_symbols()), sr.zero());
  for (const auto& pr : g.preterm) {
    auto it = bwd.find(cky_key(n, pr.lhs));
    V d = it == bwd.end() ? sr.zero() : it->second;
    const auto term = static_cast<size_t>(pr.term);
    weights[term] = sr.add(weights[term], sr.mul(pr.w, d));
  }
  return weights;
}

}  // namespace wcfg

#endif  // WCFG_CKY_HPP_
