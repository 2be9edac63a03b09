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

#ifndef WCFG_ORACLE_HPP_
#define WCFG_ORACLE_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wcfg/grammar.hpp"

namespace wcfg {

// Brute-force reference semantics: sums over derivation trees stratified by
// height. Exponential by design; independent of the chart parsers and of
// the prefix grammar construction.

template <Semiring S>
struct WeightedForest {
  std::vector<std::pair<TreePtr, typename S::Value>> trees;
  bool truncated = false;
  int height_bound = 0;
};

/// All derivation trees rooted at `root` of height <= max_height, with their
/// weights. Terminal leaves have height 0. truncated is true iff some rule
/// expansion was cut by the height bound.
template <Semiring S>
WeightedForest<S> enumerate_trees(const WeightedGrammar<S>& g, std::int32_t root, int max_height,
                                  std::uint64_t cap = 1000000) {
  if (max_height < 1) throw Error("enumerate_trees requires max_height >= 1");
  const S& sr = g.semiring();
  const auto nsym = static_cast<size_t>(g.num_symbols());

  // Saturating tree counts keep the cap check cheap.
  const std::uint64_t kSat = cap + 1;
  std::vector<std::vector<std::uint64_t>> count(
      static_cast<size_t>(max_height) + 1, std::vector<std::uint64_t>(nsym, 0));
  for (int h = 0; h <= max_height; ++h) {
    for (size_t s = 0; s < nsym; ++s) {
      if (g.is_terminal(static_cast<std::int32_t>(s))) count[static_cast<size_t>(h)][s] = 1;
    }
  }
  for (int h = 1; h <= max_height; ++h) {
    for (const auto& r : g.rules()) {
      std::uint64_t prod = 1;
      for (auto c : r.rhs) {
        std::uint64_t cc = count[static_cast<size_t>(h - 1)][static_cast<size_t>(c)];
        if (cc == 0) {
          prod = 0;
          break;
        }
        if (prod > kSat / cc) {
          prod = kSat;
        } else {
          prod *= cc;
        }
      }
      auto& slot = count[static_cast<size_t>(h)][static_cast<size_t>(r.lhs)];
      slot = std::min(kSat, slot + prod);
    }
  }
  if (count[static_cast<size_t>(max_height)][static_cast<size_t>(root)] > cap) {
    throw ForestTooLarge("enumeration exceeds the tree cap");
  }

  // cut(X, h): some expansion of X was blocked by the height bound.
  std::vector<std::vector<char>> cut(static_cast<size_t>(max_height) + 1,
                                     std::vector<char>(nsym, 0));
  for (size_t s = 0; s < nsym; ++s) {
    if (g.is_nonterminal(static_cast<std::int32_t>(s))) {
      bool has_rule = false;
      for (const auto& r : g.rules()) has_rule = has_rule || r.lhs == static_cast<std::int32_t>(s);
      cut[0][s] = has_rule ? 1 : 0;
    }
  }
  for (int h = 1; h <= max_height; ++h) {
    for (const auto& r : g.rules()) {
      for (auto c : r.rhs) {
        if (cut[static_cast<size_t>(h - 1)][static_cast<size_t>(c)]) {
          cut[static_cast<size_t>(h)][static_cast<size_t>(r.lhs)] = 1;
        }
      }
    }
  }

  using Forest = std::vector<std::pair<TreePtr, typename S::Value>>;
  // memo[(h, symbol)]
  std::vector<std::vector<Forest>> memo(static_cast<size_t>(max_height) + 1,
                                        std::vector<Forest>(nsym));
  std::vector<std::vector<char>> done(static_cast<size_t>(max_height) + 1,
                                      std::vector<char>(nsym, 0));

  auto build = [&](auto&& self, std::int32_t sym, int h) -> const Forest& {
    auto& slot = memo[static_cast<size_t>(h)][static_cast<size_t>(sym)];
    if (done[static_cast<size_t>(h)][static_cast<size_t>(sym)]) return slot;
    done[static_cast<size_t>(h)][static_cast<size_t>(sym)] = 1;
    if (g.is_terminal(sym)) {
      slot.emplace_back(make_leaf(sym), sr.one());
      return slot;
    }
    if (h == 0) return slot;
    for (size_t ri = 0; ri < g.rules().size(); ++ri) {
      const auto& r = g.rules()[ri];
      if (r.lhs != sym) continue;
      std::vector<TreePtr> kids(r.rhs.size());
      auto expand = [&](auto&& rec, size_t c, typename S::Value w) -> void {
        if (c == r.rhs.size()) {
          slot.emplace_back(make_node(sym, static_cast<std::int32_t>(ri), kids), w);
          return;
        }
        for (const auto& [kid, kw] : self(self, r.rhs[c], h - 1)) {
          kids[c] = kid;
          rec(rec, c + 1, sr.mul(w, kw));
        }
      };
      expand(expand, 0, r.weight);
    }
    return slot;
  };

  WeightedForest<S> forest;
  forest.height_bound = max_height;
  forest.trees = build(build, root, max_height);
  forest.truncated = cut[static_cast<size_t>(max_height)][static_cast<size_t>(root)] != 0;
  return forest;
}

namespace detail {

/// Height-stratified tables for the oracle sums. Layer h holds, per symbol:
///   exact[i][j]  total weight of trees with yield exactly x[i..j)
///   total        total weight of trees of any yield
///   eps          weight of trees with empty yield
///   nonempty     weight of trees with nonempty yield
///   over[i]      weight of trees whose yield strictly extends x[i..N)
template <Semiring S>
struct OracleLayer {
  using V = typename S::Value;
  std::vector<V> exact;     // nsym * (N+1) * (N+1)
  std::vector<V> total;     // nsym
  std::vector<V> eps;       // nsym
  std::vector<V> nonempty;  // nsym
  std::vector<V> over;      // nsym * (N+1)
};

template <Semiring S>
class OracleDp {
 public:
  using V = typename S::Value;

  OracleDp(const WeightedGrammar<S>& g, std::span<const std::string> tokens)
      : g_(g), sr_(g.semiring()), n_(static_cast<std::int64_t>(tokens.size())) {
    token_ids_.reserve(tokens.size());
    for (const auto& t : tokens) {
      auto id = g.symbols().find(t);
      token_ids_.push_back(id.has_value() && g.is_terminal(*id) ? *id : -1);
    }
    init_layer(prev_);
    init_layer(cur_);
    seed_terminals(prev_);
    seed_terminals(cur_);
  }

  /// Advances the tables to the given height (monotone in h).
  void run(int max_height) {
    for (int h = 1; h <= max_height; ++h) step();
  }

  V exact_weight(std::int32_t sym, std::int64_t i, std::int64_t j) const {
    return cur_.exact[exact_idx(sym, i, j)];
  }
  V total_weight(std::int32_t sym) const { return cur_.total[static_cast<size_t>(sym)]; }
  V over_weight(std::int32_t sym, std::int64_t i) const { return cur_.over[over_idx(sym, i)]; }

 private:
  size_t exact_idx(std::int32_t sym, std::int64_t i, std::int64_t j) const {
    return (static_cast<size_t>(sym) * static_cast<size_t>(n_ + 1) + static_cast<size_t>(i)) *
               static_cast<size_t>(n_ + 1) +
           static_cast<size_t>(j);
  }
  size_t over_idx(std::int32_t sym, std::int64_t i) const {
    return static_cast<size_t>(sym) * static_cast<size_t>(n_ + 1) + static_cast<size_t>(i);
  }

  void init_layer(OracleLayer<S>& layer) const {
    const auto nsym = static_cast<size_t>(g_.num_symbols());
    layer.exact.assign(nsym * static_cast<size_t>(n_ + 1) * static_cast<size_t>(n_ + 1),
                       sr_.zero());
    layer.total.assign(nsym, sr_.zero());
    layer.eps.assign(nsym, sr_.zero());
    layer.nonempty.assign(nsym, sr_.zero());
    layer.over.assign(nsym * static_cast<size_t>(n_ + 1), sr_.zero());
  }

  void seed_terminals(OracleLayer<S>& layer) const {
    for (auto t : g_.terminal_ids()) {
      layer.total[static_cast<size_t>(t)] = sr_.one();
      layer.nonempty[static_cast<size_t>(t)] = sr_.one();
      layer.over[over_idx(t, n_)] = sr_.one();
      for (std::int64_t i = 0; i < n_; ++i) {
        if (token_ids_[static_cast<size_t>(i)] == t) {
          layer.exact[exact_idx(t, i, i + 1)] = sr_.one();
        }
      }
    }
  }

  void step() {
    for (auto nt : g_.nonterminal_ids()) {
      auto s = static_cast<size_t>(nt);
      cur_.total[s] = sr_.zero();
      cur_.eps[s] = sr_.zero();
      cur_.nonempty[s] = sr_.zero();
      for (std::int64_t i = 0; i <= n_; ++i) {
        cur_.over[over_idx(nt, i)] = sr_.zero();
        for (std::int64_t j = i; j <= n_; ++j) cur_.exact[exact_idx(nt, i, j)] = sr_.zero();
      }
    }

    for (const auto& r : g_.rules()) {
      auto lhs = static_cast<size_t>(r.lhs);

      V tprod = r.weight;
      for (auto c : r.rhs) tprod = sr_.mul(tprod, prev_.total[static_cast<size_t>(c)]);
      cur_.total[lhs] = sr_.add(cur_.total[lhs], tprod);

      V eprod = r.weight;
      for (auto c : r.rhs) eprod = sr_.mul(eprod, prev_.eps[static_cast<size_t>(c)]);
      cur_.eps[lhs] = sr_.add(cur_.eps[lhs], eprod);

      // First nonempty child m; earlier children empty, later unconstrained.
      for (size_t m = 0; m < r.rhs.size(); ++m) {
        V w = r.weight;
        for (size_t c = 0; c < m; ++c) w = sr_.mul(w, prev_.eps[static_cast<size_t>(r.rhs[c])]);
        w = sr_.mul(w, prev_.nonempty[static_cast<size_t>(r.rhs[m])]);
        for (size_t c = m + 1; c < r.rhs.size(); ++c) {
          w = sr_.mul(w, prev_.total[static_cast<size_t>(r.rhs[c])]);
        }
        cur_.nonempty[lhs] = sr_.add(cur_.nonempty[lhs], w);
      }

      for (std::int64_t i = 0; i <= n_; ++i) {
        for (std::int64_t j = i; j <= n_; ++j) {
          V v = sum_exact(r.rhs, 0, i, j);
          if (!sr_.is_zero(v)) {
            const size_t slot = exact_idx(r.lhs, i, j);
            cur_.exact[slot] = sr_.add(cur_.exact[slot], sr_.mul(r.weight, v));
          }
        }
        V q = sum_over(r.rhs, 0, i);
        if (!sr_.is_zero(q)) {
          const size_t slot = over_idx(r.lhs, i);
          cur_.over[slot] = sr_.add(cur_.over[slot], sr_.mul(r.weight, q));
        }
      }
    }

    // Trees with nonempty yield trivially extend past the end of x.
    for (auto nt : g_.nonterminal_ids()) {
      cur_.over[over_idx(nt, n_)] = cur_.nonempty[static_cast<size_t>(nt)];
    }
    prev_ = cur_;
  }

  /// Sum over tilings of x[i..j) by the children c.. (previous layer).
  V sum_exact(const std::vector<std::int32_t>& children, size_t c, std::int64_t i,
              std::int64_t j) const {
    if (c == children.size()) return i == j ? sr_.one() : sr_.zero();
    V res = sr_.zero();
    for (std::int64_t m = i; m <= j; ++m) {
      const V& head = prev_.exact[exact_idx(children[c], i, m)];
      if (sr_.is_zero(head)) continue;
      V tail = sum_exact(children, c + 1, m, j);
      if (sr_.is_zero(tail)) continue;
      res = sr_.add(res, sr_.mul(head, tail));
    }
    return res;
  }

  /// Sum over ways children c.. consume x[i..N) and strictly overshoot:
  /// either child c is the crossing child, or it tiles inside x and the
  /// crossing happens later.
  V sum_over(const std::vector<std::int32_t>& children, size_t c, std::int64_t i) const {
    if (c == children.size()) return sr_.zero();
    V res = prev_.over[over_idx(children[c], i)];
    for (size_t cc = c + 1; cc < children.size(); ++cc) {
      res = sr_.mul(res, prev_.total[static_cast<size_t>(children[cc])]);
    }
    for (std::int64_t m = i; m <= n_; ++m) {
      const V& head = prev_.exact[exact_idx(children[c], i, m)];
      if (sr_.is_zero(head)) continue;
      V tail = sum_over(children, c + 1, m);
      if (sr_.is_zero(tail)) continue;
      res = sr_.add(res, sr_.mul(head, tail));
    }
    return res;
  }

  const WeightedGrammar<S>& g_;
  const S& sr_;
  std::int64_t n_;
  std::vector<std::int32_t> token_ids_;
  OracleLayer<S> prev_, cur_;
};

}  // namespace detail

/// Total weight of derivation trees of height <= max_height with yield
/// exactly x.
template <Semiring S>
typename S::Value oracle_weight(const WeightedGrammar<S>& g, std::span<const std::string> tokens,
                                int max_height) {
  detail::OracleDp<S> dp(g, tokens);
  dp.run(max_height);
  return dp.exact_weight(g.start(), 0, static_cast<std::int64_t>(tokens.size()));
}

/// Total weight of derivation trees of height <= max_height whose yield has
/// x as a prefix. Lower-bounds the prefix weight; converges as the height
/// bound grows.
template <Semiring S>
typename S::Value oracle_prefix_weight(const WeightedGrammar<S>& g,
                                       std::span<const std::string> tokens, int max_height) {
  detail::OracleDp<S> dp(g, tokens);
  dp.run(max_height);
  const auto& sr = g.semiring();
  return sr.add(dp.exact_weight(g.start(), 0, static_cast<std::int64_t>(tokens.size())),
                dp.over_weight(g.start(), 0));
}

/// Height-restricted totals (the Kleene iterate at the given height).
template <Semiring S>
typename S::Value oracle_total_weight(const WeightedGrammar<S>& g, std::int32_t sym,
                                      int max_height) {
  detail::OracleDp<S> dp(g, {});
  dp.run(max_height);
  return dp.total_weight(sym);
}

}  // namespace wcfg

#endif  // WCFG_ORACLE_HPP_
