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

#ifndef WCFG_TOTALS_HPP_
#define WCFG_TOTALS_HPP_

#include <vector>

#include "wcfg/grammar.hpp"

namespace wcfg {

/// Per-symbol total weights Z (the least solution of the polynomial system
/// Z_X = sum over rules X -> xi_1..xi_M of w * Z_{xi_1} * ... * Z_{xi_M},
/// with Z_sigma = one for terminals), approximated by Kleene fixed-point
/// iteration from Z = zero.
template <Semiring S>
struct TotalWeights {
  using Value = typename S::Value;

  std::vector<Value> z;  // indexed by symbol id
  bool converged = false;
  int iterations = 0;

  Value operator[](std::int32_t id) const { return z[static_cast<size_t>(id)]; }
};

struct TotalsOptions {
  double tol = 1e-12;
  int max_iter = 10000;
};

namespace detail {

/// Shared fixed-point engine. terminal_base is one for totals and zero for
/// null weights (restriction to nullable derivations).
template <Semiring SR>
TotalWeights<base_semiring_t<SR>> solve_polynomial_system(
    const WeightedGrammar<base_semiring_t<SR>>& g, const SR& sr,
    typename SR::Value terminal_base, const TotalsOptions& opts) {
  using V = typename SR::Value;
  TotalWeights<base_semiring_t<SR>> result;
  const auto n = static_cast<size_t>(g.num_symbols());
  result.z.assign(n, sr.zero());
  for (auto t : g.terminal_ids()) result.z[static_cast<size_t>(t)] = terminal_base;

  std::vector<V> next(n);
  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    for (size_t i = 0; i < n; ++i) next[i] = result.z[i];
    for (auto nt : g.nonterminal_ids()) next[static_cast<size_t>(nt)] = sr.zero();
    for (const auto& r : g.rules()) {
      V w = r.weight;
      for (auto s : r.rhs) w = sr.mul(w, result.z[static_cast<size_t>(s)]);
      const auto lhs = static_cast<size_t>(r.lhs);
      next[lhs] = sr.add(next[lhs], w);
    }
    double change = 0.0;
    for (auto nt : g.nonterminal_ids()) {
      change = std::max(change, sr.distance(next[static_cast<size_t>(nt)],
                                            result.z[static_cast<size_t>(nt)]));
    }
    result.z.swap(next);
    result.iterations = iter;
    if (change <= opts.tol) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace detail

/// Kleene iteration on the total-weight system; after k sweeps the iterate
/// equals the mass of derivations of height <= k. Non-convergence is not an
/// error: it is reported through the converged flag.
template <Semiring SR>
TotalWeights<base_semiring_t<SR>> total_weights(const WeightedGrammar<base_semiring_t<SR>>& g,
                                                const SR& sr, const TotalsOptions& opts = {}) {
  return detail::solve_polynomial_system(g, sr, sr.one(), opts);
}

/// Weight of nullable derivations per symbol: the same system with terminals
/// pinned to zero, so only all-epsilon expansions survive.
template <Semiring SR>
TotalWeights<base_semiring_t<SR>> null_weights(const WeightedGrammar<base_semiring_t<SR>>& g,
                                               const SR& sr, const TotalsOptions& opts = {}) {
  return detail::solve_polynomial_system(g, sr, sr.zero(), opts);
}

}  // namespace wcfg

#endif  // WCFG_TOTALS_HPP_
