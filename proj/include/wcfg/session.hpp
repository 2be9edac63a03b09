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

#ifndef WCFG_SESSION_HPP_
#define WCFG_SESSION_HPP_

#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "wcfg/automata.hpp"
#include "wcfg/cky.hpp"
#include "wcfg/earley.hpp"
#include "wcfg/next_token.hpp"
#include "wcfg/prefix.hpp"
#include "wcfg/totals.hpp"
#include "wcfg/transforms.hpp"

namespace wcfg {

enum class Backend { kCky, kEarley };

inline Backend backend_from_string(const std::string& s) {
  if (s == "cky") return Backend::kCky;
  if (s == "earley") return Backend::kEarley;
  throw Error("unknown backend '" + s + "' (expected cky or earley)");
}

/// Owns a grammar and memoizes every preprocessed form the parsers need
/// (the one-time cost of preprocessing is amortized over all strings parsed
/// with the same grammar). Lazy slots are mutex-guarded; everything handed
/// out is immutable and shareable across threads.
template <Semiring S>
class ParserSession {
 public:
  using Value = typename S::Value;

  explicit ParserSession(WeightedGrammar<S> g, TotalsOptions topts = {})
      : sr_(g.semiring()),
        grammar_(std::make_shared<const WeightedGrammar<S>>(std::move(g))),
        topts_(topts) {}

  ParserSession(const ParserSession&) = delete;
  ParserSession& operator=(const ParserSession&) = delete;

  const WeightedGrammar<S>& grammar() const { return *grammar_; }
  const S& semiring() const { return sr_; }

  std::shared_ptr<const CnfGrammar<S>> cnf_plain() {
    std::lock_guard<std::recursive_mutex> lock(mu_);
    if (!cnf_plain_) {
      cnf_plain_ =
          std::make_shared<const CnfGrammar<S>>(ensure_cnf(eliminate_dead_rules(*grammar_)));
    }
    return cnf_plain_;
  }

  std::shared_ptr<const EarleyGrammar<S>> earley_plain() {
    std::lock_guard<std::recursive_mutex> lock(mu_);
    if (!earley_plain_) {
      earley_plain_ = std::make_shared<const EarleyGrammar<S>>(earley_preprocess(*grammar_));
    }
    return earley_plain_;
  }

  std::shared_ptr<const WeightedGrammar<S>> ctf() {
    std::lock_guard<std::recursive_mutex> lock(mu_);
    if (!ctf_) ctf_ = std::make_shared<const WeightedGrammar<S>>(ensure_ctf(*grammar_));
    return ctf_;
  }

  std::shared_ptr<const TotalWeights<S>> totals() {
    std::lock_guard<std::recursive_mutex> lock(mu_);
    if (!totals_) {
      totals_ = std::make_shared<const TotalWeights<S>>(total_weights(*ctf(), sr_, topts_));
    }
    return totals_;
  }

  std::shared_ptr<const PrefixGrammar<S>> prefix() {
    std::lock_guard<std::recursive_mutex> lock(mu_);
    if (!prefix_) {
      prefix_ = std::make_shared<const PrefixGrammar<S>>(prefix_grammar(*ctf(), *totals()));
    }
    return prefix_;
  }

  std::shared_ptr<const CnfGrammar<S>> cnf_prefix() {
    std::lock_guard<std::recursive_mutex> lock(mu_);
    if (!cnf_prefix_) {
      cnf_prefix_ = std::make_shared<const CnfGrammar<S>>(
          ensure_cnf(eliminate_dead_rules(prefix()->grammar)));
    }
    return cnf_prefix_;
  }

  std::shared_ptr<const EarleyGrammar<S>> earley_prefix() {
    std::lock_guard<std::recursive_mutex> lock(mu_);
    if (!earley_prefix_) {
      earley_prefix_ =
          std::make_shared<const EarleyGrammar<S>>(earley_preprocess(prefix()->grammar));
    }
    return earley_prefix_;
  }

  /// Session over the EOS-augmented grammar; drives conditional
  /// distributions and next-token vectors with an EOS component.
  ParserSession<S>& eos() {
    std::lock_guard<std::recursive_mutex> lock(mu_);
    if (!eos_) eos_ = std::unique_ptr<ParserSession<S>>(
                   new ParserSession<S>(eos_augment(*grammar_), topts_));
    return *eos_;
  }

  Value parse(std::span<const std::string> tokens, Backend b, OpCounter* ops = nullptr) {
    if (b == Backend::kCky) {
      auto g = cnf_plain();
      return dispatch(ops, [&](const auto& sr) { return incr_cky(g, sr, tokens).goal(sr_); });
    }
    auto g = earley_plain();
    return dispatch(ops, [&](const auto& sr) { return earley(g, sr, tokens).goal(sr_); });
  }

  Value prefix_parse(std::span<const std::string> tokens, Backend b, OpCounter* ops = nullptr) {
    if (b == Backend::kCky) {
      auto g = cnf_prefix();
      return dispatch(ops, [&](const auto& sr) { return incr_cky(g, sr, tokens).goal(sr_); });
    }
    auto g = earley_prefix();
    return dispatch(ops, [&](const auto& sr) { return earley(g, sr, tokens).goal(sr_); });
  }

  /// Aggregation value Z_x(theta) of the next-token lattice under the prefix
  /// grammar. The explicit-theta path exists for finite-difference checks.
  Value lattice_value(std::span<const std::string> tokens, const ParameterVector<S>& theta,
                      Backend b, OpCounter* ops = nullptr) {
    if (b == Backend::kCky) {
      auto g = cnf_prefix();
      auto dense = densify_theta(g->grammar, theta);
      return dispatch(ops, [&](const auto& sr) {
        auto state = incr_cky(g, sr, tokens);
        return cky_lattice_value(*g, sr, state, dense);
      });
    }
    auto g = earley_prefix();
    auto dense = densify_theta(g->grammar, theta);
    return dispatch(ops, [&](const auto& sr) {
      auto state = earley(g, sr, tokens);
      return earley_lattice_value(*g, sr, state, dense);
    });
  }

  /// Next-token weight vector J(.|x): one parser pass plus one backward
  /// sweep, no per-symbol parser calls.
  NextTokenVector<S> next_token(std::span<const std::string> tokens, Backend b,
                                bool with_eos = false, OpCounter* ops = nullptr) {
    if (with_eos) {
      NextTokenVector<S> inner = eos().next_token(tokens, b, false, ops);
      NextTokenVector<S> out;
      auto it = inner.weights.find(kEosToken);
      out.eos_weight = it == inner.weights.end() ? sr_.zero() : it->second;
      if (it != inner.weights.end()) inner.weights.erase(it);
      out.weights = std::move(inner.weights);
      return out;
    }
    // The vector's domain is the original alphabet; terminals that died in
    // preprocessing keep an explicit zero.
    NextTokenVector<S> out;
    if (b == Backend::kCky) {
      auto g = cnf_prefix();
      auto by_id = dispatch(ops, [&](const auto& sr) {
        auto state = incr_cky(g, sr, tokens);
        return cky_next_token_weights(*g, sr, state);
      });
      out.weights = widen_to_alphabet(g->grammar, by_id);
    } else {
      auto g = earley_prefix();
      auto by_id = dispatch(ops, [&](const auto& sr) {
        auto state = earley(g, sr, tokens);
        return earley_next_token_weights(*g, sr, state);
      });
      out.weights = widen_to_alphabet(g->grammar, by_id);
    }
    return out;
  }

  /// Conditional next-token distribution over the alphabet plus EOS, via the
  /// EOS-augmented prefix grammar: p(EOS|x) = w(x)/lambda(x) arrives as the
  /// EOS component of the vector.
  ConditionalDistribution conditional(std::span<const std::string> tokens, Backend b)
    requires HasRatio<S>
  {
    ParserSession<S>& es = eos();
    if (b == Backend::kCky) {
      auto g = es.cnf_prefix();
      auto state = incr_cky(g, sr_, tokens);
      return assemble_conditional(es, g->grammar, cky_next_token_weights(*g, sr_, state),
                                  state.goal(sr_));
    }
    auto g = es.earley_prefix();
    auto state = earley(g, sr_, tokens);
    return assemble_conditional(es, g->grammar, earley_next_token_weights(*g, sr_, state),
                                state.goal(sr_));
  }

 private:
  static WeightedGrammar<S> earley_preprocess(const WeightedGrammar<S>& g) {
    // Dead rules go first: unary closure must not see cycles that only dead
    // nonterminals sustain. Nullary removal needs CTF; binarization is
    // skipped when the grammar is already nullary-free (Earley's
    // light-preprocessing advantage).
    WeightedGrammar<S> g0 = eliminate_dead_rules(g);
    WeightedGrammar<S> g1 = is_nullary_free(g0) ? g0 : ensure_nullary_free(ensure_ctf(g0));
    return ensure_unary_cycle_free(g1);
  }

  template <class F>
  auto dispatch(OpCounter* ops, F&& f) {
    if (ops != nullptr) return f(Counting<S>{sr_, ops});
    return f(sr_);
  }

  // theta's domain must be exactly the original alphabet; terminals absent
  // from the packed grammar (dead in preprocessing) contribute nothing.
  std::vector<Value> densify_theta(const WeightedGrammar<S>& packed,
                                   const ParameterVector<S>& theta) {
    if (theta.values.size() != grammar_->terminal_ids().size()) {
      throw UnknownTerminal("parameter vector domain must equal the alphabet");
    }
    for (const auto& [tok, v] : theta.values) {
      auto id = grammar_->symbols().find(tok);
      if (!id.has_value() || !grammar_->is_terminal(*id)) {
        throw UnknownTerminal("'" + tok + "' is not in the alphabet");
      }
    }
    std::vector<Value> dense(static_cast<size_t>(packed.num_symbols()), sr_.zero());
    for (auto tid : packed.terminal_ids()) dense[static_cast<size_t>(tid)] = theta.at(packed.name(tid));
    return dense;
  }

  std::map<std::string, Value> widen_to_alphabet(const WeightedGrammar<S>& packed,
                                                 const std::vector<Value>& by_id) {
    std::map<std::string, Value> out;
    for (auto tid : grammar_->terminal_ids()) {
      const std::string& name = grammar_->name(tid);
      auto packed_id = packed.symbols().find(name);
      out[name] = packed_id.has_value() && packed.is_terminal(*packed_id)
                      ? by_id[static_cast<size_t>(*packed_id)]
                      : sr_.zero();
    }
    return out;
  }

  ConditionalDistribution assemble_conditional(ParserSession<S>& eos_session,
                                               const WeightedGrammar<S>& packed,
                                               const std::vector<Value>& by_id, Value denom)
    requires HasRatio<S>
  {
    if (sr_.is_zero(denom)) {
      throw ZeroPrefixMass("prefix has zero mass; conditional distribution undefined");
    }
    ConditionalDistribution dist;
    auto widened = eos_session.widen_to_alphabet(packed, by_id);
    for (const auto& [tok, w] : widened) dist.probs[tok] = sr_.ratio(w, denom);
    return dist;
  }

  S sr_;
  std::shared_ptr<const WeightedGrammar<S>> grammar_;
  TotalsOptions topts_;
  std::recursive_mutex mu_;
  std::shared_ptr<const CnfGrammar<S>> cnf_plain_;
  std::shared_ptr<const EarleyGrammar<S>> earley_plain_;
  std::shared_ptr<const WeightedGrammar<S>> ctf_;
  std::shared_ptr<const TotalWeights<S>> totals_;
  std::shared_ptr<const PrefixGrammar<S>> prefix_;
  std::shared_ptr<const CnfGrammar<S>> cnf_prefix_;
  std::shared_ptr<const EarleyGrammar<S>> earley_prefix_;
  std::unique_ptr<ParserSession<S>> eos_;
};

template <Semiring S>
typename S::Value prefix_parse(ParserSession<S>& session, std::span<const std::string> tokens,
                               Backend b, OpCounter* ops = nullptr) {
  return session.prefix_parse(tokens, b, ops);
}

template <Semiring S>
NextTokenVector<S> next_token_cky(ParserSession<S>& session, std::span<const std::string> tokens,
                                  bool with_eos = false) {
  return session.next_token(tokens, Backend::kCky, with_eos);
}

template <Semiring S>
NextTokenVector<S> next_token_earley(ParserSession<S>& session,
                                     std::span<const std::string> tokens, bool with_eos = false) {
  return session.next_token(tokens, Backend::kEarley, with_eos);
}

template <Semiring S>
ConditionalDistribution conditional_distribution(ParserSession<S>& session,
                                                 std::span<const std::string> tokens,
                                                 Backend b = Backend::kCky) {
  return session.conditional(tokens, b);
}

}  // namespace wcfg

#endif  // WCFG_SESSION_HPP_
