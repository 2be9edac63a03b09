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

#ifndef WCFG_GRAMMAR_TEXT_HPP_
#define WCFG_GRAMMAR_TEXT_HPP_

#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "wcfg/grammar.hpp"

namespace wcfg {

// Grammar file format, one item per line:
//   # comment            (to end of line; blank lines ignored)
//   start: <symbol>      (optional, at most once)
//   <weight>: <LHS> -> <rhs token>*
// An empty rhs denotes epsilon; a literal token 'ε' is accepted and dropped.

namespace detail {

inline std::vector<std::string> split_ws(std::string_view s) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace detail

template <Semiring S>
WeightedGrammar<S> parse_grammar_text(std::string_view text, const S& sr = {}) {
  typename WeightedGrammar<S>::Builder builder(sr);
  bool saw_start_directive = false;
  std::string start_name;
  bool any_rule = false;

  int line_no = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos
                                                                           : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto tokens = detail::split_ws(line);
    if (tokens.empty()) continue;

    if (tokens[0] == "start:") {
      if (saw_start_directive) throw SyntaxError(line_no, "duplicate start: directive");
      if (tokens.size() != 2) throw SyntaxError(line_no, "start: expects exactly one symbol");
      saw_start_directive = true;
      start_name = tokens[1];
      continue;
    }

    // Rule line: "<weight>: <LHS> -> <rhs>*". The weight token carries the
    // trailing colon.
    const std::string& wtok = tokens[0];
    if (wtok.empty() || wtok.back() != ':') {
      throw SyntaxError(line_no, "expected '<weight>:' at start of rule");
    }
    typename S::Value weight;
    try {
      weight = sr.parse_weight(std::string_view(wtok).substr(0, wtok.size() - 1));
    } catch (const WeightParseError& e) {
      throw SyntaxError(line_no, e.what());
    }
    if (tokens.size() < 3 || tokens[2] != "->") {
      throw SyntaxError(line_no, "expected '<weight>: <LHS> -> ...'");
    }
    const std::string& lhs = tokens[1];
    if (lhs == "->" || lhs == "\xce\xb5") {
      throw SyntaxError(line_no, "invalid left-hand-side symbol '" + lhs + "'");
    }
    std::vector<std::string> rhs;
    for (size_t i = 3; i < tokens.size(); ++i) {
      if (tokens[i] == "\xce\xb5") continue;  // explicit epsilon, normalized away
      if (tokens[i] == "->") throw SyntaxError(line_no, "'->' is not a valid symbol");
      rhs.push_back(tokens[i]);
    }
    builder.rule(lhs, rhs, weight);
    any_rule = true;
  }

  if (!any_rule) throw EmptyGrammar("grammar has no rules");
  if (saw_start_directive) builder.set_start(start_name);
  auto g = builder.build();
  if (!g.is_nonterminal(g.start()) ||
      (saw_start_directive && !g.symbols().contains(start_name))) {
    throw Error("start symbol '" + start_name + "' does not appear on any rule left-hand side");
  }
  if (saw_start_directive) {
    bool on_lhs = false;
    for (const auto& r : g.rules()) {
      if (g.name(r.lhs) == start_name) on_lhs = true;
    }
    if (!on_lhs) {
      throw Error("start symbol '" + start_name + "' does not appear on any rule left-hand side");
    }
  }
  return g;
}

/// Serializes in the same file format, byte-stable: symbols are already in
/// canonical (name-sorted) id order and rules sorted by LHS id then rhs ids.
template <Semiring S>
std::string serialize_grammar(const WeightedGrammar<S>& g) {
  const S& sr = g.semiring();
  std::string out = "start: " + g.name(g.start()) + "\n";
  for (const auto& r : g.rules()) {
    out += sr.format_weight(r.weight);
    out += ": ";
    out += g.name(r.lhs);
    out += " ->";
    for (auto s : r.rhs) {
      out += ' ';
      out += g.name(s);
    }
    out += '\n';
  }
  return out;
}

}  // namespace wcfg

#endif  // WCFG_GRAMMAR_TEXT_HPP_
