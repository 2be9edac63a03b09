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

#ifndef WCFG_ERRORS_HPP_
#define WCFG_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace wcfg {

/// Base for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Grammar text could not be parsed; carries the 1-based line number.
struct SyntaxError : Error {
  int line;
  SyntaxError(int line_no, const std::string& what)
      : Error("line " + std::to_string(line_no) + ": " + what), line(line_no) {}
};

/// A weight token is not valid for the selected semiring.
struct WeightParseError : Error {
  using Error::Error;
};

/// The grammar file contains no rules.
struct EmptyGrammar : Error {
  using Error::Error;
};

/// Kleene star does not converge for this weight (real w >= 1).
struct StarDiverges : Error {
  using Error::Error;
};

/// The semiring instance does not provide a star operation.
struct StarUnsupported : Error {
  using Error::Error;
};

/// A transformation precondition does not hold (e.g. arity > 2).
struct PreconditionViolated : Error {
  using Error::Error;
};

/// Total weights did not converge but a converged result is required.
struct TotalsNotConverged : Error {
  using Error::Error;
};

/// The EOS token collides with an existing grammar symbol.
struct EosCollision : Error {
  using Error::Error;
};

/// A generated symbol name collides with a user symbol.
struct SymbolCollision : Error {
  using Error::Error;
};

/// A string contains a symbol outside the declared alphabet.
struct UnknownTerminal : Error {
  using Error::Error;
};

/// A derivation-tree node applies a rule that is not in the grammar.
struct UnknownRule : Error {
  using Error::Error;
};

/// Tree enumeration exceeded the configured cap.
struct ForestTooLarge : Error {
  using Error::Error;
};

/// Conditional distribution requested at a prefix with zero mass.
struct ZeroPrefixMass : Error {
  using Error::Error;
};

/// Power-law fit needs at least two distinct sizes.
struct InsufficientData : Error {
  using Error::Error;
};

/// Power-law fit input contains a non-positive value.
struct NonPositiveValue : Error {
  using Error::Error;
};

}  // namespace wcfg

#endif  // WCFG_ERRORS_HPP_
