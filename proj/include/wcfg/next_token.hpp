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

#ifndef WCFG_NEXT_TOKEN_HPP_
#define WCFG_NEXT_TOKEN_HPP_

#include <map>
#include <optional>
#include <string>

#include "wcfg/semiring.hpp"

namespace wcfg {

/// Prefix weights of all one-token extensions of a string: weights(sigma) is
/// the prefix weight of x followed by sigma; eos_weight is present iff EOS
/// augmentation was requested and then equals the weight of x itself.
template <Semiring S>
struct NextTokenVector {
  std::map<std::string, typename S::Value> weights;
  std::optional<typename S::Value> eos_weight;
};

/// Conditional next-token probabilities over the alphabet plus EOS.
struct ConditionalDistribution {
  std::map<std::string, double> probs;
};

}  // namespace wcfg

#endif  // WCFG_NEXT_TOKEN_HPP_
