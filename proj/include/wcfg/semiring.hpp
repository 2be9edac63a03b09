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

#ifndef WCFG_SEMIRING_HPP_
#define WCFG_SEMIRING_HPP_

#include <charconv>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <string>
#include <string_view>

#include "wcfg/errors.hpp"

namespace wcfg {

/// Counts semiring additions and multiplications for instrumented runs.
/// Confined to a single run context; not synchronized.
class OpCounter {
 public:
  void count_add() { ++adds_; }
  void count_mul() { ++muls_; }
  std::uint64_t adds() const { return adds_; }
  std::uint64_t muls() const { return muls_; }
  std::uint64_t total() const { return adds_ + muls_; }
  void reset() { adds_ = muls_ = 0; }

 private:
  std::uint64_t adds_ = 0;
  std::uint64_t muls_ = 0;
};

/// Commutative semiring over nonnegative reals stored directly as doubles.
struct RealSemiring {
  using Value = double;
  using Base = RealSemiring;
  static constexpr const char* kName = "real";

  Value zero() const { return 0.0; }
  Value one() const { return 1.0; }
  Value add(Value a, Value b) const { return a + b; }
  Value mul(Value a, Value b) const { return a * b; }

  // star(w) = sum_{k>=0} w^k = 1/(1-w), defined for |w| < 1.
  Value star(Value w) const {
    if (!(std::abs(w) < 1.0)) {
      throw StarDiverges("star diverges for real weight " + std::to_string(w));
    }
    return 1.0 / (1.0 - w);
  }

  bool is_zero(Value v) const { return v == 0.0; }
  double to_real(Value v) const { return v; }
  Value from_real(double r) const { return r; }

  // Non-finite iterates (overflowing fixed points) never count as converged.
  double distance(Value a, Value b) const {
    if (!std::isfinite(a) || !std::isfinite(b)) {
      return std::numeric_limits<double>::infinity();
    }
    return std::abs(a - b);
  }

  bool approx_eq(Value a, Value b, double atol = 1e-9, double rtol = 1e-9) const {
    return std::abs(a - b) <= atol + rtol * std::max(std::abs(a), std::abs(b));
  }

  double ratio(Value num, Value den) const { return num / den; }

  Value parse_weight(std::string_view tok) const {
    double v = 0.0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || !(v >= 0.0) || std::isinf(v)) {
      throw WeightParseError("invalid real weight '" + std::string(tok) + "'");
    }
    return v;
  }

  std::string format_weight(Value v) const { return format_real(v); }

  // Shortest representation that round-trips the double exactly.
  static std::string format_real(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
  }
};

/// Real semiring in log space: values store ln(w), addition is log-sum-exp.
/// Numerically robust for large grammars where inside weights underflow.
struct LogRealSemiring {
  using Value = double;
  using Base = LogRealSemiring;
  static constexpr const char* kName = "logreal";
  static constexpr double kNegInf = -std::numeric_limits<double>::infinity();

  Value zero() const { return kNegInf; }
  Value one() const { return 0.0; }

  Value add(Value a, Value b) const {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    double hi = std::max(a, b), lo = std::min(a, b);
    return hi + std::log1p(std::exp(lo - hi));
  }

  Value mul(Value a, Value b) const {
    if (a == kNegInf || b == kNegInf) return kNegInf;
    return a + b;
  }

  // star in probability space: 1/(1-p) with p = e^w, needs p < 1 i.e. w < 0.
  Value star(Value w) const {
    if (w == kNegInf) return 0.0;
    if (!(w < 0.0)) {
      throw StarDiverges("star diverges for log-real weight exp(" + std::to_string(w) + ")");
    }
    return -std::log1p(-std::exp(w));
  }

  bool is_zero(Value v) const { return v == kNegInf; }
  double to_real(Value v) const { return std::exp(v); }
  Value from_real(double r) const { return std::log(r); }

  double distance(Value a, Value b) const {
    if (a == kNegInf && b == kNegInf) return 0.0;
    double x = to_real(a), y = to_real(b);
    if (!std::isfinite(x) || !std::isfinite(y)) {
      return std::numeric_limits<double>::infinity();
    }
    return std::abs(x - y);
  }

  bool approx_eq(Value a, Value b, double atol = 1e-9, double rtol = 1e-9) const {
    double x = to_real(a), y = to_real(b);
    return std::abs(x - y) <= atol + rtol * std::max(std::abs(x), std::abs(y));
  }

  double ratio(Value num, Value den) const { return std::exp(num - den); }

  // The file format carries real-space decimals; the log transform is internal.
  Value parse_weight(std::string_view tok) const {
    RealSemiring real;
    return std::log(real.parse_weight(tok));
  }

  std::string format_weight(Value v) const { return RealSemiring::format_real(to_real(v)); }
};

/// Boolean semiring: add = or, mul = and. Used for pure grammaticality.
struct BooleanSemiring {
  using Value = bool;
  using Base = BooleanSemiring;
  static constexpr const char* kName = "boolean";

  Value zero() const { return false; }
  Value one() const { return true; }
  Value add(Value a, Value b) const { return a || b; }
  Value mul(Value a, Value b) const { return a && b; }
  Value star(Value) const { return true; }

  bool is_zero(Value v) const { return !v; }
  double to_real(Value v) const { return v ? 1.0 : 0.0; }
  Value from_real(double r) const { return r != 0.0; }
  double distance(Value a, Value b) const { return a == b ? 0.0 : 1.0; }
  bool approx_eq(Value a, Value b, double = 0, double = 0) const { return a == b; }

  Value parse_weight(std::string_view tok) const {
    if (tok == "1") return true;
    if (tok == "0") return false;
    throw WeightParseError("invalid boolean weight '" + std::string(tok) + "' (expected 1 or 0)");
  }

  std::string format_weight(Value v) const { return v ? "1" : "0"; }
};

template <typename S>
concept Semiring = std::copy_constructible<S> &&
    requires(const S s, const typename S::Value a, const typename S::Value b) {
      typename S::Value;
      typename S::Base;
      { s.zero() } -> std::convertible_to<typename S::Value>;
      { s.one() } -> std::convertible_to<typename S::Value>;
      { s.add(a, b) } -> std::convertible_to<typename S::Value>;
      { s.mul(a, b) } -> std::convertible_to<typename S::Value>;
      { s.is_zero(a) } -> std::convertible_to<bool>;
    };

template <typename S>
concept HasStar = requires(const S s, const typename S::Value v) {
  { s.star(v) } -> std::convertible_to<typename S::Value>;
};

template <typename S>
concept HasRatio = requires(const S s, const typename S::Value v) {
  { s.ratio(v, v) } -> std::convertible_to<double>;
};

/// Instrumented view of a semiring. Parsing with a plain semiring has no
/// counting code at all; passing a Counting view makes the same run count
/// every add/mul against the attached OpCounter.
template <Semiring S>
struct Counting {
  using Value = typename S::Value;
  using Base = typename S::Base;

  S base{};
  OpCounter* counter = nullptr;

  Value zero() const { return base.zero(); }
  Value one() const { return base.one(); }
  Value add(Value a, Value b) const {
    counter->count_add();
    return base.add(a, b);
  }
  Value mul(Value a, Value b) const {
    counter->count_mul();
    return base.mul(a, b);
  }
  Value star(Value v) const
    requires HasStar<S>
  {
    return base.star(v);
  }
  bool is_zero(Value v) const { return base.is_zero(v); }
  double to_real(Value v) const { return base.to_real(v); }
  Value from_real(double r) const { return base.from_real(r); }
  double distance(Value a, Value b) const { return base.distance(a, b); }
  bool approx_eq(Value a, Value b, double atol = 1e-9, double rtol = 1e-9) const {
    return base.approx_eq(a, b, atol, rtol);
  }
};

template <Semiring SR>
using base_semiring_t = typename SR::Base;

/// star with a semiring-capability check; StarUnsupported if absent.
template <Semiring SR>
typename SR::Value semiring_star(const SR& sr, typename SR::Value w) {
  if constexpr (HasStar<SR>) {
    return sr.star(w);
  } else {
    (void)w;
    throw StarUnsupported("semiring does not support star");
  }
}

/// Formats a real value with the given number of significant digits.
inline std::string format_significant(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return std::string(buf);
}

}  // namespace wcfg

#endif  // WCFG_SEMIRING_HPP_
