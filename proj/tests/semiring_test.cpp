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

#include <cmath>
#include <random>

#include <doctest.h>

#include "wcfg/semiring.hpp"

using namespace wcfg;

namespace {

struct NoStarSemiring {
  using Value = double;
  using Base = NoStarSemiring;
  Value zero() const { return 0.0; }
  Value one() const { return 1.0; }
  Value add(Value a, Value b) const { return a + b; }
  Value mul(Value a, Value b) const { return a * b; }
  bool is_zero(Value v) const { return v == 0.0; }
};

}  // namespace

TEST_SUITE("semiring") {
  TEST_CASE("real axioms hold on sampled triples") {
    RealSemiring sr;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
      double a = dist(rng), b = dist(rng), c = dist(rng);
      CHECK(std::abs(sr.add(sr.add(a, b), c) - sr.add(a, sr.add(b, c))) <= 1e-12);
      CHECK(sr.add(a, b) == sr.add(b, a));
      CHECK(sr.add(a, sr.zero()) == a);
      CHECK(std::abs(sr.mul(sr.mul(a, b), c) - sr.mul(a, sr.mul(b, c))) <= 1e-12);
      CHECK(sr.mul(a, b) == sr.mul(b, a));
      CHECK(sr.mul(a, sr.one()) == a);
      CHECK(std::abs(sr.mul(a, sr.add(b, c)) - sr.add(sr.mul(a, b), sr.mul(a, c))) <= 1e-12);
      CHECK(sr.mul(a, sr.zero()) == 0.0);
    }
  }

  TEST_CASE("star: empty series, geometric series, divergence") {
    RealSemiring sr;
    CHECK(sr.star(0.0) == 1.0);

    // Truncated geometric series as the independent reference.
    double series = 0.0, pow = 1.0;
    for (int k = 0; k <= 60; ++k) {
      series += pow;
      pow *= 0.3;
    }
    CHECK(std::abs(sr.star(0.3) - series) <= 1e-12);
    CHECK(std::abs(sr.star(0.3) - 1.0 / 0.7) <= 1e-12);

    CHECK_THROWS_AS(sr.star(1.0), StarDiverges);
    CHECK_THROWS_AS(sr.star(1.5), StarDiverges);

    BooleanSemiring bs;
    CHECK(bs.star(true) == true);
    CHECK(bs.star(false) == true);

    LogRealSemiring ls;
    CHECK(std::abs(ls.to_real(ls.star(ls.from_real(0.3))) - 1.0 / 0.7) <= 1e-9);
    CHECK_THROWS_AS(ls.star(ls.from_real(1.0)), StarDiverges);
  }

  TEST_CASE("star axiom star(w) = 1 + w*star(w)") {
    RealSemiring sr;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> dist(0.0, 0.95);
    for (int i = 0; i < 200; ++i) {
      double w = dist(rng);
      double s = sr.star(w);
      CHECK(sr.approx_eq(s, sr.add(sr.one(), sr.mul(w, s)), 1e-9, 1e-9));
    }
  }

  TEST_CASE("boolean and real agree under the support map") {
    RealSemiring sr;
    BooleanSemiring bs;
    auto support = [](double w) { return w != 0.0; };
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> dist(0.0, 0.99);
    for (int i = 0; i < 500; ++i) {
      double a = (i % 3 == 0) ? 0.0 : dist(rng);
      double b = (i % 5 == 0) ? 0.0 : dist(rng);
      CHECK(support(sr.add(a, b)) == bs.add(support(a), support(b)));
      CHECK(support(sr.mul(a, b)) == bs.mul(support(a), support(b)));
      CHECK(support(sr.star(a)) == bs.star(support(a)));
    }
  }

  TEST_CASE("log-real mirrors real arithmetic") {
    RealSemiring sr;
    LogRealSemiring ls;
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (int i = 0; i < 300; ++i) {
      double a = dist(rng), b = dist(rng);
      CHECK(ls.approx_eq(ls.add(ls.from_real(a), ls.from_real(b)), ls.from_real(sr.add(a, b))));
      CHECK(ls.approx_eq(ls.mul(ls.from_real(a), ls.from_real(b)), ls.from_real(sr.mul(a, b))));
    }
    CHECK(ls.is_zero(ls.zero()));
    CHECK(ls.to_real(ls.one()) == 1.0);
    CHECK(ls.to_real(ls.add(ls.zero(), ls.from_real(0.25))) == doctest::Approx(0.25));
  }

  TEST_CASE("op counter counts every add and mul") {
    OpCounter counter;
    Counting<RealSemiring> sr{{}, &counter};
    auto baseline = counter.total();
    double acc = sr.one();
    for (int k = 0; k < 17; ++k) acc = sr.mul(acc, 0.5);
    CHECK(counter.muls() == baseline + 17);
    auto before_adds = counter.total();
    (void)sr.add(acc, acc);
    CHECK(counter.total() == before_adds + 1);
    CHECK(counter.adds() == 1);
  }

  TEST_CASE("counting view leaves values unchanged") {
    OpCounter counter;
    Counting<RealSemiring> counted{{}, &counter};
    RealSemiring plain;
    CHECK(counted.add(0.25, 0.5) == plain.add(0.25, 0.5));
    CHECK(counted.mul(0.25, 0.5) == plain.mul(0.25, 0.5));
    CHECK(counted.star(0.5) == plain.star(0.5));
  }

  TEST_CASE("approx_eq uses combined absolute and relative tolerance") {
    RealSemiring sr;
    CHECK(sr.approx_eq(1.0, 1.0 + 5e-10));
    CHECK(!sr.approx_eq(1.0, 1.0 + 5e-8));
    CHECK(sr.approx_eq(1e12, 1e12 * (1.0 + 1e-10)));  // relative part
    CHECK(sr.approx_eq(0.0, 5e-10));                  // absolute part
    BooleanSemiring bs;
    CHECK(bs.approx_eq(true, true));
    CHECK(!bs.approx_eq(true, false));
  }

  TEST_CASE("semiring_star helper reports missing capability") {
    RealSemiring sr;
    CHECK(semiring_star(sr, 0.5) == 2.0);
    NoStarSemiring ns;
    CHECK_THROWS_AS(semiring_star(ns, 0.5), StarUnsupported);
  }

  TEST_CASE("weight parsing and formatting round-trip") {
    RealSemiring sr;
    CHECK(sr.parse_weight("0.25") == 0.25);
    CHECK(sr.parse_weight("1e-3") == 1e-3);
    CHECK_THROWS_AS(sr.parse_weight("abc"), WeightParseError);
    CHECK_THROWS_AS(sr.parse_weight("-0.5"), WeightParseError);
    CHECK_THROWS_AS(sr.parse_weight("0.5x"), WeightParseError);
    double v = 0.30000000000000004;
    CHECK(sr.parse_weight(sr.format_weight(v)) == v);

    BooleanSemiring bs;
    CHECK(bs.parse_weight("1") == true);
    CHECK(bs.parse_weight("0") == false);
    CHECK_THROWS_AS(bs.parse_weight("0.5"), WeightParseError);

    LogRealSemiring ls;
    CHECK(ls.to_real(ls.parse_weight("0.25")) == doctest::Approx(0.25));
  }
}
