#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "rarebayes/rng.hpp"

using namespace rarebayes;

TEST_CASE("streams are reproducible") {
  RngFactory f(12345);
  RngStream a = f.stream(rngdomain::kChain, 3, 7);
  RngStream b = f.stream(rngdomain::kChain, 3, 7);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("distinct keys give distinct streams") {
  RngFactory f(12345);
  std::set<std::uint64_t> first;
  for (std::uint64_t d : {rngdomain::kLevelZero, rngdomain::kChain, rngdomain::kShuffle,
                          rngdomain::kInner, rngdomain::kOracle})
    for (std::uint64_t a = 0; a < 4; ++a)
      for (std::uint64_t b = 0; b < 4; ++b)
        first.insert(f.stream(d, a, b).next_u64());
  CHECK(first.size() == 5 * 4 * 4);
}

TEST_CASE("subfactory key space differs from parent") {
  RngFactory f(999);
  RngFactory sub = f.subfactory(rngdomain::kInner, 2);
  CHECK(sub.master() != f.master());
  CHECK(f.stream(rngdomain::kChain, 1, 1).next_u64() !=
        sub.stream(rngdomain::kChain, 1, 1).next_u64());
}

TEST_CASE("master seed changes every stream") {
  RngFactory f1(1), f2(2);
  CHECK(f1.stream(rngdomain::kLevelZero, 0).next_u64() !=
        f2.stream(rngdomain::kLevelZero, 0).next_u64());
}

TEST_CASE("uniform stays inside the open interval") {
  RngFactory f(31337);
  RngStream s = f.stream(rngdomain::kOracle, 0);
  for (int i = 0; i < 100000; ++i) {
    double u = s.uniform();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("uniform mean and range transform") {
  RngFactory f(7);
  RngStream s = f.stream(rngdomain::kOracle, 1);
  double acc = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) acc += s.uniform();
  CHECK(acc / n == doctest::Approx(0.5).epsilon(2e-3));
  RngStream t = f.stream(rngdomain::kOracle, 2);
  for (int i = 0; i < 1000; ++i) {
    double v = t.uniform(-2.0, 5.0);
    CHECK(v > -2.0);
    CHECK(v < 5.0);
  }
}

TEST_CASE("normal moments") {
  RngFactory f(42);
  RngStream s = f.stream(rngdomain::kOracle, 3);
  const int n = 200000;
  double m1 = 0.0, m2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = s.normal();
    m1 += x;
    m2 += x * x;
  }
  m1 /= n;
  m2 /= n;
  CHECK(m1 == doctest::Approx(0.0).scale(1.0).epsilon(0.01));
  CHECK(m2 == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("mix_key separates all four arguments") {
  std::uint64_t base = mix_key(1, 2, 3, 4);
  CHECK(base != mix_key(9, 2, 3, 4));
  CHECK(base != mix_key(1, 9, 3, 4));
  CHECK(base != mix_key(1, 2, 9, 4));
  CHECK(base != mix_key(1, 2, 3, 9));
}
