#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "isac/rng.hpp"

using isac::CounterRng;

TEST_CASE("first output matches the reference SplitMix64 sequence") {
  // SplitMix64 seeded with 0 starts 0xe220a8397b1dcdaf, 0x6e789e6aa1b965f4.
  CounterRng rng(0);
  CHECK(rng.next_u64() == 0xe220a8397b1dcdafULL);
  CHECK(rng.next_u64() == 0x6e789e6aa1b965f4ULL);
  CHECK(rng.counter() == 2);
}

TEST_CASE("output i is a pure function of key and counter") {
  CounterRng rng(12345);
  for (std::uint64_t i = 0; i < 100; ++i) {
    const auto expected = isac::mix64(12345 + (i + 1) * 0x9e3779b97f4a7c15ULL);
    CHECK(rng.next_u64() == expected);
  }
}

TEST_CASE("same key gives the same stream") {
  CounterRng a(99), b(99);
  for (int i = 0; i < 1000; ++i) REQUIRE(a.normal() == b.normal());
}

TEST_CASE("split does not advance the parent and yields distinct streams") {
  CounterRng parent(7);
  const auto c1 = parent.split(1);
  const auto c2 = parent.split(2);
  CHECK(parent.counter() == 0);
  CHECK(c1.key() != c2.key());
  CHECK(parent.split(1).key() == c1.key());
  CounterRng x = c1, y = c2;
  int equal = 0;
  for (int i = 0; i < 100; ++i) equal += x.next_u64() == y.next_u64();
  CHECK(equal == 0);
}

TEST_CASE("derived trial seeds do not collide") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t k = 0; k < 100000; ++k) seen.insert(isac::derive_seed(42, k));
  CHECK(seen.size() == 100000);
  CHECK(isac::derive_seed(1, 0) != isac::derive_seed(2, 0));
}

TEST_CASE("uniform stays in [0, 1) and has the right mean") {
  CounterRng rng(3);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.005));
}

TEST_CASE("uniform_index is unbiased over a small range") {
  CounterRng rng(11);
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const auto k = rng.uniform_index(7);
    REQUIRE(k < 7);
    ++counts[k];
  }
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - n / 7.0) * (c - n / 7.0) / (n / 7.0);
  // 6 degrees of freedom; 22.5 is the 0.999 quantile.
  CHECK(chi2 < 22.5);
}

TEST_CASE("normal, complex normal and exponential moments") {
  CounterRng rng(5);
  const int n = 200000;
  double s1 = 0, s2 = 0, e1 = 0, c2 = 0, cr = 0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s1 += z;
    s2 += z * z;
    e1 += rng.exponential();
    const auto c = rng.complex_normal(2.0);
    c2 += std::norm(c);
    cr += c.real() * c.imag();
  }
  CHECK(std::abs(s1 / n) < 0.01);
  CHECK(s2 / n == doctest::Approx(1.0).epsilon(0.01));
  CHECK(e1 / n == doctest::Approx(1.0).epsilon(0.01));
  CHECK(c2 / n == doctest::Approx(2.0).epsilon(0.01));
  CHECK(std::abs(cr / n) < 0.01);
}
