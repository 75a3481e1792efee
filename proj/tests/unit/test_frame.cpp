#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <vector>

#include "isac/error.hpp"
#include "isac/frame.hpp"
#include "isac/rng.hpp"
#include "oracles.hpp"

using namespace isac;

namespace {

bool contains(const std::vector<cdouble>& set, cdouble p, double tol) {
  return std::any_of(set.begin(), set.end(), [&](cdouble q) { return std::abs(p - q) < tol; });
}

double brute_kurtosis(const std::vector<cdouble>& pts) {
  double acc = 0.0;
  for (const auto& p : pts) acc += std::norm(p) * std::norm(p);
  return acc / static_cast<double>(pts.size());
}

}  // namespace

TEST_CASE("QPSK is the four unit-modulus diagonal points") {
  const auto a = make_alphabet(AlphabetKind::Qpsk);
  REQUIRE(a.points.size() == 4);
  const double s = 1.0 / std::sqrt(2.0);
  for (cdouble p : {cdouble{s, s}, cdouble{s, -s}, cdouble{-s, s}, cdouble{-s, -s}}) {
    CHECK(contains(a.points, p, 1e-15));
  }
}

TEST_CASE("square QAM matches the enumerated odd-integer grid") {
  for (auto [kind, order] : {std::pair{AlphabetKind::Qam16, 16}, std::pair{AlphabetKind::Qam64, 64}}) {
    const auto a = make_alphabet(kind);
    const auto ref = oracle::square_qam_grid(order);
    REQUIRE(a.points.size() == ref.size());
    for (const auto& p : ref) CHECK(contains(a.points, p, 1e-14));
  }
  // The grid {+-1, ..., +-7}^2 has mean energy 42.
  const auto q64 = make_alphabet(AlphabetKind::Qam64);
  for (const auto& p : q64.points) {
    const double re = p.real() * std::sqrt(42.0);
    const double im = p.imag() * std::sqrt(42.0);
    CHECK(std::abs(re - std::round(re)) < 1e-12);
    CHECK(std::abs(im - std::round(im)) < 1e-12);
    CHECK(static_cast<long>(std::round(std::abs(re))) % 2 == 1);
  }
}

TEST_CASE("every built-in alphabet has zero mean and unit power") {
  for (auto kind : {AlphabetKind::Qpsk, AlphabetKind::Qam16, AlphabetKind::Qam64}) {
    const auto a = make_alphabet(kind);
    CHECK(std::abs(mean_value(a.points)) < 1e-12);
    CHECK(std::abs(mean_power(a.points) - 1.0) < 1e-12);
  }
}

TEST_CASE("nearest neighbours differ in exactly one label bit") {
  for (auto kind : {AlphabetKind::Qam16, AlphabetKind::Qam64}) {
    const auto pts = make_alphabet(kind).points;
    double dmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i + 1; j < pts.size(); ++j) dmin = std::min(dmin, std::abs(pts[i] - pts[j]));
    int pairs = 0;
    for (unsigned i = 0; i < pts.size(); ++i) {
      for (unsigned j = i + 1; j < pts.size(); ++j) {
        if (std::abs(pts[i] - pts[j]) < dmin * 1.0001) {
          CHECK(std::popcount(i ^ j) == 1);
          ++pairs;
        }
      }
    }
    const int side = static_cast<int>(std::lround(std::sqrt(pts.size())));
    CHECK(pairs == 2 * side * (side - 1));
  }
}

TEST_CASE("custom alphabets are centred and scaled") {
  const std::vector<cdouble> two{{2.0, 0.0}, {-2.0, 0.0}};
  const auto a = make_custom_alphabet(two);
  CHECK(a.kind == AlphabetKind::Custom);
  CHECK(contains(a.points, {1.0, 0.0}, 1e-15));
  CHECK(contains(a.points, {-1.0, 0.0}, 1e-15));

  const std::vector<cdouble> shifted{{3.0, 1.0}, {1.0, 1.0}, {2.0, 2.0}, {2.0, 0.0}};
  const auto b = make_custom_alphabet(shifted);
  CHECK(std::abs(mean_value(b.points)) < 1e-12);
  CHECK(std::abs(mean_power(b.points) - 1.0) < 1e-12);
}

TEST_CASE("invalid custom alphabets are rejected") {
  CHECK_THROWS_AS(make_custom_alphabet(std::vector<cdouble>{}), InvalidAlphabet);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(make_custom_alphabet(std::vector<cdouble>{{1.0, 0.0}, {nan, 0.0}}), InvalidAlphabet);
  CHECK_THROWS_AS(make_custom_alphabet(std::vector<cdouble>{{1.0, 1.0}, {1.0, 1.0}}), InvalidAlphabet);
  CHECK_THROWS_AS(make_alphabet(AlphabetKind::Custom), InvalidAlphabet);
}

TEST_CASE("kurtosis") {
  CHECK(kurtosis(make_alphabet(AlphabetKind::Qpsk)) == 1.0);
  const auto q64 = make_alphabet(AlphabetKind::Qam64);
  CHECK(kurtosis(q64) == doctest::Approx(brute_kurtosis(oracle::square_qam_grid(64))).epsilon(1e-12));
  CHECK(kurtosis(q64) == doctest::Approx(1.381).epsilon(1e-3));
  // Two equiprobable points sqrt(2) e^{j theta} and 0: (4 + 0) / 2.
  const std::vector<cdouble> two{std::polar(std::sqrt(2.0), 0.7), {0.0, 0.0}};
  CHECK(kurtosis(two) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(kurtosis(std::vector<cdouble>{{2.0, 0.0}, {-2.0, 0.0}}), InvalidParameter);
}

TEST_CASE("alphabet names round trip") {
  for (auto kind : {AlphabetKind::Qpsk, AlphabetKind::Qam16, AlphabetKind::Qam64, AlphabetKind::Custom}) {
    CHECK(parse_alphabet_kind(to_string(kind)) == kind);
  }
  CHECK_THROWS_AS(parse_alphabet_kind("qam256"), InvalidParameter);
}

TEST_CASE("frame configuration") {
  FrameConfig cfg;
  CHECK(cfg.symbol_duration() == doctest::Approx(274.0 / (256.0 * 30e3)));
  CHECK(cfg.range_resolution() == doctest::Approx(299792458.0 / (2.0 * 256 * 30e3)));
  CHECK(cfg.velocity_resolution() ==
        doctest::Approx(299792458.0 / (2.0 * 3.5e9 * 64 * cfg.symbol_duration())));
  cfg.n_symbols = 1;
  CHECK_THROWS_AS(cfg.validate(), InvalidParameter);
  cfg = FrameConfig{};
  cfg.subcarrier_spacing_hz = 0.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidParameter);
}

TEST_CASE("draw_frame is deterministic and draws only alphabet points") {
  FrameConfig cfg{2, 2, 30e3, 1, 3.5e9};
  const auto qpsk = make_alphabet(AlphabetKind::Qpsk);
  CounterRng r1(17), r2(17);
  const auto f1 = draw_frame(cfg, qpsk, r1);
  const auto f2 = draw_frame(cfg, qpsk, r2);
  CHECK(f1.symbols == f2.symbols);

  cfg = FrameConfig{64, 32, 30e3, 4, 3.5e9};
  const auto q64 = make_alphabet(AlphabetKind::Qam64);
  CounterRng r3(4);
  const auto f3 = draw_frame(cfg, q64, r3);
  CHECK(f3.n_subcarriers() == 64);
  CHECK(f3.n_symbols() == 32);
  for (const auto& x : f3.symbols.flat()) {
    CHECK(std::find(q64.points.begin(), q64.points.end(), x) != q64.points.end());
  }
}

TEST_CASE("frame moments follow the alphabet") {
  const FrameConfig cfg{1024, 16, 30e3, 72, 3.5e9};
  CounterRng rng(2024);
  const auto fq = draw_frame(cfg, make_alphabet(AlphabetKind::Qpsk), rng);
  double p2 = 0.0;
  for (const auto& x : fq.symbols.flat()) p2 += std::norm(x);
  CHECK(std::abs(p2 / fq.symbols.size() - 1.0) < 0.01);

  const auto f64 = draw_frame(cfg, make_alphabet(AlphabetKind::Qam64), rng);
  double p4 = 0.0;
  for (const auto& x : f64.symbols.flat()) p4 += std::norm(x) * std::norm(x);
  CHECK(std::abs(p4 / f64.symbols.size() - 1.381) < 0.02);
}

TEST_CASE("second and fourth moments converge within three standard errors") {
  const FrameConfig cfg{1024, 128, 30e3, 72, 3.5e9};
  for (auto kind : {AlphabetKind::Qam16, AlphabetKind::Qam64}) {
    const auto alphabet = make_alphabet(kind);
    CounterRng rng(31);
    const auto f = draw_frame(cfg, alphabet, rng);
    const auto n = static_cast<double>(f.symbols.size());
    double m2 = 0, m4 = 0, m2sq = 0, m4sq = 0;
    for (const auto& x : f.symbols.flat()) {
      const double p = std::norm(x);
      m2 += p;
      m4 += p * p;
      m2sq += p * p;
      m4sq += p * p * p * p;
    }
    m2 /= n;
    m4 /= n;
    const double sd2 = std::sqrt(m2sq / n - m2 * m2);
    const double sd4 = std::sqrt(m4sq / n - m4 * m4);
    CHECK(std::abs(m2 - 1.0) < 3.0 * sd2 / std::sqrt(n));
    CHECK(std::abs(m4 - kurtosis(alphabet)) < 3.0 * sd4 / std::sqrt(n));
  }
}
