#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "isac/channel.hpp"
#include "isac/error.hpp"
#include "isac/frame.hpp"
#include "isac/rdm.hpp"
#include "isac/rng.hpp"
#include "oracles.hpp"

using namespace isac;

namespace {

CMatrix random_matrix(std::size_t n, std::size_t m, std::uint64_t seed) {
  CounterRng rng(seed);
  CMatrix out(n, m);
  for (auto& v : out.flat()) v = rng.complex_normal(1.0);
  return out;
}

double max_abs_diff(const CMatrix& a, const CMatrix& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a.flat()[i] - b.flat()[i]));
  return d;
}

// Noiseless channel estimate of one path at bins (nu0, mu0) for a given frame.
CMatrix single_path_estimate(const FrameConfig& cfg, const SymbolFrame& frame, double nu0,
                             double mu0, cdouble gain) {
  const double tau = nu0 / (static_cast<double>(cfg.n_subcarriers) * cfg.subcarrier_spacing_hz);
  const double fd = mu0 / (static_cast<double>(cfg.n_symbols) * cfg.symbol_duration());
  const std::vector<Reflection> r{{std::abs(gain), tau, fd, std::arg(gain)}};
  CounterRng unused(0);
  const auto y = apply_channel(frame, synthesize_channel(cfg, r), 0.0, unused);
  return matched_filter(y, frame).values;
}

}  // namespace

TEST_CASE("matched filter") {
  const FrameConfig cfg{32, 8, 30e3, 4, 3.5e9};
  CounterRng rng(3);
  SUBCASE("constant modulus returns the channel") {
    const auto frame = draw_frame(cfg, make_alphabet(AlphabetKind::Qpsk), rng);
    const std::vector<Reflection> r{{0.5, 2e-6, 700.0, 0.4}};
    const auto h = synthesize_channel(cfg, r);
    CounterRng unused(0);
    const auto hh = matched_filter(apply_channel(frame, h, 0.0, unused), frame);
    CHECK(max_abs_diff(hh.values, h.values) < 1e-12);
  }
  SUBCASE("64-QAM scales each entry by |X|^2") {
    const auto frame = draw_frame(cfg, make_alphabet(AlphabetKind::Qam64), rng);
    const std::vector<Reflection> r{{1.0, 3.0 / (32 * 30e3), 0.0, 0.0}};
    const auto h = synthesize_channel(cfg, r);
    CounterRng unused(0);
    const auto hh = matched_filter(apply_channel(frame, h, 0.0, unused), frame);
    for (std::size_t i = 0; i < h.values.size(); ++i) {
      const cdouble ratio = hh.values.flat()[i] / h.values.flat()[i];
      CHECK(std::abs(ratio - std::norm(frame.symbols.flat()[i])) < 1e-12);
    }
  }
  SUBCASE("zero symbols give zero entries") {
    const std::vector<cdouble> pts{{1.0, 0.0}, {-1.0, 0.0}, {0.0, 0.0}};
    const auto frame = draw_frame(cfg, make_custom_alphabet(pts), rng);
    ReceiveFrame y{CMatrix(32, 8, {1.0, 1.0}), 0.0};
    const auto hh = matched_filter(y, frame);
    for (std::size_t i = 0; i < hh.values.size(); ++i) {
      if (frame.symbols.flat()[i] == cdouble{0.0, 0.0}) CHECK(hh.values.flat()[i] == cdouble{0.0, 0.0});
    }
  }
}

TEST_CASE("range-Doppler matrix") {
  SUBCASE("constant input maps to bin (0, 0)") {
    const auto p = compute_rdm(CMatrix(16, 8, {1.0, 0.0}));
    for (std::size_t nu = 0; nu < 16; ++nu) {
      for (std::size_t mu = 0; mu < 8; ++mu) {
        const cdouble expected = (nu == 0 && mu == 0) ? cdouble{1.0, 0.0} : cdouble{0.0, 0.0};
        CHECK(std::abs(p.values(nu, mu) - expected) < 1e-12);
      }
    }
  }
  SUBCASE("on-grid target at (2, 1) with N=8, M=4") {
    const FrameConfig cfg{8, 4, 30e3, 2, 3.5e9};
    CounterRng rng(5);
    const auto frame = draw_frame(cfg, make_alphabet(AlphabetKind::Qpsk), rng);
    const cdouble gain = std::polar(0.5, std::numbers::pi / 3.0);
    const auto h = single_path_estimate(cfg, frame, 2.0, 1.0, gain);
    const auto p = compute_rdm(h);
    const auto ref = oracle::rdm_double_sum(h);
    CHECK(std::abs(ref(2, 1) - gain) < 1e-12);
    CHECK(std::abs(p.values(2, 1) - gain) < 1e-12);
    for (std::size_t nu = 0; nu < 8; ++nu) {
      for (std::size_t mu = 0; mu < 4; ++mu) {
        if (nu == 2 && mu == 1) continue;
        CHECK(std::abs(p.values(nu, mu)) < 1e-12);
      }
    }
  }
  SUBCASE("agrees with the direct double sum on random input") {
    for (auto [n, m] : {std::pair<std::size_t, std::size_t>{8, 4}, {12, 10}, {31, 6}}) {
      const auto h = random_matrix(n, m, n * 100 + m);
      CHECK(max_abs_diff(compute_rdm(h).values, oracle::rdm_double_sum(h)) < 1e-12);
    }
  }
  SUBCASE("linear") {
    const auto a = random_matrix(16, 8, 1);
    const auto b = random_matrix(16, 8, 2);
    const auto lhs = compute_rdm(a + b).values;
    const auto rhs = compute_rdm(a).values + compute_rdm(b).values;
    CHECK(max_abs_diff(lhs, rhs) < 1e-12);
  }
  SUBCASE("too small") {
    CHECK_THROWS_AS(compute_rdm(CMatrix(1, 8)), InvalidParameter);
    CHECK_THROWS_AS(compute_rdm(CMatrix(8, 1)), InvalidParameter);
  }
  SUBCASE("on-grid exactness at desk size") {
    const FrameConfig cfg;
    CounterRng rng(6);
    const auto frame = draw_frame(cfg, make_alphabet(AlphabetKind::Qpsk), rng);
    const cdouble gain = std::polar(0.8, -2.0);
    const auto p = compute_rdm(single_path_estimate(cfg, frame, 11.0, 60.0, gain));
    for (std::size_t nu = 0; nu < 256; ++nu) {
      for (std::size_t mu = 0; mu < 64; ++mu) {
        if (nu == 11 && mu == 60) {
          CHECK(std::abs(p.values(nu, mu) - gain) < 1e-12);
        } else {
          REQUIRE(std::abs(p.values(nu, mu)) < 1e-10);
        }
      }
    }
  }
}

TEST_CASE("continuous evaluation") {
  SUBCASE("integer points match the transform") {
    const auto h = random_matrix(16, 8, 9);
    const auto p = compute_rdm(h);
    for (std::size_t nu = 0; nu < 16; nu += 3) {
      for (std::size_t mu = 0; mu < 8; mu += 3) {
        CHECK(std::abs(dtft_point(h, nu, mu) - p.values(nu, mu)) < 1e-12);
      }
    }
    // Periodic in both arguments.
    CHECK(std::abs(dtft_point(h, 3.3 + 16.0, 1.7 - 8.0) - dtft_point(h, 3.3, 1.7)) < 1e-12);
  }
  SUBCASE("matches the long-double oracle off grid") {
    const auto h = random_matrix(20, 12, 10);
    for (double nu : {0.25, 7.61, 19.9}) {
      for (double mu : {-0.4, 3.3, 11.5}) {
        CHECK(std::abs(dtft_point(h, nu, mu) - oracle::dtft(h, nu, mu)) < 1e-12);
      }
    }
  }
  SUBCASE("half-bin target, N=8, M=4") {
    const FrameConfig cfg{8, 4, 30e3, 2, 3.5e9};
    CounterRng rng(12);
    const auto frame = draw_frame(cfg, make_alphabet(AlphabetKind::Qpsk), rng);
    const double a = 0.9;
    const auto h = single_path_estimate(cfg, frame, 2.5, 0.0, {a, 0.0});
    CHECK(std::abs(dtft_point(h, 2.5, 0.0)) == doctest::Approx(a).epsilon(1e-12));
    CHECK(std::abs(oracle::dtft(h, 2.5, 0.0)) == doctest::Approx(a).epsilon(1e-12));
    const auto p = compute_rdm(h);
    CHECK(std::abs(p.values(2, 0)) < a);
    CHECK(std::abs(p.values(3, 0)) < a);
    CHECK(std::abs(p.values(2, 0)) == doctest::Approx(std::abs(p.values(3, 0))).epsilon(1e-12));
  }
  SUBCASE("zero input") {
    CHECK(dtft_point(CMatrix(8, 4), 1.3, 2.2) == cdouble{0.0, 0.0});
  }
  SUBCASE("cuts and their derivatives") {
    const auto h = random_matrix(24, 10, 14);
    const DelayCut along_delay(h, 3.7);
    const DopplerCut along_doppler(h, 5.2);
    const double step = 1e-6;
    for (double x : {0.3, 4.9, 8.15}) {
      CHECK(std::abs(along_delay(x) - dtft_point(h, x, 3.7)) < 1e-12);
      CHECK(std::abs(along_doppler(x) - dtft_point(h, 5.2, x)) < 1e-12);
      const cdouble fd_delay = (along_delay(x + step) - along_delay(x - step)) / (2.0 * step);
      const cdouble fd_doppler = (along_doppler(x + step) - along_doppler(x - step)) / (2.0 * step);
      CHECK(std::abs(along_delay.derivative(x) - fd_delay) < 1e-6);
      CHECK(std::abs(along_doppler.derivative(x) - fd_doppler) < 1e-6);
    }
  }
}

TEST_CASE("matched filter is unbiased") {
  const FrameConfig cfg{8, 4, 30e3, 2, 3.5e9};
  const std::vector<Reflection> r{{0.7, 1.3e-6, 900.0, 0.5}};
  const auto h = synthesize_channel(cfg, r).values;
  for (auto kind : {AlphabetKind::Qam16, AlphabetKind::Qam64}) {
    const auto alphabet = make_alphabet(kind);
    CounterRng rng(100);
    const int frames = 10000;
    CMatrix sum(8, 4);
    Matrix<double> sq(8, 4);
    for (int k = 0; k < frames; ++k) {
      const auto frame = draw_frame(cfg, alphabet, rng);
      CounterRng noise = rng.split(k);
      const auto est = matched_filter(apply_channel(frame, {h}, 0.1, noise), frame).values;
      sum += est;
      for (std::size_t i = 0; i < est.size(); ++i) sq.flat()[i] += std::norm(est.flat()[i] - h.flat()[i]);
    }
    for (std::size_t i = 0; i < h.size(); ++i) {
      const cdouble mean = sum.flat()[i] / static_cast<double>(frames);
      const double sem = std::sqrt(sq.flat()[i] / frames / frames);
      CHECK(std::abs(mean - h.flat()[i]) < 5.0 * sem);
    }
  }
}
