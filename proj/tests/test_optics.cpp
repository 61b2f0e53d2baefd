#include <cmath>
#include <complex>

#include "doctest.h"
#include "qds/optics.hpp"
#include "qds/random.hpp"

using qds::Amplitude;
using qds::RandomSource;
using qds::UsdOutcome;

namespace {

Amplitude random_amp(RandomSource& rng) {
  return {4.0 * rng.uniform() - 2.0, 4.0 * rng.uniform() - 2.0};
}

// Fig.-1 wiring: each input interferes with vacuum, then the crossed halves
// recombine. Returns (signal, null) on Bob's side and Charlie's side.
qds::ModeQuadruple multiport_from_beam_splitters(Amplitude a, Amplitude b) {
  const auto [a_keep, a_cross] = qds::beam_splitter(a, Amplitude{0.0, 0.0});
  const auto [b_keep, b_cross] = qds::beam_splitter(b, Amplitude{0.0, 0.0});
  const auto [b_signal, b_null] = qds::beam_splitter(a_keep, b_cross);
  const auto [c_signal, c_null] = qds::beam_splitter(a_cross, b_keep);
  return {b_signal, c_signal, b_null, c_null};
}

}  // namespace

TEST_CASE("beam splitter on reference inputs") {
  const auto [sum, diff] = qds::beam_splitter({1.0, 0.0}, {1.0, 0.0});
  CHECK(sum.real() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(std::abs(diff) == doctest::Approx(0.0).epsilon(1e-14));

  const auto [half1, half2] = qds::beam_splitter({1.0, 0.0}, {0.0, 0.0});
  CHECK(half1.real() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(half2.real() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));

  const auto [zero, boosted] = qds::beam_splitter({0.2, 0.0}, {-0.2, 0.0});
  CHECK(std::abs(zero) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(boosted.real() == doctest::Approx(0.28284271247461901).epsilon(1e-14));
}

TEST_CASE("beam splitter conserves energy") {
  RandomSource rng(7);
  for (int i = 0; i < 1000; ++i) {
    const Amplitude a = random_amp(rng);
    const Amplitude b = random_amp(rng);
    const auto [o1, o2] = qds::beam_splitter(a, b);
    const double in = std::norm(a) + std::norm(b);
    const double out = std::norm(o1) + std::norm(o2);
    CHECK(std::abs(out - in) <= 1e-12 * std::max(1.0, in));
  }
}

TEST_CASE("multiport closed form") {
  const auto symmetric = qds::multiport({0.3, 0.0}, {0.3, 0.0});
  CHECK(symmetric.b_signal == Amplitude{0.3, 0.0});
  CHECK(symmetric.c_signal == Amplitude{0.3, 0.0});
  CHECK(std::abs(symmetric.b_null) == 0.0);
  CHECK(std::abs(symmetric.c_null) == 0.0);

  const auto antisymmetric = qds::multiport({0.3, 0.0}, {-0.3, 0.0});
  CHECK(std::abs(antisymmetric.b_signal) == doctest::Approx(0.0));
  CHECK(antisymmetric.b_null == Amplitude{0.3, 0.0});

  const auto mixed = qds::multiport({0.3, 0.0}, {0.1, 0.0});
  CHECK(mixed.b_signal.real() == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(mixed.b_null.real() == doctest::Approx(0.1).epsilon(1e-14));
}

TEST_CASE("multiport properties over random inputs") {
  RandomSource rng(11);
  for (int i = 0; i < 1000; ++i) {
    const Amplitude a = random_amp(rng);
    const Amplitude b = random_amp(rng);
    const auto quad = qds::multiport(a, b);

    // symmetry of the two signal and two null arms
    CHECK(quad.b_signal == quad.c_signal);
    CHECK(quad.b_null == quad.c_null);

    // energy conservation (two vacuum ancilla inputs carry nothing)
    const double in = std::norm(a) + std::norm(b);
    const double out = std::norm(quad.b_signal) + std::norm(quad.c_signal) +
                       std::norm(quad.b_null) + std::norm(quad.c_null);
    CHECK(std::abs(out - in) <= 1e-12 * std::max(1.0, in));

    // composition of the four beam splitters gives the same amplitudes
    const auto wired = multiport_from_beam_splitters(a, b);
    CHECK(std::abs(wired.b_signal - quad.b_signal) <= 1e-12);
    CHECK(std::abs(wired.c_signal - quad.c_signal) <= 1e-12);
    CHECK(std::abs(wired.b_null - quad.b_null) <= 1e-12);
    CHECK(std::abs(wired.c_null - quad.c_null) <= 1e-12);

    // swap of inputs keeps the signal, flips the null sign
    const auto swapped = qds::multiport(b, a);
    CHECK(std::abs(swapped.b_signal - quad.b_signal) <= 1e-15);
    CHECK(std::abs(swapped.b_null + quad.b_null) <= 1e-15);

    // null is vacuum iff the inputs match
    CHECK((std::abs(a - b) < 1e-12) == (std::abs(quad.b_null) < 1e-12));
  }
}

TEST_CASE("click probability") {
  CHECK(qds::click_probability({0.0, 0.0}) == 0.0);
  const double two_alpha_sq = std::sqrt(2.0) * 0.2;  // |amp|^2 = 2 * 0.2^2
  CHECK(qds::click_probability({two_alpha_sq, 0.0}) ==
        doctest::Approx(0.076884).epsilon(1e-4));
  CHECK(qds::click_probability({1.0, 0.0}) ==
        doctest::Approx(0.632121).epsilon(1e-6));
}

TEST_CASE("usd distribution on honest inputs") {
  const double alpha = 0.6;
  const auto plus = qds::usd_distribution({alpha, 0.0}, alpha);
  CHECK(plus.p_minus == 0.0);
  CHECK(plus.p_conflict == 0.0);
  CHECK(plus.p_plus ==
        doctest::Approx(qds::usd_success_probability(alpha)).epsilon(1e-12));

  const auto minus = qds::usd_distribution({-alpha, 0.0}, alpha);
  CHECK(minus.p_plus == 0.0);
  CHECK(minus.p_conflict == 0.0);
  CHECK(minus.p_minus == doctest::Approx(plus.p_plus).epsilon(1e-12));
}

TEST_CASE("usd distribution on vacuum input has symmetric conflict mass") {
  const auto d = qds::usd_distribution({0.0, 0.0}, 0.2);
  const double q = -std::expm1(-0.02);
  CHECK(d.p_conflict == doctest::Approx(q * q).epsilon(1e-12));
  CHECK(d.p_conflict == doctest::Approx(3.92e-4).epsilon(2e-2));
  CHECK(d.p_plus == doctest::Approx(d.p_minus).epsilon(1e-12));
}

TEST_CASE("usd distribution normalizes") {
  RandomSource rng(3);
  for (int i = 0; i < 1000; ++i) {
    const Amplitude signal = random_amp(rng);
    const double alpha = rng.uniform() * 2.0 + 1e-3;
    const auto d = qds::usd_distribution(signal, alpha);
    CHECK(d.p_plus >= 0.0);
    CHECK(d.p_minus >= 0.0);
    CHECK(d.p_ambiguous >= 0.0);
    CHECK(d.p_conflict >= 0.0);
    CHECK(std::abs(d.p_plus + d.p_minus + d.p_ambiguous + d.p_conflict - 1.0) <=
          1e-12);
  }
}

TEST_CASE("usd distribution rejects non-positive alpha") {
  CHECK_THROWS_AS(qds::usd_distribution({0.1, 0.0}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(qds::usd_distribution({0.1, 0.0}, -1.0), std::invalid_argument);
}

TEST_CASE("sample_usd empirical frequencies") {
  const double alpha = 0.3;
  const double p = qds::usd_success_probability(alpha);
  const int n = 1000000;
  RandomSource rng(2024);
  int plus = 0, minus = 0, bad = 0;
  for (int i = 0; i < n; ++i) {
    switch (qds::sample_usd({alpha, 0.0}, alpha, rng)) {
      case UsdOutcome::PlusAlpha: ++plus; break;
      case UsdOutcome::MinusAlpha: ++bad; break;
      case UsdOutcome::Conflict: ++bad; break;
      case UsdOutcome::Ambiguous: break;
    }
  }
  for (int i = 0; i < n; ++i) {
    if (qds::sample_usd({-alpha, 0.0}, alpha, rng) == UsdOutcome::MinusAlpha) ++minus;
  }
  CHECK(bad == 0);
  const double sigma = std::sqrt(p * (1.0 - p) / n);
  CHECK(std::abs(static_cast<double>(plus) / n - p) <= 4.0 * sigma);
  CHECK(std::abs(static_cast<double>(minus) / n - p) <= 4.0 * sigma);
}

TEST_CASE("helstrom error closed form") {
  CHECK(qds::helstrom_error(0.0) == 0.5);
  CHECK(qds::helstrom_error(std::sqrt(1.5) * 0.2) ==
        doctest::Approx(0.269039).epsilon(1e-5));
  CHECK(qds::helstrom_error(0.2) == doctest::Approx(0.307740).epsilon(1e-5));
  CHECK_THROWS_AS(qds::helstrom_error(-0.1), std::invalid_argument);
}

TEST_CASE("helstrom error decreases with amplitude") {
  double prev = qds::helstrom_error(0.0);
  for (int i = 1; i <= 100; ++i) {
    const double a = 0.03 * i;
    const double cur = qds::helstrom_error(a);
    CHECK(cur < prev);
    CHECK(qds::helstrom_error(std::sqrt(1.5) * a) < cur);
    prev = cur;
  }
}

TEST_CASE("sample_min_error_guess frequencies") {
  RandomSource rng(5);
  const int n = 100000;

  int correct_big = 0;
  for (int i = 0; i < n; ++i) {
    if (qds::sample_min_error_guess(1, 5.0, rng) == 1) ++correct_big;
  }
  CHECK(correct_big == n);  // error rate ~ 1e-44 at alpha_eff = 5

  int correct_zero = 0;
  for (int i = 0; i < n; ++i) {
    if (qds::sample_min_error_guess(-1, 0.0, rng) == -1) ++correct_zero;
  }
  const double sigma_half = std::sqrt(0.25 / n);
  CHECK(std::abs(static_cast<double>(correct_zero) / n - 0.5) <= 4.0 * sigma_half);

  int wrong = 0;
  for (int i = 0; i < n; ++i) {
    if (qds::sample_min_error_guess(1, 0.2, rng) != 1) ++wrong;
  }
  const double p = qds::helstrom_error(0.2);
  const double sigma = std::sqrt(p * (1.0 - p) / n);
  CHECK(std::abs(static_cast<double>(wrong) / n - p) <= 4.0 * sigma);

  CHECK_THROWS_AS(qds::sample_min_error_guess(0, 0.2, rng), std::invalid_argument);
}
