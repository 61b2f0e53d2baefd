#include "qds/optics.hpp"

#include <cmath>
#include <stdexcept>

namespace qds {

namespace {
constexpr double kInvSqrt2 = 0.7071067811865475244;
}

std::pair<Amplitude, Amplitude> beam_splitter(Amplitude a, Amplitude b) {
  return {(a + b) * kInvSqrt2, (a - b) * kInvSqrt2};
}

ModeQuadruple multiport(Amplitude in_b, Amplitude in_c) {
  const Amplitude signal = (in_b + in_c) * 0.5;
  const Amplitude null = (in_b - in_c) * 0.5;
  return {signal, signal, null, null};
}

double click_probability(Amplitude mode) {
  return -std::expm1(-std::norm(mode));
}

double usd_success_probability(double alpha) {
  return -std::expm1(-2.0 * alpha * alpha);
}

OutcomeDistribution usd_distribution(Amplitude signal, double alpha) {
  if (!(alpha > 0.0)) {
    throw std::invalid_argument("usd_distribution: alpha must be positive");
  }
  const double q_plus = click_probability((signal + alpha) * kInvSqrt2);
  const double q_minus = click_probability((signal - alpha) * kInvSqrt2);
  OutcomeDistribution d;
  d.p_plus = q_plus * (1.0 - q_minus);
  d.p_minus = q_minus * (1.0 - q_plus);
  d.p_ambiguous = (1.0 - q_plus) * (1.0 - q_minus);
  d.p_conflict = q_plus * q_minus;
  return d;
}

UsdOutcome sample_usd(Amplitude signal, double alpha, RandomSource& rand) {
  const OutcomeDistribution d = usd_distribution(signal, alpha);
  const double u = rand.uniform();
  if (u < d.p_plus) return UsdOutcome::PlusAlpha;
  if (u < d.p_plus + d.p_minus) return UsdOutcome::MinusAlpha;
  if (u < d.p_plus + d.p_minus + d.p_ambiguous) return UsdOutcome::Ambiguous;
  return UsdOutcome::Conflict;
}

double helstrom_error(double alpha_eff) {
  if (alpha_eff < 0.0) {
    throw std::invalid_argument("helstrom_error: alpha_eff must be >= 0");
  }
  // 1 - (1 + sqrt(1 - e^{-4a^2}))/2, with 1 - e^{-x} computed as -expm1(-x).
  return 0.5 * (1.0 - std::sqrt(-std::expm1(-4.0 * alpha_eff * alpha_eff)));
}

int sample_min_error_guess(int true_sign, double alpha_eff, RandomSource& rand) {
  if (true_sign != 1 && true_sign != -1) {
    throw std::invalid_argument("sample_min_error_guess: sign must be -1 or +1");
  }
  const double p_err = helstrom_error(alpha_eff);
  return rand.bernoulli(p_err) ? -true_sign : true_sign;
}

}  // namespace qds
