#pragma once

#include <complex>
#include <utility>

#include "qds/random.hpp"

namespace qds {

// A coherent-state amplitude. |amp|^2 is the mean photon number of the mode;
// the amplitude is the entire state description for everything simulated here.
using Amplitude = std::complex<double>;

// The four multiport outputs. The signal arms carry the symmetrized state,
// the null arms are vacuum exactly when the two inputs were identical.
struct ModeQuadruple {
  Amplitude b_signal;
  Amplitude c_signal;
  Amplitude b_null;
  Amplitude c_null;
};

// Result of one unambiguous-discrimination measurement. Conflict (both
// detector ports fire) cannot occur on honest inputs; it is possible for
// adversarial signal amplitudes away from +-alpha.
enum class UsdOutcome { PlusAlpha, MinusAlpha, Ambiguous, Conflict };

struct OutcomeDistribution {
  double p_plus = 0.0;
  double p_minus = 0.0;
  double p_ambiguous = 0.0;
  double p_conflict = 0.0;
};

// 50:50 beam splitter on coherent amplitudes: ((a+b)/sqrt2, (a-b)/sqrt2).
std::pair<Amplitude, Amplitude> beam_splitter(Amplitude a, Amplitude b);

// Four-beam-splitter multiport (two vacuum ancillas implicit):
// signals (b+c)/2 on both arms, nulls (b-c)/2 on both arms.
ModeQuadruple multiport(Amplitude in_b, Amplitude in_c);

// P(at least one photon) on a coherent mode: 1 - exp(-|amp|^2).
double click_probability(Amplitude mode);

// Success probability of unambiguous discrimination of {|alpha>, |-alpha>}:
// 1 - exp(-2 alpha^2).
double usd_success_probability(double alpha);

// USD detector model: interfere the signal with a reference |alpha> on a
// 50:50 splitter; the two ports carry (signal +- alpha)/sqrt2 and feed
// independent threshold detectors. Exactly reproduces the optimal USD
// statistics on honest +-alpha inputs. Throws std::invalid_argument for
// alpha <= 0.
OutcomeDistribution usd_distribution(Amplitude signal, double alpha);

// One draw from usd_distribution. Consumes exactly one uniform variate.
UsdOutcome sample_usd(Amplitude signal, double alpha, RandomSource& rand);

// Helstrom minimum-error probability for {|a>, |-a>} with a = alpha_eff:
// 1 - (sqrt(1 - exp(-4 a^2)) + 1) / 2. Throws for negative input.
double helstrom_error(double alpha_eff);

// Returns true_sign with probability 1 - helstrom_error(alpha_eff), the
// opposite sign otherwise. true_sign must be -1 or +1.
int sample_min_error_guess(int true_sign, double alpha_eff, RandomSource& rand);

}  // namespace qds
