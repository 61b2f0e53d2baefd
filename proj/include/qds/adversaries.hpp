#pragma once

#include "qds/optics.hpp"
#include "qds/protocol.hpp"
#include "qds/random.hpp"

namespace qds {

// Worst-case abstraction of a repudiating Alice: she picks, per element, the
// probabilities that a recipient's outcome matches, mismatches, or misses
// (ambiguous) her declaration. Identical for Bob and Charlie by the multiport
// symmetry.
struct RepudiationMarginals {
  double p_match = 0.0;
  double p_mismatch = 0.0;
  double p_ambiguous = 0.0;

  void validate() const;  // simplex check
};

// A physical IID repudiation strategy: Alice injects these amplitudes into
// Bob's and Charlie's multiport in-ports for every element.
struct PhysicalRepudiationStrategy {
  Amplitude amp_to_bob;
  Amplitude amp_to_charlie;
};

// Coherent-state active-forging family. Bob's response amplitude per element
// is sign * scale * alpha/sqrt2, where sign is his minimum-error guess when
// align_to_guess is set and the true key sign otherwise (honest forwarding).
struct ActiveResponsePolicy {
  double scale = 1.0;
  bool align_to_guess = false;
};

// Alice's optimal average mismatch probability: p_USD * (s_v + s_a) / 2.
double optimal_repudiation_marginal(const ProtocolParams& params);

// Bob's and Charlie's per-element outcomes drawn independently from the same
// marginals; declaration fixed to all +1; null-port ignored (never clicks).
TrialVerdict repudiation_trial_abstract(const ProtocolParams& params,
                                        const RepudiationMarginals& marg,
                                        RandomSource& rand);

// Alice sends the strategy amplitudes through the multiport; both recipients
// USD-measure the common signal (a_b + a_c)/2 and sample null clicks from the
// null amplitude (a_b - a_c)/2. Declaration all +1. Full abort checks.
TrialVerdict repudiation_trial_physical(const ProtocolParams& params,
                                        const PhysicalRepudiationStrategy& strat,
                                        RandomSource& rand);

// Passive forging: Alice honest, Charlie measures honestly, Bob declares his
// per-element minimum-error guesses (signal amplitude magnitude alpha). Bob
// never aborts and bob_authenticated is set by convention.
TrialVerdict forge_passive_trial(const ProtocolParams& params, RandomSource& rand);

// Active forging: Bob guesses from the over-powered sqrt(3/2)*alpha copy,
// sends a response state per the policy, and Charlie's final beam splitter
// yields signal beta/sqrt2 + b*alpha/2 and null b*alpha/2 - beta/sqrt2.
TrialVerdict forge_active_trial(const ProtocolParams& params,
                                const ActiveResponsePolicy& policy,
                                RandomSource& rand);

}  // namespace qds
