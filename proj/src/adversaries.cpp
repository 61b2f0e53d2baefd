#include "qds/adversaries.hpp"

#include <cmath>
#include <stdexcept>

namespace qds {

namespace {

constexpr double kInvSqrt2 = 0.7071067811865475244;

Declaration all_plus_declaration(long big_l) {
  Declaration d;
  d.message = 0;
  d.signs.assign(static_cast<std::size_t>(big_l), std::int8_t{1});
  return d;
}

TrialVerdict assemble_repudiation_verdict(const RecipientRecord& bob,
                                          const RecipientRecord& charlie,
                                          const Declaration& decl,
                                          const ProtocolParams& params) {
  TrialVerdict v;
  v.bob_abort = abort_check(bob, params);
  v.charlie_abort = abort_check(charlie, params);
  v.bob_authenticated = decide(bob, decl, params, Role::Authenticator);
  v.charlie_verified = decide(charlie, decl, params, Role::Verifier);
  v.bob_mismatches = static_cast<std::uint32_t>(count_mismatches(bob, decl));
  v.charlie_mismatches = static_cast<std::uint32_t>(count_mismatches(charlie, decl));
  v.bob_unambiguous = static_cast<std::uint32_t>(bob.unambiguous_count());
  v.charlie_unambiguous = static_cast<std::uint32_t>(charlie.unambiguous_count());
  v.bob_null_clicks = static_cast<std::uint32_t>(bob.null_count());
  v.charlie_null_clicks = static_cast<std::uint32_t>(charlie.null_count());
  return v;
}

// Match/mismatch/ambiguous relative to an all +1 declaration.
UsdOutcome sample_marginal_outcome(const RepudiationMarginals& marg,
                                   RandomSource& rand) {
  const double u = rand.uniform();
  if (u < marg.p_match) return UsdOutcome::PlusAlpha;
  if (u < marg.p_match + marg.p_mismatch) return UsdOutcome::MinusAlpha;
  return UsdOutcome::Ambiguous;
}

}  // namespace

void RepudiationMarginals::validate() const {
  const bool in_range = p_match >= 0.0 && p_match <= 1.0 && p_mismatch >= 0.0 &&
                        p_mismatch <= 1.0 && p_ambiguous >= 0.0 && p_ambiguous <= 1.0;
  if (!in_range || std::abs(p_match + p_mismatch + p_ambiguous - 1.0) > 1e-12) {
    throw std::invalid_argument("marginals: must lie on the probability simplex");
  }
}

double optimal_repudiation_marginal(const ProtocolParams& params) {
  params.validate();
  return usd_success_probability(params.alpha) * (params.s_v + params.s_a) * 0.5;
}

TrialVerdict repudiation_trial_abstract(const ProtocolParams& params,
                                        const RepudiationMarginals& marg,
                                        RandomSource& rand) {
  params.validate();
  marg.validate();
  const auto length = static_cast<std::size_t>(params.big_l);
  RecipientRecord bob, charlie;
  bob.outcomes.resize(length);
  bob.null_clicked.assign(length, 0);
  charlie.outcomes.resize(length);
  charlie.null_clicked.assign(length, 0);
  for (std::size_t l = 0; l < length; ++l) {
    bob.outcomes[l] = sample_marginal_outcome(marg, rand);
    charlie.outcomes[l] = sample_marginal_outcome(marg, rand);
  }
  return assemble_repudiation_verdict(bob, charlie, all_plus_declaration(params.big_l),
                                      params);
}

TrialVerdict repudiation_trial_physical(const ProtocolParams& params,
                                        const PhysicalRepudiationStrategy& strat,
                                        RandomSource& rand) {
  params.validate();
  const auto length = static_cast<std::size_t>(params.big_l);
  const ModeQuadruple out = multiport(strat.amp_to_bob, strat.amp_to_charlie);
  const double null_click = click_probability(out.b_null);
  RecipientRecord bob, charlie;
  bob.outcomes.resize(length);
  bob.null_clicked.resize(length);
  charlie.outcomes.resize(length);
  charlie.null_clicked.resize(length);
  for (std::size_t l = 0; l < length; ++l) {
    bob.outcomes[l] = sample_usd(out.b_signal, params.alpha, rand);
    bob.null_clicked[l] = rand.bernoulli(null_click) ? 1 : 0;
    charlie.outcomes[l] = sample_usd(out.c_signal, params.alpha, rand);
    charlie.null_clicked[l] = rand.bernoulli(null_click) ? 1 : 0;
  }
  return assemble_repudiation_verdict(bob, charlie, all_plus_declaration(params.big_l),
                                      params);
}

TrialVerdict forge_passive_trial(const ProtocolParams& params, RandomSource& rand) {
  params.validate();
  const auto [key, unused] = generate_keys(params, rand);
  (void)unused;
  const auto length = static_cast<std::size_t>(params.big_l);

  RecipientRecord charlie;
  charlie.outcomes.resize(length);
  charlie.null_clicked.assign(length, 0);
  Declaration forged;
  forged.message = key.message;
  forged.signs.resize(length);
  for (std::size_t l = 0; l < length; ++l) {
    const Amplitude signal(key.signs[l] * params.alpha, 0.0);
    charlie.outcomes[l] = sample_usd(signal, params.alpha, rand);
    forged.signs[l] = static_cast<std::int8_t>(
        sample_min_error_guess(key.signs[l], params.alpha, rand));
  }

  TrialVerdict v;
  v.bob_authenticated = true;  // Bob never aborts or rejects his own forgery
  v.charlie_abort = abort_check(charlie, params);
  v.charlie_verified = decide(charlie, forged, params, Role::Verifier);
  v.charlie_mismatches = static_cast<std::uint32_t>(count_mismatches(charlie, forged));
  v.charlie_unambiguous = static_cast<std::uint32_t>(charlie.unambiguous_count());
  v.charlie_null_clicks = static_cast<std::uint32_t>(charlie.null_count());
  return v;
}

TrialVerdict forge_active_trial(const ProtocolParams& params,
                                const ActiveResponsePolicy& policy,
                                RandomSource& rand) {
  params.validate();
  if (!(policy.scale >= 0.0) || !std::isfinite(policy.scale)) {
    throw std::invalid_argument("policy: scale must be finite and >= 0");
  }
  const auto [key, unused] = generate_keys(params, rand);
  (void)unused;
  const auto length = static_cast<std::size_t>(params.big_l);
  const double guess_amplitude = std::sqrt(1.5) * params.alpha;

  RecipientRecord charlie;
  charlie.outcomes.resize(length);
  charlie.null_clicked.resize(length);
  Declaration forged;
  forged.message = key.message;
  forged.signs.resize(length);
  for (std::size_t l = 0; l < length; ++l) {
    const int true_sign = key.signs[l];
    const int guess = sample_min_error_guess(true_sign, guess_amplitude, rand);
    forged.signs[l] = static_cast<std::int8_t>(guess);
    const double response_sign = policy.align_to_guess ? guess : true_sign;
    const Amplitude beta(response_sign * policy.scale * params.alpha * kInvSqrt2, 0.0);
    const Amplitude half_copy(true_sign * params.alpha * 0.5, 0.0);
    const Amplitude signal = beta * kInvSqrt2 + half_copy;
    const Amplitude null = half_copy - beta * kInvSqrt2;
    charlie.null_clicked[l] = rand.bernoulli(click_probability(null)) ? 1 : 0;
    charlie.outcomes[l] = sample_usd(signal, params.alpha, rand);
  }

  TrialVerdict v;
  v.bob_authenticated = true;
  v.charlie_abort = abort_check(charlie, params);
  v.charlie_verified = decide(charlie, forged, params, Role::Verifier);
  v.charlie_mismatches = static_cast<std::uint32_t>(count_mismatches(charlie, forged));
  v.charlie_unambiguous = static_cast<std::uint32_t>(charlie.unambiguous_count());
  v.charlie_null_clicks = static_cast<std::uint32_t>(charlie.null_count());
  return v;
}

}  // namespace qds
