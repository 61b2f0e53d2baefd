#include "qds/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qds {

void ProtocolParams::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("params: alpha must be positive and finite");
  }
  if (big_l < 1) {
    throw std::invalid_argument("params: length L must be >= 1");
  }
  if (!(s_a >= 0.0) || !(s_a < s_v) || !(s_v < 1.0)) {
    throw std::invalid_argument("params: thresholds must satisfy 0 <= s_a < s_v < 1");
  }
  const double p_usd = usd_success_probability(alpha);
  if (!(delta > 0.0) || !(delta < p_usd)) {
    throw std::invalid_argument("params: delta must satisfy 0 < delta < p_USD(alpha)");
  }
  if (!(r >= 0.0) || !(r < 1.0)) {
    throw std::invalid_argument("params: r must satisfy 0 <= r < 1");
  }
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("params: epsilon must be positive");
  }
}

long RecipientRecord::unambiguous_count() const {
  long n = 0;
  for (UsdOutcome o : outcomes) {
    if (o == UsdOutcome::PlusAlpha || o == UsdOutcome::MinusAlpha) ++n;
  }
  return n;
}

long RecipientRecord::null_count() const {
  long n = 0;
  for (std::uint8_t c : null_clicked) n += c ? 1 : 0;
  return n;
}

std::pair<PrivateKey, PrivateKey> generate_keys(const ProtocolParams& params,
                                                RandomSource& rand) {
  params.validate();
  PrivateKey key0{0, {}};
  PrivateKey key1{1, {}};
  key0.signs.resize(static_cast<std::size_t>(params.big_l));
  key1.signs.resize(static_cast<std::size_t>(params.big_l));
  for (auto& s : key0.signs) s = static_cast<std::int8_t>(rand.sign());
  for (auto& s : key1.signs) s = static_cast<std::int8_t>(rand.sign());
  return {key0, key1};
}

std::pair<RecipientRecord, RecipientRecord> run_distribution_honest(
    const PrivateKey& key, const ProtocolParams& params, RandomSource& rand) {
  const auto length = static_cast<std::size_t>(params.big_l);
  if (key.signs.size() != length) {
    throw std::invalid_argument("distribution: key length differs from L");
  }
  RecipientRecord bob, charlie;
  bob.outcomes.resize(length);
  bob.null_clicked.resize(length);
  charlie.outcomes.resize(length);
  charlie.null_clicked.resize(length);
  for (std::size_t l = 0; l < length; ++l) {
    const Amplitude in(key.signs[l] * params.alpha, 0.0);
    const ModeQuadruple out = multiport(in, in);
    const double null_click = click_probability(out.b_null);  // exactly 0
    bob.outcomes[l] = sample_usd(out.b_signal, params.alpha, rand);
    bob.null_clicked[l] = rand.bernoulli(null_click) ? 1 : 0;
    charlie.outcomes[l] = sample_usd(out.c_signal, params.alpha, rand);
    charlie.null_clicked[l] = rand.bernoulli(null_click) ? 1 : 0;
  }
  return {bob, charlie};
}

std::optional<AbortReason> abort_check(const RecipientRecord& record,
                                       const ProtocolParams& params) {
  const double length = static_cast<double>(params.big_l);
  if (static_cast<double>(record.null_count()) > params.r * length) {
    return AbortReason::NullPortThreshold;
  }
  const double p_usd = usd_success_probability(params.alpha);
  const double u = static_cast<double>(record.unambiguous_count());
  if (u < (p_usd - params.delta) * length || u > (p_usd + params.delta) * length) {
    return AbortReason::UnambiguousWindow;
  }
  return std::nullopt;
}

long count_mismatches(const RecipientRecord& record, const Declaration& decl) {
  if (record.outcomes.size() != decl.signs.size()) {
    throw std::invalid_argument("count_mismatches: length mismatch");
  }
  long n = 0;
  for (std::size_t l = 0; l < record.outcomes.size(); ++l) {
    switch (record.outcomes[l]) {
      case UsdOutcome::PlusAlpha:
        if (decl.signs[l] != 1) ++n;
        break;
      case UsdOutcome::MinusAlpha:
        if (decl.signs[l] != -1) ++n;
        break;
      case UsdOutcome::Conflict:
        ++n;
        break;
      case UsdOutcome::Ambiguous:
        break;
    }
  }
  return n;
}

bool decide(const RecipientRecord& record, const Declaration& decl,
            const ProtocolParams& params, Role role) {
  const double mismatches = static_cast<double>(count_mismatches(record, decl));
  const double p_usd = usd_success_probability(params.alpha);
  const double length = static_cast<double>(params.big_l);
  if (role == Role::Authenticator) {
    return mismatches <= params.s_a * p_usd * length;
  }
  return mismatches < params.s_v * p_usd * length;
}

TrialVerdict run_honest_trial(const ProtocolParams& params, RandomSource& rand) {
  // The unused key (message 1) is generated but never measured; its signs are
  // independent of everything Bob or Charlie sees.
  const auto [key, unused] = generate_keys(params, rand);
  (void)unused;
  const auto [bob, charlie] = run_distribution_honest(key, params, rand);
  const Declaration decl{key.message, key.signs};

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

}  // namespace qds
