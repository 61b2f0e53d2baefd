#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "qds/optics.hpp"
#include "qds/random.hpp"

namespace qds {

// Protocol tunables. alpha is the coherent amplitude, big_l the signature
// length L, s_a/s_v the authentication/verification mismatch thresholds
// (fractions of p_USD*L), delta the unambiguous-count tolerance, r the
// null-port abort fraction, epsilon the active-forging slack.
struct ProtocolParams {
  double alpha = 0.0;
  long big_l = 0;
  double s_a = 0.0;
  double s_v = 0.0;
  double delta = 0.0;
  double r = 0.0;
  double epsilon = 0.0;

  // Throws std::invalid_argument naming the first violated invariant.
  void validate() const;
};

struct PrivateKey {
  int message = 0;                  // bit
  std::vector<std::int8_t> signs;   // length big_l, entries in {-1,+1}
};

// Alice's declaration for the messaging stage, or Bob's forged one.
struct Declaration {
  int message = 0;
  std::vector<std::int8_t> signs;
};

// One recipient's stored classical data from the distribution stage.
struct RecipientRecord {
  std::vector<UsdOutcome> outcomes;
  std::vector<std::uint8_t> null_clicked;

  long unambiguous_count() const;   // PlusAlpha/MinusAlpha only, not Conflict
  long null_count() const;
};

enum class AbortReason { UnambiguousWindow, NullPortThreshold };

enum class Role { Authenticator, Verifier };

// Outcome of one protocol run, plus the per-recipient counts the Monte Carlo
// layer aggregates.
struct TrialVerdict {
  bool bob_authenticated = false;
  bool charlie_verified = false;
  std::optional<AbortReason> bob_abort;
  std::optional<AbortReason> charlie_abort;

  std::uint32_t bob_mismatches = 0;
  std::uint32_t charlie_mismatches = 0;
  std::uint32_t bob_unambiguous = 0;
  std::uint32_t charlie_unambiguous = 0;
  std::uint32_t bob_null_clicks = 0;
  std::uint32_t charlie_null_clicks = 0;

  bool any_abort() const { return bob_abort.has_value() || charlie_abort.has_value(); }
  bool auth_and_reject() const { return bob_authenticated && !charlie_verified; }
  bool repudiation_success() const { return auth_and_reject() && !any_abort(); }
  bool forge_success() const { return charlie_verified && !charlie_abort.has_value(); }
};

// Keys for the two possible messages m=0 and m=1; all 2L signs uniform and
// independent.
std::pair<PrivateKey, PrivateKey> generate_keys(const ProtocolParams& params,
                                                RandomSource& rand);

// Honest distribution stage: per element the multiport sees identical inputs
// b_l*alpha, so both signals are b_l*alpha and both nulls are vacuum. Bob's
// and Charlie's USD outcomes are sampled independently.
std::pair<RecipientRecord, RecipientRecord> run_distribution_honest(
    const PrivateKey& key, const ProtocolParams& params, RandomSource& rand);

// Null-port check first (count > r*L), then the unambiguous window
// [(p_USD - delta)L, (p_USD + delta)L], inclusive, compared as reals.
std::optional<AbortReason> abort_check(const RecipientRecord& record,
                                       const ProtocolParams& params);

// Sign mismatches at unambiguously measured positions, plus every Conflict
// position. Ambiguous positions are ignored. Throws on length mismatch.
long count_mismatches(const RecipientRecord& record, const Declaration& decl);

// Authenticator accepts iff mismatches <= s_a*p_USD*L (non-strict); verifier
// accepts iff mismatches < s_v*p_USD*L (strict).
bool decide(const RecipientRecord& record, const Declaration& decl,
            const ProtocolParams& params, Role role);

// Full honest run: key generation, distribution, abort checks, Bob
// authenticates and Charlie verifies Alice's true declaration.
TrialVerdict run_honest_trial(const ProtocolParams& params, RandomSource& rand);

}  // namespace qds
