#pragma once

#include <cstdint>
#include <utility>
#include <variant>

#include "qds/adversaries.hpp"
#include "qds/protocol.hpp"

namespace qds {

// Monte Carlo rate with a 95% Wilson score interval.
struct Estimate {
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
  double rate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

// Throws for trials = 0.
std::pair<double, double> wilson_interval(std::uint64_t successes,
                                          std::uint64_t trials);

Estimate make_estimate(std::uint64_t successes, std::uint64_t trials);

struct HonestScenario {};
struct RepudiateAbstractScenario {
  RepudiationMarginals marginals;
};
struct RepudiatePhysicalScenario {
  PhysicalRepudiationStrategy strategy;
};
struct ForgePassiveScenario {};
struct ForgeActiveScenario {
  ActiveResponsePolicy policy;
};

using Scenario = std::variant<HonestScenario, RepudiateAbstractScenario,
                              RepudiatePhysicalScenario, ForgePassiveScenario,
                              ForgeActiveScenario>;

struct ExperimentResult {
  Estimate abort;            // either recipient aborted
  Estimate auth_and_reject;  // BA and CR, ignoring aborts
  Estimate repudiation;      // BA, CR, and neither aborted
  Estimate forge;            // CV and Charlie did not abort

  // Integer totals over all trials (Charlie's record unless noted), so the
  // aggregation is exact and order-independent.
  std::uint64_t total_mismatches = 0;
  std::uint64_t total_unambiguous = 0;
  std::uint64_t total_null_clicks = 0;
  std::uint64_t total_bob_mismatches = 0;
  std::uint64_t total_bob_null_clicks = 0;

  double mean_mismatch_fraction = 0.0;    // per element
  double mean_unambiguous_fraction = 0.0;
  double mean_null_fraction = 0.0;
};

// Runs n_trials independent protocol trials. Trial i draws its random stream
// from (seed, i), so the result is bit-identical for any worker count.
// Throws for n_trials = 0.
ExperimentResult run_experiment(const Scenario& scenario,
                                const ProtocolParams& params,
                                std::uint64_t n_trials, std::uint64_t seed,
                                unsigned workers = 1);

// exp(-2 t^2 L); with two_sided, 2x that capped at 1.
double hoeffding_bound(double t, long big_l, bool two_sided = false);

// Exact single-recipient honest abort probability: Binomial(L, p_USD) mass
// outside the inclusive window [(p_USD-delta)L, (p_USD+delta)L]. Combine two
// independent recipients as 1-(1-p)^2. Rejects L > 100000.
double exact_honest_abort(const ProtocolParams& params);

// Exact passive-forging success probability: sum over unambiguous counts K in
// the non-abort window of P(Bin(L,p_USD)=K) * P(Bin(K,p_min) < s_v p_USD L).
// Rejects L > 10000.
double exact_forge_passive(const ProtocolParams& params);

// Exact P(BA and CR) for the abstract repudiation model with independent
// recipients and mismatch marginal p_mismatch:
// P(Bin(L,p) <= s_a p_USD L) * P(Bin(L,p) >= s_v p_USD L).
double exact_repudiation_product(const ProtocolParams& params, double p_mismatch);

}  // namespace qds
