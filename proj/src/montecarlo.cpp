#include "qds/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

#include "qds/bounds.hpp"

namespace qds {

namespace {

double log_binom_pmf(long n, long k, double p) {
  return std::lgamma(static_cast<double>(n) + 1.0) -
         std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0) +
         static_cast<double>(k) * std::log(p) +
         static_cast<double>(n - k) * std::log1p(-p);
}

struct Tally {
  std::uint64_t aborts = 0;
  std::uint64_t auth_and_reject = 0;
  std::uint64_t repudiation = 0;
  std::uint64_t forge = 0;
  std::uint64_t mismatches = 0;
  std::uint64_t unambiguous = 0;
  std::uint64_t null_clicks = 0;
  std::uint64_t bob_mismatches = 0;
  std::uint64_t bob_null_clicks = 0;

  void add(const TrialVerdict& v) {
    aborts += v.any_abort() ? 1 : 0;
    auth_and_reject += v.auth_and_reject() ? 1 : 0;
    repudiation += v.repudiation_success() ? 1 : 0;
    forge += v.forge_success() ? 1 : 0;
    mismatches += v.charlie_mismatches;
    unambiguous += v.charlie_unambiguous;
    null_clicks += v.charlie_null_clicks;
    bob_mismatches += v.bob_mismatches;
    bob_null_clicks += v.bob_null_clicks;
  }

  void merge(const Tally& o) {
    aborts += o.aborts;
    auth_and_reject += o.auth_and_reject;
    repudiation += o.repudiation;
    forge += o.forge;
    mismatches += o.mismatches;
    unambiguous += o.unambiguous;
    null_clicks += o.null_clicks;
    bob_mismatches += o.bob_mismatches;
    bob_null_clicks += o.bob_null_clicks;
  }
};

TrialVerdict run_one(const Scenario& scenario, const ProtocolParams& params,
                     RandomSource& rand) {
  return std::visit(
      [&](const auto& s) -> TrialVerdict {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, HonestScenario>) {
          return run_honest_trial(params, rand);
        } else if constexpr (std::is_same_v<T, RepudiateAbstractScenario>) {
          return repudiation_trial_abstract(params, s.marginals, rand);
        } else if constexpr (std::is_same_v<T, RepudiatePhysicalScenario>) {
          return repudiation_trial_physical(params, s.strategy, rand);
        } else if constexpr (std::is_same_v<T, ForgePassiveScenario>) {
          return forge_passive_trial(params, rand);
        } else {
          return forge_active_trial(params, s.policy, rand);
        }
      },
      scenario);
}

}  // namespace

std::pair<double, double> wilson_interval(std::uint64_t successes,
                                          std::uint64_t trials) {
  if (trials == 0) {
    throw std::invalid_argument("wilson_interval: trials must be >= 1");
  }
  if (successes > trials) {
    throw std::invalid_argument("wilson_interval: successes > trials");
  }
  constexpr double z = 1.959963984540054;  // 97.5% normal quantile
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (phat + z2 / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
  // the limits are exactly 0 and 1 at the endpoints; don't leak rounding dust
  const double low = successes == 0 ? 0.0 : std::max(0.0, center - half);
  const double high = successes == trials ? 1.0 : std::min(1.0, center + half);
  return {low, high};
}

Estimate make_estimate(std::uint64_t successes, std::uint64_t trials) {
  Estimate e;
  e.successes = successes;
  e.trials = trials;
  e.rate = static_cast<double>(successes) / static_cast<double>(trials);
  std::tie(e.ci_low, e.ci_high) = wilson_interval(successes, trials);
  return e;
}

ExperimentResult run_experiment(const Scenario& scenario,
                                const ProtocolParams& params,
                                std::uint64_t n_trials, std::uint64_t seed,
                                unsigned workers) {
  params.validate();
  if (n_trials == 0) {
    throw std::invalid_argument("run_experiment: n_trials must be >= 1");
  }
  if (workers == 0) workers = 1;
  workers = static_cast<unsigned>(
      std::min<std::uint64_t>(workers, n_trials));

  std::vector<Tally> tallies(workers);
  auto work = [&](unsigned w) {
    const std::uint64_t begin = n_trials * w / workers;
    const std::uint64_t end = n_trials * (w + 1) / workers;
    Tally local;
    for (std::uint64_t i = begin; i < end; ++i) {
      RandomSource rand = RandomSource::for_trial(seed, i);
      local.add(run_one(scenario, params, rand));
    }
    tallies[w] = local;
  };

  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) threads.emplace_back(work, w);
    for (auto& t : threads) t.join();
  }

  Tally total;
  for (const Tally& t : tallies) total.merge(t);

  ExperimentResult res;
  res.abort = make_estimate(total.aborts, n_trials);
  res.auth_and_reject = make_estimate(total.auth_and_reject, n_trials);
  res.repudiation = make_estimate(total.repudiation, n_trials);
  res.forge = make_estimate(total.forge, n_trials);
  res.total_mismatches = total.mismatches;
  res.total_unambiguous = total.unambiguous;
  res.total_null_clicks = total.null_clicks;
  res.total_bob_mismatches = total.bob_mismatches;
  res.total_bob_null_clicks = total.bob_null_clicks;
  const double elements =
      static_cast<double>(n_trials) * static_cast<double>(params.big_l);
  res.mean_mismatch_fraction = static_cast<double>(total.mismatches) / elements;
  res.mean_unambiguous_fraction =
      static_cast<double>(total.unambiguous) / elements;
  res.mean_null_fraction = static_cast<double>(total.null_clicks) / elements;
  return res;
}

double hoeffding_bound(double t, long big_l, bool two_sided) {
  if (t < 0.0 || big_l < 1) {
    throw std::invalid_argument("hoeffding_bound: need t >= 0 and L >= 1");
  }
  const double one_sided = std::exp(-2.0 * t * t * static_cast<double>(big_l));
  return two_sided ? std::min(1.0, 2.0 * one_sided) : one_sided;
}

double exact_honest_abort(const ProtocolParams& params) {
  params.validate();
  if (params.big_l > 100000) {
    throw std::invalid_argument("exact_honest_abort: L too large for exact sum");
  }
  const double p = usd_success_probability(params.alpha);
  const double length = static_cast<double>(params.big_l);
  const double lo = (p - params.delta) * length;
  const double hi = (p + params.delta) * length;
  double outside = 0.0;
  for (long k = 0; k <= params.big_l; ++k) {
    const double kd = static_cast<double>(k);
    if (kd < lo || kd > hi) {
      outside += std::exp(log_binom_pmf(params.big_l, k, p));
    }
  }
  return std::min(outside, 1.0);
}

double exact_forge_passive(const ProtocolParams& params) {
  params.validate();
  if (params.big_l > 10000) {
    throw std::invalid_argument("exact_forge_passive: L too large for exact sum");
  }
  const DerivedRates rates = derived_rates(params.alpha);
  const double length = static_cast<double>(params.big_l);
  const double lo = (rates.p_usd - params.delta) * length;
  const double hi = (rates.p_usd + params.delta) * length;
  const double threshold = params.s_v * rates.p_usd * length;  // strict
  double total = 0.0;
  for (long k = 0; k <= params.big_l; ++k) {
    const double kd = static_cast<double>(k);
    if (kd < lo || kd > hi) continue;
    double accept = 0.0;
    for (long j = 0; j <= k && static_cast<double>(j) < threshold; ++j) {
      accept += std::exp(log_binom_pmf(k, j, rates.p_min));
    }
    total += std::exp(log_binom_pmf(params.big_l, k, rates.p_usd)) *
             std::min(accept, 1.0);
  }
  return std::min(total, 1.0);
}

double exact_repudiation_product(const ProtocolParams& params, double p_mismatch) {
  params.validate();
  if (!(p_mismatch >= 0.0) || !(p_mismatch <= 1.0)) {
    throw std::invalid_argument("exact_repudiation_product: p_mismatch in [0,1]");
  }
  if (params.big_l > 100000) {
    throw std::invalid_argument("exact_repudiation_product: L too large");
  }
  const double p_usd = usd_success_probability(params.alpha);
  const double length = static_cast<double>(params.big_l);
  const double auth_threshold = params.s_a * p_usd * length;    // count <= this
  const double reject_threshold = params.s_v * p_usd * length;  // count >= this
  double p_ba = 0.0, p_cr = 0.0;
  for (long k = 0; k <= params.big_l; ++k) {
    const double kd = static_cast<double>(k);
    double pmf;
    if (p_mismatch == 0.0) {
      pmf = (k == 0) ? 1.0 : 0.0;
    } else if (p_mismatch == 1.0) {
      pmf = (k == params.big_l) ? 1.0 : 0.0;
    } else {
      pmf = std::exp(log_binom_pmf(params.big_l, k, p_mismatch));
    }
    if (kd <= auth_threshold) p_ba += pmf;
    if (kd >= reject_threshold) p_cr += pmf;
  }
  return std::min(p_ba, 1.0) * std::min(p_cr, 1.0);
}

}  // namespace qds
