#include "qds/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qds {

namespace {
const double kLn10 = std::log(10.0);
const double kLn2 = std::log(2.0);
}  // namespace

DerivedRates derived_rates(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("derived_rates: alpha must be positive");
  }
  DerivedRates r;
  r.p_usd = usd_success_probability(alpha);
  r.p_min = helstrom_error(alpha);
  r.p_min_prime = helstrom_error(std::sqrt(1.5) * alpha);
  return r;
}

ConstraintReport check_constraints(const ProtocolParams& params) {
  const DerivedRates rates = derived_rates(params.alpha);
  ConstraintReport c;
  c.sv_gt_sa = params.s_v > params.s_a;
  c.delta_valid = params.delta > 0.0 && params.delta < rates.p_usd;
  const double denom = rates.p_usd - params.delta;
  c.forge_margin = rates.p_min_prime -
                   params.s_v * rates.p_usd / denom -
                   std::sqrt(params.epsilon + params.r);
  return c;
}

BoundsReport compute_bounds(const ProtocolParams& params) {
  params.validate();
  BoundsReport rep;
  rep.rates = derived_rates(params.alpha);
  rep.constraints = check_constraints(params);
  const double length = static_cast<double>(params.big_l);
  const double p_usd = rep.rates.p_usd;
  const double p_trim = p_usd - params.delta;

  // Honest abort: 1 - (1 - p1)^2 = p1 (2 - p1) with p1 = min(1, 2 e^{-2d^2 L}),
  // assembled in log space so tiny exponents survive.
  {
    const double ln_p1 = std::min(0.0, kLn2 - 2.0 * params.delta * params.delta * length);
    double ln_ub;
    if (ln_p1 > -30.0) {
      const double p1 = std::exp(ln_p1);
      ln_ub = std::log(p1 * (2.0 - p1));
    } else {
      ln_ub = ln_p1 + kLn2 + std::log1p(-0.5 * std::exp(ln_p1));
    }
    rep.log10_honest_abort_ub = std::min(0.0, ln_ub / kLn10);
  }

  // Repudiation, Hoeffding at the optimal mismatch marginal.
  {
    const double gap = params.s_v - params.s_a;
    rep.log10_repudiation_ub = -0.5 * p_usd * p_usd * gap * gap * length / kLn10;
  }

  // Passive forging.
  {
    const double margin = rep.rates.p_min - params.s_v * p_usd / p_trim;
    rep.log10_forge_passive_ub =
        margin > 0.0 ? -2.0 * margin * margin * p_trim * length / kLn10 : 0.0;
  }

  // Active forging: log-sum-exp of the two union-bound terms, capped at 1.
  {
    const double margin = rep.constraints.forge_margin;
    const double ln_t1 =
        margin > 0.0 ? -2.0 * margin * margin * p_trim * length : 0.0;
    const double ln_t2 = kLn2 - 2.0 * params.epsilon * params.epsilon * length;
    const double hi = std::max(ln_t1, ln_t2);
    const double ln_sum =
        hi + std::log(std::exp(ln_t1 - hi) + std::exp(ln_t2 - hi));
    rep.log10_forge_active_ub = std::min(0.0, ln_sum / kLn10);
  }

  return rep;
}

ProtocolParams default_params(double alpha, long big_l) {
  const DerivedRates rates = derived_rates(alpha);
  if (big_l < 1) {
    throw std::invalid_argument("default_params: length L must be >= 1");
  }
  ProtocolParams p;
  p.alpha = alpha;
  p.big_l = big_l;
  p.delta = 0.1 * rates.p_usd;
  p.s_v = rates.p_min_prime / 4.0;
  p.epsilon = p.s_v * p.s_v;
  p.s_a = 0.0;
  p.r = 0.0;
  p.validate();
  if (!check_constraints(p).ok()) {
    throw std::invalid_argument("default_params: constraints fail at this alpha");
  }
  return p;
}

std::vector<std::pair<double, BoundsReport>> sweep_alpha(double alpha_min,
                                                         double alpha_max,
                                                         int steps, long big_l) {
  if (!(alpha_min > 0.0) || !(alpha_min < alpha_max) || steps < 2) {
    throw std::invalid_argument("sweep_alpha: need 0 < alpha_min < alpha_max, steps >= 2");
  }
  std::vector<std::pair<double, BoundsReport>> out;
  out.reserve(static_cast<std::size_t>(steps));
  const double step = (alpha_max - alpha_min) / static_cast<double>(steps - 1);
  for (int i = 0; i < steps; ++i) {
    const double alpha = alpha_min + step * static_cast<double>(i);
    const DerivedRates rates = derived_rates(alpha);
    ProtocolParams p;
    p.alpha = alpha;
    p.big_l = big_l;
    p.delta = 0.1 * rates.p_usd;
    p.s_v = rates.p_min_prime / 4.0;
    p.epsilon = p.s_v * p.s_v;
    p.s_a = 0.0;
    p.r = 0.0;
    out.emplace_back(alpha, compute_bounds(p));
  }
  return out;
}

}  // namespace qds
