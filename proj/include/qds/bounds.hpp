#pragma once

#include <utility>
#include <vector>

#include "qds/protocol.hpp"

namespace qds {

// The three measurement rates induced by the amplitude alpha.
struct DerivedRates {
  double p_usd = 0.0;        // 1 - e^{-2 alpha^2}
  double p_min = 0.0;        // Helstrom error at alpha
  double p_min_prime = 0.0;  // Helstrom error at sqrt(3/2) alpha
};

struct ConstraintReport {
  bool sv_gt_sa = false;
  double forge_margin = 0.0;  // p'_min - s_v*p_USD/(p_USD-delta) - sqrt(eps+r)
  bool delta_valid = false;

  bool ok() const { return sv_gt_sa && forge_margin > 0.0 && delta_valid; }
};

// Closed-form security/correctness bounds, in log10. A field of 0 means the
// bound degenerated to 1 (no guarantee).
struct BoundsReport {
  double log10_honest_abort_ub = 0.0;
  double log10_repudiation_ub = 0.0;
  double log10_forge_passive_ub = 0.0;
  double log10_forge_active_ub = 0.0;
  DerivedRates rates;
  ConstraintReport constraints;
};

// Throws std::invalid_argument for alpha <= 0.
DerivedRates derived_rates(double alpha);

ConstraintReport check_constraints(const ProtocolParams& params);

// Evaluates all four bounds in log space so that values far below the double
// underflow threshold stay representable. A non-positive forge margin or
// s_v <= s_a flags the affected bounds by pinning them at 0 (i.e. 1).
BoundsReport compute_bounds(const ProtocolParams& params);

// The reference parameter choice: delta = 0.1*p_USD, s_v = sqrt(eps) =
// p'_min/4, s_a = 0, r = 0. Throws if the resulting params fail validation or
// the constraint check.
ProtocolParams default_params(double alpha, long big_l);

// Evenly spaced alpha grid, each point evaluated with default_params.
// Constraint violations are flagged in the report, never dropped.
std::vector<std::pair<double, BoundsReport>> sweep_alpha(double alpha_min,
                                                         double alpha_max,
                                                         int steps, long big_l);

}  // namespace qds
