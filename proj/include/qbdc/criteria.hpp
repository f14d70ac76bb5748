#pragma once

#include <string>

#include "qbdc/classical.hpp"
#include "qbdc/maser_params.hpp"
#include "qbdc/rates.hpp"

namespace qbdc {

enum class Verdict { Exists, NotExists, Unknown };

/// Outcome of an existence / non-existence test. `criterion` names the
/// test that fired (theorem-1, theorem-2, maser-prop-1, maser-prop-2,
/// toy-nonexistence, pure-boundary); `margin` is the signed slack of the
/// deciding inequality. Criteria fire only with margin > kMarginTol, so
/// grid points sitting numerically on a threshold stay Unknown.
struct RegionVerdict {
  Verdict verdict = Verdict::Unknown;
  std::string criterion;
  double margin = 0.0;
  bool conflict = false;  // both families fired: numerical inconsistency
  std::string diagnostic;
};

inline constexpr double kMarginTol = 1e-9;

std::string to_string(Verdict v);

/// Theorem part 1 applied to a rate sequence: requires kappa > 0 and
/// checks liminf lam_n mu_{n+1} / (4 |eta_n|^2) > e^-kappa/(1-e^-kappa)^2
/// on the tail window (eta_n = 0 contributes +infinity).
RegionVerdict check_existence(const TransitionRates& rates, const KappaEstimate& kappa,
                              double tail_fraction = 0.25);

/// Theorem part 2: mu_n < lam_n on the tail and
/// liminf (lam_n - mu_n)(lam_{n+1} - mu_{n+1}) / (4 |eta_n|^2) > 1.
RegionVerdict check_nonexistence(const TransitionRates& rates, double tail_fraction = 0.25);

/// Classifies a maser parameter point by the analytic criteria, applied in
/// order: existence (part 1), non-existence (part 2), the toy-model
/// non-existence strip, and the pure-state boundary result for |zeta| = 1.
/// First firing criterion wins; if an existence and a non-existence
/// criterion both fire the verdict is Unknown with the conflict flag set.
RegionVerdict classify_maser_point(const MaserParams& params);

}  // namespace qbdc
