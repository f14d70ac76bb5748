#pragma once

#include <optional>
#include <vector>

#include "qbdc/rates.hpp"

namespace qbdc {

enum class Summability { Summable, NotSummable, Inconclusive };

/// Classical birth-death profile pi_n = (lam_0...lam_{n-1})/(mu_1...mu_n),
/// pi_0 = 1, kept in log space (pi decays or grows geometrically and
/// overflows doubles near n ~ 700 otherwise).
struct ClassicalProfile {
  std::vector<double> log_pi;  // log_pi[n] = ln pi_n
  Summability summable = Summability::Inconclusive;
  double tail_ratio_max = 0.0;  // max of lam_n / mu_{n+1} over the tail window
  std::optional<std::vector<double>> stationary;  // rho_n = pi_n / sum pi, when summable

  double pi(int n) const { return std::exp(log_pi[static_cast<std::size_t>(n)]); }
};

/// Tail window convention used for all asymptotic estimates: the last
/// `tail_fraction` of the available cutoff, never including n = 0.
struct TailWindow {
  int lo = 1;
  int hi = 1;
};
TailWindow tail_window(int cutoff, double tail_fraction);

/// Computes pi in log space; summability is decided by the tail-ratio test
/// lam_n / mu_{n+1} <= c < 1 on the window (NotSummable when the ratio
/// stays >= 1, Inconclusive otherwise). Throws std::invalid_argument
/// naming n if some mu_n vanishes for 1 <= n <= cutoff.
ClassicalProfile classical_profile(const TransitionRates& rates, double tail_fraction = 0.25);

/// kappa = liminf (1/n) ln(1/pi_n), estimated as the minimum over the tail
/// window. `analytic` carries a closed form when the caller knows one
/// (maser models: kappa = ln((1-lambda)/lambda)).
struct KappaEstimate {
  double kappa = 0.0;
  bool is_infinite = false;  // all birth rates vanish on the window
  int window_lo = 0;
  int window_hi = 0;
  std::optional<double> analytic;
  double tolerance = 1e-9;
};

KappaEstimate estimate_kappa(const TransitionRates& rates, double tail_fraction = 0.25,
                             std::optional<double> analytic = std::nullopt);

}  // namespace qbdc
