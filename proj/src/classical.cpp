#include "qbdc/classical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace qbdc {

TailWindow tail_window(int cutoff, double tail_fraction) {
  if (tail_fraction <= 0.0 || tail_fraction > 1.0)
    throw std::invalid_argument("tail_fraction must lie in (0, 1]");
  TailWindow w;
  w.hi = cutoff;
  w.lo = std::max(1, static_cast<int>(std::ceil((1.0 - tail_fraction) * cutoff)));
  return w;
}

ClassicalProfile classical_profile(const TransitionRates& rates, double tail_fraction) {
  const int cutoff = rates.cutoff;
  for (int n = 1; n <= cutoff; ++n)
    if (rates.mu[static_cast<std::size_t>(n)] == 0.0)
      throw std::invalid_argument("classical_profile: mu vanishes at n=" + std::to_string(n));

  ClassicalProfile prof;
  prof.log_pi.resize(static_cast<std::size_t>(cutoff) + 1);
  prof.log_pi[0] = 0.0;
  for (int n = 1; n <= cutoff; ++n) {
    const double lam = rates.lam[static_cast<std::size_t>(n - 1)];
    const double mu = rates.mu[static_cast<std::size_t>(n)];
    const double step = (lam == 0.0) ? -std::numeric_limits<double>::infinity()
                                     : std::log(lam) - std::log(mu);
    prof.log_pi[static_cast<std::size_t>(n)] = prof.log_pi[static_cast<std::size_t>(n - 1)] + step;
  }

  const TailWindow w = tail_window(cutoff, tail_fraction);
  double ratio_max = 0.0, ratio_min = std::numeric_limits<double>::infinity();
  for (int n = w.lo; n < w.hi; ++n) {
    const double r = rates.lam[static_cast<std::size_t>(n)] / rates.mu[static_cast<std::size_t>(n + 1)];
    ratio_max = std::max(ratio_max, r);
    ratio_min = std::min(ratio_min, r);
  }
  prof.tail_ratio_max = ratio_max;
  if (ratio_max < 1.0)
    prof.summable = Summability::Summable;
  else if (ratio_min >= 1.0)
    prof.summable = Summability::NotSummable;
  else
    prof.summable = Summability::Inconclusive;

  if (prof.summable == Summability::Summable) {
    const double top = *std::max_element(prof.log_pi.begin(), prof.log_pi.end());
    std::vector<double> rho(prof.log_pi.size());
    double total = 0.0;
    for (std::size_t n = 0; n < rho.size(); ++n) {
      rho[n] = std::exp(prof.log_pi[n] - top);
      total += rho[n];
    }
    for (double& v : rho) v /= total;
    prof.stationary = std::move(rho);
  }
  return prof;
}

KappaEstimate estimate_kappa(const TransitionRates& rates, double tail_fraction,
                             std::optional<double> analytic) {
  const ClassicalProfile prof = classical_profile(rates, tail_fraction);
  const TailWindow w = tail_window(rates.cutoff, tail_fraction);
  KappaEstimate est;
  est.window_lo = w.lo;
  est.window_hi = w.hi;
  est.analytic = analytic;
  double kappa = std::numeric_limits<double>::infinity();
  for (int n = w.lo; n <= w.hi; ++n)
    kappa = std::min(kappa, -prof.log_pi[static_cast<std::size_t>(n)] / n);
  est.kappa = kappa;
  est.is_infinite = std::isinf(kappa) && kappa > 0.0;
  return est;
}

}  // namespace qbdc
