#include "qbdc/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace qbdc {

namespace {

constexpr double kMarginCap = 1e18;

double capped(double m) { return std::min(m, kMarginCap); }

// liminf / limsup of |beta_n|, evaluated from the generator. Exact for the
// toy model; for Jaynes-Cummings and explicit lists these are min/max over
// a tail scan window, which is the declared finite-data convention.
struct BetaRange {
  double lo = 0.0;
  double hi = 0.0;
};

BetaRange beta_range(const MaserParams& p, int scan = 4096) {
  BetaRange r;
  switch (p.kind) {
    case CouplingKind::Toy:
      r.lo = r.hi = std::abs(p.toy_beta);
      break;
    case CouplingKind::JaynesCummings: {
      r.lo = std::numeric_limits<double>::infinity();
      for (int n = 1; n <= scan; ++n) {
        const double b = std::abs(p.beta(n));
        r.lo = std::min(r.lo, b);
        r.hi = std::max(r.hi, b);
      }
      break;
    }
    case CouplingKind::Explicit: {
      const int len = static_cast<int>(p.explicit_beta.size());
      const int lo_n = std::max(1, len / 2);
      r.lo = std::numeric_limits<double>::infinity();
      for (int n = lo_n; n <= len; ++n) {
        const double b = std::abs(p.beta(n));
        r.lo = std::min(r.lo, b);
        r.hi = std::max(r.hi, b);
      }
      break;
    }
  }
  return r;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Exists: return "exists";
    case Verdict::NotExists: return "not_exists";
    case Verdict::Unknown: return "unknown";
  }
  return "unknown";
}

RegionVerdict check_existence(const TransitionRates& rates, const KappaEstimate& kappa,
                              double tail_fraction) {
  RegionVerdict v;
  if (!(kappa.is_infinite || kappa.kappa > kMarginTol)) {
    v.diagnostic = "kappa <= 0: theorem part 1 does not apply";
    return v;
  }
  const TailWindow w = tail_window(rates.cutoff, tail_fraction);
  double lhs = std::numeric_limits<double>::infinity();
  for (int n = w.lo; n < w.hi; ++n) {
    const auto i = static_cast<std::size_t>(n);
    if (rates.lam[i] == 0.0 || rates.mu[i + 1] == 0.0) {
      v.diagnostic = "vanishing rate on the tail window";
      return v;
    }
    const double e2 = std::norm(rates.eta[i]);
    if (e2 > 0.0) lhs = std::min(lhs, rates.lam[i] * rates.mu[i + 1] / (4.0 * e2));
  }
  const double ek = kappa.is_infinite ? 0.0 : std::exp(-kappa.kappa);
  const double rhs = ek / ((1.0 - ek) * (1.0 - ek));
  if (lhs - rhs > kMarginTol) {
    v.verdict = Verdict::Exists;
    v.criterion = "theorem-1";
    v.margin = capped(lhs - rhs);
  }
  return v;
}

RegionVerdict check_nonexistence(const TransitionRates& rates, double tail_fraction) {
  RegionVerdict v;
  const TailWindow w = tail_window(rates.cutoff, tail_fraction);
  double lhs = std::numeric_limits<double>::infinity();
  for (int n = w.lo; n < w.hi; ++n) {
    const auto i = static_cast<std::size_t>(n);
    if (rates.lam[i] == 0.0) {
      v.diagnostic = "vanishing birth rate on the tail window";
      return v;
    }
    if (rates.mu[i] >= rates.lam[i] || rates.mu[i + 1] >= rates.lam[i + 1]) {
      v.diagnostic = "mu >= lam on the tail window: part 2 does not apply";
      return v;
    }
    const double prod = (rates.lam[i] - rates.mu[i]) * (rates.lam[i + 1] - rates.mu[i + 1]);
    const double e2 = std::norm(rates.eta[i]);
    if (e2 > 0.0) lhs = std::min(lhs, prod / (4.0 * e2));
  }
  if (lhs - 1.0 > kMarginTol) {
    v.verdict = Verdict::NotExists;
    v.criterion = "theorem-2";
    v.margin = capped(lhs - 1.0);
  }
  return v;
}

RegionVerdict classify_maser_point(const MaserParams& params) {
  params.validate();
  RegionVerdict out;
  const BetaRange br = beta_range(params);
  if (!(br.lo > 1e-9)) {
    out.diagnostic = "liminf |beta_n| = 0: the maser criteria need it positive";
    return out;
  }
  const double lam = params.lambda;
  const double anu = std::abs(params.nu());
  const double alpha_of_lo = std::sqrt(std::max(0.0, 1.0 - br.lo * br.lo));

  struct Firing {
    Verdict verdict;
    const char* criterion;
    double margin;
  };
  std::vector<Firing> fired;

  // Part 1. The worst tail ratio beta^2/alpha^2 is attained at the
  // infimum of |beta_n|, so the threshold uses that value.
  {
    const double margin = 0.5 - (alpha_of_lo / br.lo) * anu - lam;
    if (margin > kMarginTol) fired.push_back({Verdict::Exists, "maser-prop-1", margin});
  }

  // Part 2, with the worst-case pairing over the range of |beta_n|: the
  // drift lam_n - mu_n is bounded below by lam*lo^2 - (1-lam)*hi^2 and the
  // coherence above by sqrt(1-lo^2)*hi*|nu|. Coincides with
  // lam > 1/2 + (alpha/beta)|nu| for constant sequences.
  {
    const double drift_lo = lam * br.lo * br.lo - (1.0 - lam) * br.hi * br.hi;
    const double coher_hi = 2.0 * alpha_of_lo * br.hi * anu;
    const double margin = drift_lo - coher_hi;
    if (drift_lo > 0.0 && margin > kMarginTol)
      fired.push_back({Verdict::NotExists, "maser-prop-2", margin});
  }

  // Toy-model non-existence strip: complex-roots regime plus the
  // x-sequence boundedness condition.
  if (params.kind == CouplingKind::Toy && anu > 0.0 && lam > 0.0 && lam < 1.0) {
    const double a = params.toy_alpha, b = params.toy_beta;
    if (std::abs(a) < 1.0 && std::abs(b) < 1.0 && std::abs(b) > 0.0) {
      const double q = (1.0 - 2.0 * lam) * (1.0 - 2.0 * lam) / (4.0 * anu * anu);
      const double margin_roots = 1.0 / (1.0 + q) - b * b;
      const double margin_x = anu / (1.0 - lam) - (1.0 - a) / std::abs(b);
      const double margin = std::min(margin_roots, margin_x);
      if (margin > kMarginTol) fired.push_back({Verdict::NotExists, "toy-nonexistence", margin});
    }
  }

  // Pure-state boundary: for |zeta| = 1 the toy model has a pure invariant
  // state exactly for lam < (1 - alpha)/2 (signed alpha), which for
  // alpha < 0 reaches into the upper hemisphere.
  if (params.kind == CouplingKind::Toy && std::abs(std::abs(params.zeta) - 1.0) < 1e-12) {
    const double margin = 0.5 * (1.0 - params.toy_alpha) - lam;
    if (margin > kMarginTol) fired.push_back({Verdict::Exists, "pure-boundary", margin});
  }

  if (fired.empty()) {
    out.diagnostic = "no criterion fired";
    return out;
  }
  bool any_exists = false, any_not = false;
  for (const auto& f : fired) {
    any_exists |= (f.verdict == Verdict::Exists);
    any_not |= (f.verdict == Verdict::NotExists);
  }
  if (any_exists && any_not) {
    out.conflict = true;
    out.diagnostic = "existence and non-existence criteria both fired";
    return out;
  }
  out.verdict = fired.front().verdict;
  out.criterion = fired.front().criterion;
  out.margin = fired.front().margin;
  return out;
}

}  // namespace qbdc
