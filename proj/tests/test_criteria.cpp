#include <doctest.h>

#include <cmath>
#include <random>

#include "qbdc/channel.hpp"
#include "qbdc/criteria.hpp"

using namespace qbdc;

namespace {

TransitionRates toy_rates(double lambda, Complex zeta, double alpha, double beta,
                          int cutoff = 200) {
  return closed_form_rates(MaserParams::toy(lambda, zeta, alpha, beta), cutoff);
}

}  // namespace

TEST_CASE("existence check on rate sequences") {
  SUBCASE("eta = 0 with positive kappa fires with infinite slack") {
    const TransitionRates r = toy_rates(0.3, 0.0, 0.6, 0.8);
    const RegionVerdict v = check_existence(r, estimate_kappa(r));
    CHECK(v.verdict == Verdict::Exists);
    CHECK(v.criterion == "theorem-1");
    CHECK(v.margin > 1e12);
  }
  SUBCASE("pure toy model at lambda = 0.1") {
    const TransitionRates r = toy_rates(0.1, 1.0, 0.6, 0.8);
    const RegionVerdict v = check_existence(r, estimate_kappa(r));
    CHECK(v.verdict == Verdict::Exists);
    // LHS = lambda(1-lambda) beta^2 / (4 |nu|^2 alpha^2), RHS = lambda(1-lambda)/(1-2lambda)^2
    const double lhs = 0.64 / (4.0 * 0.36);
    const double rhs = 0.09 / 0.64;
    CHECK(v.margin == doctest::Approx(lhs - rhs).epsilon(1e-9));
  }
  SUBCASE("pure toy model at lambda = 0.45 stays unknown") {
    const TransitionRates r = toy_rates(0.45, 1.0, 0.6, 0.8);
    const RegionVerdict v = check_existence(r, estimate_kappa(r));
    CHECK(v.verdict == Verdict::Unknown);
  }
}

TEST_CASE("non-existence check on rate sequences") {
  SUBCASE("diagonal updrift fires with infinite slack") {
    TransitionRates r = toy_rates(0.7, 0.0, 0.0, 1.0);
    const RegionVerdict v = check_nonexistence(r);
    CHECK(v.verdict == Verdict::NotExists);
    CHECK(v.criterion == "theorem-2");
    CHECK(v.margin > 1e12);
  }
  SUBCASE("pure toy model at lambda = 0.85") {
    const RegionVerdict v = check_nonexistence(toy_rates(0.85, 1.0, 0.6, 0.8));
    CHECK(v.verdict == Verdict::NotExists);
  }
  SUBCASE("lambda = 0.8 sits on the boundary and stays unknown") {
    const RegionVerdict v = check_nonexistence(toy_rates(0.8, 1.0, 0.6, 0.8));
    CHECK(v.verdict == Verdict::Unknown);
  }
  SUBCASE("downdrift fails the precondition") {
    const RegionVerdict v = check_nonexistence(toy_rates(0.3, 1.0, 0.6, 0.8));
    CHECK(v.verdict == Verdict::Unknown);
    CHECK(v.diagnostic.find("part 2") != std::string::npos);
  }
}

TEST_CASE("maser point classification") {
  SUBCASE("pure toy at lambda = 0.10 exists via part 1") {
    const RegionVerdict v = classify_maser_point(MaserParams::toy(0.10, 1.0, 0.6, 0.8));
    CHECK(v.verdict == Verdict::Exists);
    CHECK(v.criterion == "maser-prop-1");
    // threshold 1/2 - 0.75 |nu| with |nu| = 0.3
    CHECK(v.margin == doctest::Approx(0.275 - 0.10).epsilon(1e-12));
  }
  SUBCASE("pure toy at lambda = 0.40 falls in the non-existence strip") {
    const RegionVerdict v = classify_maser_point(MaserParams::toy(0.40, 1.0, 0.6, 0.8));
    CHECK(v.verdict == Verdict::NotExists);
    CHECK(v.criterion == "toy-nonexistence");
  }
  SUBCASE("thermal points below one half exist") {
    const RegionVerdict v = classify_maser_point(MaserParams::toy(0.3, 0.0, 0.6, 0.8));
    CHECK(v.verdict == Verdict::Exists);
    CHECK(v.criterion == "maser-prop-1");
  }
  SUBCASE("pure toy far above the upper threshold does not admit states") {
    const RegionVerdict v = classify_maser_point(MaserParams::toy(0.9, 1.0, 0.6, 0.8));
    CHECK(v.verdict == Verdict::NotExists);
  }
  SUBCASE("resonant Jaynes-Cummings couplings are flagged, not classified") {
    // g tau = pi: beta_1 = 0, liminf |beta_n| = 0.
    const RegionVerdict v = classify_maser_point(
        MaserParams::jaynes_cummings(0.3, 0.0, 1.0, 3.14159265358979323846));
    CHECK(v.verdict == Verdict::Unknown);
    CHECK(v.diagnostic.find("beta") != std::string::npos);
  }
  SUBCASE("negative alpha: pure boundary extends existence above one half") {
    // (1 - alpha)/2 = 0.8 for alpha = -0.6.
    const RegionVerdict v = classify_maser_point(MaserParams::toy(0.6, 1.0, -0.6, 0.8));
    CHECK(v.verdict == Verdict::Exists);
    CHECK(v.criterion == "pure-boundary");
  }
}

TEST_CASE("classification depends on zeta only through its modulus") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const double lambda = unit(rng);
    const double mag = unit(rng);
    const double theta = 2.0 * 3.14159265358979323846 * unit(rng);
    const MaserParams base = MaserParams::toy(lambda, mag, 0.6, 0.8);
    const MaserParams rotated = MaserParams::toy(lambda, std::polar(mag, theta), 0.6, 0.8);
    const RegionVerdict a = classify_maser_point(base);
    const RegionVerdict b = classify_maser_point(rotated);
    CHECK(a.verdict == b.verdict);
    CHECK(a.criterion == b.criterion);
    CHECK(a.margin == doctest::Approx(b.margin).epsilon(1e-10));
  }
}

TEST_CASE("classical reduction: eta = 0 verdicts match summability") {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  for (int trial = 0; trial < 30; ++trial) {
    const double lam = unit(rng);
    double mu = unit(rng);
    if (std::abs(lam - mu) < 0.02) mu = std::min(0.95, mu + 0.05);
    TransitionRates r;
    r.cutoff = 120;
    r.lam.assign(121, lam);
    r.mu.assign(121, mu);
    r.mu[0] = 0.0;
    r.eta.assign(121, Complex(0.0));
    r.sigma.assign(121, std::max(0.0, 1.0 - lam - mu));
    const ClassicalProfile prof = classical_profile(r);
    const RegionVerdict v = check_existence(r, estimate_kappa(r));
    if (prof.summable == Summability::Summable)
      CHECK(v.verdict == Verdict::Exists);
    else
      CHECK(v.verdict == Verdict::Unknown);
  }
}
