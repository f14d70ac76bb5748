#include <doctest.h>

#include <Eigen/SVD>
#include <cmath>

#include "qbdc/classical.hpp"
#include "qbdc/criteria.hpp"
#include "qbdc/invariant.hpp"

using namespace qbdc;

namespace {

Matrix thermal_closed_form(double lambda, int dim) {
  // phi(e_nn) = (1-2 lambda)/(1-lambda) (lambda/(1-lambda))^n
  Matrix rho = Matrix::Zero(dim, dim);
  const double q = lambda / (1.0 - lambda);
  const double c = (1.0 - 2.0 * lambda) / (1.0 - lambda);
  for (int n = 0; n < dim; ++n) rho(n, n) = c * std::pow(q, n);
  return rho;
}

// Independent fixed-point oracle at small dim: brute-force null vector of
// (T_* - I) through the dense normal equations, renormalized to unit trace.
Matrix null_space_oracle(const TruncatedChannel& ch) {
  const Matrix m = ch.predual_dense() - Matrix::Identity(ch.dim * ch.dim, ch.dim * ch.dim);
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.adjoint() * m);
  const Vector v = es.eigenvectors().col(0);
  Matrix rho = unvec(v, ch.dim);
  rho /= rho.trace();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return rho;
}

DensityMatrix vacuum_state(int dim) {
  DensityMatrix s;
  s.entries = Matrix::Zero(dim, dim);
  s.entries(0, 0) = 1.0;
  return s;
}

}  // namespace

TEST_CASE("direct solver reproduces the thermal fixed point") {
  const MaserParams p = MaserParams::toy(0.3, 0.0, 0.0, 1.0);
  const TruncatedChannel ch = build_maser_channel(p, 40);
  const DensityMatrix rho = solve_invariant_direct(ch);
  CHECK(trace_norm_hermitian(rho.entries - thermal_closed_form(0.3, 40)) < 1e-8);
  CHECK(rho.trace_deficit < 1e-10);
}

TEST_CASE("lambda = 0 gives the vacuum projector at any dim") {
  const MaserParams p = MaserParams::toy(0.0, 0.0, 0.6, 0.8);
  const TruncatedChannel ch = build_maser_channel(p, 20);
  const DensityMatrix rho = solve_invariant_direct(ch);
  Matrix expected = Matrix::Zero(20, 20);
  expected(0, 0) = 1.0;
  CHECK(trace_norm_hermitian(rho.entries - expected) < 1e-10);
}

TEST_CASE("direct solver agrees with the dense null-space oracle") {
  const MaserParams p = MaserParams::toy(0.3, Complex(0.5, 0.0), 0.6, 0.8);

  SUBCASE("dim 10: agreement at the leakage scale") {
    // The truncated predual's top eigenvalue sits 2.5e-3 below 1 here, so
    // the eigenvector and the least-squares null vector are distinct
    // fixed-point surrogates; they coincide only as the truncation tightens.
    const TruncatedChannel ch = build_maser_channel(p, 10);
    const DensityMatrix rho = solve_invariant_direct(ch, 0.01);
    CHECK(trace_norm_hermitian(rho.entries - null_space_oracle(ch)) < 0.1);
  }

  SUBCASE("dim 28 thermal: machine-tight agreement") {
    // At this truncation the thermal chain has an eigenvalue-1 fixed point
    // to ~1e-10, so both solvers see the same state.
    const TruncatedChannel ch = build_maser_channel(MaserParams::toy(0.3, 0.0, 0.0, 1.0), 28);
    const DensityMatrix rho = solve_invariant_direct(ch);
    CHECK(trace_norm_hermitian(rho.entries - null_space_oracle(ch)) < 1e-8);
  }
}

TEST_CASE("solver output is an invariant density matrix") {
  const MaserParams p = MaserParams::toy(0.25, Complex(0.4, 0.4), 0.6, 0.8);
  const TruncatedChannel ch = build_maser_channel(p, 50);
  const double tol = 1e-8;
  const DensityMatrix rho = solve_invariant_direct(ch, tol);
  CHECK(std::abs(rho.entries.trace().real() - 1.0) < 1e-12);
  CHECK((rho.entries - rho.entries.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.entries, Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues().minCoeff() > -1e-10);
  CHECK(trace_norm_hermitian(ch.apply_predual(rho.entries) - rho.entries) < 10.0 * tol);

  // a leakier truncation still satisfies the residual contract at its tol
  const TruncatedChannel small = build_maser_channel(p, 30);
  const DensityMatrix rho2 = solve_invariant_direct(small, 1e-4);
  CHECK(trace_norm_hermitian(small.apply_predual(rho2.entries) - rho2.entries) < 1e-3);
}

TEST_CASE("thermal invariant states are diagonal and classical") {
  const MaserParams p = MaserParams::toy(0.35, 0.0, 0.6, 0.8);
  const TruncatedChannel ch = build_maser_channel(p, 40);
  const DensityMatrix rho = solve_invariant_direct(ch);
  double offdiag = 0.0;
  for (int i = 0; i < 40; ++i)
    for (int j = 0; j < 40; ++j)
      if (i != j) offdiag += std::abs(rho.entries(i, j));
  CHECK(offdiag < 1e-10);
  const ClassicalProfile prof = classical_profile(extract_transition_rates(ch));
  REQUIRE(prof.stationary.has_value());
  for (int n = 0; n < 30; ++n)
    CHECK(rho.entries(n, n).real() ==
          doctest::Approx((*prof.stationary)[static_cast<std::size_t>(n)]).epsilon(1e-6));
}

TEST_CASE("direct solver rejects in the non-existence region") {
  const MaserParams p = MaserParams::toy(0.85, 1.0, 0.6, 0.8);
  const TruncatedChannel ch = build_maser_channel(p, 40);
  try {
    solve_invariant_direct(ch);
    FAIL("expected NoInvariantState");
  } catch (const NoInvariantState& e) {
    CHECK(std::abs(e.closest_eigenvalue - Complex(1.0)) > 1e-3);
  }
}

TEST_CASE("cesaro solver") {
  SUBCASE("agrees with the direct solver on the thermal baby maser") {
    const MaserParams p = MaserParams::toy(0.3, 0.0, 0.0, 1.0);
    const TruncatedChannel ch = build_maser_channel(p, 40);
    const DensityMatrix direct = solve_invariant_direct(ch);
    const DensityMatrix cesaro = solve_invariant_cesaro(ch, vacuum_state(40), 1 << 18, 1e-9);
    CHECK(trace_norm_hermitian(direct.entries - cesaro.entries) < 1e-7);
  }

  SUBCASE("identity channel returns the seed") {
    const TruncatedChannel id = identity_channel(12);
    DensityMatrix seed;
    seed.entries = Matrix::Zero(12, 12);
    seed.entries(3, 3) = 0.5;
    seed.entries(7, 7) = 0.5;
    seed.entries(3, 7) = seed.entries(7, 3) = 0.25;
    const DensityMatrix out = solve_invariant_cesaro(id, seed, 1000, 1e-10);
    CHECK(trace_norm_hermitian(out.entries - seed.entries) < 1e-12);
    CHECK(out.trace_deficit < 1e-12);
  }

  SUBCASE("mass escapes upward in the non-existence region") {
    const MaserParams p = MaserParams::toy(0.85, 1.0, 0.6, 0.8);
    const TruncatedChannel ch = build_maser_channel(p, 40);
    bool escaped = false;
    try {
      const DensityMatrix out = solve_invariant_cesaro(ch, vacuum_state(40), 4096, 1e-9);
      escaped = out.trace_deficit > 0.5;
    } catch (const NonConvergence&) {
      escaped = true;
    }
    CHECK(escaped);
  }
}

TEST_CASE("falloff fit") {
  SUBCASE("exact geometric diagonal") {
    DensityMatrix rho;
    rho.entries = thermal_closed_form(0.3, 30);
    rho.entries /= rho.entries.trace();
    const FalloffFit fit = falloff_fit(rho);
    CHECK_FALSE(fit.degenerate);
    CHECK(fit.gamma == doctest::Approx(std::log(7.0 / 3.0)).epsilon(1e-6));
    CHECK(fit.c == doctest::Approx(4.0 / 7.0).epsilon(1e-6));
    CHECK(fit.max_violation < 1e-8);
  }

  SUBCASE("vacuum projector is degenerate") {
    const FalloffFit fit = falloff_fit(vacuum_state(20));
    CHECK(fit.degenerate);
    CHECK(fit.window_shrunk);
  }

  SUBCASE("pure toy invariant state falls off exponentially") {
    const MaserParams p = MaserParams::toy(0.1, 1.0, 0.6, 0.8);
    const TruncatedChannel ch = build_maser_channel(p, 40);
    const FalloffFit fit = falloff_fit(solve_invariant_direct(ch));
    CHECK(fit.gamma > 0.0);
    CHECK(fit.max_violation < 1e-8);
  }
}

TEST_CASE("truncation convergence") {
  SUBCASE("thermal distances fall below 1e-10") {
    const MaserParams p = MaserParams::toy(0.3, 0.0, 0.0, 1.0);
    const auto d = truncation_convergence(p, {20, 40, 60, 80});
    REQUIRE(d.size() == 3);
    for (std::size_t i = 0; i + 1 < d.size(); ++i) CHECK(d[i + 1] <= d[i] + 1e-12);
    CHECK(d.back() < 1e-10);
  }

  SUBCASE("lambda = 0: identical vacuum at every dim") {
    const MaserParams p = MaserParams::toy(0.0, 0.0, 0.6, 0.8);
    const auto d = truncation_convergence(p, {10, 16, 24});
    for (double v : d) CHECK(v < 1e-12);
  }

  SUBCASE("non-existence region: rejection or no convergence") {
    const MaserParams p = MaserParams::toy(0.85, 1.0, 0.6, 0.8);
    bool ok = false;
    try {
      const auto d = truncation_convergence(p, {20, 30, 40});
      ok = !(d[1] < d[0] && d[2] < d[1] && d[2] < 1e-6);
    } catch (const NoInvariantState&) {
      ok = true;
    }
    CHECK(ok);
  }
}

TEST_CASE("convergence trace basics") {
  // dim 40 keeps the boundary leak at ~1e-15 per application, so the
  // invariant state is a fixed point to machine precision.
  const MaserParams p = MaserParams::toy(0.3, 0.0, 0.0, 1.0);
  const TruncatedChannel ch = build_maser_channel(p, 40);
  const DensityMatrix phi = solve_invariant_direct(ch);

  SUBCASE("theta = phi gives the zero trace") {
    const ConvergenceTrace t = convergence_trace(ch, phi, phi, 50);
    for (double d : t.distances) CHECK(d < 1e-11);
  }

  SUBCASE("vacuum start is monotone and geometric") {
    const ConvergenceTrace t = convergence_trace(ch, vacuum_state(40), phi, 600, 1e-9);
    for (std::size_t n = 1; n < t.distances.size(); ++n)
      CHECK(t.distances[n] <= t.distances[n - 1] + 1e-12);
    CHECK(t.distances.back() < 1e-8);
    CHECK(t.fitted_kind == FitKind::Geometric);
    CHECK(t.fitted_rate < 1.0);
    CHECK(t.fitted_rate > 0.0);
  }

  SUBCASE("gamma bound from declared constants") {
    PowerLawConstants k;
    k.gamma0 = std::log(2.0);
    k.gamma1 = std::log(2.0);
    k.gamma2 = 30.0;
    k.lambda = 0.5;
    k.a = 2.0;
    const ConvergenceTrace t = convergence_trace(ch, phi, phi, 5, 0.0, k);
    REQUIRE(t.gamma_bound.has_value());
    const double expected =
        std::log(2.0) * 30.0 / (2.0 * std::log(2.0) * (std::log(2.0) + 30.0));
    CHECK(*t.gamma_bound == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("falloff bound check") {
  DensityMatrix mixed;
  const int dim = 20;
  mixed.entries = Matrix::Identity(dim, dim) / static_cast<double>(dim);

  SUBCASE("empty projection window passes trivially") {
    std::vector<double> y(dim);
    for (int n = 0; n < dim; ++n) y[static_cast<std::size_t>(n)] = n;
    const auto checks = falloff_bound_check(mixed, y, 1.0, {{100.0, 200.0}});
    REQUIRE(checks.size() == 1);
    CHECK(checks[0].pass);
    CHECK(checks[0].mass == 0.0);
  }

  SUBCASE("maximally mixed state against the number operator can fail") {
    std::vector<double> y(dim);
    for (int n = 0; n < dim; ++n) y[static_cast<std::size_t>(n)] = n;
    const double c = dim / 2.0;
    const auto checks = falloff_bound_check(mixed, y, 0.1, {{c, static_cast<double>(dim)}});
    REQUIRE(checks.size() == 1);
    CHECK_FALSE(checks[0].pass);
    CHECK(checks[0].mass > 0.4);
    CHECK(checks[0].bound == doctest::Approx(0.1 / c));
  }
}

TEST_CASE("solver rejections track the not_exists classification") {
  // Points the sweep labels not_exists via theorem part 2: the truncated
  // predual keeps losing mass upward, so no eigenvalue stays near 1 as the
  // window grows.
  for (double lambda : {0.85, 0.95}) {
    const MaserParams p = MaserParams::toy(lambda, 1.0, 0.6, 0.8);
    REQUIRE(classify_maser_point(p).verdict == Verdict::NotExists);
    for (int dim : {20, 30, 40}) {
      CHECK_THROWS_AS(solve_invariant_direct(build_maser_channel(p, dim)), NoInvariantState);
    }
  }
}
