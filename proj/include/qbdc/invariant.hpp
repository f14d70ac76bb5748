#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qbdc/channel.hpp"
#include "qbdc/maser_params.hpp"
#include "qbdc/types.hpp"

namespace qbdc {

/// Candidate invariant state: Hermitian, PSD to -1e-10, unit trace after
/// renormalization. trace_deficit records what compression leaked before
/// the final renormalization (for the direct solver: |1 - eigenvalue|).
/// Convention: phi(e_{n,m}) = Tr(rho e_{n,m}) = entries(m, n).
struct DensityMatrix {
  Matrix entries;
  double trace_deficit = 0.0;

  int dim() const { return static_cast<int>(entries.rows()); }
};

/// The truncated predual has no eigenvalue within tol of 1: read as "no
/// invariant state at this truncation" (mass escape), not as an error.
struct NoInvariantState : std::runtime_error {
  explicit NoInvariantState(Complex closest)
      : std::runtime_error("no invariant state at this truncation; closest eigenvalue " +
                           std::to_string(closest.real()) + (closest.imag() < 0 ? "-" : "+") +
                           std::to_string(std::abs(closest.imag())) + "i"),
        closest_eigenvalue(closest) {}
  Complex closest_eigenvalue;
};

struct NonConvergence : std::runtime_error {
  explicit NonConvergence(double last)
      : std::runtime_error("cesaro iteration did not converge; last distance " +
                           std::to_string(last)),
        last_distance(last) {}
  double last_distance;
};

/// Fixed point of the predual via sparse shift-invert iteration around 1.
/// Rejects with NoInvariantState when |eigenvalue - 1| > tol. The result is
/// symmetrized, clipped at -1e-10 (larger negativity is a hard failure) and
/// renormalized.
DensityMatrix solve_invariant_direct(const TruncatedChannel& channel, double tol = 1e-8);

/// Iterates rho <- T_*(rho) with block-restarted Cesaro averaging
/// (doubling blocks; plain running averages converge like 1/n and would
/// never meet the fixed-point residual target). Renormalizes against
/// leakage each step and accumulates trace_deficit. Stops when successive
/// block averages differ by < tol in trace norm AND the fixed-point
/// residual is < 10 tol; throws NonConvergence past max_iter.
DensityMatrix solve_invariant_cesaro(const TruncatedChannel& channel, const DensityMatrix& seed,
                                     int max_iter, double tol);

/// Least-squares fit of ln rho_nn vs n over the interior window.
struct FalloffFit {
  double c = 0.0;      // prefactor of the bound rho_nn <= c e^{-gamma n}
  double gamma = 0.0;
  int window_lo = 0, window_hi = 0;
  double max_violation = 0.0;  // largest positive excess over the fitted bound
  bool degenerate = false;     // support too small to fit (flagged)
  bool window_shrunk = false;  // zero diagonal entries dropped
};

FalloffFit falloff_fit(const DensityMatrix& rho);

/// Trace-norm distances between invariant states at consecutive
/// truncations (smaller state embedded in the larger window).
std::vector<double> truncation_convergence(const MaserParams& params,
                                           const std::vector<int>& dims, double tol = 1e-8);

struct PowerLawConstants {
  double gamma0 = 0.0, gamma1 = 0.0, gamma2 = 0.0;
  double lambda = 0.5;  // mixing weight of the convex combination
  double a = 2.0;
};

enum class FitKind { None, Geometric, PowerLaw };

struct ConvergenceTrace {
  std::vector<double> distances;  // d_n = ||T_*^n theta - phi||_tr, n = 0..
  FitKind fitted_kind = FitKind::None;
  double fitted_rate = 0.0;      // geometric ratio or power-law exponent
  double fitted_residual = 0.0;  // RMS residual of the winning fit in log space
  std::optional<double> gamma_bound;  // gamma(a) when constants are declared
};

/// Distances along the predual orbit, exact at the truncation. Stops early
/// once d_n < stop_below (0 disables). gamma(a) = g1 g2 / (-a ln(lambda) (g0 + g2))
/// is filled when `constants` is supplied.
ConvergenceTrace convergence_trace(const TruncatedChannel& channel, const DensityMatrix& theta,
                                   const DensityMatrix& phi, int n_max, double stop_below = 0.0,
                                   std::optional<PowerLawConstants> constants = std::nullopt);

struct FalloffBoundCheck {
  double c = 0.0, d = 0.0;
  double mass = 0.0;   // sum of rho_nn over {n : c <= y_n <= d}
  double bound = 0.0;  // b / c
  bool pass = false;
};

/// Checks phi(chi_[c,d](Y)) <= b/c for a diagonal Y (spectral projections
/// are coordinate projections) and a verified lower bound -b of Y.
std::vector<FalloffBoundCheck> falloff_bound_check(const DensityMatrix& rho,
                                                   const std::vector<double>& y_diag, double b,
                                                   const std::vector<std::pair<double, double>>& cd_pairs);

}  // namespace qbdc
