#pragma once

#include <string>
#include <vector>

#include "qbdc/maser_params.hpp"
#include "qbdc/rates.hpp"
#include "qbdc/types.hpp"

namespace qbdc {

/// A quantum channel compressed to the Fock window [0, N], dim = N + 1.
///
/// heisenberg acts on column-stacked observables, predual is its
/// conjugate transpose (the Schroedinger-picture action on density
/// matrices under the trace pairing). Compression discards all flow past
/// level N; by nearest-neighbour locality, columns for input matrix units
/// e_{k,l} with k, l <= N-1 are exact relative to the infinite model, so
/// everything truncation-sensitive is confined to the top row/column.
enum class BoundaryPolicy { Compress };

struct TruncatedChannel {
  int dim = 0;
  SparseMatrix heisenberg;  // dim^2 x dim^2
  SparseMatrix predual;     // adjoint of heisenberg
  BoundaryPolicy boundary_policy = BoundaryPolicy::Compress;
  /// Operator norm of 1 - T(1): bounds the trace lost per predual
  /// application from the boundary row.
  double leak_estimate = 0.0;

  Matrix apply_heisenberg(const Matrix& x) const;
  Matrix apply_predual(const Matrix& rho) const;
  Matrix heisenberg_dense() const { return Matrix(heisenberg); }
  Matrix predual_dense() const { return Matrix(predual); }
};

/// Structural diagnostics for a channel that claims to be a QBDC.
struct QbdcStructureReport {
  double max_forbidden_rate = 0.0;       // largest rate at lattice distance > 1
  double unitality_residual = 0.0;       // T(p_[0,N-1]) vs identity on [0,N-2]
  double sum_rule_residual = 0.0;        // sigma + lam + mu - 1 on the interior
  double eta_consistency_residual = 0.0; // |eta_n + T(e_{n+1,n+1})_{n,n+1}|
  double cp_min_eigenvalue = 0.0;        // smallest eigenvalue, interior Choi block
  double sandwich_min_eigenvalue = 0.0;  // worst eigenvalue over sampled window checks
};

/// Builds the maser transition operator on [0, dim-1]:
///   T(x) = lambda (s*as x s*as + s*b x bs) + (1-lambda)(bs x s*b + a x a)
///          - conj(nu)(a x bs - bs x s*as) + nu (s*as x s*b - s*b x a)
/// with s the right shift and a, b the coupling diagonals, all compressed
/// to the window. Throws std::invalid_argument for invalid parameters.
TruncatedChannel build_maser_channel(const MaserParams& params, int dim);

/// The identity channel on [0, dim-1].
TruncatedChannel identity_channel(int dim);

/// Weighted sum of channels (same dim). Weights are not checked for
/// convexity; summation order is the argument order, so outputs are
/// bit-stable for a fixed call.
TruncatedChannel combine_channels(const std::vector<double>& weights,
                                  const std::vector<const TruncatedChannel*>& channels);

/// p_[0,M] T(X) p_[0,M] for X given on [0, M+1]. Exact relative to the
/// infinite model by locality. Requires M + 1 < dim.
Matrix heisenberg_apply_window(const TruncatedChannel& channel, const Matrix& x, int m);

/// Rates from the built channel, via matrix units; cutoff = dim - 2.
TransitionRates extract_transition_rates(const TruncatedChannel& channel);

/// Analytic maser rates without building a channel:
///   lam_n = lambda beta_{n+1}^2, mu_n = (1-lambda) beta_n^2,
///   eta_n = nu alpha_{n+1} beta_{n+1}, sigma_n = 1 - lam_n - mu_n.
TransitionRates closed_form_rates(const MaserParams& params, int cutoff);

/// Runs the structural checks (forbidden rates, sandwich inequality,
/// sum rule, eta consistency, interior complete positivity). The
/// forbidden-rate scan covers all matrix-unit pairs when dim <= 32,
/// otherwise a deterministic stratified sample of ~sample_budget inputs.
QbdcStructureReport verify_qbdc_structure(const TruncatedChannel& channel,
                                          int sample_budget = 4096);

}  // namespace qbdc
