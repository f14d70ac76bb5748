#pragma once

#include <optional>
#include <vector>

#include "qbdc/channel.hpp"
#include "qbdc/classical.hpp"
#include "qbdc/rates.hpp"

namespace qbdc {

enum class CertificateKind { Lyapunov, Drift };

/// Diagonal operator pair witnessing existence (X, Y with X - T(X) - Y >= 0)
/// or non-existence (Z, eps with T(Z) - Z >= eps), together with the
/// verification verdict of the tridiagonal positivity test.
struct Certificate {
  CertificateKind kind = CertificateKind::Lyapunov;
  std::vector<double> x_diag;    // Lyapunov X (x_0 = 0, nondecreasing)
  std::vector<double> y_diag;    // Lyapunov Y
  std::vector<double> z_diag;    // drift Z
  std::vector<double> eps_diag;  // drift epsilon (>= 0)
  double t = 0.0, r = 0.0;       // Lyapunov parameters
  int n_head = 0;                // Lyapunov head length (repaired entries 0..n_head)
  int n_drift = 0;               // drift N (z vanishes through N+1)
  bool verified = false;
  double min_slack = 0.0;
  int window_lo = 0, window_hi = 0;  // window covered by verification
};

/// Lyapunov certificate from the proof formulas:
///   x_n = sum_{k<=n} t^k / (mu_k pi_k),  y_n = r t^n / pi_n  (n > N_head),
/// with the head y_0..y_{N_head} chosen by a backward sweep so both
/// tridiagonal conditions hold with slack factor 1.5. Throws
/// std::invalid_argument when (t, r) is out of range (needs 0 < t < 1,
/// 0 < r < 1 - t) or the rates are degenerate on the window.
Certificate build_lyapunov_certificate(const TransitionRates& rates, double t, double r,
                                       int n_head);

/// Evaluates X - T(X) - Y on the interior window through the channel and
/// runs the tridiagonal test; returns the certificate with verified /
/// min_slack / window filled in.
Certificate verify_lyapunov(const TruncatedChannel& channel, const Certificate& cert);

/// Default (t, r) grid search: t = max(e^-kappa, eps)(1 + 2^-j),
/// r = (1 - t) 2^-i, first verified pair wins.
std::optional<Certificate> find_lyapunov_certificate(const TruncatedChannel& channel,
                                                     const TransitionRates& rates,
                                                     const KappaEstimate& kappa,
                                                     double tail_fraction = 0.25);

/// Drift certificate: Z = diag(0,...,0, 1, 2, ...) with N+2 leading zeros
/// and eps_n = c (lam_n - mu_n) for n > N, c <= 1/2 capped so that
/// (lam_n - mu_n - eps_n)(lam_{n+1} - mu_{n+1} - eps_{n+1}) > 1.1 * 4|eta_n|^2
/// on the tail. N is minimal admissible; throws std::invalid_argument when
/// no N works (criterion not applicable).
Certificate build_drift_certificate(const TransitionRates& rates);

/// Evaluates T(Z) - Z - eps on the interior; the leading block is
/// identically zero by construction, so the tridiagonal test runs on the
/// active tail block and the head residual is checked separately.
Certificate verify_drift(const TruncatedChannel& channel, const Certificate& cert);

/// Conserved observable of the toy-model non-existence proof: sequences
/// x_k, y_k built from the recurrences, plus diagnostics.
struct ToyObservable {
  std::vector<Complex> x;  // x_0 = 0, x_1, ..., x_K
  std::vector<Complex> y;  // y_0 = 1, y_1, ..., y_K
  double root_modulus_1 = 0.0, root_modulus_2 = 0.0;
  double y_bound = 0.0;    // |y'| + |y''| from the root decomposition
  double max_abs_x = 0.0, max_abs_y = 0.0;
  bool x_bounded_regime = false;  // (1-alpha)/|beta| < |nu|/(1-lambda)
  double c_value = 0.0;
};

/// Requires the complex-roots regime beta^2 < 1/(1 + (1-2 lambda)^2/(4|nu|^2)),
/// nu != 0 and constant alpha > 0; throws std::invalid_argument otherwise.
ToyObservable build_toy_observable(const MaserParams& params, double c_value, int k_max);

/// || p_[0,m-1] (T(A^m) - A^m - C p_[0,m-1]) p_[0,m-1] || for the truncated
/// observable A^m assembled from the sequences. Needs 2m <= k_max.
double toy_observable_residual(const ToyObservable& obs, const MaserParams& params, int m);

/// The truncated observable A^m on the window [0, rows-1] (rows >= m+1).
Matrix toy_observable_matrix(const ToyObservable& obs, int m, int rows);

}  // namespace qbdc
