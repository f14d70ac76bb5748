#include "qbdc/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qbdc/tridiagonal.hpp"

namespace qbdc {

namespace {

// Weights of the proof formulas, kept in product form to avoid overflow:
//   w_n = t^n / (mu_n pi_n) = t^n / (lam_{n-1} pi_{n-1})   (x increments)
//   v_n = t^n / pi_n                                        (y tail scale)
// with w_{n+1}/w_n = t mu_n / lam_n and v_{n+1}/v_n = t mu_{n+1}/lam_n.
struct ProofWeights {
  std::vector<double> w;  // w[0] unused, defined from n = 1
  std::vector<double> v;
};

ProofWeights proof_weights(const TransitionRates& rates, double t) {
  const int cutoff = rates.cutoff;
  for (int n = 0; n < cutoff; ++n)
    if (rates.lam[static_cast<std::size_t>(n)] <= 0.0)
      throw std::invalid_argument("lyapunov certificate: vanishing birth rate at n=" +
                                  std::to_string(n));
  for (int n = 1; n <= cutoff; ++n)
    if (rates.mu[static_cast<std::size_t>(n)] <= 0.0)
      throw std::invalid_argument("lyapunov certificate: vanishing death rate at n=" +
                                  std::to_string(n));
  ProofWeights pw;
  pw.v.assign(static_cast<std::size_t>(cutoff) + 1, 0.0);
  pw.w.assign(static_cast<std::size_t>(cutoff) + 1, 0.0);
  pw.v[0] = 1.0;
  for (int n = 0; n < cutoff; ++n) {
    const auto i = static_cast<std::size_t>(n);
    pw.v[i + 1] = pw.v[i] * t * rates.mu[i + 1] / rates.lam[i];
  }
  for (int n = 1; n <= cutoff; ++n) {
    const auto i = static_cast<std::size_t>(n);
    pw.w[i] = pw.v[i] / rates.mu[i];
  }
  return pw;
}

}  // namespace

Certificate build_lyapunov_certificate(const TransitionRates& rates, double t, double r,
                                       int n_head) {
  if (!(t > 0.0 && t < 1.0))
    throw std::invalid_argument("lyapunov certificate: t must lie in (0,1)");
  if (!(r > 0.0 && r < 1.0 - t))
    throw std::invalid_argument("lyapunov certificate: r must lie in (0, 1-t)");
  const int cutoff = rates.cutoff;
  if (n_head < 0 || n_head > cutoff - 2)
    throw std::invalid_argument("lyapunov certificate: head length out of range");

  const ProofWeights pw = proof_weights(rates, t);
  const std::size_t len = static_cast<std::size_t>(cutoff) + 1;

  Certificate cert;
  cert.kind = CertificateKind::Lyapunov;
  cert.t = t;
  cert.r = r;
  cert.n_head = n_head;
  cert.x_diag.assign(len, 0.0);
  for (std::size_t n = 1; n < len; ++n) cert.x_diag[n] = cert.x_diag[n - 1] + pw.w[n];

  cert.y_diag.assign(len, 0.0);
  for (int n = n_head + 1; n <= cutoff; ++n)
    cert.y_diag[static_cast<std::size_t>(n)] = r * pw.v[static_cast<std::size_t>(n)];

  // Diagonal of X - T(X) before subtracting y, and the off-diagonals of
  // X - T(X) - Y; both come straight from the rate identities.
  auto raw_diag = [&](int n) {
    const auto i = static_cast<std::size_t>(n);
    double d = -rates.lam[i] * ((n + 1 <= cutoff) ? pw.w[i + 1] : 0.0);
    if (n >= 1) d += rates.mu[i] * pw.w[i];
    return d;
  };
  auto offdiag = [&](int n) {
    const auto i = static_cast<std::size_t>(n);
    return (n + 1 <= cutoff) ? rates.eta[i] * pw.w[i + 1] : Complex(0.0);
  };

  // Head repair: backward sweep choosing y_n so that d_n stays at the tail
  // scale (1-r-t) v_n or large enough for the product condition against the
  // already-fixed d_{n+1}, with slack factor 1.5.
  double d_next = raw_diag(n_head + 1) - cert.y_diag[static_cast<std::size_t>(n_head) + 1];
  for (int n = n_head; n >= 0; --n) {
    const double floor_n = (1.0 - r - t) * pw.v[static_cast<std::size_t>(n)];
    const double need = 1.5 * 4.0 * std::norm(offdiag(n)) / d_next;
    const double d_target = std::max(floor_n, need);
    cert.y_diag[static_cast<std::size_t>(n)] = raw_diag(n) - d_target;
    d_next = d_target;
  }
  return cert;
}

Certificate verify_lyapunov(const TruncatedChannel& channel, const Certificate& cert) {
  if (cert.kind != CertificateKind::Lyapunov)
    throw std::invalid_argument("verify_lyapunov: certificate kind mismatch");
  const int len = static_cast<int>(cert.x_diag.size());
  if (len != static_cast<int>(cert.y_diag.size()))
    throw std::invalid_argument("verify_lyapunov: x/y length mismatch");
  if (len - 1 >= channel.dim)
    throw std::invalid_argument("verify_lyapunov: channel interior does not cover certificate");

  Matrix x = Matrix::Zero(len, len);
  for (int n = 0; n < len; ++n) x(n, n) = cert.x_diag[static_cast<std::size_t>(n)];
  const int m = len - 2;
  const Matrix tx = heisenberg_apply_window(channel, x, m);
  Matrix mat = -tx;
  for (int n = 0; n <= m; ++n)
    mat(n, n) += cert.x_diag[static_cast<std::size_t>(n)] - cert.y_diag[static_cast<std::size_t>(n)];

  std::vector<double> d(static_cast<std::size_t>(m) + 1);
  std::vector<Complex> o(static_cast<std::size_t>(m));
  for (int n = 0; n <= m; ++n) d[static_cast<std::size_t>(n)] = mat(n, n).real();
  for (int n = 0; n < m; ++n) o[static_cast<std::size_t>(n)] = mat(n, n + 1);

  Certificate out = cert;
  out.window_lo = 0;
  out.window_hi = m;
  out.min_slack = tridiagonal_min_slack(d, o);
  out.verified = out.min_slack > 0.0;
  return out;
}

std::optional<Certificate> find_lyapunov_certificate(const TruncatedChannel& channel,
                                                     const TransitionRates& rates,
                                                     const KappaEstimate& kappa,
                                                     double tail_fraction) {
  const double ek = kappa.is_infinite ? 0.0 : std::exp(-kappa.kappa);
  const double base = std::max(ek, 1e-6);
  const TailWindow w = tail_window(rates.cutoff, tail_fraction);
  for (int j = 0; j <= 20; ++j) {
    const double t = base * (1.0 + std::pow(2.0, -j));
    if (t >= 1.0) continue;
    for (int i = 1; i <= 20; ++i) {
      const double r = (1.0 - t) * std::pow(2.0, -i);
      // Minimal head: the smallest N with the strict inequality
      // lam_n mu_{n+1} / 4|eta_n|^2 > t/(1-r-t)^2 for all n > N in the window.
      const double rhs = t / ((1.0 - r - t) * (1.0 - r - t));
      int n_head = 0;
      bool feasible = true;
      for (int n = w.hi - 1; n >= 1; --n) {
        const auto k = static_cast<std::size_t>(n);
        if (rates.lam[k] <= 0.0 || rates.mu[k + 1] <= 0.0) {
          feasible = false;
          break;
        }
        const double e2 = std::norm(rates.eta[k]);
        const double lhs =
            (e2 > 0.0) ? rates.lam[k] * rates.mu[k + 1] / (4.0 * e2)
                       : std::numeric_limits<double>::infinity();
        if (lhs <= rhs) {
          n_head = n;
          break;
        }
      }
      if (!feasible || n_head > rates.cutoff - 2) continue;
      try {
        Certificate cert = build_lyapunov_certificate(rates, t, r, n_head);
        cert = verify_lyapunov(channel, cert);
        if (cert.verified) return cert;
      } catch (const std::invalid_argument&) {
        return std::nullopt;  // degenerate rates: no grid point can help
      }
    }
  }
  return std::nullopt;
}

Certificate build_drift_certificate(const TransitionRates& rates) {
  const int cutoff = rates.cutoff;
  for (int n = 1; n <= cutoff; ++n)
    if (rates.lam[static_cast<std::size_t>(n)] <= 0.0)
      throw std::invalid_argument("drift certificate: vanishing birth rate at n=" +
                                  std::to_string(n));

  const double slack = 1.1;
  int n_drift = -1;
  double c = 0.0;
  for (int cand = 0; cand <= cutoff - 3; ++cand) {
    bool drift_ok = true;
    double ratio_min = std::numeric_limits<double>::infinity();
    for (int n = cand + 1; n <= cutoff - 1; ++n) {
      const auto i = static_cast<std::size_t>(n);
      const double d0 = rates.lam[i] - rates.mu[i];
      const double d1 = rates.lam[i + 1] - rates.mu[i + 1];
      if (d0 <= 0.0 || d1 <= 0.0) {
        drift_ok = false;
        break;
      }
      const double e2 = std::norm(rates.eta[i]);
      if (e2 > 0.0) ratio_min = std::min(ratio_min, d0 * d1 / (4.0 * e2));
    }
    if (!drift_ok || !(ratio_min > slack)) continue;
    n_drift = cand;
    c = std::isinf(ratio_min) ? 0.5 : std::min(0.5, 1.0 - std::sqrt(slack / ratio_min));
    break;
  }
  if (n_drift < 0)
    throw std::invalid_argument(
        "drift certificate: no admissible N in the window (criterion not applicable)");

  Certificate cert;
  cert.kind = CertificateKind::Drift;
  cert.n_drift = n_drift;
  const std::size_t len = static_cast<std::size_t>(cutoff) + 1;
  cert.z_diag.assign(len, 0.0);
  cert.eps_diag.assign(len, 0.0);
  for (int n = 0; n <= cutoff; ++n) {
    if (n > n_drift + 1) cert.z_diag[static_cast<std::size_t>(n)] = n - (n_drift + 1);
    if (n > n_drift) {
      const auto i = static_cast<std::size_t>(n);
      cert.eps_diag[i] = c * (rates.lam[i] - rates.mu[i]);
    }
  }
  return cert;
}

Certificate verify_drift(const TruncatedChannel& channel, const Certificate& cert) {
  if (cert.kind != CertificateKind::Drift)
    throw std::invalid_argument("verify_drift: certificate kind mismatch");
  const int len = static_cast<int>(cert.z_diag.size());
  if (len != static_cast<int>(cert.eps_diag.size()))
    throw std::invalid_argument("verify_drift: z/eps length mismatch");
  if (len - 1 >= channel.dim)
    throw std::invalid_argument("verify_drift: channel interior does not cover certificate");

  Matrix z = Matrix::Zero(len, len);
  for (int n = 0; n < len; ++n) z(n, n) = cert.z_diag[static_cast<std::size_t>(n)];
  const int m = len - 2;
  Matrix mat = heisenberg_apply_window(channel, z, m);
  for (int n = 0; n <= m; ++n)
    mat(n, n) -= cert.z_diag[static_cast<std::size_t>(n)] + cert.eps_diag[static_cast<std::size_t>(n)];

  // The block through n_drift is identically zero and decoupled (the first
  // off-diagonal entry sits at (N+1, N+2)), so positivity of the whole
  // matrix reduces to the active tail block.
  const int i0 = cert.n_drift + 1;
  double head_residual = 0.0;
  for (int n = 0; n < i0 && n <= m; ++n) {
    head_residual = std::max(head_residual, std::abs(mat(n, n)));
    if (n + 1 <= m) head_residual = std::max(head_residual, std::abs(mat(n, n + 1)));
  }

  std::vector<double> d;
  std::vector<Complex> o;
  for (int n = i0; n <= m; ++n) {
    d.push_back(mat(n, n).real());
    if (n < m) o.push_back(mat(n, n + 1));
  }

  Certificate out = cert;
  out.window_lo = i0;
  out.window_hi = m;
  out.min_slack = d.empty() ? 0.0 : tridiagonal_min_slack(d, o);
  out.verified = head_residual <= 1e-12 && !d.empty() && out.min_slack > 0.0;
  return out;
}

ToyObservable build_toy_observable(const MaserParams& params, double c_value, int k_max) {
  if (params.kind != CouplingKind::Toy)
    throw std::invalid_argument("toy observable: constant coupling sequences required");
  params.validate();
  const double lambda = params.lambda;
  const double alpha = params.toy_alpha;
  const double beta = params.toy_beta;
  const Complex nu = params.nu();
  if (std::abs(nu) == 0.0)
    throw std::invalid_argument("toy observable: nu = 0, recurrence undefined");
  if (!(alpha > 0.0))
    throw std::invalid_argument("toy observable: alpha > 0 required");
  const double q = (1.0 - 2.0 * lambda) * (1.0 - 2.0 * lambda) / (4.0 * std::norm(nu));
  if (!(beta * beta < 1.0 / (1.0 + q)))
    throw std::invalid_argument(
        "toy observable: real-roots regime, the unit-modulus argument fails");

  const Complex nubar = std::conj(nu);
  ToyObservable obs;
  obs.c_value = c_value;
  obs.x.assign(static_cast<std::size_t>(k_max) + 1, Complex(0.0));
  obs.y.assign(static_cast<std::size_t>(k_max) + 1, Complex(0.0));
  obs.y[0] = 1.0;

  // Initial conditions: Re(nubar y_1) fixes the interior diagonal to C,
  // Re(nubar x_1) fixes the (0,0) entry to C. Imaginary parts are free and
  // set to zero.
  const double re_nubar_y1 = -(c_value + (1.0 - 2.0 * lambda) * beta * beta) / (2.0 * alpha * beta);
  const double re_nubar_x1 = (lambda * beta * beta - c_value) / (2.0 * beta);
  if (k_max >= 1) {
    obs.y[1] = re_nubar_y1 * nu / std::norm(nu);
    obs.x[1] = re_nubar_x1 * nu / std::norm(nu);
  }
  const Complex cy = (2.0 * lambda - 1.0) / nubar * (beta / alpha);
  const Complex cr = nu / nubar;
  for (int k = 1; k < k_max; ++k) {
    const auto i = static_cast<std::size_t>(k);
    obs.y[i + 1] = cy * obs.y[i] - cr * obs.y[i - 1];
    obs.x[i + 1] = ((1.0 - lambda) * (alpha - 1.0) * obs.x[i] + lambda * beta * beta * obs.y[i] -
                    alpha * beta * nu * obs.y[i - 1]) /
                   (beta * nubar);
  }

  // Characteristic roots of the y recurrence and the resulting bound.
  const Complex disc = std::sqrt(cy * cy - 4.0 * cr);
  const Complex r1 = 0.5 * (cy + disc), r2 = 0.5 * (cy - disc);
  obs.root_modulus_1 = std::abs(r1);
  obs.root_modulus_2 = std::abs(r2);
  const Complex det = r2 - r1;
  if (std::abs(det) > 1e-14 && k_max >= 1) {
    const Complex c2 = (obs.y[1] - r1 * obs.y[0]) / det;
    const Complex c1 = obs.y[0] - c2;
    obs.y_bound = std::abs(c1) + std::abs(c2);
  } else {
    obs.y_bound = std::numeric_limits<double>::infinity();
  }

  for (const Complex& v : obs.x) obs.max_abs_x = std::max(obs.max_abs_x, std::abs(v));
  for (const Complex& v : obs.y) obs.max_abs_y = std::max(obs.max_abs_y, std::abs(v));
  obs.x_bounded_regime = (1.0 - alpha) / std::abs(beta) < std::abs(nu) / (1.0 - lambda);
  return obs;
}

Matrix toy_observable_matrix(const ToyObservable& obs, int m, int rows) {
  if (rows < m + 1) throw std::invalid_argument("toy observable matrix: rows must cover [0,m]");
  if (2 * m > static_cast<int>(obs.x.size()) - 1)
    throw std::invalid_argument("toy observable matrix: sequences too short, need 2m <= K");
  Matrix a = Matrix::Zero(rows, rows);
  for (int n = 0; n < rows; ++n) a(n, n) = std::min(n, m);
  for (int k = 1; k <= 2 * m; ++k) {
    const int sat = m - k / 2;  // N^(m - floor(k/2)) saturation level
    for (int n = 0; n + k < rows; ++n) {
      const double level = (sat < 0) ? 0.0 : static_cast<double>(std::min(n, sat));
      const Complex val = obs.x[static_cast<std::size_t>(k)] +
                          obs.y[static_cast<std::size_t>(k)] * level;
      a(n, n + k) = val;
      a(n + k, n) = std::conj(val);
    }
  }
  return a;
}

double toy_observable_residual(const ToyObservable& obs, const MaserParams& params, int m) {
  if (m < 2) throw std::invalid_argument("toy observable residual: m must be >= 2");
  const int dim = m + 2;
  const TruncatedChannel channel = build_maser_channel(params, dim);
  const Matrix a = toy_observable_matrix(obs, m, m + 1);
  const Matrix ta = heisenberg_apply_window(channel, a, m - 1);
  Matrix res = ta - a.topLeftCorner(m, m);
  for (int n = 0; n < m; ++n) res(n, n) -= obs.c_value;
  return res.operatorNorm();
}

}  // namespace qbdc
