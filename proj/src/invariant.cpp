#include "qbdc/invariant.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>

namespace qbdc {

namespace {

// Symmetrize, clip the spectrum at the -1e-10 floor and renormalize.
// Negativity beyond the floor is a genuine bug, not roundoff.
Matrix clean_state(const Matrix& raw) {
  Matrix rho = 0.5 * (raw + raw.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
  const RealVector evals = es.eigenvalues();
  if (evals.minCoeff() < -1e-10)
    throw std::runtime_error("fixed point has eigenvalue " + std::to_string(evals.minCoeff()) +
                             " below the -1e-10 clipping floor");
  RealVector clipped = evals.cwiseMax(0.0);
  const double total = clipped.sum();
  if (total <= 0.0) throw std::runtime_error("fixed point has vanishing trace");
  clipped /= total;
  return es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().adjoint();
}

struct LinearFit {
  double intercept = 0.0, slope = 0.0, rms = 0.0;
};

LinearFit fit_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  LinearFit f;
  const double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-300) return f;
  f.slope = (n * sxy - sx * sy) / denom;
  f.intercept = (sy - f.slope * sx) / n;
  double ss = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (f.intercept + f.slope * xs[i]);
    ss += r * r;
  }
  f.rms = std::sqrt(ss / n);
  return f;
}

}  // namespace

DensityMatrix solve_invariant_direct(const TruncatedChannel& channel, double tol) {
  const int d = channel.dim;
  const Complex shift(1.0 + 1e-9, 0.0);

  SparseMatrix shifted = channel.predual;
  SparseMatrix eye(d * d, d * d);
  eye.setIdentity();
  shifted -= Complex(shift) * eye;
  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(shifted);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("solve_invariant_direct: factorization failed");

  // Shift-invert iteration towards the eigenvalue closest to 1. The start
  // vector is the maximally mixed state, which overlaps the Perron vector.
  Vector v = vec(Matrix::Identity(d, d) / static_cast<double>(d));
  v.normalize();
  Complex eig = 0.0;
  double resid = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 512; ++it) {
    Vector w = lu.solve(v);
    w.normalize();
    v = w;
    const Vector mv = channel.predual * v;
    eig = v.dot(mv);  // Rayleigh quotient (v is unit)
    resid = (mv - eig * v).norm();
    if (resid < 1e-13) break;
  }
  if (std::abs(eig - Complex(1.0)) > tol) throw NoInvariantState(eig);

  Matrix rho = unvec(v, d);
  const Complex tr = rho.trace();
  if (std::abs(tr) < 1e-10)
    throw std::runtime_error("solve_invariant_direct: traceless fixed vector");
  rho /= tr;

  DensityMatrix out;
  out.entries = clean_state(rho);
  out.trace_deficit = std::abs(eig - Complex(1.0));
  return out;
}

DensityMatrix solve_invariant_cesaro(const TruncatedChannel& channel, const DensityMatrix& seed,
                                     int max_iter, double tol) {
  Matrix rho = seed.entries;
  double deficit = 0.0;
  Matrix prev_avg = rho;
  double last_distance = std::numeric_limits<double>::infinity();
  long total = 0;
  for (int block = 1; total < max_iter; block *= 2) {
    Matrix acc = Matrix::Zero(channel.dim, channel.dim);
    for (int i = 0; i < block && total < max_iter; ++i, ++total) {
      rho = channel.apply_predual(rho);
      const double tr = rho.trace().real();
      deficit += 1.0 - tr;
      if (tr > 1e-300) rho /= tr;
      acc += rho;
    }
    Matrix avg = acc / acc.trace().real();
    last_distance = trace_norm_hermitian(0.5 * (avg + avg.adjoint()) -
                                         0.5 * (prev_avg + prev_avg.adjoint()));
    if (last_distance < tol) {
      const Matrix residual = channel.apply_predual(avg) - avg;
      if (trace_norm_hermitian(0.5 * (residual + residual.adjoint())) < 10.0 * tol) {
        DensityMatrix out;
        out.entries = clean_state(avg);
        out.trace_deficit = deficit;
        return out;
      }
    }
    prev_avg = avg;
  }
  throw NonConvergence(last_distance);
}

FalloffFit falloff_fit(const DensityMatrix& rho) {
  const int d = rho.dim();
  FalloffFit fit;
  // Fit from n = 2: the lower edge has modified rates (mu_0 = 0), so the
  // exponential regime sets in past the first two levels. The upper bound
  // stays away from the truncation boundary.
  fit.window_lo = 2;
  fit.window_hi = std::max(0, d - 2);
  int w = -1;
  for (int n = 0; n <= fit.window_hi; ++n) {
    if (rho.entries(n, n).real() > 1e-280)
      w = n;
    else
      break;
  }
  if (w < fit.window_hi) fit.window_shrunk = true;
  fit.window_hi = std::max(w, 0);
  if (w < 4) {
    fit.degenerate = true;
    return fit;
  }
  std::vector<double> xs, ys;
  for (int n = fit.window_lo; n <= fit.window_hi; ++n) {
    xs.push_back(static_cast<double>(n));
    ys.push_back(std::log(rho.entries(n, n).real()));
  }
  const LinearFit lf = fit_line(xs, ys);
  fit.gamma = -lf.slope;
  fit.c = std::exp(lf.intercept);
  for (int n = fit.window_lo; n <= fit.window_hi; ++n) {
    const double excess = rho.entries(n, n).real() - fit.c * std::exp(-fit.gamma * n);
    fit.max_violation = std::max(fit.max_violation, excess);
  }
  return fit;
}

std::vector<double> truncation_convergence(const MaserParams& params,
                                           const std::vector<int>& dims, double tol) {
  if (dims.size() < 3) throw std::invalid_argument("truncation_convergence: need >= 3 dims");
  if (!std::is_sorted(dims.begin(), dims.end()))
    throw std::invalid_argument("truncation_convergence: dims must be increasing");
  std::vector<DensityMatrix> states;
  for (int d : dims) states.push_back(solve_invariant_direct(build_maser_channel(params, d), tol));
  std::vector<double> distances;
  for (std::size_t i = 0; i + 1 < states.size(); ++i) {
    const int big = dims[i + 1];
    Matrix embedded = Matrix::Zero(big, big);
    embedded.topLeftCorner(dims[i], dims[i]) = states[i].entries;
    distances.push_back(trace_norm_hermitian(states[i + 1].entries - embedded));
  }
  return distances;
}

ConvergenceTrace convergence_trace(const TruncatedChannel& channel, const DensityMatrix& theta,
                                   const DensityMatrix& phi, int n_max, double stop_below,
                                   std::optional<PowerLawConstants> constants) {
  ConvergenceTrace trace;
  Matrix cur = theta.entries;
  trace.distances.push_back(trace_norm_hermitian(cur - phi.entries));
  for (int n = 1; n <= n_max; ++n) {
    cur = channel.apply_predual(cur);
    const double dist = trace_norm_hermitian(cur - phi.entries);
    trace.distances.push_back(dist);
    if (stop_below > 0.0 && dist < stop_below) break;
  }

  // Tail fits: geometric (ln d vs n) against power law (ln d vs ln n);
  // smaller log-space residual wins.
  std::vector<double> ns, lnn, lnd;
  for (std::size_t n = 1; n < trace.distances.size(); ++n) {
    if (trace.distances[n] > 1e-13) {
      ns.push_back(static_cast<double>(n));
      lnn.push_back(std::log(static_cast<double>(n)));
      lnd.push_back(std::log(trace.distances[n]));
    }
  }
  if (ns.size() >= 4) {
    const std::size_t skip = ns.size() / 4;  // burn-in
    std::vector<double> tn(ns.begin() + skip, ns.end());
    std::vector<double> tln(lnn.begin() + skip, lnn.end());
    std::vector<double> tld(lnd.begin() + skip, lnd.end());
    const LinearFit geo = fit_line(tn, tld);
    const LinearFit pow = fit_line(tln, tld);
    if (geo.rms <= pow.rms) {
      trace.fitted_kind = FitKind::Geometric;
      trace.fitted_rate = std::exp(geo.slope);
      trace.fitted_residual = geo.rms;
    } else {
      trace.fitted_kind = FitKind::PowerLaw;
      trace.fitted_rate = -pow.slope;
      trace.fitted_residual = pow.rms;
    }
  }
  if (constants) {
    const PowerLawConstants& k = *constants;
    trace.gamma_bound =
        k.gamma1 * k.gamma2 / (-k.a * std::log(k.lambda) * (k.gamma0 + k.gamma2));
  }
  return trace;
}

std::vector<FalloffBoundCheck> falloff_bound_check(
    const DensityMatrix& rho, const std::vector<double>& y_diag, double b,
    const std::vector<std::pair<double, double>>& cd_pairs) {
  std::vector<FalloffBoundCheck> checks;
  const int d = std::min<int>(rho.dim(), static_cast<int>(y_diag.size()));
  for (const auto& [c, dd] : cd_pairs) {
    if (!(c > 0.0 && c <= dd))
      throw std::invalid_argument("falloff_bound_check: need 0 < c <= d");
    FalloffBoundCheck chk;
    chk.c = c;
    chk.d = dd;
    for (int n = 0; n < d; ++n)
      if (y_diag[static_cast<std::size_t>(n)] >= c && y_diag[static_cast<std::size_t>(n)] <= dd)
        chk.mass += rho.entries(n, n).real();
    chk.bound = b / c;
    chk.pass = chk.mass <= chk.bound + 1e-12;
    checks.push_back(chk);
  }
  return checks;
}

}  // namespace qbdc
