#include "qbdc/channel.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qbdc {

double trace_norm_hermitian(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

double trace_norm(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues().sum();
}

namespace {

// A matrix supported on a single diagonal: entries (k + max(offset,0),
// k + max(-offset,0)) = values[k]. offset +1 is the subdiagonal (raising),
// -1 the superdiagonal (lowering), 0 the main diagonal.
struct BandOp {
  int offset = 0;
  std::vector<double> values;
};

BandOp diag_a(const MaserParams& p, int dim) {
  BandOp op{0, std::vector<double>(static_cast<std::size_t>(dim))};
  for (int n = 0; n < dim; ++n) op.values[static_cast<std::size_t>(n)] = p.alpha(n);
  return op;
}

// s* a s compressed to [0,N]: diagonal alpha_{n+1}, except 0 at n = N where
// the shift leaves the window.
BandOp diag_sas(const MaserParams& p, int dim) {
  BandOp op{0, std::vector<double>(static_cast<std::size_t>(dim), 0.0)};
  for (int n = 0; n + 1 < dim; ++n) op.values[static_cast<std::size_t>(n)] = p.alpha(n + 1);
  return op;
}

// b s: (n+1, n) = beta_{n+1}.
BandOp band_bs(const MaserParams& p, int dim) {
  BandOp op{+1, std::vector<double>(static_cast<std::size_t>(dim - 1))};
  for (int n = 0; n + 1 < dim; ++n) op.values[static_cast<std::size_t>(n)] = p.beta(n + 1);
  return op;
}

// s* b: (n, n+1) = beta_{n+1}.
BandOp band_sb(const MaserParams& p, int dim) {
  BandOp op{-1, std::vector<double>(static_cast<std::size_t>(dim - 1))};
  for (int n = 0; n + 1 < dim; ++n) op.values[static_cast<std::size_t>(n)] = p.beta(n + 1);
  return op;
}

// Adds the triplets of c * kron(B^T, A) for the term c A x B under
// column stacking: entry (m' d + n', m d + n) = c A_{n',n} B_{m,m'}.
void add_term(std::vector<Eigen::Triplet<Complex>>& trips, int dim, Complex c,
              const BandOp& a, const BandOp& b) {
  const int ra0 = std::max(a.offset, 0), ca0 = std::max(-a.offset, 0);
  const int rb0 = std::max(b.offset, 0), cb0 = std::max(-b.offset, 0);
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const int n_out = ra0 + static_cast<int>(i);  // row of A
    const int n_in = ca0 + static_cast<int>(i);   // col of A
    const Complex va = c * a.values[i];
    if (va == Complex(0.0, 0.0)) continue;
    for (std::size_t j = 0; j < b.values.size(); ++j) {
      const int m_in = rb0 + static_cast<int>(j);   // row of B
      const int m_out = cb0 + static_cast<int>(j);  // col of B
      const double vb = b.values[j];
      if (vb == 0.0) continue;
      trips.emplace_back(m_out * dim + n_out, m_in * dim + n_in, va * vb);
    }
  }
}

Matrix projector(int dim, int lo, int hi) {
  Matrix p = Matrix::Zero(dim, dim);
  for (int k = std::max(lo, 0); k <= std::min(hi, dim - 1); ++k) p(k, k) = 1.0;
  return p;
}

}  // namespace

Matrix TruncatedChannel::apply_heisenberg(const Matrix& x) const {
  return unvec(heisenberg * vec(x), dim);
}

Matrix TruncatedChannel::apply_predual(const Matrix& rho) const {
  return unvec(predual * vec(rho), dim);
}

TruncatedChannel build_maser_channel(const MaserParams& params, int dim) {
  if (dim < 3) throw std::invalid_argument("build_maser_channel: dim must be >= 3");
  params.validate(dim + 1);

  const double lam = params.lambda;
  const Complex nu = params.nu();
  const BandOp a = diag_a(params, dim);
  const BandOp sas = diag_sas(params, dim);
  const BandOp bs = band_bs(params, dim);
  const BandOp sb = band_sb(params, dim);

  std::vector<Eigen::Triplet<Complex>> trips;
  trips.reserve(static_cast<std::size_t>(8) * dim * dim);
  add_term(trips, dim, Complex(lam), sas, sas);
  add_term(trips, dim, Complex(lam), sb, bs);
  add_term(trips, dim, Complex(1.0 - lam), bs, sb);
  add_term(trips, dim, Complex(1.0 - lam), a, a);
  add_term(trips, dim, -std::conj(nu), a, bs);
  add_term(trips, dim, std::conj(nu), bs, sas);
  add_term(trips, dim, nu, sas, sb);
  add_term(trips, dim, -nu, sb, a);

  TruncatedChannel ch;
  ch.dim = dim;
  ch.heisenberg.resize(dim * dim, dim * dim);
  ch.heisenberg.setFromTriplets(trips.begin(), trips.end());
  ch.predual = SparseMatrix(ch.heisenberg.adjoint());

  const Matrix defect = Matrix::Identity(dim, dim) - ch.apply_heisenberg(Matrix::Identity(dim, dim));
  ch.leak_estimate = defect.operatorNorm();
  return ch;
}

TruncatedChannel identity_channel(int dim) {
  TruncatedChannel ch;
  ch.dim = dim;
  ch.heisenberg.resize(dim * dim, dim * dim);
  ch.heisenberg.setIdentity();
  ch.predual = ch.heisenberg;
  ch.leak_estimate = 0.0;
  return ch;
}

TruncatedChannel combine_channels(const std::vector<double>& weights,
                                  const std::vector<const TruncatedChannel*>& channels) {
  if (weights.empty() || weights.size() != channels.size())
    throw std::invalid_argument("combine_channels: weights/channels mismatch");
  const int dim = channels.front()->dim;
  TruncatedChannel out;
  out.dim = dim;
  out.heisenberg = SparseMatrix(dim * dim, dim * dim);
  for (std::size_t i = 0; i < channels.size(); ++i) {
    if (channels[i]->dim != dim)
      throw std::invalid_argument("combine_channels: dimension mismatch");
    out.heisenberg = out.heisenberg + Complex(weights[i]) * channels[i]->heisenberg;
  }
  out.predual = SparseMatrix(out.heisenberg.adjoint());
  const Matrix defect = Matrix::Identity(dim, dim) - out.apply_heisenberg(Matrix::Identity(dim, dim));
  out.leak_estimate = defect.operatorNorm();
  return out;
}

Matrix heisenberg_apply_window(const TruncatedChannel& channel, const Matrix& x, int m) {
  if (m + 1 >= channel.dim)
    throw std::invalid_argument("heisenberg_apply_window: window exceeds truncation");
  if (x.rows() != m + 2 || x.cols() != m + 2)
    throw std::invalid_argument("heisenberg_apply_window: X must live on [0, M+1]");
  Matrix embedded = Matrix::Zero(channel.dim, channel.dim);
  embedded.topLeftCorner(m + 2, m + 2) = x;
  return channel.apply_heisenberg(embedded).topLeftCorner(m + 1, m + 1);
}

TransitionRates extract_transition_rates(const TruncatedChannel& channel) {
  if (channel.dim < 3)
    throw std::invalid_argument("extract_transition_rates: dim must be >= 3");
  const int d = channel.dim;
  const int cutoff = d - 2;
  // T(e_{n,n}) is column n*d+n of the Heisenberg matrix.
  auto unit_image = [&](int n) {
    return unvec(Vector(channel.heisenberg.col(n * d + n)), d);
  };
  TransitionRates r;
  r.cutoff = cutoff;
  r.sigma.resize(static_cast<std::size_t>(cutoff) + 1);
  r.mu.assign(static_cast<std::size_t>(cutoff) + 1, 0.0);
  r.lam.resize(static_cast<std::size_t>(cutoff) + 1);
  r.eta.resize(static_cast<std::size_t>(cutoff) + 1);
  Matrix prev = unit_image(0);
  Matrix cur = unit_image(0);
  for (int n = 0; n <= cutoff; ++n) {
    const Matrix next = unit_image(n + 1);
    r.sigma[static_cast<std::size_t>(n)] = cur(n, n).real();
    r.lam[static_cast<std::size_t>(n)] = next(n, n).real();
    r.eta[static_cast<std::size_t>(n)] = cur(n, n + 1);
    if (n >= 1) r.mu[static_cast<std::size_t>(n)] = prev(n, n).real();
    prev = cur;
    cur = next;
  }
  return r;
}

TransitionRates closed_form_rates(const MaserParams& params, int cutoff) {
  params.validate(cutoff + 2);
  const Complex nu = params.nu();
  TransitionRates r;
  r.cutoff = cutoff;
  r.sigma.resize(static_cast<std::size_t>(cutoff) + 1);
  r.mu.assign(static_cast<std::size_t>(cutoff) + 1, 0.0);
  r.lam.resize(static_cast<std::size_t>(cutoff) + 1);
  r.eta.resize(static_cast<std::size_t>(cutoff) + 1);
  for (int n = 0; n <= cutoff; ++n) {
    const double bn = params.beta(n);
    const double bn1 = params.beta(n + 1);
    const double an1 = params.alpha(n + 1);
    const double l = params.lambda * bn1 * bn1;
    const double m = (n >= 1) ? (1.0 - params.lambda) * bn * bn : 0.0;
    r.lam[static_cast<std::size_t>(n)] = l;
    r.mu[static_cast<std::size_t>(n)] = m;
    r.sigma[static_cast<std::size_t>(n)] = 1.0 - l - m;
    r.eta[static_cast<std::size_t>(n)] = nu * an1 * bn1;
  }
  return r;
}

QbdcStructureReport verify_qbdc_structure(const TruncatedChannel& channel, int sample_budget) {
  if (channel.dim < 4)
    throw std::invalid_argument("verify_qbdc_structure: dim must be >= 4");
  const int d = channel.dim;
  QbdcStructureReport rep;

  auto unit_image = [&](int k, int l) {
    return unvec(Vector(channel.heisenberg.col(l * d + k)), d);
  };

  // (a) forbidden long-range rates. Full scan for dim <= 32, else a
  // deterministic stride sample of input units (the scan is quartic in dim).
  {
    int stride = 1;
    if (d > 32) {
      const long total = static_cast<long>(d) * d;
      stride = static_cast<int>(std::max(1L, total / std::max(1, sample_budget)));
    }
    long idx = 0;
    for (int m = 0; m < d; ++m) {
      for (int mp = 0; mp < d; ++mp, ++idx) {
        if (idx % stride != 0) continue;
        const Matrix img = unit_image(m, mp);
        for (int n = 0; n < d; ++n) {
          for (int np = 0; np < d; ++np) {
            if (std::abs(n - m) > 1 || std::abs(np - mp) > 1)
              rep.max_forbidden_rate = std::max(rep.max_forbidden_rate, std::abs(img(n, np)));
          }
        }
      }
    }
  }

  // Unitality away from the boundary: T(p_[0,N-1]) agrees with the identity
  // on [0, N-2].
  {
    const Matrix img = channel.apply_heisenberg(projector(d, 0, d - 2));
    const Matrix diff = img.topLeftCorner(d - 2, d - 2) - Matrix::Identity(d - 2, d - 2);
    rep.unitality_residual = diff.cwiseAbs().maxCoeff();
  }

  // (b) sandwich inequality p_[n+1,m-1] <= T(p_[n,m]) <= p_[n-1,m+1] as two
  // eigenvalue checks, for interior windows (m <= dim - 3 keeps T(p) exact).
  {
    rep.sandwich_min_eigenvalue = 0.0;
    bool first = true;
    const int m_hi = d - 3;
    const int step = std::max(1, (m_hi + 1) / 6);
    for (int n = 0; n <= m_hi; n += step) {
      for (int m = n; m <= m_hi; m += step) {
        const Matrix tp = channel.apply_heisenberg(projector(d, n, m));
        const Matrix lower = projector(d, n + 1, m - 1);  // empty when m <= n + 1
        const Matrix upper = projector(d, std::max(n - 1, 0), m + 1);
        Eigen::SelfAdjointEigenSolver<Matrix> es1(tp - lower, Eigen::EigenvaluesOnly);
        Eigen::SelfAdjointEigenSolver<Matrix> es2(upper - tp, Eigen::EigenvaluesOnly);
        const double worst = std::min(es1.eigenvalues().minCoeff(), es2.eigenvalues().minCoeff());
        rep.sandwich_min_eigenvalue = first ? worst : std::min(rep.sandwich_min_eigenvalue, worst);
        first = false;
      }
    }
  }

  // (c) sum rule and (d) eta consistency on the interior.
  {
    const TransitionRates r = extract_transition_rates(channel);
    for (int n = 0; n <= r.cutoff - 1; ++n) {
      const auto i = static_cast<std::size_t>(n);
      rep.sum_rule_residual =
          std::max(rep.sum_rule_residual, std::abs(r.sigma[i] + r.lam[i] + r.mu[i] - 1.0));
      const Matrix img = unit_image(n + 1, n + 1);
      rep.eta_consistency_residual =
          std::max(rep.eta_consistency_residual, std::abs(r.eta[i] + img(n, n + 1)));
    }
  }

  // (e) interior Choi block. Capped window: the map is banded, so a CP
  // defect shows up inside any window that exceeds twice the bandwidth.
  {
    const int k_hi = std::min(d - 2, 34);
    const int nb = k_hi + 1;
    Matrix choi = Matrix::Zero(nb * nb, nb * nb);
    for (int k = 0; k < nb; ++k) {
      for (int l = 0; l < nb; ++l) {
        const Matrix img = unit_image(k, l);
        for (int i = 0; i < nb; ++i)
          for (int j = 0; j < nb; ++j) choi(k * nb + i, l * nb + j) = img(i, j);
      }
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(choi, Eigen::EigenvaluesOnly);
    rep.cp_min_eigenvalue = es.eigenvalues().minCoeff();
  }

  return rep;
}

}  // namespace qbdc
