#include "qbdc/random_tau.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace qbdc {

namespace {

double gaussian_kernel(double tau, double mean, double sd) {
  const double z = (tau - mean) / sd;
  return std::exp(-0.5 * z * z);
}

// Simple composite integral of the bare density, used during construction
// (support cut, normalization, gaussian kernel mass).
double raw_mass(const TauDensity& density, double lo, double hi, int panels = 256) {
  static const auto gl = gauss_legendre(12);
  const double h = (hi - lo) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = lo + p * h;
    for (std::size_t i = 0; i < gl.first.size(); ++i)
      total += 0.5 * h * gl.second[i] * density(a + 0.5 * h * (gl.first[i] + 1.0));
  }
  return total;
}

}  // namespace

double TauDensity::operator()(double tau) const {
  if (tau < 0.0) return 0.0;
  switch (kind) {
    case Kind::Exponential:
      return rate * std::exp(-rate * tau);
    case Kind::Gamma: {
      if (tau == 0.0) return shape == 1.0 ? rate : 0.0;
      return std::exp(shape * std::log(rate) + (shape - 1.0) * std::log(tau) - rate * tau -
                      std::lgamma(shape));
    }
    case Kind::TruncatedGaussian:
      // `rate` caches the normalization constant.
      return gaussian_kernel(tau, mean, sd) / rate;
    case Kind::Tabulated: {
      if (knots.empty() || tau > knots.back().first) return 0.0;
      auto it = std::lower_bound(knots.begin(), knots.end(), tau,
                                 [](const auto& k, double t) { return k.first < t; });
      if (it == knots.begin()) return it->second;
      const auto& [t1, v1] = *(it - 1);
      const auto& [t2, v2] = *it;
      return v1 + (v2 - v1) * (tau - t1) / (t2 - t1);
    }
  }
  return 0.0;
}

TauDensity TauDensity::exponential(double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("exponential density: rate must be positive");
  TauDensity d;
  d.kind = Kind::Exponential;
  d.rate = rate;
  d.d0 = rate;
  d.dprime_l1 = rate;  // monotone decreasing: total variation = D(0)
  d.support_cut = -std::log(1e-13) / rate;
  d.c1_smooth = true;
  return d;
}

TauDensity TauDensity::gamma(double shape, double rate) {
  if (!(rate > 0.0) || !(shape >= 1.0))
    throw std::invalid_argument("gamma density: need rate > 0 and shape >= 1");
  TauDensity d;
  d.kind = Kind::Gamma;
  d.shape = shape;
  d.rate = rate;
  d.d0 = (shape == 1.0) ? rate : 0.0;
  if (shape == 1.0) {
    d.dprime_l1 = rate;
  } else {
    const double mode = (shape - 1.0) / rate;
    TauDensity probe = d;
    probe.support_cut = 0.0;
    d.dprime_l1 = 2.0 * probe(mode);
  }
  // Doubling until the captured mass reaches 1 - 1e-13.
  double cut = (shape + 1.0) / rate;
  while (raw_mass(d, 0.0, cut) < 1.0 - 1e-13 && cut < 1e6) cut *= 2.0;
  d.support_cut = cut;
  d.c1_smooth = shape == 1.0 || shape >= 2.0;
  return d;
}

TauDensity TauDensity::truncated_gaussian(double mean, double sd) {
  if (!(sd > 0.0)) throw std::invalid_argument("gaussian density: sd must be positive");
  TauDensity d;
  d.kind = Kind::TruncatedGaussian;
  d.mean = mean;
  d.sd = sd;
  d.rate = 1.0;  // temporary: operator() divides by it
  d.support_cut = std::max(mean, 0.0) + 9.0 * sd;
  d.rate = raw_mass(d, 0.0, d.support_cut);
  const double peak = d(std::max(mean, 0.0));
  d.d0 = d(0.0);
  d.dprime_l1 = (mean > 0.0) ? 2.0 * peak - d.d0 : d.d0;
  d.c1_smooth = true;
  return d;
}

TauDensity TauDensity::tabulated(std::vector<std::pair<double, double>> knots) {
  if (knots.size() < 2) throw std::invalid_argument("tabulated density: need >= 2 knots");
  TauDensity d;
  d.kind = Kind::Tabulated;
  d.knots = std::move(knots);
  d.support_cut = d.knots.back().first;
  d.d0 = d(0.0);
  double tv = 0.0;
  for (std::size_t i = 0; i + 1 < d.knots.size(); ++i)
    tv += std::abs(d.knots[i + 1].second - d.knots[i].second);
  d.dprime_l1 = tv;
  d.c1_smooth = false;  // piecewise linear: not C1
  return d;
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  std::vector<double> x(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    // Newton iteration from the Chebyshev-angle initial guess.
    double t = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * t * p1 - j * p2) / (j + 1.0);
      }
      const double dp = n * (t * p0 - p1) / (t * t - 1.0);
      const double dt = p0 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) {
        x[static_cast<std::size_t>(i)] = t;
        w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - t * t) * dp * dp);
        break;
      }
    }
  }
  return {x, w};
}

double QuadratureRule::integrate(const TauDensity& density,
                                 const std::vector<double>& f_values) const {
  double total = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    total += weights[i] * density(nodes[i]) * f_values[i];
  return total;
}

namespace {

QuadratureRule assemble_rule(const TauDensity& density, double max_freq, int panels, int q) {
  const auto gl = gauss_legendre(q);
  QuadratureRule rule;
  rule.order = q;
  rule.max_freq = max_freq;
  const double h = density.support_cut / panels;
  rule.nodes.reserve(static_cast<std::size_t>(panels) * q);
  rule.weights.reserve(static_cast<std::size_t>(panels) * q);
  for (int p = 0; p < panels; ++p) {
    const double a = p * h;
    for (int i = 0; i < q; ++i) {
      rule.nodes.push_back(a + 0.5 * h * (gl.first[static_cast<std::size_t>(i)] + 1.0));
      rule.weights.push_back(0.5 * h * gl.second[static_cast<std::size_t>(i)]);
    }
  }
  return rule;
}

double probe_integral(const QuadratureRule& rule, const TauDensity& density, double freq) {
  double total = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    total += rule.weights[i] * density(rule.nodes[i]) * std::sin(freq * rule.nodes[i]);
  return total;
}

}  // namespace

QuadratureRule build_quadrature(const TauDensity& density, double g, int dim,
                                int nodes_per_panel, int panels_override) {
  const double max_freq = 2.0 * g * std::sqrt(static_cast<double>(dim));
  int panels = panels_override;
  if (panels <= 0) {
    panels = static_cast<int>(
                 std::ceil(max_freq * density.support_cut / (2.0 * std::numbers::pi) * 1.25)) +
             4;
  }
  QuadratureRule rule = assemble_rule(density, max_freq, panels, nodes_per_panel);
  const QuadratureRule refined = assemble_rule(density, max_freq, 2 * panels, nodes_per_panel);
  rule.est_error = std::abs(probe_integral(rule, density, max_freq) -
                            probe_integral(refined, density, max_freq));
  return rule;
}

std::pair<std::vector<double>, std::vector<double>> jc_sequences(double g, double tau,
                                                                 int cutoff) {
  if (!(g > 0.0) || !(tau > 0.0))
    throw std::invalid_argument("jc_sequences: g and tau must be positive");
  std::vector<double> alpha(static_cast<std::size_t>(cutoff) + 1);
  std::vector<double> beta(static_cast<std::size_t>(cutoff) + 1);
  alpha[0] = 1.0;
  beta[0] = 0.0;
  for (int n = 1; n <= cutoff; ++n) {
    const double phase = g * tau * std::sqrt(static_cast<double>(n));
    alpha[static_cast<std::size_t>(n)] = std::cos(phase);
    beta[static_cast<std::size_t>(n)] = -std::sin(phase);
  }
  return {alpha, beta};
}

TransitionRates averaged_rates(double g, double lambda, Complex zeta, const TauDensity& density,
                               const QuadratureRule& quad, int cutoff) {
  if (quad.est_error > 1e-8) throw QuadratureBudgetError(quad.est_error);
  const Complex nu = kImag * std::sqrt(lambda * (1.0 - lambda)) * zeta;
  TransitionRates r;
  r.cutoff = cutoff;
  r.sigma.resize(static_cast<std::size_t>(cutoff) + 1);
  r.mu.assign(static_cast<std::size_t>(cutoff) + 1, 0.0);
  r.lam.resize(static_cast<std::size_t>(cutoff) + 1);
  r.eta.resize(static_cast<std::size_t>(cutoff) + 1);
  std::vector<double> f(quad.nodes.size());
  auto fill = [&](auto&& fn) {
    for (std::size_t i = 0; i < quad.nodes.size(); ++i) f[i] = fn(quad.nodes[i]);
    return quad.integrate(density, f);
  };
  for (int n = 0; n <= cutoff; ++n) {
    const double sq_n = std::sqrt(static_cast<double>(n));
    const double sq_n1 = std::sqrt(static_cast<double>(n + 1));
    const double mu_int =
        (n == 0) ? 0.0 : fill([&](double t) { return std::pow(std::sin(g * t * sq_n), 2); });
    const double lam_int = fill([&](double t) { return std::pow(std::sin(g * t * sq_n1), 2); });
    const double eta_int = fill([&](double t) { return std::sin(2.0 * g * t * sq_n1); });
    const auto i = static_cast<std::size_t>(n);
    r.mu[i] = (1.0 - lambda) * mu_int;
    r.lam[i] = lambda * lam_int;
    r.eta[i] = -0.5 * nu * eta_int;
    r.sigma[i] = 1.0 - r.lam[i] - r.mu[i];
  }
  return r;
}

TruncatedChannel build_averaged_channel(double g, double lambda, Complex zeta,
                                        const TauDensity& density, const QuadratureRule& quad,
                                        int dim) {
  if (quad.est_error > 1e-8) throw QuadratureBudgetError(quad.est_error);
  TruncatedChannel out;
  out.dim = dim;
  out.heisenberg = SparseMatrix(dim * dim, dim * dim);
  for (std::size_t i = 0; i < quad.nodes.size(); ++i) {
    const double weight = quad.weights[i] * density(quad.nodes[i]);
    if (weight == 0.0) continue;
    const MaserParams p = MaserParams::jaynes_cummings(lambda, zeta, g, quad.nodes[i]);
    const TruncatedChannel node = build_maser_channel(p, dim);
    out.heisenberg = out.heisenberg + Complex(weight) * node.heisenberg;
  }
  out.predual = SparseMatrix(out.heisenberg.adjoint());
  const Matrix defect =
      Matrix::Identity(dim, dim) - out.apply_heisenberg(Matrix::Identity(dim, dim));
  out.leak_estimate = defect.operatorNorm();
  return out;
}

EtaDecayReport eta_decay_check(double g, const TauDensity& density, const QuadratureRule& quad,
                               int n_lo, int n_hi) {
  EtaDecayReport rep;
  rep.applicable = density.c1_smooth;
  rep.all_pass = true;
  std::vector<double> lnn, lnv;
  std::vector<double> f(quad.nodes.size());
  for (int n = n_lo; n <= n_hi; ++n) {
    const double omega = 2.0 * g * std::sqrt(static_cast<double>(n + 1));
    for (std::size_t i = 0; i < quad.nodes.size(); ++i)
      f[i] = std::sin(omega * quad.nodes[i]);
    const double integral = std::abs(quad.integrate(density, f));
    const double bound = (density.d0 + density.dprime_l1) / omega;
    rep.margins.push_back(bound - integral);
    if (integral > bound + 1e-12) rep.all_pass = false;
    if (integral > 1e-14) {
      lnn.push_back(std::log(static_cast<double>(n + 1)));
      lnv.push_back(std::log(integral));
    }
  }
  if (lnn.size() >= 3) {
    // least-squares slope of ln|integral| vs ln(n+1)
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(lnn.size());
    for (std::size_t i = 0; i < lnn.size(); ++i) {
      sx += lnn[i];
      sy += lnv[i];
      sxx += lnn[i] * lnn[i];
      sxy += lnn[i] * lnv[i];
    }
    rep.empirical_exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  }
  if (!rep.applicable) rep.all_pass = false;
  return rep;
}

bool subharmonic_projection_check(const TruncatedChannel& channel,
                                  const std::vector<int>& indices) {
  Matrix p = Matrix::Zero(channel.dim, channel.dim);
  for (int k : indices) {
    if (k < 0 || k >= channel.dim)
      throw std::invalid_argument("subharmonic check: index out of range");
    p(k, k) = 1.0;
  }
  const Matrix p_perp = Matrix::Identity(channel.dim, channel.dim) - p;
  const Matrix pinched = p * channel.apply_heisenberg(p_perp) * p;
  return pinched.cwiseAbs().maxCoeff() < 1e-12;
}

std::optional<std::pair<int, int>> find_subharmonic_interval(const TruncatedChannel& channel) {
  const int d = channel.dim;
  for (int a = 0; a < d; ++a) {
    for (int b = a; b < d; ++b) {
      if (a == 0 && b == d - 1) continue;  // trivial projection
      std::vector<int> idx;
      for (int k = a; k <= b; ++k) idx.push_back(k);
      if (subharmonic_projection_check(channel, idx)) return std::make_pair(a, b);
    }
  }
  return std::nullopt;
}

std::pair<double, int> beta_near_zero_scan(double g, double tau, int n_max) {
  double best = std::numeric_limits<double>::infinity();
  int arg = 1;
  for (int n = 1; n <= n_max; ++n) {
    const double v = std::abs(std::sin(g * tau * std::sqrt(static_cast<double>(n))));
    if (v < best) {
      best = v;
      arg = n;
    }
  }
  return {best, arg};
}

}  // namespace qbdc
