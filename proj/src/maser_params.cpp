#include "qbdc/maser_params.hpp"

#include <cmath>

namespace qbdc {

double MaserParams::alpha(int n) const {
  if (n <= 0) return 1.0;
  switch (kind) {
    case CouplingKind::Toy:
      return toy_alpha;
    case CouplingKind::JaynesCummings:
      return std::cos(jc_g * jc_tau * std::sqrt(static_cast<double>(n)));
    case CouplingKind::Explicit:
      if (n - 1 >= static_cast<int>(explicit_alpha.size()))
        throw std::out_of_range("explicit alpha sequence too short for n=" + std::to_string(n));
      return explicit_alpha[static_cast<std::size_t>(n - 1)];
  }
  return 1.0;
}

double MaserParams::beta(int n) const {
  if (n <= 0) return 0.0;
  switch (kind) {
    case CouplingKind::Toy:
      return toy_beta;
    case CouplingKind::JaynesCummings:
      return -std::sin(jc_g * jc_tau * std::sqrt(static_cast<double>(n)));
    case CouplingKind::Explicit:
      if (n - 1 >= static_cast<int>(explicit_beta.size()))
        throw std::out_of_range("explicit beta sequence too short for n=" + std::to_string(n));
      return explicit_beta[static_cast<std::size_t>(n - 1)];
  }
  return 0.0;
}

void MaserParams::validate(int check_up_to) const {
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw std::invalid_argument("lambda must lie in [0,1], got " + std::to_string(lambda));
  if (std::abs(zeta) > 1.0 + 1e-12)
    throw std::invalid_argument("|zeta| must be <= 1, got " + std::to_string(std::abs(zeta)));
  int n_max = check_up_to;
  if (kind == CouplingKind::Toy) n_max = 1;
  if (kind == CouplingKind::Explicit) {
    if (explicit_alpha.size() != explicit_beta.size())
      throw std::invalid_argument("explicit alpha/beta sequences differ in length");
    n_max = static_cast<int>(explicit_alpha.size());
  }
  for (int n = 1; n <= n_max; ++n) {
    const double a = alpha(n), b = beta(n);
    if (a < -1.0 - 1e-12 || a > 1.0 + 1e-12 || b < -1.0 - 1e-12 || b > 1.0 + 1e-12 ||
        std::abs(a * a + b * b - 1.0) > 1e-12)
      throw std::invalid_argument("coupling pair not normalised at n=" + std::to_string(n) +
                                  ": alpha^2+beta^2=" + std::to_string(a * a + b * b));
  }
}

MaserParams MaserParams::toy(double lambda, Complex zeta, double alpha, double beta) {
  MaserParams p;
  p.lambda = lambda;
  p.zeta = zeta;
  p.kind = CouplingKind::Toy;
  p.toy_alpha = alpha;
  p.toy_beta = beta;
  return p;
}

MaserParams MaserParams::jaynes_cummings(double lambda, Complex zeta, double g, double tau) {
  MaserParams p;
  p.lambda = lambda;
  p.zeta = zeta;
  p.kind = CouplingKind::JaynesCummings;
  p.jc_g = g;
  p.jc_tau = tau;
  return p;
}

MaserParams MaserParams::explicit_seqs(double lambda, Complex zeta,
                                       std::vector<double> alpha,
                                       std::vector<double> beta) {
  MaserParams p;
  p.lambda = lambda;
  p.zeta = zeta;
  p.kind = CouplingKind::Explicit;
  p.explicit_alpha = std::move(alpha);
  p.explicit_beta = std::move(beta);
  return p;
}

}  // namespace qbdc
