#pragma once

#include <random>

#include "qbdc/channel.hpp"
#include "qbdc/maser_params.hpp"

namespace qbdc::test {

// Dense reference for the maser transition operator: every operator in the
// defining formula is built as an explicit matrix and applied to each matrix
// unit in a brute-force loop. Independent of the band/kron production path.
inline Matrix dense_heisenberg_oracle(const MaserParams& p, int dim) {
  Matrix s = Matrix::Zero(dim, dim);
  for (int n = 0; n + 1 < dim; ++n) s(n + 1, n) = 1.0;
  Matrix a = Matrix::Zero(dim, dim), b = Matrix::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) {
    a(n, n) = p.alpha(n);
    b(n, n) = p.beta(n);
  }
  const Matrix sas = s.adjoint() * a * s;
  const Matrix sb = s.adjoint() * b;
  const Matrix bs = b * s;
  const double lam = p.lambda;
  const Complex nu = p.nu();

  auto apply = [&](const Matrix& x) {
    return (lam * (sas * x * sas + sb * x * bs) + (1.0 - lam) * (bs * x * sb + a * x * a) -
            std::conj(nu) * (a * x * bs - bs * x * sas) + nu * (sas * x * sb - sb * x * a))
        .eval();
  };

  Matrix big = Matrix::Zero(dim * dim, dim * dim);
  for (int k = 0; k < dim; ++k) {
    for (int l = 0; l < dim; ++l) {
      Matrix unit = Matrix::Zero(dim, dim);
      unit(k, l) = 1.0;
      const Matrix img = apply(unit);
      big.col(l * dim + k) = Eigen::Map<const Vector>(img.data(), img.size());
    }
  }
  return big;
}

inline MaserParams random_params(std::mt19937& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * 3.14159265358979323846);
  const double lambda = unit(rng);
  const Complex zeta = std::polar(unit(rng), angle(rng));
  const int kind = static_cast<int>(unit(rng) * 3.0);
  if (kind == 0) {
    const double theta = angle(rng);
    return MaserParams::toy(lambda, zeta, std::cos(theta), std::sin(theta));
  }
  if (kind == 1) {
    return MaserParams::jaynes_cummings(lambda, zeta, 0.5 + 1.5 * unit(rng),
                                        0.5 + 2.5 * unit(rng));
  }
  std::vector<double> alpha, beta;
  for (int n = 0; n < 80; ++n) {
    const double theta = angle(rng);
    alpha.push_back(std::cos(theta));
    beta.push_back(std::sin(theta));
  }
  return MaserParams::explicit_seqs(lambda, zeta, std::move(alpha), std::move(beta));
}

}  // namespace qbdc::test
