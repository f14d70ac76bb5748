#pragma once

#include <complex>
#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace qbdc {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<Complex>;

inline constexpr Complex kImag{0.0, 1.0};

/// Column-stacking vectorization. vec(A X B) = (B^T (x) A) vec(X).
/// This convention is fixed project-wide; the Heisenberg/predual adjoint
/// relation depends on it.
inline Vector vec(const Matrix& x) {
  return Eigen::Map<const Vector>(x.data(), x.size());
}

inline Matrix unvec(const Vector& v, Eigen::Index rows) {
  return Eigen::Map<const Matrix>(v.data(), rows, v.size() / rows);
}

/// Trace norm of a Hermitian matrix (sum of |eigenvalues|).
double trace_norm_hermitian(const Matrix& a);

/// Trace norm via singular values, for general matrices.
double trace_norm(const Matrix& a);

}  // namespace qbdc
