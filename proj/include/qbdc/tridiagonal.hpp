#pragma once

#include <vector>

#include "qbdc/types.hpp"

namespace qbdc {

enum class TridiagonalTest { Positive, Inconclusive };

/// Sufficient positivity test for a Hermitian tridiagonal matrix with
/// diagonal d and superdiagonal o (one entry shorter): positive when
/// d_n > 0 for all n and d_n d_{n+1} - 4 |o_n|^2 > 0 for all n.
/// Inconclusive does NOT mean not positive semidefinite; [[1,1],[1,1]] is
/// PSD but fails the product condition.
TridiagonalTest tridiagonal_psd_sufficient(const std::vector<double>& diag,
                                           const std::vector<Complex>& offdiag);

/// Smallest slack over both condition families (min over d_n and over
/// d_n d_{n+1} - 4|o_n|^2); the test is Positive iff this is > 0.
double tridiagonal_min_slack(const std::vector<double>& diag,
                             const std::vector<Complex>& offdiag);

}  // namespace qbdc
