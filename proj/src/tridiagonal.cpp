#include "qbdc/tridiagonal.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace qbdc {

double tridiagonal_min_slack(const std::vector<double>& diag,
                             const std::vector<Complex>& offdiag) {
  if (diag.empty()) throw std::invalid_argument("tridiagonal test: empty diagonal");
  if (offdiag.size() + 1 != diag.size())
    throw std::invalid_argument("tridiagonal test: offdiagonal must be one entry shorter");
  double slack = std::numeric_limits<double>::infinity();
  for (double d : diag) slack = std::min(slack, d);
  for (std::size_t n = 0; n < offdiag.size(); ++n)
    slack = std::min(slack, diag[n] * diag[n + 1] - 4.0 * std::norm(offdiag[n]));
  return slack;
}

TridiagonalTest tridiagonal_psd_sufficient(const std::vector<double>& diag,
                                           const std::vector<Complex>& offdiag) {
  return tridiagonal_min_slack(diag, offdiag) > 0.0 ? TridiagonalTest::Positive
                                                    : TridiagonalTest::Inconclusive;
}

}  // namespace qbdc
