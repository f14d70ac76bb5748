#pragma once

#include <vector>

#include "qbdc/types.hpp"

namespace qbdc {

/// Transition rates of a quantum birth and death chain, read off matrix
/// units: sigma_n (stay), mu_n (death), lam_n (birth) and the complex
/// coherence rate eta_n. All arrays run n = 0..cutoff; mu[0] = 0 since
/// there is no level below 0.
struct TransitionRates {
  std::vector<double> sigma;
  std::vector<double> mu;
  std::vector<double> lam;
  std::vector<Complex> eta;
  int cutoff = 0;

  int size() const { return cutoff + 1; }
};

}  // namespace qbdc
