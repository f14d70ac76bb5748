#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qbdc/types.hpp"

namespace qbdc {

/// How the coupling sequences alpha_n, beta_n are generated.
enum class CouplingKind { Explicit, Toy, JaynesCummings };

/// Full specification of a generalised one-atom maser model: the atomic
/// state (lambda, zeta) together with the coupling sequences.
///
/// Conventions: alpha_0 = 1, beta_0 = 0 always, and alpha_n^2 + beta_n^2 = 1
/// for every n. nu = i sqrt(lambda (1 - lambda)) zeta is derived.
struct MaserParams {
  double lambda = 0.0;   // excitation weight of the atomic state, in [0,1]
  Complex zeta{0.0, 0.0};  // coherence parameter, |zeta| <= 1

  CouplingKind kind = CouplingKind::Toy;
  // Toy: constant alpha, beta for n >= 1.
  double toy_alpha = 0.0;
  double toy_beta = 1.0;
  // Jaynes-Cummings: alpha_n = cos(g tau sqrt(n)), beta_n = -sin(g tau sqrt(n)).
  double jc_g = 1.0;
  double jc_tau = 1.0;
  // Explicit: listed values for n >= 1 (index 0 of the vectors is n = 1).
  std::vector<double> explicit_alpha;
  std::vector<double> explicit_beta;

  Complex nu() const {
    return kImag * std::sqrt(lambda * (1.0 - lambda)) * zeta;
  }

  double alpha(int n) const;
  double beta(int n) const;

  /// Throws std::invalid_argument naming the first offending index if the
  /// normalisation alpha_n^2 + beta_n^2 = 1 fails (tolerance 1e-12), or if
  /// lambda or zeta are out of range. `check_up_to` bounds the explicit scan.
  void validate(int check_up_to = 256) const;

  static MaserParams toy(double lambda, Complex zeta, double alpha, double beta);
  static MaserParams jaynes_cummings(double lambda, Complex zeta, double g, double tau);
  static MaserParams explicit_seqs(double lambda, Complex zeta,
                                   std::vector<double> alpha,
                                   std::vector<double> beta);
};

}  // namespace qbdc
