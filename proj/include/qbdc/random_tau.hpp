#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "qbdc/channel.hpp"
#include "qbdc/rates.hpp"
#include "qbdc/types.hpp"

namespace qbdc {

/// Interaction-time distribution rho(tau) d tau on [0, infinity), truncated
/// at support_cut with tail mass < 1e-12.
struct TauDensity {
  enum class Kind { Exponential, Gamma, TruncatedGaussian, Tabulated };
  Kind kind = Kind::Exponential;
  double rate = 1.0;        // exponential / gamma
  double shape = 1.0;       // gamma
  double mean = 1.0, sd = 1.0;  // truncated gaussian
  std::vector<std::pair<double, double>> knots;  // tabulated (tau, value)

  double d0 = 0.0;          // density value at 0
  double dprime_l1 = 0.0;   // total variation of the density
  double support_cut = 0.0;
  bool c1_smooth = false;   // density in C1([0,inf)) with integrable derivative

  double operator()(double tau) const;

  static TauDensity exponential(double rate);
  static TauDensity gamma(double shape, double rate);
  static TauDensity truncated_gaussian(double mean, double sd);
  static TauDensity tabulated(std::vector<std::pair<double, double>> knots);
};

/// Composite Gauss-Legendre rule on [0, support_cut]. est_error is a
/// refinement (panel-doubling) estimate for the most oscillatory integrand
/// sin(max_freq * tau) D(tau), computed at construction before the rule is
/// used on the actual rate integrals.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;  // plain GL weights; integrals use w * D(node) * f(node)
  int order = 0;                // nodes per panel
  double est_error = 0.0;
  double max_freq = 0.0;

  double integrate(const TauDensity& density, const std::vector<double>& f_values) const;
};

struct QuadratureBudgetError : std::runtime_error {
  explicit QuadratureBudgetError(double err)
      : std::runtime_error("quadrature error estimate " + std::to_string(err) +
                           " exceeds budget; refine quadrature"),
        est_error(err) {}
  double est_error;
};

/// Panel count tied to the highest oscillation frequency 2 g sqrt(dim).
QuadratureRule build_quadrature(const TauDensity& density, double g, int dim,
                                int nodes_per_panel = 16, int panels_override = 0);

/// Plain Gauss-Legendre nodes/weights on [-1, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n);

/// Jaynes-Cummings coupling sequences alpha_n(tau) = cos(g tau sqrt(n)),
/// beta_n(tau) = -sin(g tau sqrt(n)); index 0 holds alpha_0 = 1, beta_0 = 0.
std::pair<std::vector<double>, std::vector<double>> jc_sequences(double g, double tau, int cutoff);

/// Quadrature-averaged rates of the random-interaction-time maser:
///   mu_n = (1-lambda) Int sin^2(g tau sqrt(n)) d rho,
///   lam_n = lambda Int sin^2(g tau sqrt(n+1)) d rho,
///   eta_n = -(nu/2) Int sin(2 g tau sqrt(n+1)) d rho,
/// sigma_n by the sum rule. Throws QuadratureBudgetError when
/// quad.est_error > 1e-8.
TransitionRates averaged_rates(double g, double lambda, Complex zeta, const TauDensity& density,
                               const QuadratureRule& quad, int cutoff);

/// Weighted sum over quadrature nodes of fixed-tau maser channels
/// (deterministic node-order reduction).
TruncatedChannel build_averaged_channel(double g, double lambda, Complex zeta,
                                        const TauDensity& density, const QuadratureRule& quad,
                                        int dim);

struct EtaDecayReport {
  bool applicable = false;  // density hypothesis D in C1, D' integrable
  bool all_pass = false;
  std::vector<double> margins;  // bound - |integral|, per n
  double empirical_exponent = 0.0;  // slope of ln |integral| vs ln (n+1)
};

/// Checks |Int sin(2 g tau sqrt(n+1)) d rho| <= (D0 + ||D'||_1)/(2 g sqrt(n+1))
/// for n in [n_lo, n_hi].
EtaDecayReport eta_decay_check(double g, const TauDensity& density, const QuadratureRule& quad,
                               int n_lo, int n_hi);

/// True iff the coordinate projection onto `indices` satisfies
/// ||p T(p_perp) p|| < 1e-12 (p subharmonic for the channel).
bool subharmonic_projection_check(const TruncatedChannel& channel, const std::vector<int>& indices);

/// Scans all nontrivial coordinate intervals [a, b]; returns the first
/// subharmonic one or nullopt (channel irreducible over intervals).
std::optional<std::pair<int, int>> find_subharmonic_interval(const TruncatedChannel& channel);

/// Diagnostic for pathological fixed-tau models: min over 1 <= n <= n_max
/// of |sin(g tau sqrt(n))| and its argmin.
std::pair<double, int> beta_near_zero_scan(double g, double tau, int n_max);

}  // namespace qbdc
