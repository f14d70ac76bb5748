#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qbdc/certificates.hpp"
#include "qbdc/criteria.hpp"
#include "qbdc/invariant.hpp"
#include "qbdc/random_tau.hpp"

namespace qbdc {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Parsed model specification file. For the fixed-coupling kinds everything
/// lives in `params`; jc_random carries the density and quadrature knobs.
struct ModelConfig {
  bool random_tau = false;
  MaserParams params;
  double g = 1.0;
  TauDensity density;
  int dim = 40;
  int quad_nodes = 16;
  int quad_panels = 0;  // 0 = auto from the oscillation frequency
};

ModelConfig parse_model_config(const nlohmann::json& j);
ModelConfig load_model_config(const std::string& path);

/// Builds the channel described by the config (fixed-tau or averaged).
TruncatedChannel build_channel(const ModelConfig& config);

/// Rates described by the config: closed form for fixed couplings,
/// quadrature-averaged for jc_random.
TransitionRates config_rates(const ModelConfig& config, int cutoff);

/// The quadrature rule a jc_random config resolves to, with panel count
/// tied to the oscillation frequency at `freq_dim`.
QuadratureRule config_quadrature(const ModelConfig& config, int freq_dim);

/// Analytic kappa = ln((1-lambda)/lambda) when defined for the model.
std::optional<double> analytic_kappa(const ModelConfig& config);

/// Unified classification: analytic maser criteria for fixed couplings,
/// rate-based theorem checks for the averaged model.
RegionVerdict classify_model(const ModelConfig& config, double tail_fraction = 0.25);

/// 17 significant digits, round-trip safe.
std::string fmt17(double v);

void write_rates_csv(const TransitionRates& rates, std::ostream& os);
nlohmann::json verdict_json(double lambda, Complex zeta, const std::string& model,
                            const RegionVerdict& verdict);
nlohmann::json state_json(const DensityMatrix& rho);
nlohmann::json certificate_json(const Certificate& cert);
nlohmann::json toy_observable_json(const ToyObservable& obs, double residual, int window_m);
void write_trace_csv(const ConvergenceTrace& trace, std::ostream& os);

struct SweepSpec {
  ModelConfig model;
  std::vector<double> lambdas;
  std::vector<Complex> zetas;
  double tail_fraction = 0.25;
  int threads = 0;  // 0 = hardware concurrency
};

SweepSpec parse_sweep_spec(const nlohmann::json& j);

struct SweepRow {
  double lambda = 0.0;
  Complex zeta{0.0, 0.0};
  RegionVerdict verdict;
};

/// One verdict per grid point; per-point failures are recorded as unknown
/// with a diagnostic and never abort the sweep. Rows are sorted by
/// (lambda, arg zeta, |zeta|) for deterministic output.
std::vector<SweepRow> run_sweep(const SweepSpec& spec);

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& os);

/// Bloch-hemisphere cross-section: each point (lambda, zeta) maps to
/// (2 sqrt(lambda(1-lambda))|zeta|, 2 lambda - 1). Blue = exists,
/// red = not_exists, blank = unknown; hatching marks regions classified by
/// the interior-disc and toy-strip criteria.
void write_sweep_svg(const std::vector<SweepRow>& rows, std::ostream& os);

}  // namespace qbdc
