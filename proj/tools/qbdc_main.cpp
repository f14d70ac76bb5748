// Command-line front end: model construction, criteria evaluation,
// certificate runs, invariant-state solving, parameter sweeps.
//
// Exit codes: 0 success, 2 config error, 3 numerical-budget error,
// 4 no invariant state, 5 internal inconsistency (conflict flag).

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "qbdc/model_io.hpp"

namespace {

using namespace qbdc;

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: malformed JSON: ") + e.what());
  }
  return j;
}

std::ofstream open_out(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  const auto path = std::filesystem::path(dir) / name;
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open output file " + path.string());
  return os;
}

std::string model_name(const ModelConfig& cfg) {
  if (cfg.random_tau) return "jc_random";
  switch (cfg.params.kind) {
    case CouplingKind::Toy: return "toy";
    case CouplingKind::JaynesCummings: return "jc";
    case CouplingKind::Explicit: return "explicit";
  }
  return "unknown";
}

DensityMatrix solve_with_fallback(const TruncatedChannel& channel) {
  try {
    return solve_invariant_direct(channel);
  } catch (const NoInvariantState&) {
    throw;
  } catch (const std::exception&) {
    DensityMatrix seed;
    seed.entries = Matrix::Zero(channel.dim, channel.dim);
    seed.entries(0, 0) = 1.0;
    return solve_invariant_cesaro(channel, seed, 1 << 20, 1e-10);
  }
}

DensityMatrix parse_theta(const std::string& spec, int dim) {
  DensityMatrix theta;
  theta.entries = Matrix::Zero(dim, dim);
  if (spec == "vacuum") {
    theta.entries(0, 0) = 1.0;
  } else if (spec.rfind("level:", 0) == 0) {
    const int n = std::stoi(spec.substr(6));
    if (n < 0 || n >= dim) throw ConfigError("theta level out of range");
    theta.entries(n, n) = 1.0;
  } else if (spec.rfind("mixed:", 0) == 0) {
    const int m = std::stoi(spec.substr(6));
    if (m < 1 || m > dim) throw ConfigError("theta mixed size out of range");
    for (int n = 0; n < m; ++n) theta.entries(n, n) = 1.0 / m;
  } else {
    throw ConfigError("theta spec must be vacuum, level:N or mixed:M");
  }
  return theta;
}

int run(int argc, char** argv) {
  CLI::App app{"qbdc: quantum birth-and-death chain laboratory"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".", mode = "lyapunov", theta_spec = "vacuum";
  int dim_override = 0, n_max = 1000, threads = 0;
  double tail_fraction = 0.25;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "model/spec JSON path")->required();
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--dim", dim_override, "override truncation dimension");
    cmd->add_option("--tail-fraction", tail_fraction, "tail window fraction");
  };

  CLI::App* cmd_rates = app.add_subcommand("rates", "export transition rates as CSV");
  add_common(cmd_rates);
  CLI::App* cmd_classify = app.add_subcommand("classify", "existence verdict for one point");
  add_common(cmd_classify);
  CLI::App* cmd_sweep = app.add_subcommand("sweep", "verdicts over a parameter grid + SVG");
  add_common(cmd_sweep);
  cmd_sweep->add_option("--threads", threads, "worker threads (env THREADS overrides)");
  CLI::App* cmd_certify = app.add_subcommand("certify", "build and verify a certificate");
  add_common(cmd_certify);
  cmd_certify->add_option("--mode", mode, "lyapunov | drift | toy-observable");
  CLI::App* cmd_solve = app.add_subcommand("solve", "compute the invariant state");
  add_common(cmd_solve);
  CLI::App* cmd_converge = app.add_subcommand("converge", "trace distance to equilibrium");
  add_common(cmd_converge);
  cmd_converge->add_option("--n-max", n_max, "iteration budget");
  cmd_converge->add_option("--theta", theta_spec, "initial state: vacuum | level:N | mixed:M");

  CLI11_PARSE(app, argc, argv);

  auto load_config = [&]() {
    ModelConfig cfg = load_model_config(config_path);
    if (dim_override > 0) cfg.dim = dim_override;
    return cfg;
  };

  if (cmd_rates->parsed()) {
    const ModelConfig cfg = load_config();
    const TransitionRates rates = config_rates(cfg, cfg.dim - 2);
    auto os = open_out(out_dir, "rates.csv");
    write_rates_csv(rates, os);
    if (cfg.random_tau) {
      const QuadratureRule quad = config_quadrature(cfg, cfg.dim);
      os << "# quadrature nodes=" << quad.nodes.size() << " order=" << quad.order
         << " est_error=" << fmt17(quad.est_error) << " max_freq=" << fmt17(quad.max_freq)
         << '\n';
    }
    return 0;
  }

  if (cmd_classify->parsed()) {
    const ModelConfig cfg = load_config();
    const RegionVerdict verdict = classify_model(cfg, tail_fraction);
    const auto j = verdict_json(cfg.params.lambda, cfg.params.zeta, model_name(cfg), verdict);
    auto os = open_out(out_dir, "verdict.json");
    os << j.dump(2) << '\n';
    std::cout << j.dump() << '\n';
    return verdict.conflict ? 5 : 0;
  }

  if (cmd_sweep->parsed()) {
    SweepSpec spec = parse_sweep_spec(load_json(config_path));
    if (dim_override > 0) spec.model.dim = dim_override;
    spec.tail_fraction = tail_fraction;
    if (threads > 0) spec.threads = threads;
    const auto rows = run_sweep(spec);
    {
      auto os = open_out(out_dir, "sweep.csv");
      write_sweep_csv(rows, os);
    }
    {
      auto os = open_out(out_dir, "sweep.svg");
      write_sweep_svg(rows, os);
    }
    return 0;
  }

  if (cmd_certify->parsed()) {
    const ModelConfig cfg = load_config();
    nlohmann::json j;
    if (mode == "lyapunov") {
      const TruncatedChannel channel = build_channel(cfg);
      const TransitionRates rates = config_rates(cfg, cfg.dim - 2);
      const KappaEstimate kappa = estimate_kappa(rates, tail_fraction, analytic_kappa(cfg));
      const auto cert = find_lyapunov_certificate(channel, rates, kappa, tail_fraction);
      if (!cert) {
        std::cerr << "no (t, r) grid point produced a verified certificate\n";
        return 5;
      }
      j = certificate_json(*cert);
    } else if (mode == "drift") {
      const TruncatedChannel channel = build_channel(cfg);
      const TransitionRates rates = config_rates(cfg, cfg.dim - 2);
      const Certificate cert = verify_drift(channel, build_drift_certificate(rates));
      j = certificate_json(cert);
    } else if (mode == "toy-observable") {
      const int k_max = 2 * cfg.dim;
      const ToyObservable obs = build_toy_observable(cfg.params, 1.0, k_max);
      const int m = k_max / 2;
      const double residual = toy_observable_residual(obs, cfg.params, m);
      j = toy_observable_json(obs, residual, m);
    } else {
      throw ConfigError("certify: unknown mode '" + mode + "'");
    }
    auto os = open_out(out_dir, "certificate.json");
    os << j.dump(2) << '\n';
    std::cout << j.dump() << '\n';
    return 0;
  }

  if (cmd_solve->parsed()) {
    const ModelConfig cfg = load_config();
    const TruncatedChannel channel = build_channel(cfg);
    const DensityMatrix rho = solve_with_fallback(channel);
    nlohmann::json j = state_json(rho);
    const FalloffFit fit = falloff_fit(rho);
    j["falloff"] = {{"c", fit.c},
                    {"gamma", fit.gamma},
                    {"window", {fit.window_lo, fit.window_hi}},
                    {"max_violation", fit.max_violation},
                    {"degenerate", fit.degenerate}};
    auto os = open_out(out_dir, "state.json");
    os << j.dump(2) << '\n';
    return 0;
  }

  if (cmd_converge->parsed()) {
    const ModelConfig cfg = load_config();
    const TruncatedChannel channel = build_channel(cfg);
    const DensityMatrix phi = solve_with_fallback(channel);
    const DensityMatrix theta = parse_theta(theta_spec, cfg.dim);
    const ConvergenceTrace trace = convergence_trace(channel, theta, phi, n_max);
    auto os = open_out(out_dir, "trace.csv");
    write_trace_csv(trace, os);
    nlohmann::json j;
    j["fit"] = trace.fitted_kind == FitKind::None
                   ? "none"
                   : (trace.fitted_kind == FitKind::Geometric ? "geometric" : "power");
    j["rate"] = trace.fitted_rate;
    j["residual"] = trace.fitted_residual;
    std::cout << j.dump() << '\n';
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const qbdc::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    // module precondition rejections: a usage problem, not an internal one
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const qbdc::QuadratureBudgetError& e) {
    std::cerr << e.what() << '\n';
    return 3;
  } catch (const qbdc::NoInvariantState& e) {
    std::cerr << e.what() << '\n';
    return 4;
  } catch (const qbdc::NonConvergence& e) {
    std::cerr << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 5;
  }
}
