#include "qbdc/model_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <ostream>
#include <thread>

namespace qbdc {

namespace {

using nlohmann::json;

double require_number(const json& j, const char* field) {
  if (!j.contains(field) || !j[field].is_number())
    throw ConfigError(std::string("config: missing or non-numeric field '") + field + "'");
  return j[field].get<double>();
}

Complex parse_zeta(const json& j) {
  if (!j.contains("zeta")) throw ConfigError("config: missing field 'zeta'");
  const json& z = j["zeta"];
  if (z.is_number()) return Complex(z.get<double>(), 0.0);
  if (z.is_array() && z.size() == 2 && z[0].is_number() && z[1].is_number())
    return Complex(z[0].get<double>(), z[1].get<double>());
  throw ConfigError("config: field 'zeta' must be a number or [re, im]");
}

TauDensity parse_density(const json& j) {
  if (!j.contains("kind") || !j["kind"].is_string())
    throw ConfigError("config: density needs a string field 'kind'");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "exponential") return TauDensity::exponential(require_number(j, "rate"));
  if (kind == "gamma")
    return TauDensity::gamma(require_number(j, "shape"), require_number(j, "rate"));
  if (kind == "truncated_gaussian")
    return TauDensity::truncated_gaussian(require_number(j, "mean"), require_number(j, "sd"));
  if (kind == "tabulated") {
    if (!j.contains("knots") || !j["knots"].is_array())
      throw ConfigError("config: tabulated density needs array field 'knots'");
    std::vector<std::pair<double, double>> knots;
    for (const auto& k : j["knots"]) {
      if (!k.is_array() || k.size() != 2)
        throw ConfigError("config: density knots must be [tau, value] pairs");
      knots.emplace_back(k[0].get<double>(), k[1].get<double>());
    }
    return TauDensity::tabulated(std::move(knots));
  }
  throw ConfigError("config: unknown density kind '" + kind + "'");
}

}  // namespace

ModelConfig parse_model_config(const json& j) {
  ModelConfig cfg;
  const double lambda = require_number(j, "lambda");
  const Complex zeta = parse_zeta(j);
  if (j.contains("dim")) cfg.dim = static_cast<int>(require_number(j, "dim"));
  if (!j.contains("coupling") || !j["coupling"].is_object())
    throw ConfigError("config: missing object field 'coupling'");
  const json& c = j["coupling"];
  if (!c.contains("kind") || !c["kind"].is_string())
    throw ConfigError("config: coupling needs a string field 'kind'");
  const std::string kind = c["kind"].get<std::string>();
  if (kind == "toy") {
    cfg.params = MaserParams::toy(lambda, zeta, require_number(c, "alpha"),
                                  require_number(c, "beta"));
  } else if (kind == "jc") {
    cfg.params = MaserParams::jaynes_cummings(lambda, zeta, require_number(c, "g"),
                                              require_number(c, "tau"));
  } else if (kind == "explicit") {
    if (!c.contains("alpha") || !c["alpha"].is_array() || !c.contains("beta") ||
        !c["beta"].is_array())
      throw ConfigError("config: explicit coupling needs array fields 'alpha' and 'beta'");
    cfg.params = MaserParams::explicit_seqs(lambda, zeta, c["alpha"].get<std::vector<double>>(),
                                            c["beta"].get<std::vector<double>>());
  } else if (kind == "jc_random") {
    cfg.random_tau = true;
    cfg.g = require_number(c, "g");
    cfg.params = MaserParams::jaynes_cummings(lambda, zeta, cfg.g, 1.0);
    if (!c.contains("density")) throw ConfigError("config: jc_random coupling needs 'density'");
    cfg.density = parse_density(c["density"]);
    if (c.contains("quadrature")) {
      const json& q = c["quadrature"];
      if (q.contains("panels")) cfg.quad_panels = static_cast<int>(require_number(q, "panels"));
      if (q.contains("nodes")) cfg.quad_nodes = static_cast<int>(require_number(q, "nodes"));
    }
  } else {
    throw ConfigError("config: unknown coupling kind '" + kind + "'");
  }
  try {
    cfg.params.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

ModelConfig load_model_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: malformed JSON: ") + e.what());
  }
  return parse_model_config(j);
}

QuadratureRule config_quadrature(const ModelConfig& config, int freq_dim) {
  return build_quadrature(config.density, config.g, freq_dim, config.quad_nodes,
                          config.quad_panels);
}

TruncatedChannel build_channel(const ModelConfig& config) {
  if (!config.random_tau) return build_maser_channel(config.params, config.dim);
  const QuadratureRule quad = config_quadrature(config, config.dim);
  return build_averaged_channel(config.g, config.params.lambda, config.params.zeta,
                                config.density, quad, config.dim);
}

TransitionRates config_rates(const ModelConfig& config, int cutoff) {
  if (!config.random_tau) return closed_form_rates(config.params, cutoff);
  const QuadratureRule quad = config_quadrature(config, cutoff + 2);
  return averaged_rates(config.g, config.params.lambda, config.params.zeta, config.density, quad,
                        cutoff);
}

std::optional<double> analytic_kappa(const ModelConfig& config) {
  const double l = config.params.lambda;
  if (l <= 0.0 || l >= 1.0) return std::nullopt;
  return std::log((1.0 - l) / l);
}

RegionVerdict classify_model(const ModelConfig& config, double tail_fraction) {
  if (!config.random_tau) return classify_maser_point(config.params);
  const int cutoff = 400;
  const TransitionRates rates = config_rates(config, cutoff);
  const KappaEstimate kappa = estimate_kappa(rates, tail_fraction, analytic_kappa(config));
  const RegionVerdict ex = check_existence(rates, kappa, tail_fraction);
  const RegionVerdict ne = check_nonexistence(rates, tail_fraction);
  if (ex.verdict == Verdict::Exists && ne.verdict == Verdict::NotExists) {
    RegionVerdict out;
    out.conflict = true;
    out.diagnostic = "existence and non-existence criteria both fired";
    return out;
  }
  if (ex.verdict == Verdict::Exists) return ex;
  if (ne.verdict == Verdict::NotExists) return ne;
  RegionVerdict out;
  out.diagnostic = ex.diagnostic.empty() ? ne.diagnostic : ex.diagnostic;
  return out;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_rates_csv(const TransitionRates& rates, std::ostream& os) {
  os << "n,sigma,mu,lambda,eta_re,eta_im\n";
  for (int n = 0; n <= rates.cutoff; ++n) {
    const auto i = static_cast<std::size_t>(n);
    os << n << ',' << fmt17(rates.sigma[i]) << ',' << fmt17(rates.mu[i]) << ','
       << fmt17(rates.lam[i]) << ',' << fmt17(rates.eta[i].real()) << ','
       << fmt17(rates.eta[i].imag()) << '\n';
  }
}

json verdict_json(double lambda, Complex zeta, const std::string& model,
                  const RegionVerdict& verdict) {
  json j;
  j["lambda"] = lambda;
  j["zeta_re"] = zeta.real();
  j["zeta_im"] = zeta.imag();
  j["model"] = model;
  j["verdict"] = to_string(verdict.verdict);
  j["criterion"] = verdict.criterion;
  j["margin"] = verdict.margin;
  if (verdict.conflict) j["conflict"] = true;
  if (!verdict.diagnostic.empty()) j["diagnostic"] = verdict.diagnostic;
  return j;
}

json state_json(const DensityMatrix& rho) {
  json j;
  j["dim"] = rho.dim();
  j["trace_deficit"] = rho.trace_deficit;
  json rows = json::array();
  for (int r = 0; r < rho.dim(); ++r)
    for (int c = 0; c < rho.dim(); ++c)
      rows.push_back({rho.entries(r, c).real(), rho.entries(r, c).imag()});
  j["entries"] = std::move(rows);
  return j;
}

json certificate_json(const Certificate& cert) {
  json j;
  j["kind"] = cert.kind == CertificateKind::Lyapunov ? "lyapunov" : "drift";
  j["verified"] = cert.verified;
  j["min_slack"] = cert.min_slack;
  j["window"] = {cert.window_lo, cert.window_hi};
  if (cert.kind == CertificateKind::Lyapunov) {
    j["t"] = cert.t;
    j["r"] = cert.r;
    j["n_head"] = cert.n_head;
    j["x_diag"] = cert.x_diag;
    j["y_diag"] = cert.y_diag;
  } else {
    j["n_drift"] = cert.n_drift;
    j["z_diag"] = cert.z_diag;
    j["eps_diag"] = cert.eps_diag;
  }
  return j;
}

json toy_observable_json(const ToyObservable& obs, double residual, int window_m) {
  json j;
  j["kind"] = "toy-observable";
  j["c"] = obs.c_value;
  j["residual"] = residual;
  j["window_m"] = window_m;
  j["root_moduli"] = {obs.root_modulus_1, obs.root_modulus_2};
  j["y_bound"] = obs.y_bound;
  j["max_abs_x"] = obs.max_abs_x;
  j["max_abs_y"] = obs.max_abs_y;
  j["x_bounded_regime"] = obs.x_bounded_regime;
  json xs = json::array(), ys = json::array();
  for (const auto& v : obs.x) xs.push_back({v.real(), v.imag()});
  for (const auto& v : obs.y) ys.push_back({v.real(), v.imag()});
  j["x_seq"] = std::move(xs);
  j["y_seq"] = std::move(ys);
  return j;
}

void write_trace_csv(const ConvergenceTrace& trace, std::ostream& os) {
  os << "n,distance\n";
  for (std::size_t n = 0; n < trace.distances.size(); ++n)
    os << n << ',' << fmt17(trace.distances[n]) << '\n';
}

SweepSpec parse_sweep_spec(const json& j) {
  SweepSpec spec;
  if (!j.contains("model") || !j["model"].is_object())
    throw ConfigError("sweep: missing object field 'model'");
  json model = j["model"];
  if (!model.contains("lambda")) model["lambda"] = 0.0;
  if (!model.contains("zeta")) model["zeta"] = {0.0, 0.0};
  spec.model = parse_model_config(model);

  if (!j.contains("lambda_grid")) throw ConfigError("sweep: missing field 'lambda_grid'");
  const json& lg = j["lambda_grid"];
  if (lg.contains("values")) {
    spec.lambdas = lg["values"].get<std::vector<double>>();
  } else {
    const double lo = require_number(lg, "min"), hi = require_number(lg, "max");
    const int count = static_cast<int>(require_number(lg, "count"));
    if (count < 1) throw ConfigError("sweep: lambda_grid count must be >= 1");
    for (int i = 0; i < count; ++i)
      spec.lambdas.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
  }

  if (!j.contains("zeta_grid")) throw ConfigError("sweep: missing field 'zeta_grid'");
  const json& zg = j["zeta_grid"];
  if (zg.contains("values")) {
    for (const auto& z : zg["values"]) {
      if (!z.is_array() || z.size() != 2)
        throw ConfigError("sweep: zeta_grid values must be [re, im] pairs");
      spec.zetas.emplace_back(z[0].get<double>(), z[1].get<double>());
    }
  } else {
    std::vector<double> abs_vals, arg_vals;
    auto fill_axis = [](const json& axis, std::vector<double>& out, const char* name) {
      if (axis.contains("values")) {
        out = axis["values"].get<std::vector<double>>();
      } else {
        const double lo = require_number(axis, "min"), hi = require_number(axis, "max");
        const int count = static_cast<int>(require_number(axis, "count"));
        if (count < 1) throw ConfigError(std::string("sweep: bad count for ") + name);
        for (int i = 0; i < count; ++i)
          out.push_back(count == 1 ? lo : lo + (hi - lo) * i / (count - 1));
      }
    };
    if (!zg.contains("abs") || !zg.contains("arg"))
      throw ConfigError("sweep: zeta_grid needs 'abs' and 'arg' (or 'values')");
    fill_axis(zg["abs"], abs_vals, "zeta abs");
    fill_axis(zg["arg"], arg_vals, "zeta arg");
    for (double a : abs_vals)
      for (double t : arg_vals) spec.zetas.push_back(std::polar(a, t));
  }

  if (j.contains("tail_fraction")) spec.tail_fraction = require_number(j, "tail_fraction");
  if (j.contains("threads")) spec.threads = static_cast<int>(require_number(j, "threads"));
  if (spec.lambdas.empty() || spec.zetas.empty()) throw ConfigError("sweep: empty grid");
  for (double l : spec.lambdas)
    if (l < 0.0 || l > 1.0) throw ConfigError("sweep: lambda grid value out of [0,1]");
  for (Complex z : spec.zetas)
    if (std::abs(z) > 1.0 + 1e-12) throw ConfigError("sweep: |zeta| grid value above 1");
  return spec;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  struct Point {
    double lambda;
    Complex zeta;
  };
  std::vector<Point> points;
  for (double l : spec.lambdas)
    for (Complex z : spec.zetas) points.push_back({l, z});

  // The THREADS environment variable overrides the configured value.
  int threads = 0;
  if (const char* env = std::getenv("THREADS")) threads = std::atoi(env);
  if (threads <= 0) threads = spec.threads;
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, 64);

  std::vector<SweepRow> rows(points.size());
  auto worker = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      ModelConfig cfg = spec.model;
      cfg.params.lambda = points[i].lambda;
      cfg.params.zeta = points[i].zeta;
      SweepRow row;
      row.lambda = points[i].lambda;
      row.zeta = points[i].zeta;
      try {
        row.verdict = classify_model(cfg, spec.tail_fraction);
      } catch (const std::exception& e) {
        row.verdict = RegionVerdict{};
        row.verdict.diagnostic = e.what();
      }
      rows[i] = row;
    }
  };
  if (threads == 1) {
    worker(0, points.size());
  } else {
    std::vector<std::future<void>> futs;
    const std::size_t chunk = (points.size() + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const std::size_t b = std::min(points.size(), static_cast<std::size_t>(t) * chunk);
      const std::size_t e = std::min(points.size(), b + chunk);
      if (b < e) futs.push_back(std::async(std::launch::async, worker, b, e));
    }
    for (auto& f : futs) f.get();
  }

  std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    if (a.lambda != b.lambda) return a.lambda < b.lambda;
    const double aa = std::arg(a.zeta), ba = std::arg(b.zeta);
    if (aa != ba) return aa < ba;
    return std::abs(a.zeta) < std::abs(b.zeta);
  });
  return rows;
}

void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& os) {
  os << "lambda,zeta_re,zeta_im,verdict,criterion,margin\n";
  for (const auto& r : rows) {
    os << fmt17(r.lambda) << ',' << fmt17(r.zeta.real()) << ',' << fmt17(r.zeta.imag()) << ','
       << to_string(r.verdict.verdict) << ',' << r.verdict.criterion << ','
       << fmt17(r.verdict.margin) << '\n';
  }
}

void write_sweep_svg(const std::vector<SweepRow>& rows, std::ostream& os) {
  const double scale = 360.0;
  const double cx = 140.0, cy = 420.0;  // origin of the hemisphere cross-section
  auto px = [&](double x) { return cx + scale * x; };
  auto py = [&](double y) { return cy - scale * y; };
  const double strip_x = -0.14;  // thermal (zeta = 0) column drawn as its own strip

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"560\" height=\"840\" "
        "viewBox=\"0 0 560 840\">\n";
  os << "<rect width=\"560\" height=\"840\" fill=\"white\"/>\n";

  // Thermal strip, hemisphere axis and pure-state arc.
  os << "<rect x=\"" << px(strip_x) - 6 << "\" y=\"" << py(1) << "\" width=\"12\" height=\""
     << 2.0 * scale << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
  os << "<line x1=\"" << px(0) << "\" y1=\"" << py(-1.02) << "\" x2=\"" << px(0) << "\" y2=\""
     << py(1.02) << "\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
  os << "<path d=\"M " << px(0) << ' ' << py(1) << " A " << scale << ' ' << scale
     << " 0 0 1 " << px(0) << ' ' << py(-1) << "\" fill=\"none\" stroke=\"black\" "
        "stroke-width=\"1.5\"/>\n";
  os << "<text x=\"" << px(0) - 118 << "\" y=\"" << py(1) << "\" font-size=\"14\">lambda=1</text>\n";
  os << "<text x=\"" << px(0) - 118 << "\" y=\"" << py(-1) << "\" font-size=\"14\">lambda=0</text>\n";
  os << "<text x=\"" << px(0) - 122 << "\" y=\"" << py(0) << "\" font-size=\"14\">lambda=1/2</text>\n";
  os << "<text x=\"" << px(0.55) << "\" y=\"" << py(0.9) << "\" font-size=\"13\" fill=\"#3b6fd4\">"
        "exists</text>\n";
  os << "<text x=\"" << px(0.55) << "\" y=\"" << py(0.9) + 18 << "\" font-size=\"13\" "
        "fill=\"#d43b3b\">no invariant state</text>\n";
  os << "<text x=\"" << px(0.55) << "\" y=\"" << py(0.9) + 36 << "\" font-size=\"13\" "
        "fill=\"#888888\">blank: unknown</text>\n";

  for (const auto& r : rows) {
    const bool thermal = std::abs(r.zeta) < 1e-12;
    const double bx = thermal ? strip_x
                              : 2.0 * std::sqrt(std::max(0.0, r.lambda * (1.0 - r.lambda))) *
                                    std::abs(r.zeta);
    const double by = 2.0 * r.lambda - 1.0;
    std::string fill = "none";
    if (r.verdict.verdict == Verdict::Exists) fill = "#3b6fd4";
    if (r.verdict.verdict == Verdict::NotExists) fill = "#d43b3b";
    const bool hatched = r.verdict.criterion == "toy-nonexistence" ||
                         ((r.verdict.criterion == "maser-prop-1" ||
                           r.verdict.criterion == "maser-prop-2") &&
                          !thermal && std::abs(r.zeta) < 1.0 - 1e-9);
    os << "<circle cx=\"" << fmt17(px(bx)) << "\" cy=\"" << fmt17(py(by)) << "\" r=\"3\" fill=\""
       << fill << "\"";
    if (fill == "none") os << " stroke=\"#bbbbbb\" stroke-width=\"0.4\"";
    if (hatched) os << " stroke=\"black\" stroke-width=\"0.8\" stroke-dasharray=\"1.5,1\"";
    os << "/>\n";
  }
  os << "</svg>\n";
}

}  // namespace qbdc
