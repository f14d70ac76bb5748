#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

namespace {

namespace fs = std::filesystem;

struct CliResult {
  int exit_code = -1;
  std::string output;
};

CliResult run_cli(const std::string& args) {
  const std::string cmd = std::string(QBDC_CLI_PATH) + " " + args + " 2>&1";
  std::array<char, 4096> buf{};
  CliResult res;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  while (fgets(buf.data(), buf.size(), pipe)) res.output += buf.data();
  const int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

fs::path sandbox() {
  const fs::path dir = fs::temp_directory_path() / "qbdc_cli_test";
  fs::create_directories(dir);
  return dir;
}

fs::path write_file(const std::string& name, const std::string& content) {
  const fs::path p = sandbox() / name;
  std::ofstream os(p);
  os << content;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

const char* kBabyMaser = R"({
  "lambda": 0.3, "zeta": [0.0, 0.0], "dim": 20,
  "coupling": {"kind": "toy", "alpha": 0.0, "beta": 1.0}
})";

}  // namespace

TEST_CASE("rates subcommand writes the expected CSV") {
  const auto cfg = write_file("baby.json", kBabyMaser);
  const auto out = sandbox() / "rates_out";
  const CliResult res = run_cli("rates --config " + cfg.string() + " --out " + out.string());
  CHECK(res.exit_code == 0);
  const std::string csv = slurp(out / "rates.csv");
  CHECK(csv.rfind("n,sigma,mu,lambda,eta_re,eta_im\n", 0) == 0);
  // interior rows carry the flat 0.3 / 0.7 / 0 columns
  CHECK(csv.find("5,0,0.69999999999999996,0.29999999999999999,0,0") != std::string::npos);
}

TEST_CASE("malformed config exits with code 2") {
  const auto cfg = write_file("broken.json", "{\"lambda\": 0.3, ");
  const CliResult res = run_cli("rates --config " + cfg.string());
  CHECK(res.exit_code == 2);
  const auto cfg2 = write_file("missing.json", R"({"lambda": 0.3, "zeta": 0.0})");
  const CliResult res2 = run_cli("rates --config " + cfg2.string());
  CHECK(res2.exit_code == 2);
  CHECK(res2.output.find("coupling") != std::string::npos);
}

TEST_CASE("too-coarse quadrature exits with code 3") {
  const auto cfg = write_file("coarse.json", R"({
    "lambda": 0.3, "zeta": [1.0, 0.0], "dim": 30,
    "coupling": {"kind": "jc_random", "g": 1.0,
                 "density": {"kind": "exponential", "rate": 1.0},
                 "quadrature": {"panels": 2, "nodes": 2}}
  })");
  const CliResult res = run_cli("rates --config " + cfg.string() + " --out " +
                                (sandbox() / "q").string());
  CHECK(res.exit_code == 3);
  CHECK(res.output.find("refine quadrature") != std::string::npos);
}

TEST_CASE("solve in the non-existence region exits with code 4") {
  const auto cfg = write_file("up.json", R"({
    "lambda": 0.85, "zeta": [1.0, 0.0], "dim": 24,
    "coupling": {"kind": "toy", "alpha": 0.6, "beta": 0.8}
  })");
  const CliResult res = run_cli("solve --config " + cfg.string() + " --out " +
                                (sandbox() / "s").string());
  CHECK(res.exit_code == 4);
  CHECK(res.output.find("closest eigenvalue") != std::string::npos);
}

TEST_CASE("classify emits a verdict record") {
  const auto cfg = write_file("classify.json", R"({
    "lambda": 0.10, "zeta": [1.0, 0.0], "dim": 20,
    "coupling": {"kind": "toy", "alpha": 0.6, "beta": 0.8}
  })");
  const auto out = sandbox() / "c";
  const CliResult res = run_cli("classify --config " + cfg.string() + " --out " + out.string());
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("\"verdict\":\"exists\"") != std::string::npos);
  CHECK(res.output.find("maser-prop-1") != std::string::npos);
  CHECK(slurp(out / "verdict.json").find("\"margin\"") != std::string::npos);
}

TEST_CASE("solve emits state JSON with falloff summary") {
  const auto cfg = write_file("solve.json", kBabyMaser);
  const auto out = sandbox() / "st";
  const CliResult res = run_cli("solve --config " + cfg.string() + " --out " + out.string());
  CHECK(res.exit_code == 0);
  const std::string state = slurp(out / "state.json");
  CHECK(state.find("\"trace_deficit\"") != std::string::npos);
  CHECK(state.find("\"falloff\"") != std::string::npos);
}

TEST_CASE("sweep outputs are byte-identical across runs") {
  const auto cfg = write_file("sweep.json", R"({
    "model": {"coupling": {"kind": "toy", "alpha": 0.6, "beta": 0.8}, "dim": 12},
    "lambda_grid": {"min": 0.0, "max": 1.0, "count": 9},
    "zeta_grid": {"values": [[1.0, 0.0], [0.0, 0.0]]}
  })");
  const auto out1 = sandbox() / "sw1";
  const auto out2 = sandbox() / "sw2";
  CHECK(run_cli("sweep --config " + cfg.string() + " --out " + out1.string()).exit_code == 0);
  CHECK(run_cli("sweep --config " + cfg.string() + " --out " + out2.string() + " --threads 2")
            .exit_code == 0);
  CHECK(slurp(out1 / "sweep.csv") == slurp(out2 / "sweep.csv"));
  CHECK(slurp(out1 / "sweep.svg") == slurp(out2 / "sweep.svg"));
  CHECK(!slurp(out1 / "sweep.csv").empty());
}

TEST_CASE("certify subcommand covers all three modes") {
  const auto lyap_cfg = write_file("lyap.json", kBabyMaser);
  const auto out = sandbox() / "cert";
  CHECK(run_cli("certify --mode lyapunov --config " + lyap_cfg.string() + " --out " +
                out.string())
            .exit_code == 0);
  CHECK(slurp(out / "certificate.json").find("\"verified\": true") != std::string::npos);

  const auto drift_cfg = write_file("drift.json", R"({
    "lambda": 0.85, "zeta": [1.0, 0.0], "dim": 24,
    "coupling": {"kind": "toy", "alpha": 0.6, "beta": 0.8}
  })");
  CHECK(run_cli("certify --mode drift --config " + drift_cfg.string() + " --out " +
                out.string())
            .exit_code == 0);
  CHECK(slurp(out / "certificate.json").find("\"kind\": \"drift\"") != std::string::npos);

  const auto toy_cfg = write_file("toyobs.json", R"({
    "lambda": 0.40, "zeta": [1.0, 0.0], "dim": 20,
    "coupling": {"kind": "toy", "alpha": 0.6, "beta": 0.8}
  })");
  const CliResult res = run_cli("certify --mode toy-observable --config " + toy_cfg.string() +
                                " --out " + out.string());
  CHECK(res.exit_code == 0);
  CHECK(res.output.find("toy-observable") != std::string::npos);
}

TEST_CASE("converge emits a trace with a fit summary") {
  const auto cfg = write_file("conv.json", kBabyMaser);
  const auto out = sandbox() / "tr";
  const CliResult res = run_cli("converge --config " + cfg.string() + " --out " + out.string() +
                                " --n-max 300 --theta vacuum");
  CHECK(res.exit_code == 0);
  const std::string csv = slurp(out / "trace.csv");
  CHECK(csv.rfind("n,distance\n", 0) == 0);
  CHECK(res.output.find("\"fit\"") != std::string::npos);
}

TEST_CASE("inapplicable certificate requests map to the usage exit code") {
  const auto cfg = write_file("down.json", R"({
    "lambda": 0.3, "zeta": [1.0, 0.0], "dim": 24,
    "coupling": {"kind": "toy", "alpha": 0.6, "beta": 0.8}
  })");
  const CliResult res = run_cli("certify --mode drift --config " + cfg.string());
  CHECK(res.exit_code == 2);
  CHECK(res.output.find("not applicable") != std::string::npos);
}

TEST_CASE("jc_random rates export carries the quadrature report") {
  const auto cfg = write_file("rand.json", R"({
    "lambda": 0.3, "zeta": [1.0, 0.0], "dim": 20,
    "coupling": {"kind": "jc_random", "g": 1.0,
                 "density": {"kind": "exponential", "rate": 1.0}}
  })");
  const auto out = sandbox() / "rq";
  CHECK(run_cli("rates --config " + cfg.string() + " --out " + out.string()).exit_code == 0);
  const std::string csv = slurp(out / "rates.csv");
  CHECK(csv.find("# quadrature nodes=") != std::string::npos);
  CHECK(csv.find("est_error=") != std::string::npos);
}
