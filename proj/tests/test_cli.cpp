#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

// End-to-end tests of the command-line front end.  The binary path is baked
// in at configure time; every run gets its own scratch directory.

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

int run(const std::string& args) {
  const std::string cmd =
      std::string(QAA_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int raw = std::system(cmd.c_str());
  return (raw >> 8) & 0xff;
}

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("qaa_cli_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json load_json(const fs::path& p) { return json::parse(slurp(p)); }

std::size_t line_count(const std::string& text) {
  std::size_t n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

}  // namespace

TEST_CASE("running without a subcommand fails with the config exit code") {
  CHECK(run("") == 2);
  CHECK(run("no-such-subcommand") == 2);
}

TEST_CASE("spectrum writes a full gap profile and a consistent manifest") {
  const fs::path dir = fresh_dir("spectrum");
  const int rc = run("spectrum --p 0,3,1,1 --gamma4 -8 --n 60 --out " + dir.string());
  REQUIRE(rc == 0);

  const std::string csv = slurp(dir / "spectrum.csv");
  CHECK(line_count(csv) == 202);  // header + 201 grid rows
  CHECK(csv.rfind("tau,lambda0,lambda1,gap,hdot\n", 0) == 0);

  // Every gap strictly positive (driven schedule, no crossing).
  std::istringstream rows(csv);
  std::string line;
  std::getline(rows, line);  // header
  while (std::getline(rows, line)) {
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    const auto c3 = line.find(',', c2 + 1);
    const auto c4 = line.find(',', c3 + 1);
    const double gap = std::stod(line.substr(c3 + 1, c4 - c3 - 1));
    CHECK(gap > 0.0);
  }

  const json manifest = load_json(dir / "manifest.json");
  CHECK(manifest["subcommand"] == "spectrum");
  CHECK(manifest["resolved"]["n"] == 60);
  CHECK(manifest["resolved"]["gamma4"] == -8.0);
  const std::vector<std::string> outs = manifest["outputs"];
  CHECK(std::find(outs.begin(), outs.end(), "spectrum.csv") != outs.end());
  CHECK(std::find(outs.begin(), outs.end(), "summary.json") != outs.end());

  const json summary = load_json(dir / "summary.json");
  CHECK(summary["min_gap"].get<double>() > 0.0);
  CHECK(summary["min_gap"] == manifest["summary"]["min_gap"]);
}

TEST_CASE("conflicting driver specifications are rejected") {
  const fs::path dir = fresh_dir("conflict");
  CHECK(run("spectrum --gamma4 -8 --gamma 0,0,0,-8,0,0 --n 24 --out " + dir.string()) == 2);
  CHECK(run("spectrum --gamma4 -8 --A-entries 0,1,1.5 --n 24 --out " + dir.string()) == 2);
}

TEST_CASE("malformed clause weights are rejected") {
  const fs::path dir = fresh_dir("badp");
  CHECK(run("spectrum --p 1,2,3 --n 24 --out " + dir.string()) == 2);
  CHECK(run("spectrum --p 1,2,3,x --n 24 --out " + dir.string()) == 2);
}

TEST_CASE("unknown config keys are rejected by name") {
  const fs::path dir = fresh_dir("badkey");
  const fs::path cfg = dir / "config.json";
  std::ofstream(cfg) << R"({"n": 24, "coupling": 3})";
  // Capture stderr to confirm the offending key is named.
  const std::string cmd = std::string(QAA_CLI_PATH) + " spectrum --config " +
                          cfg.string() + " --out " + dir.string() + " 2> " +
                          (dir / "stderr.txt").string() + " > /dev/null";
  const int rc = (std::system(cmd.c_str()) >> 8) & 0xff;
  CHECK(rc == 2);
  CHECK(slurp(dir / "stderr.txt").find("coupling") != std::string::npos);
}

TEST_CASE("flags take precedence over config-file values") {
  const fs::path dir = fresh_dir("precedence");
  const fs::path cfg = dir / "config.json";
  std::ofstream(cfg) << R"({"n": 30, "gamma4": -2.0})";
  REQUIRE(run("spectrum --config " + cfg.string() + " --n 24 --out " + dir.string()) == 0);
  const json manifest = load_json(dir / "manifest.json");
  CHECK(manifest["resolved"]["n"] == 24);        // flag wins
  CHECK(manifest["resolved"]["gamma4"] == -2.0); // config fills the rest
}

TEST_CASE("a manifest from a previous run is itself a valid config") {
  const fs::path a = fresh_dir("roundtrip_a");
  const fs::path b = fresh_dir("roundtrip_b");
  REQUIRE(run("spectrum --p 0,3,1,1 --gamma4 -3 --n 30 --out " + a.string()) == 0);
  REQUIRE(run("spectrum --config " + (a / "manifest.json").string() + " --out " +
              b.string()) == 0);
  CHECK(slurp(a / "spectrum.csv") == slurp(b / "spectrum.csv"));
  CHECK(slurp(a / "summary.json") == slurp(b / "summary.json"));
}

TEST_CASE("outputs are byte-identical across worker counts") {
  const fs::path a = fresh_dir("jobs1");
  const fs::path b = fresh_dir("jobs4");
  const std::string common = "spectrum --p 0,3,1,1 --gamma4 -8 --n 40 ";
  REQUIRE(run(common + "--jobs 1 --out " + a.string()) == 0);
  REQUIRE(run(common + "--jobs 4 --out " + b.string()) == 0);
  CHECK(slurp(a / "spectrum.csv") == slurp(b / "spectrum.csv"));
}

TEST_CASE("bifurcation reports the pinned critical point of the reference instance") {
  const fs::path dir = fresh_dir("bifurcation");
  REQUIRE(run("bifurcation --p 0,3,1,1 --out " + dir.string()) == 0);
  const json out = load_json(dir / "bifurcation.json");
  const json sol = out["solve_a3"];
  CHECK(sol["converged"] == true);
  CHECK(std::abs(sol["tau_c"].get<double>() - 0.44) < 0.01);
  CHECK(std::abs(sol["gamma4_c"].get<double>() - (-0.95)) < 0.02);
  CHECK(out["cost"]["shape"] == "double-minimum");
  CHECK(out["cost"]["q_star"] == 1.0);
  // No driver given: the detector sections are absent.
  CHECK_FALSE(out.contains("local_events"));
}

TEST_CASE("bifurcation with a driver also runs the detectors") {
  const fs::path dir = fresh_dir("bifurcation_driven");
  REQUIRE(run("bifurcation --p 0,3,1,1 --gamma4 -8 --out " + dir.string()) == 0);
  const json out = load_json(dir / "bifurcation.json");
  REQUIRE(out.contains("local_events"));
  REQUIRE(out.contains("global_events"));
  CHECK(out["global_events"].empty());  // strong driver removes the crossing
}

TEST_CASE("scaling classifies the undriven reference schedule as exponential") {
  const fs::path dir = fresh_dir("scaling");
  REQUIRE(run("scaling --p 0,3,1,1 --n-list 20,30,40,50,60 --out " + dir.string()) == 0);
  const json summary = load_json(dir / "summary.json");
  CHECK(summary["verdict"] == "exponential");
  CHECK(summary["exp_rate"].get<double>() > 0.02);
  const std::string csv = slurp(dir / "scaling.csv");
  CHECK(line_count(csv) == 6);  // header + one row per size
}

TEST_CASE("validate confirms the closed-form operator against the dense oracle") {
  const fs::path dir = fresh_dir("validate");
  REQUIRE(run("validate --n 8 --samples 25 --out " + dir.string()) == 0);
  const json out = load_json(dir / "validate.json");
  CHECK(out["pass"] == true);
  CHECK(out["max_deviation"].get<double>() <= 1e-10);
  CHECK(run("validate --n 20 --samples 5 --out " + dir.string()) == 2);  // out of range
}

TEST_CASE("classical writes a trajectory table and landing diagnostics") {
  const fs::path dir = fresh_dir("classical");
  REQUIRE(run("classical --p 0,3,1,1 --gamma4 -4 --T 200 --out " + dir.string()) == 0);

  const std::string csv = slurp(dir / "trajectory.csv");
  CHECK(csv.rfind("t,tau,nx,ny,nz,misalignment\n", 0) == 0);
  CHECK(line_count(csv) >= 10);

  const json out = load_json(dir / "classical.json");
  CHECK(std::abs(out["final_nz"].get<double>() - 1.0) < 0.05);
  CHECK(out["max_norm_drift"].get<double>() <= 1e-8);
  CHECK(out["J0"].get<double>() == -1.0);
  CHECK(out["target_q"].get<double>() == 1.0);
  CHECK(out["steps_accepted"].get<std::size_t>() > 0);
}

TEST_CASE("potential writes the full scan and its minima track") {
  const fs::path dir = fresh_dir("potential");
  REQUIRE(run("potential --p 0,3,1,1 --gamma4 -2 --tau-grid 11 --q-grid 101 --out " +
              dir.string()) == 0);
  CHECK(line_count(slurp(dir / "potential.csv")) == 11 * 101 + 1);
  CHECK(line_count(slurp(dir / "minima.csv")) == 12);
}

TEST_CASE("phase-diagram on a coarse grid reproduces the boundary scan") {
  const fs::path dir = fresh_dir("phase");
  REQUIRE(run("phase-diagram --L 3 --grid-per-axis 7 --jobs 2 --out " + dir.string()) == 0);
  const json out = load_json(dir / "phase_diagram.json");
  CHECK(out["gamma_c"].get<double>() > 3.0);
  CHECK(out["envelope"].get<double>() == 3.0);
  CHECK(out["n_grid"] == 7 * 7 * 7 * 7);
}

TEST_CASE("ensemble in sampling mode writes the success fractions") {
  const fs::path dir = fresh_dir("ensemble");
  REQUIRE(run("ensemble --p 0,3,1,1 --L 3 --samples 5000 --out " + dir.string()) == 0);
  const json out = load_json(dir / "ensemble.json");
  CHECK(out["frac_mass_ok"].get<double>() == 23.0 / 32.0);
  CHECK(out["analytic_estimate"].get<double>() == 23.0 / 64.0);
  CHECK(std::abs(out["frac_joint"].get<double>() - 0.3056) < 0.03);
}
