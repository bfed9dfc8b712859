//! Command-line front end: every analysis as a reproducible, seeded run
//! emitting CSV data files and JSON summaries.
//!
//! Subcommands: spectrum, scaling, potential, bifurcation, phase-diagram,
//! ensemble, classical, validate.  Options may come from flags or from a
//! JSON config file (--config); flags take precedence over the file, and
//! unknown config keys are rejected by name.  Every run writes manifest.json
//! echoing the fully resolved configuration — feeding it back through
//! --config reproduces the run.  Exit codes: 0 success, 2 invalid
//! configuration, 3 numerical failure (diagnostic JSON written).

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qaa/qaa.hpp"

using nlohmann::json;

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> parse_doubles(const std::string& csv, std::size_t expect,
                                  const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw ConfigError(what + ": cannot parse '" + tok + "' as a number");
    }
  }
  if (expect != 0 && out.size() != expect)
    throw ConfigError(what + ": expected " + std::to_string(expect) +
                      " comma-separated values, got " + std::to_string(out.size()));
  return out;
}

std::vector<int> parse_ints(const std::string& csv, const std::string& what) {
  std::vector<int> out;
  for (double v : parse_doubles(csv, 0, what)) out.push_back(static_cast<int>(v));
  return out;
}

/// Config values may be JSON arrays, numbers, strings, or booleans; options
/// are bound to strings/numbers, so normalize to the flag representation.
std::string config_to_string(const json& v, const std::string& key) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s += ",";
      if (!v[i].is_number())
        throw ConfigError("config key '" + key + "': array entries must be numbers");
      std::ostringstream os;
      os.precision(17);
      os << v[i].get<double>();
      s += os.str();
    }
    return s;
  }
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) {
    std::ostringstream os;
    os.precision(17);
    os << v.get<double>();
    return os.str();
  }
  throw ConfigError("config key '" + key + "': unsupported value type");
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << text;
}

void write_json(const std::filesystem::path& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json gamma_to_json(const qaa::GammaCoefficients& g) {
  return json::array({g.g1, g.g2, g.g3, g.g4, g.g5, g.g6});
}

/// All mutable run options, bound to flags and fillable from the config
/// file.  Values here are the documented defaults.
struct Options {
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  int jobs = qaa::default_jobs();
  std::string p_csv = "0,3,1,1";

  // driver (at most one of the first four may be provided)
  std::string gamma_csv;
  double gamma4 = 0.0;
  std::string a_file;
  std::string a_entries_csv;

  int n = 60;
  int grid = 201;
  std::string hp_mode = "exact";
  bool raw_units = false;
  double refine_tol = 1e-6;
  std::string n_list_csv = "20,40,60,80,100";
  double threshold_exponent = 0.02;
  int tau_grid = 101;
  int q_grid = 201;
  int bif_tau_grid = 197;
  double L = 3.0;
  int grid_per_axis = 21;
  std::string domain = "zero";
  std::size_t samples = 1000;
  std::string mode = "mc";
  int n_max = 60;
  double T_scaled = 800.0;
  double ode_tol = 1e-10;
  std::optional<double> frozen_tau;
};

/// Which config keys each subcommand accepts (global keys included).
const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::set<std::string> common = {"subcommand", "out",   "seed",
                                               "jobs",       "p",     "gamma",
                                               "gamma4",     "A-file", "A-entries"};
  static const std::map<std::string, std::set<std::string>> m = [] {
    std::map<std::string, std::set<std::string>> mm;
    auto with = [&](std::initializer_list<const char*> extra) {
      std::set<std::string> s = common;
      for (const char* e : extra) s.insert(e);
      return s;
    };
    mm["spectrum"] = with({"n", "grid", "hp-mode", "raw-units", "refine-tol"});
    mm["scaling"] = with({"n-list", "grid", "hp-mode", "threshold-exponent", "refine-tol"});
    mm["potential"] = with({"tau-grid", "q-grid"});
    mm["bifurcation"] = with({"tau-grid"});
    mm["phase-diagram"] = with({"L", "grid-per-axis", "domain"});
    mm["ensemble"] = with({"L", "samples", "mode", "n-max", "threshold-exponent", "grid"});
    mm["classical"] = with({"T", "tol", "frozen-tau"});
    mm["validate"] = with({"n", "samples", "L"});
    return mm;
  }();
  return m;
}

struct DriverChoice {
  std::string kind = "none";  // none | gamma | gamma4 | A-file | A-entries
  qaa::DriverSpec spec = qaa::DriverSpec::none();
  qaa::GammaCoefficients gamma;  // effective polynomial coefficients
  json describe;                 // manifest fragment
};

DriverChoice resolve_driver(const Options& o, bool has_gamma, bool has_gamma4,
                            bool has_a_file, bool has_a_entries) {
  const int given = (has_gamma ? 1 : 0) + (has_gamma4 ? 1 : 0) +
                    (has_a_file ? 1 : 0) + (has_a_entries ? 1 : 0);
  if (given > 1)
    throw ConfigError("conflicting driver options: give exactly one of "
                      "--gamma, --gamma4, --A-file, --A-entries");
  DriverChoice d;
  if (has_gamma) {
    const auto v = parse_doubles(o.gamma_csv, 6, "--gamma");
    d.gamma = {v[0], v[1], v[2], v[3], v[4], v[5]};
    d.spec = qaa::DriverSpec::from_gamma(d.gamma);
    d.kind = "gamma";
    d.describe = {{"kind", "gamma"}, {"gamma", gamma_to_json(d.gamma)}};
  } else if (has_gamma4) {
    d.gamma = {};
    d.gamma.g4 = o.gamma4;
    d.spec = qaa::DriverSpec::from_gamma(d.gamma);
    d.kind = "gamma4";
    d.describe = {{"kind", "gamma4"}, {"gamma4", o.gamma4}};
  } else if (has_a_file || has_a_entries) {
    std::array<double, qaa::DriverMatrix::kEntries> entries{};
    if (has_a_file) {
      std::ifstream f(o.a_file);
      if (!f) throw ConfigError("--A-file: cannot open " + o.a_file);
      json j;
      try {
        f >> j;
      } catch (const std::exception& e) {
        throw ConfigError("--A-file: invalid JSON: " + std::string(e.what()));
      }
      const json& arr = j.is_object() && j.contains("entries") ? j["entries"] : j;
      if (!arr.is_array() || arr.size() != qaa::DriverMatrix::kEntries)
        throw ConfigError("--A-file: expected a JSON array of 28 entries");
      for (std::size_t i = 0; i < entries.size(); ++i) entries[i] = arr[i].get<double>();
      d.kind = "A-file";
    } else {
      const auto v = parse_doubles(o.a_entries_csv, qaa::DriverMatrix::kEntries,
                                   "--A-entries");
      std::copy(v.begin(), v.end(), entries.begin());
      d.kind = "A-entries";
    }
    const qaa::DriverMatrix a = qaa::DriverMatrix::from_entries(entries);
    d.spec = qaa::DriverSpec::from_block(a);
    d.gamma = qaa::gammas_from_A(a);
    d.describe = {{"kind", d.kind},
                  {"entries", entries},
                  {"gamma_effective", gamma_to_json(d.gamma)}};
  } else {
    d.describe = {{"kind", "none"}};
  }
  return d;
}

qaa::HpMode parse_hp_mode(const std::string& s) {
  if (s == "exact") return qaa::HpMode::exact;
  if (s == "asymptotic") return qaa::HpMode::asymptotic;
  throw ConfigError("--hp-mode: expected 'exact' or 'asymptotic', got '" + s + "'");
}

json solve_a3_to_json(const qaa::BifurcationSolution& sol) {
  json j{{"candidate", sol.candidate},
         {"converged", sol.converged},
         {"kind", qaa::to_string(sol.kind)},
         {"tau_c", sol.tau_c},
         {"gamma4_c", sol.gamma4_c},
         {"x_c", sol.x_c},
         {"residual", sol.residual},
         {"gates",
          {{"x_range", sol.gate_x_range},
           {"gamma_finite", sol.gate_gamma_finite},
           {"jump", sol.gate_jump},
           {"sign", sol.gate_sign}}}};
  if (std::isfinite(sol.jump)) j["jump"] = sol.jump;
  if (std::isfinite(sol.q_min)) j["q_min"] = sol.q_min;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adiabatic-schedule analysis toolkit: exact spectra on the "
               "symmetric subspace, semiclassical bifurcation theory, driver "
               "ensembles, and classical spin dynamics."};
  app.require_subcommand(1);

  Options o;
  std::string config_path;

  // --- global options on every subcommand ------------------------------
  std::vector<CLI::App*> subs;
  auto* sc_spectrum = app.add_subcommand(
      "spectrum", "Two lowest levels, gap, and adiabatic matrix element along the schedule");
  auto* sc_scaling = app.add_subcommand(
      "scaling", "Minimum-gap scaling fit (exponential vs power law) across sizes");
  auto* sc_potential = app.add_subcommand(
      "potential", "Reduced potential surface U(q, tau) and its minimizer track");
  auto* sc_bifurcation = app.add_subcommand(
      "bifurcation", "Cusp-boundary solver plus local/global bifurcation detectors");
  auto* sc_phase = app.add_subcommand(
      "phase-diagram", "Critical driver strength over a clause-weight box");
  auto* sc_ensemble = app.add_subcommand(
      "ensemble", "Random-driver ensemble statistics (static criteria or gap verdicts)");
  auto* sc_classical = app.add_subcommand(
      "classical", "Classical collective-spin integration of the schedule");
  auto* sc_validate = app.add_subcommand(
      "validate", "Oracle equivalence: dense embedding vs combinatorial ladder");
  subs = {sc_spectrum, sc_scaling, sc_potential, sc_bifurcation,
          sc_phase,    sc_ensemble, sc_classical, sc_validate};

  struct DriverOpts {
    CLI::Option *gamma = nullptr, *gamma4 = nullptr, *a_file = nullptr,
                *a_entries = nullptr;
  };
  std::map<CLI::App*, DriverOpts> driver_opts;
  for (CLI::App* s : subs) {
    s->add_option("--config", config_path, "JSON config file (flags take precedence)");
    s->add_option("--out", o.out_dir, "Output directory (created if missing)");
    s->add_option("--seed", o.seed, "Random seed (echoed in the manifest)");
    s->add_option("--jobs", o.jobs, "Worker threads (results identical for any value)");
    s->add_option("--p", o.p_csv, "Clause weights p0,p1,p2,p3");
    DriverOpts d;
    d.gamma = s->add_option("--gamma", o.gamma_csv, "Driver polynomial g1,...,g6");
    d.gamma4 = s->add_option("--gamma4", o.gamma4, "Pure {N_x,N_z}/2 driver strength");
    d.a_file = s->add_option("--A-file", o.a_file, "JSON file with 28 driver entries");
    d.a_entries = s->add_option("--A-entries", o.a_entries_csv,
                                "28 comma-separated driver entries");
    driver_opts[s] = d;
  }

  // --- per-subcommand options ------------------------------------------
  sc_spectrum->add_option("--n", o.n, "Number of qubits");
  sc_spectrum->add_option("--grid", o.grid, "Schedule grid points (>= 50)");
  sc_spectrum->add_option("--hp-mode", o.hp_mode, "Cost mode: exact | asymptotic");
  sc_spectrum->add_flag("--raw-units", o.raw_units, "Report l^3-scaled energies");
  sc_spectrum->add_option("--refine-tol", o.refine_tol, "Minimum-gap refinement tau tolerance");

  sc_scaling->add_option("--n-list", o.n_list_csv, "Sizes (>= 5 sizes, each >= 20)");
  sc_scaling->add_option("--grid", o.grid, "Schedule grid points per size");
  sc_scaling->add_option("--hp-mode", o.hp_mode, "Cost mode: exact | asymptotic");
  sc_scaling->add_option("--threshold-exponent", o.threshold_exponent,
                         "Exponential rate below which the verdict is polynomial");
  CLI::Option* scaling_refine =
      sc_scaling->add_option("--refine-tol", o.refine_tol,
                             "Minimum-gap refinement tau tolerance (default 1e-10: "
                             "exponentially closing minima need the headroom)");

  sc_potential->add_option("--tau-grid", o.tau_grid, "Schedule grid points");
  sc_potential->add_option("--q-grid", o.q_grid, "q grid points");

  sc_bifurcation->add_option("--tau-grid", o.bif_tau_grid,
                             "Detector grid points on (0, 1)");

  sc_phase->add_option("--L", o.L, "Clause-weight box half-size");
  sc_phase->add_option("--grid-per-axis", o.grid_per_axis, "Grid points per axis (>= 5)");
  sc_phase->add_option("--domain", o.domain, "Box: zero ([0,L]^4) | symmetric ([-L,L]^4)");

  sc_ensemble->add_option("--L", o.L, "Driver entry range [-L, L]");
  sc_ensemble->add_option("--samples", o.samples, "Ensemble size");
  sc_ensemble->add_option("--mode", o.mode, "mc (static criteria) | gap (scaling verdicts)");
  sc_ensemble->add_option("--n-max", o.n_max, "Largest ladder size (gap mode, <= 200)");
  sc_ensemble->add_option("--threshold-exponent", o.threshold_exponent,
                          "Exponential rate threshold (gap mode)");
  sc_ensemble->add_option("--grid", o.grid, "Schedule grid points (gap mode)");

  sc_classical->add_option("--T", o.T_scaled, "Scaled anneal time");
  sc_classical->add_option("--tol", o.ode_tol, "Integrator local error target");
  sc_classical->add_option("--frozen-tau", o.frozen_tau,
                           "Integrate at fixed tau (conservation checks)");

  sc_validate->add_option("--n", o.n, "Number of qubits (3..14)");
  sc_validate->add_option("--samples", o.samples, "Random drivers to test");
  sc_validate->add_option("--L", o.L, "Driver entry range [-L, L]");

  // --- config file: load before parsing so flags override ---------------
  // Pre-scan argv for the subcommand name and --config.
  std::string pre_sub, pre_config;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) {
      pre_config = argv[i + 1];
      ++i;
    } else if (arg.rfind("--config=", 0) == 0) {
      pre_config = arg.substr(9);
    } else if (pre_sub.empty() && !arg.empty() && arg[0] != '-') {
      pre_sub = arg;
    }
  }

  json config;
  if (!pre_config.empty()) {
    std::ifstream f(pre_config);
    if (!f) {
      std::cerr << "error: cannot open config file " << pre_config << "\n";
      return 2;
    }
    try {
      f >> config;
    } catch (const std::exception& e) {
      std::cerr << "error: invalid config JSON: " << e.what() << "\n";
      return 2;
    }
    if (!config.is_object()) {
      std::cerr << "error: config file must hold a JSON object\n";
      return 2;
    }
    // A manifest from a previous run is a valid config: use its resolved block.
    if (config.contains("resolved") && config.contains("outputs"))
      config = config["resolved"];
  }

  try {
    if (!config.empty()) {
      const auto& allowed = allowed_keys();
      const auto it = allowed.find(pre_sub);
      if (it == allowed.end())
        throw ConfigError("config given but subcommand '" + pre_sub + "' is unknown");
      for (const auto& [key, value] : config.items()) {
        if (!it->second.count(key)) throw ConfigError("unknown config key: " + key);
        if (key == "subcommand") {
          if (config_to_string(value, key) != pre_sub)
            throw ConfigError("config subcommand '" + config_to_string(value, key) +
                              "' does not match '" + pre_sub + "'");
          continue;
        }
        const std::string s = config_to_string(value, key);
        if (key == "out") o.out_dir = s;
        else if (key == "seed") o.seed = std::stoull(s);
        else if (key == "jobs") o.jobs = std::stoi(s);
        else if (key == "p") o.p_csv = s;
        else if (key == "gamma") o.gamma_csv = s;
        else if (key == "gamma4") o.gamma4 = std::stod(s);
        else if (key == "A-file") o.a_file = s;
        else if (key == "A-entries") o.a_entries_csv = s;
        else if (key == "n") o.n = std::stoi(s);
        else if (key == "grid") o.grid = std::stoi(s);
        else if (key == "hp-mode") o.hp_mode = s;
        else if (key == "raw-units") o.raw_units = (s == "true" || s == "1");
        else if (key == "refine-tol") o.refine_tol = std::stod(s);
        else if (key == "n-list") o.n_list_csv = s;
        else if (key == "threshold-exponent") o.threshold_exponent = std::stod(s);
        else if (key == "tau-grid") (pre_sub == "bifurcation" ? o.bif_tau_grid : o.tau_grid) = std::stoi(s);
        else if (key == "q-grid") o.q_grid = std::stoi(s);
        else if (key == "L") o.L = std::stod(s);
        else if (key == "grid-per-axis") o.grid_per_axis = std::stoi(s);
        else if (key == "domain") o.domain = s;
        else if (key == "samples") o.samples = std::stoull(s);
        else if (key == "mode") o.mode = s;
        else if (key == "n-max") o.n_max = std::stoi(s);
        else if (key == "T") o.T_scaled = std::stod(s);
        else if (key == "tol") o.ode_tol = std::stod(s);
        else if (key == "frozen-tau") o.frozen_tau = std::stod(s);
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // --help exits 0; any parse problem is config error
  }

  CLI::App* active = nullptr;
  for (CLI::App* s : subs)
    if (s->parsed()) active = s;
  if (!active) {
    std::cerr << app.help() << "\n";
    return 2;
  }
  const std::string sub = active->get_name();
  if (sub == "scaling" && scaling_refine->count() == 0 && !config.contains("refine-tol"))
    o.refine_tol = 1e-10;

  try {
    // Resolve shared pieces.
    const auto pv = parse_doubles(o.p_csv, 4, "--p");
    const qaa::HwpInstance inst(qaa::ClauseWeights{pv[0], pv[1], pv[2], pv[3]});
    const DriverOpts& dops = driver_opts[active];
    const DriverChoice driver = resolve_driver(
        o, dops.gamma->count() > 0 || config.contains("gamma"),
        dops.gamma4->count() > 0 || config.contains("gamma4"),
        dops.a_file->count() > 0 || config.contains("A-file"),
        dops.a_entries->count() > 0 || config.contains("A-entries"));

    const std::filesystem::path out_dir(o.out_dir);
    std::filesystem::create_directories(out_dir);

    json resolved{{"subcommand", sub},
                  {"out", o.out_dir},
                  {"seed", o.seed},
                  {"jobs", o.jobs},
                  {"p", json::array({pv[0], pv[1], pv[2], pv[3]})}};
    if (driver.kind == "gamma") resolved["gamma"] = o.gamma_csv;
    if (driver.kind == "gamma4") resolved["gamma4"] = o.gamma4;
    if (driver.kind == "A-file") resolved["A-file"] = o.a_file;
    if (driver.kind == "A-entries") resolved["A-entries"] = o.a_entries_csv;
    std::vector<std::string> outputs{"manifest.json"};

    auto finish = [&](const json& extra_manifest) {
      json manifest{{"subcommand", sub},
                    {"resolved", resolved},
                    {"driver", driver.describe},
                    {"outputs", outputs}};
      if (!extra_manifest.empty()) manifest["summary"] = extra_manifest;
      write_json(out_dir / "manifest.json", manifest);
    };

    if (sub == "spectrum") {
      resolved["n"] = o.n;
      resolved["grid"] = o.grid;
      resolved["hp-mode"] = o.hp_mode;
      resolved["raw-units"] = o.raw_units;
      resolved["refine-tol"] = o.refine_tol;
      qaa::SpectralOptions sopt;
      sopt.hp_mode = parse_hp_mode(o.hp_mode);
      sopt.raw_units = o.raw_units;
      sopt.refine_tol = o.refine_tol;
      sopt.jobs = o.jobs;
      const qaa::GapProfile prof = qaa::gap_profile(inst, driver.spec, o.n, o.grid, sopt);
      std::string csv = "tau,lambda0,lambda1,gap,hdot\n";
      for (std::size_t i = 0; i < prof.tau.size(); ++i)
        csv += fmt17(prof.tau[i]) + "," + fmt17(prof.lambda0[i]) + "," +
               fmt17(prof.lambda1[i]) + "," + fmt17(prof.gap[i]) + "," +
               fmt17(prof.hdot[i]) + "\n";
      write_text(out_dir / "spectrum.csv", csv);
      outputs.push_back("spectrum.csv");
      json summary{{"n", o.n},
                   {"min_gap", prof.min_gap},
                   {"tau_at_min", prof.tau_at_min},
                   {"hdot_max", prof.hdot_max},
                   {"runtime_bound", prof.runtime_bound}};
      write_json(out_dir / "summary.json", summary);
      outputs.push_back("summary.json");
      finish(summary);
    } else if (sub == "scaling") {
      resolved["n-list"] = o.n_list_csv;
      resolved["grid"] = o.grid;
      resolved["hp-mode"] = o.hp_mode;
      resolved["threshold-exponent"] = o.threshold_exponent;
      resolved["refine-tol"] = o.refine_tol;
      qaa::SpectralOptions sopt;
      sopt.hp_mode = parse_hp_mode(o.hp_mode);
      sopt.refine_tol = o.refine_tol;
      sopt.jobs = o.jobs;
      const auto n_list = parse_ints(o.n_list_csv, "--n-list");
      const qaa::ScalingFit fit = qaa::min_gap_scaling(inst, driver.spec, n_list,
                                                       o.grid, sopt, o.threshold_exponent);
      std::string csv = "n,min_gap\n";
      for (std::size_t i = 0; i < fit.n_list.size(); ++i)
        csv += std::to_string(fit.n_list[i]) + "," + fmt17(fit.min_gaps[i]) + "\n";
      write_text(out_dir / "scaling.csv", csv);
      outputs.push_back("scaling.csv");
      json summary{{"verdict", qaa::to_string(fit.verdict)},
                   {"exp_rate", fit.exp_rate},
                   {"exp_intercept", fit.exp_intercept},
                   {"exp_rss", fit.exp_rss},
                   {"pow_exponent", fit.pow_exponent},
                   {"pow_intercept", fit.pow_intercept},
                   {"pow_rss", fit.pow_rss}};
      write_json(out_dir / "summary.json", summary);
      outputs.push_back("summary.json");
      finish(summary);
    } else if (sub == "potential") {
      resolved["tau-grid"] = o.tau_grid;
      resolved["q-grid"] = o.q_grid;
      if (o.tau_grid < 2 || o.q_grid < 2)
        throw ConfigError("potential: --tau-grid and --q-grid must be >= 2");
      const qaa::EffectiveModel model(inst.beta, driver.gamma);
      std::string csv = "tau,q,u\n";
      for (int i = 0; i < o.tau_grid; ++i) {
        const double tau = static_cast<double>(i) / (o.tau_grid - 1);
        for (int k = 0; k < o.q_grid; ++k) {
          const double q = -1.0 + 2.0 * k / (o.q_grid - 1);
          csv += fmt17(tau) + "," + fmt17(q) + "," + fmt17(qaa::u_eval(model, tau, q)) + "\n";
        }
      }
      write_text(out_dir / "potential.csv", csv);
      outputs.push_back("potential.csv");
      std::string mcsv = "tau,q_star,value,omega_x,boundary\n";
      for (int i = 0; i < o.tau_grid; ++i) {
        const double tau = static_cast<double>(i) / (o.tau_grid - 1);
        const qaa::MinimizeResult m = qaa::minimize_u(model, tau);
        mcsv += fmt17(tau) + "," + fmt17(m.q_star) + "," + fmt17(m.value) + "," +
                fmt17(qaa::omega_x(model, tau, m.q_star)) + "," +
                (m.boundary ? "1" : "0") + "\n";
      }
      write_text(out_dir / "minima.csv", mcsv);
      outputs.push_back("minima.csv");
      finish(json{});
    } else if (sub == "bifurcation") {
      resolved["tau-grid"] = o.bif_tau_grid;
      if (o.bif_tau_grid < 2) throw ConfigError("bifurcation: --tau-grid must be >= 2");
      const qaa::BifurcationSolution sol = qaa::solve_a3(inst.beta);
      const qaa::CostClassification cost = qaa::classify_cost(inst.beta);
      json out{{"beta", json::array({inst.beta[0], inst.beta[1], inst.beta[2], inst.beta[3]})},
               {"solve_a3", solve_a3_to_json(sol)},
               {"cost", {{"shape", qaa::to_string(cost.shape)},
                         {"q_star", cost.q_star},
                         {"value", cost.value}}}};
      if (driver.kind != "none") {
        const qaa::EffectiveModel model(inst.beta, driver.gamma);
        std::vector<double> taus(o.bif_tau_grid);
        for (int i = 0; i < o.bif_tau_grid; ++i)
          taus[i] = 0.01 + 0.98 * i / (o.bif_tau_grid - 1);
        json loc = json::array();
        for (const auto& ev : qaa::detect_local_bifurcation(model, taus))
          loc.push_back({{"tau0", ev.tau0},
                         {"q0", ev.q0},
                         {"a0", ev.a0},
                         {"b0", ev.b0},
                         {"c0", ev.c0},
                         {"d0", ev.d0},
                         {"p_plus", ev.p_plus},
                         {"p_minus", ev.p_minus}});
        json glob = json::array();
        for (const auto& ev : qaa::detect_global_bifurcation(model, taus))
          glob.push_back({{"tau_mid", ev.tau_mid},
                          {"q_left", ev.q_left},
                          {"q_right", ev.q_right},
                          {"barrier", ev.barrier}});
        out["local_events"] = loc;
        out["global_events"] = glob;
      }
      write_json(out_dir / "bifurcation.json", out);
      outputs.push_back("bifurcation.json");
      finish(out["solve_a3"]);
    } else if (sub == "phase-diagram") {
      resolved["L"] = o.L;
      resolved["grid-per-axis"] = o.grid_per_axis;
      resolved["domain"] = o.domain;
      qaa::PhaseDomain dom;
      if (o.domain == "zero") dom = qaa::PhaseDomain::zero_to_L;
      else if (o.domain == "symmetric") dom = qaa::PhaseDomain::symmetric;
      else throw ConfigError("--domain: expected 'zero' or 'symmetric', got '" + o.domain + "'");
      const qaa::PhaseBoundary pb = qaa::gamma_c_of_L(o.L, o.grid_per_axis, dom, o.jobs);
      json out{{"gamma_c", pb.gamma_c},
               {"grid_max", pb.grid_max},
               {"argmax_p", json::array({pb.argmax_p[0], pb.argmax_p[1], pb.argmax_p[2], pb.argmax_p[3]})},
               {"tau_at_max", pb.tau_at_max},
               {"x_at_max", pb.x_at_max},
               {"residual_at_max", pb.residual_at_max},
               {"kind_at_max", qaa::to_string(pb.kind_at_max)},
               {"envelope", pb.envelope},
               {"envelope_p", json::array({pb.envelope_p[0], pb.envelope_p[1], pb.envelope_p[2], pb.envelope_p[3]})},
               {"n_converged", pb.n_converged},
               {"n_grid", pb.n_grid}};
      write_json(out_dir / "phase_diagram.json", out);
      outputs.push_back("phase_diagram.json");
      finish(out);
    } else if (sub == "ensemble") {
      resolved["L"] = o.L;
      resolved["samples"] = o.samples;
      resolved["mode"] = o.mode;
      if (o.mode == "mc") {
        const qaa::SuccessReport rep =
            qaa::success_fraction(inst, o.L, o.samples, o.seed, o.jobs);
        json out{{"L", rep.L},
                 {"samples", rep.samples},
                 {"seed", rep.seed},
                 {"gamma4_c", rep.gamma4_c},
                 {"frac_joint", rep.frac_joint},
                 {"frac_side", rep.frac_side},
                 {"frac_mass", rep.frac_mass},
                 {"frac_gamma_ok", rep.frac_gamma_ok},
                 {"frac_mass_ok", rep.frac_mass_ok},
                 {"analytic_estimate", rep.analytic_estimate}};
        write_json(out_dir / "ensemble.json", out);
        outputs.push_back("ensemble.json");
        finish(out);
      } else if (o.mode == "gap") {
        resolved["n-max"] = o.n_max;
        resolved["threshold-exponent"] = o.threshold_exponent;
        resolved["grid"] = o.grid;
        const qaa::GapVerdictReport rep = qaa::verify_success_by_gap(
            inst, o.L, o.samples, o.n_max, o.threshold_exponent, o.seed, o.jobs, o.grid);
        std::string csv = "sample,side_ok,mass_ok,verdict,exp_rate,pow_exponent\n";
        for (std::size_t k = 0; k < rep.verdicts.size(); ++k) {
          const qaa::GapVerdict& v = rep.verdicts[k];
          csv += std::to_string(k) + "," + (v.side_ok ? "1" : "0") + "," +
                 (v.mass_ok ? "1" : "0") + "," + qaa::to_string(v.verdict) + "," +
                 fmt17(v.exp_rate) + "," + fmt17(v.pow_exponent) + "\n";
        }
        write_text(out_dir / "verdicts.csv", csv);
        outputs.push_back("verdicts.csv");
        json out{{"samples", rep.samples},
                 {"ladder", rep.ladder},
                 {"poly_fraction", rep.poly_fraction},
                 {"joint_fraction", rep.joint_fraction}};
        write_json(out_dir / "ensemble.json", out);
        outputs.push_back("ensemble.json");
        finish(out);
      } else {
        throw ConfigError("--mode: expected 'mc' or 'gap', got '" + o.mode + "'");
      }
    } else if (sub == "classical") {
      resolved["T"] = o.T_scaled;
      resolved["tol"] = o.ode_tol;
      if (o.frozen_tau) resolved["frozen-tau"] = *o.frozen_tau;
      const qaa::EffectiveModel model(inst.beta, driver.gamma);
      qaa::IntegrateOptions iopt;
      iopt.tol = o.ode_tol;
      iopt.frozen_tau = o.frozen_tau;
      const qaa::SpinTrajectory traj = qaa::integrate_spin(model, o.T_scaled, iopt);
      const qaa::AdiabaticDiagnostics diag = qaa::adiabatic_diagnostics(traj);
      const double sgn = diag.j0 >= 0.0 ? 1.0 : -1.0;
      std::string csv = "t,tau,nx,ny,nz,misalignment\n";
      for (const qaa::SpinSample& s : traj.samples) {
        const double nw = std::sqrt(s.omega[0] * s.omega[0] + s.omega[1] * s.omega[1] +
                                    s.omega[2] * s.omega[2]);
        const double nn = std::sqrt(s.n[0] * s.n[0] + s.n[1] * s.n[1] + s.n[2] * s.n[2]);
        double mis = 0.0;
        if (nw > 1e-14 && nn > 1e-14) {
          const double c = sgn *
                           (s.omega[0] * s.n[0] + s.omega[1] * s.n[1] + s.omega[2] * s.n[2]) /
                           (nw * nn);
          mis = std::acos(std::min(1.0, std::max(-1.0, c)));
        }
        csv += fmt17(s.t) + "," + fmt17(s.tau) + "," + fmt17(s.n[0]) + "," +
               fmt17(s.n[1]) + "," + fmt17(s.n[2]) + "," + fmt17(mis) + "\n";
      }
      write_text(out_dir / "trajectory.csv", csv);
      outputs.push_back("trajectory.csv");
      const qaa::CostClassification cost = qaa::classify_cost(inst.beta);
      json out{{"final_nz", traj.final_nz},
               {"max_norm_drift", traj.max_norm_drift},
               {"max_misalignment", diag.max_misalignment},
               {"J_drift", diag.j_drift},
               {"J0", diag.j0},
               {"target_q", cost.q_star},
               {"steps_accepted", traj.steps_accepted},
               {"steps_rejected", traj.steps_rejected}};
      write_json(out_dir / "classical.json", out);
      outputs.push_back("classical.json");
      finish(out);
    } else if (sub == "validate") {
      resolved["n"] = o.n;
      resolved["samples"] = o.samples;
      resolved["L"] = o.L;
      if (o.n < 3 || o.n > 14)
        throw ConfigError("validate: --n must be in [3, 14] (dense oracle range)");
      std::vector<double> devs(o.samples, 0.0);
      qaa::parallel_for(o.jobs, o.samples, [&](std::size_t k) {
        const qaa::DriverMatrix a = qaa::sample_A(o.L, qaa::subseed(o.seed, k));
        const qaa::SubspaceOperator dense = qaa::build_he_dense(a, o.n);
        const qaa::SubspaceOperator closed = qaa::build_he_symmetric(a, o.n, true);
        double dev = 0.0;
        for (std::size_t i = 0; i < dense.rows(); ++i)
          for (std::size_t j = 0; j < dense.cols(); ++j)
            dev = std::max(dev, std::abs(dense(i, j) - closed(i, j)));
        devs[k] = dev;
      });
      double max_dev = 0.0;
      for (double d : devs) max_dev = std::max(max_dev, d);
      const bool pass = max_dev <= 1e-10;
      json out{{"n", o.n}, {"samples", o.samples}, {"max_deviation", max_dev}, {"pass", pass}};
      write_json(out_dir / "validate.json", out);
      outputs.push_back("validate.json");
      finish(out);
      if (!pass) {
        std::cerr << "validate: max oracle deviation " << max_dev << " exceeds 1e-10\n";
        return 3;
      }
      std::cout << "validate: max oracle deviation " << max_dev << " (pass)\n";
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    // Numerical failure: leave a diagnostic JSON next to the outputs.
    try {
      std::filesystem::create_directories(o.out_dir);
      write_json(std::filesystem::path(o.out_dir) / "error.json",
                 json{{"error", e.what()}});
    } catch (...) {
    }
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
}
