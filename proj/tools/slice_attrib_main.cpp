// slice-attrib: command-line front end for the attribution library.
//
// Subcommands:
//   simulate    generate a synthetic scenario and write it to a directory
//   attribute   run the attribution pipeline on a saved telemetry window
//   fit         estimate model parameters from labeled scenario directories
//   experiment  run a named evaluation experiment and its acceptance checks
//   bounds      print the certificate arithmetic report
//
// Exit codes: 0 success, 1 experiment checks failed, 2 usage/input error.

#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sliceattrib/experiments.hpp"
#include "sliceattrib/inference.hpp"
#include "sliceattrib/io.hpp"
#include "sliceattrib/learning.hpp"
#include "sliceattrib/simulator.hpp"

namespace {

bool verbose_logging() {
  const char* env = std::getenv("SLICE_ATTRIB_LOG");
  return env != nullptr && std::string(env) != "0" &&
         std::string(env) != "off";
}

void log_line(const std::string& msg) {
  if (verbose_logging()) std::cerr << "[slice-attrib] " << msg << '\n';
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int cmd_simulate(const std::string& config_path, std::uint64_t seed,
                 const std::string& out_dir) {
  sliceattrib::ScenarioConfig cfg;
  if (!config_path.empty())
    cfg = sliceattrib::scenario_config_from_json(slurp(config_path));
  if (seed != 0) cfg.seed = seed;
  log_line("generating scenario with seed " + std::to_string(cfg.seed));
  const sliceattrib::Scenario sc = sliceattrib::generate(cfg);
  sliceattrib::save_scenario(out_dir, sc);
  std::cout << "scenario written to " << out_dir << '\n';
  return 0;
}

int cmd_attribute(const std::string& in_dir, const std::string& out_path,
                  const std::string& format, bool no_segmentation) {
  if (!std::filesystem::is_directory(in_dir)) {
    std::cerr << "error: window directory not found: " << in_dir << '\n';
    return 2;
  }
  const sliceattrib::TelemetryWindow w = sliceattrib::load_window(in_dir);
  sliceattrib::AttributionOptions opts;
  opts.params = sliceattrib::ModelParams::defaults(w.n_resources);
  opts.use_segmentation = !no_segmentation;
  log_line("running attribution on " + in_dir);
  const sliceattrib::AttributionReport rep = sliceattrib::attribute(w, opts);
  const std::string text = sliceattrib::report_to_json(rep);
  if (format == "json" || format.empty()) {
    if (out_path.empty())
      std::cout << text << '\n';
    else
      sliceattrib::save_report(out_path, rep);
  } else if (format == "summary") {
    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
      file.open(out_path);
      os = &file;
    }
    *os << "edges accepted: " << rep.graph.edges.size() << '\n';
    *os << "path:";
    for (const auto& hop : rep.path.hops) *os << ' ' << hop.slice;
    *os << "\nproduct score: " << rep.path.product_score << '\n';
    for (const auto& wmsg : rep.warnings) *os << "warning: " << wmsg << '\n';
  } else {
    std::cerr << "error: unknown format '" << format << "'\n";
    return 2;
  }
  return 0;
}

int cmd_fit(const std::vector<std::string>& scenario_dirs,
            const std::string& out_path) {
  std::vector<sliceattrib::Scenario> scenarios;
  for (const auto& dir : scenario_dirs) {
    if (!std::filesystem::is_directory(dir)) {
      std::cerr << "error: scenario directory not found: " << dir << '\n';
      return 2;
    }
    scenarios.push_back(sliceattrib::load_scenario(dir));
  }
  log_line("fitting on " + std::to_string(scenarios.size()) + " scenarios");
  const sliceattrib::FitReport rep =
      sliceattrib::fit(scenarios, sliceattrib::FitOptions{});
  nlohmann::json j;
  j["w"] = rep.theta.w;
  j["tau"] = rep.theta.tau;
  j["omega1"] = rep.theta.omega1;
  j["omega2"] = rep.theta.omega2;
  j["objective"] = rep.objective;
  j["iterations"] = rep.iterations;
  j["gradient_norm"] = rep.gradient_norm;
  j["t_eff"] = rep.t_eff;
  j["convergence_radius"] = rep.convergence_radius;
  j["lipschitz_gamma"] = rep.lipschitz_gamma;
  if (out_path.empty()) {
    std::cout << j.dump(2) << '\n';
  } else {
    std::ofstream f(out_path);
    if (!f) throw std::runtime_error("cannot write " + out_path);
    f << j.dump(2) << '\n';
  }
  return 0;
}

int cmd_experiment(const sliceattrib::ExperimentConfig& cfg) {
  log_line("running experiment '" + cfg.experiment + "'");
  const sliceattrib::ExperimentOutcome outcome =
      sliceattrib::run_experiment(cfg);
  for (const auto& check : outcome.checks) {
    std::cout << (check.pass ? "PASS " : "FAIL ") << check.name << " value="
              << check.value << " band=[" << check.lo << ',' << check.hi
              << ']';
    if (!check.note.empty()) std::cout << "  (" << check.note << ')';
    std::cout << '\n';
  }
  std::cout << "results written to " << cfg.out_dir << "/results.json\n";
  return outcome.all_passed ? 0 : 1;
}

int cmd_bounds(const std::string& out_dir) {
  sliceattrib::ExperimentConfig cfg;
  cfg.experiment = "bounds";
  cfg.out_dir = out_dir;
  return cmd_experiment(cfg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Causal attack attribution for sliced-network telemetry"};
  app.require_subcommand(1);

  std::string config_path, in_dir, out_path = "", out_dir = ".",
              format = "json", experiment;
  std::uint64_t seed = 0;
  std::size_t trials = 0, jobs = 1;
  bool no_segmentation = false;
  std::vector<std::string> scenario_dirs;

  auto* sim = app.add_subcommand("simulate", "Generate a synthetic scenario");
  sim->add_option("--config", config_path, "Scenario config JSON");
  sim->add_option("--seed", seed, "Override the scenario seed");
  sim->add_option("--out", out_dir, "Output directory")->required();

  auto* att = app.add_subcommand("attribute", "Attribute a telemetry window");
  att->add_option("--in", in_dir, "Window directory")->required();
  att->add_option("--out", out_path, "Report path (default: stdout)");
  att->add_option("--format", format, "json | summary");
  att->add_flag("--no-segmentation", no_segmentation,
                "Analyze the window as a single segment");

  auto* fit = app.add_subcommand("fit", "Fit model parameters");
  fit->add_option("--scenario", scenario_dirs, "Labeled scenario directory")
      ->required();
  fit->add_option("--out", out_path, "Fit report path (default: stdout)");

  auto* exp = app.add_subcommand("experiment", "Run an evaluation experiment");
  exp->add_option("--name", experiment,
                  "type1 | confounder | fdr-prds | cusum | nonstationary | "
                  "adversarial | noise | ablation | case-study | bounds")
      ->required();
  exp->add_option("--trials", trials, "Trial count (0 = experiment default)");
  exp->add_option("--seed", seed, "Master seed");
  exp->add_option("--jobs", jobs, "Worker threads");
  exp->add_option("--out", out_dir, "Output directory");

  auto* bnd = app.add_subcommand("bounds", "Print certificate arithmetic");
  bnd->add_option("--out", out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed()) return cmd_simulate(config_path, seed, out_dir);
    if (att->parsed())
      return cmd_attribute(in_dir, out_path, format, no_segmentation);
    if (fit->parsed()) return cmd_fit(scenario_dirs, out_path);
    if (exp->parsed()) {
      sliceattrib::ExperimentConfig cfg;
      cfg.experiment = experiment;
      cfg.trials = trials;
      cfg.seed = seed == 0 ? 1 : seed;
      cfg.jobs = jobs;
      cfg.out_dir = out_dir;
      return cmd_experiment(cfg);
    }
    if (bnd->parsed()) return cmd_bounds(out_dir);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
