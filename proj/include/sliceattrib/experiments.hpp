#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "sliceattrib/core.hpp"
#include "sliceattrib/inference.hpp"
#include "sliceattrib/simulator.hpp"

namespace sliceattrib {

struct WilsonInterval {
  double rate = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

// 95% Wilson score interval for a binomial rate.
WilsonInterval wilson_interval(std::size_t successes, std::size_t trials);

// Percentile bootstrap CI for a mean (1000 resamples, 95%).
struct BootstrapInterval {
  double mean = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};
BootstrapInterval bootstrap_mean(const std::vector<double>& values,
                                 std::uint64_t seed,
                                 std::size_t resamples = 1000);

// Runs fn(trial) for trial in [0, n) across `jobs` workers.  Each trial must
// derive its own RNG stream from the master seed, so results are independent
// of the schedule.
void parallel_for(std::size_t n, std::size_t jobs,
                  const std::function<void(std::size_t)>& fn);

// F1 between the consecutive-hop edge sets of two paths (1.0 if both empty).
double edge_f1(const AttributionPath& decoded, const AttributionPath& truth);

struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  std::string note;
};

// --- type1: null rejection rates, corrected vs uncorrected -----------------
struct Type1Row {
  std::size_t horizon = 0;
  WilsonInterval uncorrected;
  WilsonInterval corrected;             // difference-operator psi (default)
  WilsonInterval corrected_restricted;  // restricted-projection psi
  double ks_bound_iid = 0.0;
  double ks_bound_corrected = 0.0;
};
std::vector<Type1Row> run_type1(const std::vector<std::size_t>& horizons,
                                std::size_t trials, std::uint64_t seed,
                                std::size_t jobs);

// --- confounder suppression -------------------------------------------------
struct ConfounderResult {
  WilsonInterval conditioned;
  WilsonInterval unconditioned;
};
ConfounderResult run_confounder(std::size_t trials, std::uint64_t seed,
                                std::size_t jobs);

// --- FDR under positively dependent null ensembles --------------------------
struct FdrResult {
  double empirical_fdr = 0.0;
  double alpha = 0.05;
  std::size_t trials = 0;
  bool simes_le_union_everywhere = true;
};
FdrResult run_fdr_prds(std::size_t trials, std::uint64_t seed,
                       std::size_t jobs);

// --- CUSUM calibration -------------------------------------------------------
struct CusumResult {
  WilsonInterval false_alarm;  // per stationary window
  double mean_delay = 0.0;
  double delay_bound = 0.0;  // h / KL + 1
  bool segmented_equals_unsegmented = true;
};
CusumResult run_cusum(std::size_t trials, std::uint64_t seed,
                      std::size_t jobs);

// --- nonstationary recovery --------------------------------------------------
struct NonstationaryResult {
  BootstrapInterval segmented;
  BootstrapInterval single_window;
  double margin = 0.0;  // segmented - single, in accuracy points
};
NonstationaryResult run_nonstationary(std::size_t scenarios,
                                      std::uint64_t seed, std::size_t jobs);

// --- adversarial certificate -------------------------------------------------
struct AdversarialRow {
  double delta = 0.0;
  double empirical_fdr_pp = 0.0;  // percentage points
  double bound_pp = 0.0;
};
struct AdversarialResult {
  std::vector<AdversarialRow> rows;
  double breakdown_proof = 0.0;
  double breakdown_statement = 0.0;
  bool no_flip_below_breakdown = true;
};
AdversarialResult run_adversarial(std::size_t trials_per_delta,
                                  std::uint64_t seed, std::size_t jobs);

// --- allocation measurement noise ---------------------------------------------
struct NoiseRow {
  double sigma = 0.0;
  BootstrapInterval accuracy;
};
std::vector<NoiseRow> run_noise(std::size_t scenarios, std::uint64_t seed,
                                std::size_t jobs);

// --- ablations -----------------------------------------------------------------
struct AblationRow {
  std::string variant;
  BootstrapInterval accuracy;
};
std::vector<AblationRow> run_ablation(std::size_t scenarios,
                                      std::uint64_t seed, std::size_t jobs);

// --- case study ------------------------------------------------------------------
struct CaseStudyResult {
  std::size_t runs = 0;
  std::size_t hop_exact = 0;       // decoded path equals truth exactly
  std::size_t zero_false_edges = 0;
  std::size_t full_success = 0;    // both at once
  WilsonInterval success;
};
CaseStudyResult run_case_study(std::size_t runs, std::uint64_t seed,
                               std::size_t jobs);

// --- certificate arithmetic --------------------------------------------------------
struct BoundsReport {
  double t_eff_300 = 0.0;
  double convergence_radius = 0.0;
  double corollary_threshold = 0.0;   // formula result
  double corollary_stated = 206.0;    // published value, discrepancy flagged
  double breakdown_proof = 0.0;
  double breakdown_statement = 0.0;
  double sigma_dp = 0.0;
  double privacy_floor_value = 0.0;
  bool privacy_floor_vacuous = false;
  std::vector<std::pair<std::size_t, double>> ks_table;  // (T, calibrated bound)
  std::vector<double> fdr_bound_column;  // at delta {0.1,0.25,0.5,0.75,1.0}
  double simes_example = 0.0;
  std::vector<std::string> notes;
};
BoundsReport run_bounds();

// --- CLI-facing dispatcher ------------------------------------------------------------
struct ExperimentConfig {
  std::string experiment;  // type1 | nonstationary | adversarial | noise |
                           // ablation | case-study | bounds
  std::size_t trials = 0;  // 0 = experiment default
  std::uint64_t seed = 1;
  std::size_t jobs = 1;
  std::string out_dir = ".";
};

struct ExperimentOutcome {
  std::string results_json;
  std::string results_csv;
  std::vector<CheckResult> checks;
  bool all_passed = true;
};

// Runs the named experiment and writes results.json / results.csv under
// cfg.out_dir.  Throws on unknown experiment names.
ExperimentOutcome run_experiment(const ExperimentConfig& cfg);

// FNV-1a hash of the canonical config string, embedded in every report.
std::uint64_t config_hash(const std::string& canonical);

}  // namespace sliceattrib
