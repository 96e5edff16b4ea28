#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sliceattrib/core.hpp"
#include "sliceattrib/graph.hpp"

namespace sliceattrib {

struct ConfounderPair {
  std::size_t slice_i = 0;
  std::size_t slice_j = 0;
  std::size_t resource = 0;
};

struct AttackHop {
  std::size_t slice = 0;
  std::size_t onset = 0;  // first sample at which the hop is active
  std::size_t lag = 1;
  double coefficient = 0.0;  // 0 for the origin slice
};

struct RegimeChange {
  // Sentinel: the change applies to every slice.
  static constexpr std::size_t kAllSlices = static_cast<std::size_t>(-1);

  std::size_t time = 0;
  double magnitude = 0.0;  // absolute intercept level from `time` onward
  std::size_t slice = kAllSlices;  // restrict the shift to one slice
};

// A lagged cross-slice coupling that is causally real but not part of the
// labeled attack path (used to build competing attribution routes).
struct CrossCoupling {
  std::size_t source = 0;
  std::size_t target = 0;
  std::size_t lag = 1;
  double coefficient = 0.0;
  std::size_t onset = 0;
};

struct ScenarioConfig {
  std::size_t n_slices = 15;
  std::size_t n_resources = 3;
  std::size_t horizon = 300;
  std::size_t lags = 5;  // per-slice AR order
  double spectral_radius = 0.72;
  double innovation_kurtosis = 0.31;  // excess kurtosis of the innovations
  double longrun_ratio = 1.8;  // long-run variance ratio of the innovation
                               // stream (realized by an AR(1) pre-filter)
  // Scale of the white observation-noise channel relative to the latent
  // dynamics (after normalization when `normalize_latent` is set).
  double obs_noise_scale = 1.5;
  // AR root structure of the latent dynamics.  1 (default) draws random
  // stable coefficients rescaled to the target spectral radius.  m > 1 uses
  // the deterministic order-m polynomial with an m-fold real root at the
  // target radius, i.e. strong low-frequency persistence; `lags` is ignored
  // for the latent recursion in that case.
  std::size_t ar_root_multiplicity = 1;
  double confounder_loading = 0.8;
  std::vector<ConfounderPair> confounder_pairs;
  std::vector<AttackHop> attack_path;  // first entry is the origin slice
  std::vector<CrossCoupling> cross_couplings;
  std::vector<RegimeChange> regime_changes;
  // When true, each slice's latent series is rescaled to unit sample variance
  // before couplings, confounders and noise channels are added, so injected
  // signal strengths are comparable across slices.
  bool normalize_latent = false;
  double allocation_noise_sigma = 0.0;
  std::uint64_t seed = 1;

  // Optional explicit static allocation shares, row-major by slice
  // (n_slices * n_resources entries).  Empty means shares are drawn randomly
  // and rescaled to the hot/cold column loads.
  std::vector<double> allocation_shares;

  double sample_period = 0.1;
  double utilization_ar = 0.9;
  double utilization_noise = 0.05;
  double hot_load = 0.93;   // target column sum on confounded resources
  double cold_load = 0.5;   // target column sum elsewhere
};

struct Scenario {
  TelemetryWindow window;
  AttributionPath truth_path;
  std::vector<std::size_t> truth_changepoints;
  ScenarioConfig config;
};

// Student-t dof hitting a target excess kurtosis (6/(nu-4)); infinite
// (Gaussian limit) when the target is 0.
double innovation_dof(double kappa4);

// AR(1) filter coefficient hitting a target long-run variance ratio
// (1+a)/(1-a).
double longrun_filter_coefficient(double sigma_gamma);

// Deterministic scenario generation; byte-identical output for equal seeds.
// Throws if a stable AR coefficient draw cannot be rescaled to the target
// spectral radius within 100 attempts.
Scenario generate(const ScenarioConfig& cfg);

// Companion-matrix spectral radius of an AR(p) coefficient vector.
double ar_spectral_radius(const std::vector<double>& coeffs);

// Copy of the window with iid N(0, sigma^2) noise added to every allocation
// entry, clamped back to [0,1].
TelemetryWindow apply_allocation_noise(const TelemetryWindow& w, double sigma,
                                       std::uint64_t seed);

}  // namespace sliceattrib
