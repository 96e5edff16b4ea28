#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace sliceattrib {

// One analysis window of sliced-network telemetry: per-slice metric vectors,
// the resource allocation matrix and the shared utilization vector, all on a
// common sampling grid.
struct TelemetryWindow {
  std::size_t n_slices = 0;    // N
  std::size_t n_resources = 0; // K
  std::size_t horizon = 0;     // T samples
  std::size_t n_metrics = 1;   // d metrics per slice
  double sample_period = 0.1;  // seconds

  // telemetry[t*N*d + i*d + c]: metric c of slice i at time t
  std::vector<double> telemetry;
  // allocation[t*N*K + i*K + k] in [0,1]
  std::vector<double> allocation;
  // utilization[t*K + k] in [0,1]
  std::vector<double> utilization;

  double tele(std::size_t t, std::size_t i, std::size_t c) const {
    return telemetry[(t * n_slices + i) * n_metrics + c];
  }
  double& tele(std::size_t t, std::size_t i, std::size_t c) {
    return telemetry[(t * n_slices + i) * n_metrics + c];
  }
  double alloc(std::size_t t, std::size_t i, std::size_t k) const {
    return allocation[(t * n_slices + i) * n_resources + k];
  }
  double& alloc(std::size_t t, std::size_t i, std::size_t k) {
    return allocation[(t * n_slices + i) * n_resources + k];
  }
  double util(std::size_t t, std::size_t k) const {
    return utilization[t * n_resources + k];
  }
  double& util(std::size_t t, std::size_t k) {
    return utilization[t * n_resources + k];
  }

  static TelemetryWindow zeros(std::size_t n, std::size_t k, std::size_t t,
                               std::size_t d = 1, double period = 0.1);
};

// The scalar pair extracted for one ordered slice pair: source series x,
// target series y, and the contemporaneous utilization covariates z.
struct PairSeries {
  std::vector<double> x;  // length T
  std::vector<double> y;  // length T
  std::vector<double> z;  // T x K row-major
  std::size_t n_resources = 0;

  std::size_t length() const { return y.size(); }
};

// Fused-model parameters: per-resource contention weights and thresholds,
// evidence-fusion weights, regularization and test configuration.
struct ModelParams {
  std::vector<double> w;    // K positive resource weights
  std::vector<double> tau;  // K utilization thresholds
  double omega1 = 0.67;
  double omega2 = 0.33;
  double lambda = 1e-3;
  std::size_t p = 5;  // target-lag order
  std::size_t q = 5;  // source-lag order
  double alpha = 0.05;
  // Graph acceptance threshold on the fused score.  The normalized-F term is
  // min-max scaled within a segment, so equally strong edges on one causal
  // chain spread well below 1; 0.30 keeps every variance-equalized chain hop
  // while staying far above the fused score of null pairs that survive the
  // FDR step.
  double tau_causal = 0.30;

  static ModelParams defaults(std::size_t n_resources = 3);
};

// Calibrated constants entering the certificate formulas.  These are not
// derived from data; provenance is documented in the shipped config templates.
struct BoundConstants {
  double c1 = 0.1;
  double c2 = 1.0;
  double c3 = 0.8;
  double c4 = 10.1;        // FDR-inflation slope, in percentage points
  double c3_sigma = 18.1;  // calibrated C3 * Sigma_gamma product for KS tables
  double kappa4 = 0.31;    // innovation excess kurtosis
  double sigma_gamma = 1.8;  // long-run variance ratio
  double c_beta = 2.1;       // mixing prefactor
  double beta_mix = 0.329;   // mixing exponent
};

// Half-open sample-index range [start, end).  detection_delay is only
// populated by the simulator as ground truth.
struct Segment {
  std::size_t start = 0;
  std::size_t end = 0;
  double detection_delay = -1.0;  // < 0 means absent

  std::size_t length() const { return end - start; }
};

struct Violation {
  std::string field;
  std::string index;
  double observed = 0.0;
  std::string message;
};

// Returns an empty list iff all TelemetryWindow invariants hold.  Never
// throws: validation reports, it does not abort.
std::vector<Violation> validate_window(const TelemetryWindow& w);

// Projects the ordered pair (source i, target j) onto scalar series using the
// given metric coordinate.  Throws std::invalid_argument for self-pairs and
// std::out_of_range for bad indices.
PairSeries extract_pair(const TelemetryWindow& w, std::size_t i, std::size_t j,
                        std::size_t coord = 0);

}  // namespace sliceattrib
