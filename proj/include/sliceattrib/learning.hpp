#pragma once

#include <cstddef>
#include <vector>

#include "sliceattrib/core.hpp"
#include "sliceattrib/simulator.hpp"

namespace sliceattrib {

struct FitReport {
  ModelParams theta;
  double objective = 0.0;
  std::size_t iterations = 0;
  double gradient_norm = 0.0;
  double t_eff = 0.0;
  double convergence_radius = 0.0;
  double lipschitz_gamma = 0.0;
};

struct FitOptions {
  double lambda = 1e-3;
  double gradient_tolerance = 1e-6;
  std::size_t max_iterations = 10000;
  double initial_step = 0.5;
  double delta = 0.05;  // confidence level for the radius report
};

// Regularized maximum-likelihood fit of {w_k, tau_k, omega1, omega2} from
// labeled scenarios.  The per-hop likelihood is a softmax over the fused
// strengths of all edges leaving the current slice; optimization is
// deterministic full-batch projected gradient ascent with backtracking.
FitReport fit(const std::vector<Scenario>& scenarios, const FitOptions& opts);

// Regularized path log-likelihood at theta (the fit objective), exposed for
// gradient checking.
double path_log_likelihood(const std::vector<Scenario>& scenarios,
                           const ModelParams& theta, double lambda);

// T * beta / (C_beta (1 - e^{-beta}) + beta).
double effective_sample_size(double t, double c_beta, double beta_mix);

// (2/lambda) * sqrt((2K+2) * log(2/delta) / t_eff).
double convergence_radius(double t_eff, std::size_t k, double lambda,
                          double delta);

// omega2 * N * K * max_k w_k / 4.
double lipschitz_gamma(double omega2, std::size_t n, std::size_t k,
                       double w_max);

}  // namespace sliceattrib
