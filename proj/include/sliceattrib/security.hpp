#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sliceattrib/core.hpp"

namespace sliceattrib {

enum class SpoofStrategy { kUniformUp, kUniformDown, kWorstCaseSign, kRandom };

// Utilization adversary: per sample, at most `k` channels perturbed, each by
// at most `delta` in absolute value, clamped back to [0,1].
struct AdversarySpec {
  double delta = 0.0;
  std::size_t k = 1;
  SpoofStrategy strategy = SpoofStrategy::kUniformUp;
  std::uint64_t seed = 1;
};

struct PrivacySpec {
  double epsilon = 0.89;
  double dp_delta = 0.02;
  double sensitivity = 0.0959;  // Delta_f
  std::size_t path_len = 5;     // L
  std::size_t n_slices = 15;    // N
  double path_entropy = 0.0;    // H(C*) in nats
};

// Perturbs a T x K utilization series (row-major).  Channel choice for
// worst-case-sign uses the per-pair contention gradient sign, supplied as the
// per-channel preferred signs; uniform strategies use channels 0..k-1.
std::vector<double> spoof(const std::vector<double>& u_series,
                          std::size_t n_resources, const AdversarySpec& spec,
                          const std::vector<double>& preferred_sign = {});

// W_max * k * delta / 4.
double contention_perturbation_bound(double w_max, std::size_t k, double delta);

// fdr0 + C4 * omega2 * W_max * k * delta * sqrt(K * ln(N / alpha)).
double fdr_inflation_bound(double fdr0, double delta, std::size_t k,
                           std::size_t n_resources, std::size_t n_slices,
                           double alpha, double omega2, double w_max,
                           double c4);

struct BreakdownPoint {
  double proof_form = 0.0;      // omega1 * delta_phi / (omega2 * W_max * k)
  double statement_form = 0.0;  // same with an extra factor 1/4
};

BreakdownPoint breakdown_point(double omega1, double omega2, double w_max,
                               std::size_t k, double delta_phi);

// sensitivity * sqrt(2 ln(1.25 / dp_delta)) / epsilon.
double gaussian_dp_sigma(const PrivacySpec& spec);

// Adds iid N(0, sigma^2) noise to every fused strength, clamped to [0,1].
std::vector<double> dp_perturb(const std::vector<double>& gammas,
                               double sigma_dp, std::uint64_t seed);

struct PrivacyBound {
  double value = 0.0;
  bool vacuous = false;  // nonpositive bound carries no information
};

// H - 1 - ln(2 N^L), natural log.
PrivacyBound privacy_floor(std::size_t n, std::size_t l, double path_entropy);

// (H - 1 - ln(2 N^L)) / (L ln N) - ln(1 / dp_delta) / (L ln N).
PrivacyBound min_epsilon(std::size_t n, std::size_t l, double dp_delta,
                         double path_entropy);

}  // namespace sliceattrib
