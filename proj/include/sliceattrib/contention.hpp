#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sliceattrib/core.hpp"

namespace sliceattrib {

// Numerically stable logistic function.
double logistic(double x);

// Per-pair resource contention score rho_ij with its per-resource terms.
struct ContentionScore {
  double rho = 0.0;
  std::vector<double> per_resource;  // w_k * A_ik * A_jk * sigma(U_k - tau_k)
};

// rho_ij = sum_k w_k * A_ik * A_jk * sigma(U_k - tau_k).
ContentionScore score(const std::vector<double>& a_i,
                      const std::vector<double>& a_j,
                      const std::vector<double>& u, const ModelParams& params);

// Itakura-Saito divergence B(c || h) = c/h - log(c/h) - 1.
double is_divergence(double c, double h);

// Candidate per-resource contention rules compared against the true
// contention profile c_k(U) via expected Itakura-Saito divergence.
enum class ContentionRule { kSigmoidProduct, kMinSigmoid, kAdditiveSigmoid };

struct RuleComparison {
  double sigmoid_product = 0.0;
  double min_sigmoid = 0.0;
  double additive_sigmoid = 0.0;
  bool degenerate_distribution = false;  // single-atom utilization sample

  double total(ContentionRule r) const {
    switch (r) {
      case ContentionRule::kSigmoidProduct: return sigmoid_product;
      case ContentionRule::kMinSigmoid: return min_sigmoid;
      default: return additive_sigmoid;
    }
  }
};

// Monte Carlo estimate of the expected total I-S divergence per rule over the
// supplied utilization draws (n_draws x K row-major).  The reference profile
// for resource k is c_k * sigma(u - tau_k): the true contention intensity the
// rules are meant to track.  Requires >= 1000 draws.
RuleComparison compare_rules(const std::vector<double>& utilization_draws,
                             std::size_t n_resources,
                             const std::vector<double>& c_k,
                             const std::vector<double>& a_i,
                             const std::vector<double>& a_j,
                             const ModelParams& params);

}  // namespace sliceattrib
