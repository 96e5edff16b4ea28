#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <memory>
#include <vector>

#include "sliceattrib/core.hpp"

namespace sliceattrib {

// Least-squares fit of one conditional autoregression.
struct OlsFit {
  Eigen::VectorXd coefficients;  // stacked [intercept, y-lags, (x-lags), z]
  double rss = 0.0;
  Eigen::VectorXd residuals;  // length n = T - max(p,q)
  std::size_t design_rank = 0;
  double hat_trace = 0.0;  // trace of the hat matrix (= rank)
};

// Orthonormal bases for the three projection operators the cumulant
// correction needs.  All are n x r with orthonormal columns.
struct ProjectionHandles {
  Eigen::MatrixXd q_unrestricted;  // span of the full design
  Eigen::MatrixXd q_restricted;    // span of the restricted design
  Eigen::MatrixXd q_difference;    // span of P_U - P_R (residualized x-lags)
};

struct RawFStat {
  double f = 0.0;
  std::size_t q_num = 0;     // numerator dof q
  std::size_t den_dof = 0;   // n - p - q - K - 1
  double rss_u = 0.0;
  double rss_r = 0.0;
  std::shared_ptr<const ProjectionHandles> projections;
};

struct PairFit {
  OlsFit unrestricted;
  OlsFit restricted;
  std::shared_ptr<const ProjectionHandles> projections;
  std::size_t effective_samples = 0;  // rows used: T - max(p,q)
};

// Fits the unrestricted (y-lags + x-lags + contemporaneous z + intercept) and
// restricted (x-lags removed) models on the common effective sample.  Uses a
// column-pivoted QR factorization; throws on short windows and collinear
// designs.  When `condition_on_z` is false the z columns are dropped from
// both designs (the unconditioned baseline used in ablations).
PairFit fit_models(const PairSeries& s, std::size_t p, std::size_t q,
                   bool condition_on_z = true);

// The conditioned Granger F ratio.  Throws on rss_u == 0 (degenerate fit:
// an interpolating model leaves the statistic undefined).
RawFStat f_statistic(const PairFit& fit, std::size_t p, std::size_t q,
                     std::size_t n_resources, bool conditioned_on_z = true);

}  // namespace sliceattrib
