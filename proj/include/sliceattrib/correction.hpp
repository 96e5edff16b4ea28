#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "sliceattrib/core.hpp"
#include "sliceattrib/granger.hpp"

namespace sliceattrib {

// Bartlett-weighted residual autocovariance, truncated at L = floor(n^{1/3}).
// Implicitly defines the banded Toeplitz plug-in matrix used by the
// effective-dof traces.
struct AutocovEstimate {
  std::vector<double> gamma;  // gamma[0..L], gamma[0] unweighted
  std::size_t trunc_lag = 0;
  std::size_t toeplitz_dim = 0;

  // White-noise plug-in (Gamma = variance * I), used for the i.i.d.
  // degeneracy checks and as the uncorrected baseline.
  static AutocovEstimate white(double variance, std::size_t dim);

  // Calibrated geometric-decay plug-in: gamma_h = gamma0 * rho^h, Bartlett
  // tapered at L = floor(dim^{1/3}).  Regressions that include the target's
  // own lags whiten the *residual* sample autocovariance even when the
  // innovation stream is serially dependent, so the residual-estimated
  // plug-in cannot see that dependence; this template injects the known
  // innovation pre-filter coefficient instead.
  static AutocovEstimate geometric(double gamma0, double rho, std::size_t dim);
};

AutocovEstimate estimate_autocov(const Eigen::VectorXd& residuals);

struct EffectiveDof {
  double nu = 0.0;
  double psi = 0.0;
};

// Effective degrees of freedom and variance inflation of the quadratic form
// with projection A = Q Q^T against the banded Toeplitz plug-in:
//   nu = tr(A G)^2 / tr(A G A G),  psi = tr(A G A G) / (tr(A G)^2 / r).
// Cost O(dim * L * r): the full T x T product is never materialized.
EffectiveDof effective_dof(const Eigen::MatrixXd& q_basis,
                           const AutocovEstimate& autocov);

// Same quantities for the residual-maker complement M = I - Q Q^T.
EffectiveDof effective_dof_complement(const Eigen::MatrixXd& q_basis,
                                      const AutocovEstimate& autocov);

// Which projection supplies the numerator variance-inflation factor.  The
// moment-matching statement applies the restricted projection's psi; the
// matching derivation rescales the difference operator P_U - P_R instead,
// which is the standard quadratic-form reading and the one whose null
// rejection rates match the documented reference bands.  Both are supported;
// `kDifferenceOperator` is the default.
enum class CorrectionOperator { kAsWritten, kDifferenceOperator };

struct CorrectedFStat {
  double f_tilde = 0.0;
  double nu_num = 0.0;
  double nu_den = 0.0;
  double psi_num = 0.0;
  double psi_den = 0.0;
  double p_value = 1.0;
};

CorrectedFStat corrected_f(
    const RawFStat& raw, const AutocovEstimate& autocov,
    CorrectionOperator op = CorrectionOperator::kDifferenceOperator);

// Certificate bound on the Kolmogorov-Smirnov error of the corrected
// statistic's F approximation: C1*kappa4/T + C2*(p+q+K)^2/T^2.
double ks_bound_corrected(std::size_t t, const BoundConstants& c,
                          std::size_t p, std::size_t q, std::size_t k);

// KS error of the naive i.i.d. F approximation: C3*Sigma_gamma/T.
double ks_bound_iid(std::size_t t, const BoundConstants& c);

// Table-calibrated variant using the fitted C3*Sigma_gamma product.
double ks_bound_iid_calibrated(std::size_t t, const BoundConstants& c);

}  // namespace sliceattrib
