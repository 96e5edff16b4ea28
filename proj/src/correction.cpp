#include "sliceattrib/correction.hpp"

#include <cmath>
#include <stdexcept>

#include "sliceattrib/fdist.hpp"

namespace sliceattrib {

AutocovEstimate AutocovEstimate::white(double variance, std::size_t dim) {
  AutocovEstimate a;
  a.gamma = {variance};
  a.trunc_lag = 0;
  a.toeplitz_dim = dim;
  return a;
}

AutocovEstimate AutocovEstimate::geometric(double gamma0, double rho,
                                           std::size_t dim) {
  if (!(gamma0 > 0.0)) throw std::invalid_argument("gamma0 must be > 0");
  if (!(rho > -1.0 && rho < 1.0))
    throw std::invalid_argument("decay coefficient must lie in (-1,1)");
  if (dim < 8) throw std::invalid_argument("plug-in needs dim >= 8");
  const std::size_t lag =
      static_cast<std::size_t>(std::floor(std::cbrt(static_cast<double>(dim))));
  AutocovEstimate a;
  a.trunc_lag = lag;
  a.toeplitz_dim = dim;
  a.gamma.assign(lag + 1, gamma0);
  double rh = 1.0;
  for (std::size_t h = 1; h <= lag; ++h) {
    rh *= rho;
    a.gamma[h] = gamma0 * rh *
                 (1.0 - static_cast<double>(h) / static_cast<double>(lag + 1));
  }
  return a;
}

AutocovEstimate estimate_autocov(const Eigen::VectorXd& residuals) {
  const std::size_t n = static_cast<std::size_t>(residuals.size());
  if (n < 8) throw std::invalid_argument("autocovariance needs >= 8 samples");
  const std::size_t lag =
      static_cast<std::size_t>(std::floor(std::cbrt(static_cast<double>(n))));

  AutocovEstimate a;
  a.trunc_lag = lag;
  a.toeplitz_dim = n;
  a.gamma.assign(lag + 1, 0.0);
  const double mean = residuals.mean();
  for (std::size_t h = 0; h <= lag; ++h) {
    double s = 0.0;
    for (std::size_t t = 0; t + h < n; ++t)
      s += (residuals(static_cast<Eigen::Index>(t)) - mean) *
           (residuals(static_cast<Eigen::Index>(t + h)) - mean);
    s /= static_cast<double>(n);
    const double weight =
        h == 0 ? 1.0
               : 1.0 - static_cast<double>(h) / static_cast<double>(lag + 1);
    a.gamma[h] = weight * s;
  }
  if (a.gamma[0] <= 0.0) throw std::runtime_error("zero variance residuals");
  return a;
}

namespace {

// B = Gamma * Q for the banded Toeplitz Gamma (band = trunc_lag).
Eigen::MatrixXd banded_toeplitz_product(const AutocovEstimate& a,
                                        const Eigen::MatrixXd& q) {
  const Eigen::Index n = q.rows();
  const Eigen::Index lag = static_cast<Eigen::Index>(a.trunc_lag);
  Eigen::MatrixXd b = a.gamma[0] * q;
  for (Eigen::Index h = 1; h <= lag; ++h) {
    const double g = a.gamma[static_cast<std::size_t>(h)];
    if (g == 0.0) continue;
    b.topRows(n - h) += g * q.bottomRows(n - h);
    b.bottomRows(n - h) += g * q.topRows(n - h);
  }
  return b;
}

struct Traces {
  double t1 = 0.0;  // tr(A Gamma)
  double t2 = 0.0;  // tr(A Gamma A Gamma)
  double tg = 0.0;  // tr(Gamma)
  double tgg = 0.0; // tr(Gamma^2)
  double tpgg = 0.0;  // tr(P Gamma^2)
};

Traces projection_traces(const Eigen::MatrixXd& q, const AutocovEstimate& a) {
  Traces tr;
  const Eigen::MatrixXd b = banded_toeplitz_product(a, q);
  const Eigen::MatrixXd s = q.transpose() * b;  // r x r, symmetric
  tr.t1 = s.trace();
  tr.t2 = s.squaredNorm();
  tr.tpgg = b.squaredNorm();

  const double n = static_cast<double>(a.toeplitz_dim);
  tr.tg = n * a.gamma[0];
  tr.tgg = n * a.gamma[0] * a.gamma[0];
  for (std::size_t h = 1; h <= a.trunc_lag; ++h)
    tr.tgg += 2.0 * (n - static_cast<double>(h)) * a.gamma[h] * a.gamma[h];
  return tr;
}

EffectiveDof dof_from(double t1, double t2, double rank) {
  if (t1 <= 0.0)
    throw std::runtime_error("invalid autocovariance: tr(A Gamma) <= 0");
  if (t2 <= 0.0)
    throw std::runtime_error("invalid autocovariance: tr(A Gamma A Gamma) <= 0");
  EffectiveDof d;
  d.nu = t1 * t1 / t2;
  d.psi = t2 / (t1 * t1 / rank);
  return d;
}

}  // namespace

EffectiveDof effective_dof(const Eigen::MatrixXd& q_basis,
                           const AutocovEstimate& autocov) {
  if (q_basis.cols() == 0)
    throw std::invalid_argument("rank-0 projection operator");
  if (static_cast<std::size_t>(q_basis.rows()) != autocov.toeplitz_dim)
    throw std::invalid_argument("projection/autocovariance dimension mismatch");
  const Traces tr = projection_traces(q_basis, autocov);
  return dof_from(tr.t1, tr.t2, static_cast<double>(q_basis.cols()));
}

EffectiveDof effective_dof_complement(const Eigen::MatrixXd& q_basis,
                                      const AutocovEstimate& autocov) {
  if (static_cast<std::size_t>(q_basis.rows()) != autocov.toeplitz_dim)
    throw std::invalid_argument("projection/autocovariance dimension mismatch");
  const Traces tr = projection_traces(q_basis, autocov);
  const double t1 = tr.tg - tr.t1;
  const double t2 = tr.tgg - 2.0 * tr.tpgg + tr.t2;
  const double rank =
      static_cast<double>(autocov.toeplitz_dim) - static_cast<double>(q_basis.cols());
  return dof_from(t1, t2, rank);
}

CorrectedFStat corrected_f(const RawFStat& raw, const AutocovEstimate& autocov,
                           CorrectionOperator op) {
  if (!raw.projections) throw std::invalid_argument("missing projection handles");
  const ProjectionHandles& h = *raw.projections;

  const EffectiveDof num_dof = effective_dof(h.q_difference, autocov);
  const EffectiveDof den_dof = effective_dof_complement(h.q_unrestricted, autocov);
  double psi_num;
  if (op == CorrectionOperator::kAsWritten) {
    psi_num = effective_dof(h.q_restricted, autocov).psi;
  } else {
    psi_num = num_dof.psi;
  }

  CorrectedFStat c;
  c.nu_num = num_dof.nu;
  c.nu_den = den_dof.nu;
  c.psi_num = psi_num;
  c.psi_den = den_dof.psi;

  const double num_ss = std::max(0.0, raw.rss_r - raw.rss_u);
  const double num = (num_ss / psi_num) / c.nu_num;
  const double den = (raw.rss_u / c.psi_den) / c.nu_den;
  if (den <= 0.0) throw std::runtime_error("degenerate fit: zero residual variance");
  c.f_tilde = num / den;
  c.p_value = f_sf(c.f_tilde, c.nu_num, c.nu_den);
  return c;
}

double ks_bound_corrected(std::size_t t, const BoundConstants& c,
                          std::size_t p, std::size_t q, std::size_t k) {
  if (t == 0) throw std::invalid_argument("T must be positive");
  const double td = static_cast<double>(t);
  const double dims = static_cast<double>(p + q + k);
  return c.c1 * c.kappa4 / td + c.c2 * dims * dims / (td * td);
}

double ks_bound_iid(std::size_t t, const BoundConstants& c) {
  if (t == 0) throw std::invalid_argument("T must be positive");
  return c.c3 * c.sigma_gamma / static_cast<double>(t);
}

double ks_bound_iid_calibrated(std::size_t t, const BoundConstants& c) {
  if (t == 0) throw std::invalid_argument("T must be positive");
  return c.c3_sigma / static_cast<double>(t);
}

}  // namespace sliceattrib
