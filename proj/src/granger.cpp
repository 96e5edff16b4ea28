#include "sliceattrib/granger.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace sliceattrib {

namespace {

constexpr double kRankTol = 1e-10;  // smallest/largest R diagonal ratio

struct Design {
  Eigen::MatrixXd x_u;  // n x (1 + p + q + K)
  Eigen::MatrixXd x_r;  // n x (1 + p + K)
  Eigen::VectorXd y;    // n
  std::size_t q_cols_begin = 0;  // x-lag block offset within x_u
};

Design build_design(const PairSeries& s, std::size_t p, std::size_t q,
                    bool condition_on_z) {
  const std::size_t t_len = s.length();
  const std::size_t m = std::max(p, q);
  const std::size_t k = condition_on_z ? s.n_resources : 0;
  const std::size_t cols_u = 1 + p + q + k;
  if (t_len <= m || t_len - m <= cols_u)
    throw std::invalid_argument(
        "window too short: need T - max(p,q) > p + q + K + 1, have T=" +
        std::to_string(t_len));
  const std::size_t n = t_len - m;

  Design d;
  d.x_u.resize(n, cols_u);
  d.x_r.resize(n, cols_u - q);
  d.y.resize(n);
  d.q_cols_begin = 1 + p;
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t t = m + r;
    d.y(r) = s.y[t];
    d.x_u(r, 0) = 1.0;
    d.x_r(r, 0) = 1.0;
    for (std::size_t i = 1; i <= p; ++i) {
      d.x_u(r, i) = s.y[t - i];
      d.x_r(r, i) = s.y[t - i];
    }
    for (std::size_t j = 1; j <= q; ++j) d.x_u(r, p + j) = s.x[t - j];
    for (std::size_t kk = 0; kk < k; ++kk) {
      const double z = s.z[t * s.n_resources + kk];
      d.x_u(r, 1 + p + q + kk) = z;
      d.x_r(r, 1 + p + kk) = z;
    }
  }
  return d;
}

OlsFit solve_ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  const Eigen::MatrixXd& r_mat = qr.matrixR();
  const std::size_t cols = static_cast<std::size_t>(x.cols());
  double max_diag = 0.0;
  for (std::size_t i = 0; i < cols; ++i)
    max_diag = std::max(max_diag, std::fabs(r_mat(i, i)));
  for (std::size_t i = 0; i < cols; ++i) {
    if (std::fabs(r_mat(i, i)) < kRankTol * max_diag) {
      const std::size_t original = static_cast<std::size_t>(
          qr.colsPermutation().indices()(static_cast<Eigen::Index>(i)));
      throw std::runtime_error("collinear design: column " +
                               std::to_string(original) +
                               " is linearly dependent");
    }
  }
  OlsFit fit;
  fit.coefficients = qr.solve(y);
  fit.residuals = y - x * fit.coefficients;
  fit.rss = fit.residuals.squaredNorm();
  fit.design_rank = cols;
  fit.hat_trace = static_cast<double>(cols);
  return fit;
}

// Thin orthonormal basis of the column span.
Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& x) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
  return qr.householderQ() *
         Eigen::MatrixXd::Identity(x.rows(), x.cols());
}

}  // namespace

PairFit fit_models(const PairSeries& s, std::size_t p, std::size_t q,
                   bool condition_on_z) {
  if (s.x.size() != s.y.size() ||
      s.z.size() != s.y.size() * s.n_resources)
    throw std::invalid_argument("pair series length mismatch");
  const Design d = build_design(s, p, q, condition_on_z);

  PairFit out;
  out.unrestricted = solve_ols(d.x_u, d.y);
  out.restricted = solve_ols(d.x_r, d.y);
  out.effective_samples = static_cast<std::size_t>(d.y.size());

  auto handles = std::make_shared<ProjectionHandles>();
  handles->q_unrestricted = orthonormal_basis(d.x_u);
  handles->q_restricted = orthonormal_basis(d.x_r);
  // Span of P_U - P_R: the x-lag block residualized against the restricted
  // design, then orthonormalized.
  Eigen::MatrixXd xlags = d.x_u.middleCols(
      static_cast<Eigen::Index>(d.q_cols_begin), static_cast<Eigen::Index>(q));
  xlags -= handles->q_restricted *
           (handles->q_restricted.transpose() * xlags);
  handles->q_difference = orthonormal_basis(xlags);
  out.projections = std::move(handles);
  return out;
}

RawFStat f_statistic(const PairFit& fit, std::size_t p, std::size_t q,
                     std::size_t n_resources, bool conditioned_on_z) {
  const std::size_t n = fit.effective_samples;
  const std::size_t k = conditioned_on_z ? n_resources : 0;
  const std::size_t params = 1 + p + q + k;
  if (n <= params) throw std::invalid_argument("window too short");
  const std::size_t den_dof = n - params;

  const double rss_u = fit.unrestricted.rss;
  const double rss_r = fit.restricted.rss;
  const double tss = rss_r + 1.0;
  if (rss_u <= 1e-13 * tss)
    throw std::runtime_error("degenerate fit: zero residual variance");

  RawFStat f;
  f.q_num = q;
  f.den_dof = den_dof;
  f.rss_u = rss_u;
  f.rss_r = rss_r;
  f.projections = fit.projections;
  const double num = std::max(0.0, rss_r - rss_u) / static_cast<double>(q);
  f.f = num / (rss_u / static_cast<double>(den_dof));
  return f;
}

}  // namespace sliceattrib
