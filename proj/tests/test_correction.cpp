#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "sliceattrib/correction.hpp"
#include "sliceattrib/fdist.hpp"
#include "sliceattrib/granger.hpp"
#include "sliceattrib/rng.hpp"

using namespace sliceattrib;

namespace {

Eigen::MatrixXd random_orthonormal(Rng& rng, std::size_t n, std::size_t r) {
  Eigen::MatrixXd m(n, r);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < r; ++j) m(i, j) = rng.normal();
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  return Eigen::MatrixXd(qr.householderQ()) .leftCols(r);
}

// Dense reference: materializes the banded Toeplitz plug-in and evaluates the
// trace formulas directly.
Eigen::MatrixXd dense_toeplitz(const AutocovEstimate& ac) {
  const std::size_t n = ac.toeplitz_dim;
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t lag = i > j ? i - j : j - i;
      if (lag <= ac.trunc_lag) g(i, j) = ac.gamma[lag];
    }
  return g;
}

EffectiveDof dense_dof(const Eigen::MatrixXd& a, const Eigen::MatrixXd& g,
                       double rank) {
  const Eigen::MatrixXd ag = a * g;
  const double tr1 = ag.trace();
  const double tr2 = (ag * ag).trace();
  EffectiveDof d;
  d.nu = tr1 * tr1 / tr2;
  d.psi = tr2 / (tr1 * tr1 / rank);
  return d;
}

AutocovEstimate ar1_autocov(std::size_t n, double a, double sigma2,
                            std::size_t trunc) {
  AutocovEstimate ac;
  ac.toeplitz_dim = n;
  ac.trunc_lag = trunc;
  ac.gamma.resize(trunc + 1);
  const double g0 = sigma2 / (1.0 - a * a);
  for (std::size_t l = 0; l <= trunc; ++l)
    ac.gamma[l] = g0 * std::pow(a, static_cast<double>(l));
  return ac;
}

}  // namespace

TEST_CASE("effective dof matches the dense trace oracle") {
  Rng rng(123);
  for (int fixture = 0; fixture < 10; ++fixture) {
    const std::size_t n = 30 + rng.uniform_index(30);
    const std::size_t r = 2 + rng.uniform_index(5);
    const Eigen::MatrixXd q = random_orthonormal(rng, n, r);
    const AutocovEstimate ac =
        ar1_autocov(n, 0.2 + 0.5 * rng.uniform(), 1.0, 4);
    const Eigen::MatrixXd g = dense_toeplitz(ac);

    const EffectiveDof got = effective_dof(q, ac);
    const EffectiveDof want =
        dense_dof(q * q.transpose(), g, static_cast<double>(r));
    CHECK(got.nu == doctest::Approx(want.nu).epsilon(1e-8));
    CHECK(got.psi == doctest::Approx(want.psi).epsilon(1e-8));

    const Eigen::MatrixXd m =
        Eigen::MatrixXd::Identity(n, n) - q * q.transpose();
    const EffectiveDof got_c = effective_dof_complement(q, ac);
    const EffectiveDof want_c = dense_dof(m, g, static_cast<double>(n - r));
    CHECK(got_c.nu == doctest::Approx(want_c.nu).epsilon(1e-8));
    CHECK(got_c.psi == doctest::Approx(want_c.psi).epsilon(1e-8));
  }
}

TEST_CASE("white noise degeneracy: nu = rank, psi = 1") {
  Rng rng(77);
  for (int fixture = 0; fixture < 20; ++fixture) {
    const std::size_t n = 20 + rng.uniform_index(40);
    const std::size_t r = 1 + rng.uniform_index(6);
    const Eigen::MatrixXd q = random_orthonormal(rng, n, r);
    const AutocovEstimate white =
        AutocovEstimate::white(0.5 + rng.uniform(), n);
    const EffectiveDof d = effective_dof(q, white);
    CHECK(d.nu == doctest::Approx(static_cast<double>(r)).epsilon(1e-10));
    CHECK(d.psi == doctest::Approx(1.0).epsilon(1e-10));
    const EffectiveDof dc = effective_dof_complement(q, white);
    CHECK(dc.nu == doctest::Approx(static_cast<double>(n - r)).epsilon(1e-10));
    CHECK(dc.psi == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("white plug-in leaves the F statistic unchanged") {
  Rng rng(5150);
  PairSeries s;
  s.n_resources = 1;
  const std::size_t t_len = 120;
  s.x.resize(t_len);
  s.y.resize(t_len);
  s.z.resize(t_len);
  for (std::size_t t = 0; t < t_len; ++t) {
    s.x[t] = rng.normal();
    s.y[t] = rng.normal();
    s.z[t] = rng.uniform();
  }
  const PairFit fit = fit_models(s, 3, 3, true);
  const RawFStat raw = f_statistic(fit, 3, 3, 1, true);
  const AutocovEstimate white =
      AutocovEstimate::white(1.7, fit.effective_samples);
  for (auto op :
       {CorrectionOperator::kAsWritten, CorrectionOperator::kDifferenceOperator}) {
    const CorrectedFStat c = corrected_f(raw, white, op);
    CHECK(c.f_tilde == doctest::Approx(raw.f).epsilon(1e-9));
    CHECK(c.psi_num == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(c.psi_den == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(c.p_value ==
          doctest::Approx(f_sf(raw.f, static_cast<double>(raw.q_num),
                               static_cast<double>(raw.den_dof)))
              .epsilon(1e-6));
  }
}

TEST_CASE("residual autocovariance tracks an AR(1) profile") {
  Rng rng(31);
  const std::size_t n = 4000;
  const double a = 0.5;
  Eigen::VectorXd resid(n);
  double state = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    state = a * state + rng.normal();
    resid(t) = state;
  }
  const AutocovEstimate ac = estimate_autocov(resid);
  CHECK(ac.toeplitz_dim == n);
  CHECK(ac.trunc_lag == static_cast<std::size_t>(std::floor(std::cbrt(n))));
  REQUIRE(ac.gamma.size() >= 3);
  // Bartlett weight at lag l is 1 - l/(L+1).
  const double l_plus = static_cast<double>(ac.trunc_lag + 1);
  const double ratio1 = ac.gamma[1] / (ac.gamma[0] * (1.0 - 1.0 / l_plus));
  CHECK(ratio1 == doctest::Approx(a).epsilon(0.15));
}

TEST_CASE("approximation-error bound arithmetic") {
  BoundConstants bc;
  CHECK(ks_bound_corrected(300, bc, 5, 5, 3) ==
        doctest::Approx(0.1 * 0.31 / 300.0 + 1.0 * 169.0 / 90000.0)
            .epsilon(1e-12));
  CHECK(ks_bound_iid(300, bc) == doctest::Approx(0.8 * 1.8 / 300.0));
  CHECK(ks_bound_iid_calibrated(300, bc) == doctest::Approx(18.1 / 300.0));
  // Corrected bound decays strictly faster than the naive one.
  CHECK(ks_bound_corrected(1000, bc, 5, 5, 3) <
        ks_bound_iid_calibrated(1000, bc));
}
