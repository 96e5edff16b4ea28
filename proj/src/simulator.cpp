#include "sliceattrib/simulator.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sliceattrib/rng.hpp"

namespace sliceattrib {

double innovation_dof(double kappa4) {
  if (kappa4 < 0.0)
    throw std::invalid_argument("kurtosis target must be >= 0");
  if (kappa4 == 0.0) return std::numeric_limits<double>::infinity();
  return 4.0 + 6.0 / kappa4;
}

double longrun_filter_coefficient(double sigma_gamma) {
  if (!(sigma_gamma >= 1.0))
    throw std::invalid_argument("long-run ratio must be >= 1");
  return (sigma_gamma - 1.0) / (sigma_gamma + 1.0);
}

double ar_spectral_radius(const std::vector<double>& coeffs) {
  const std::size_t p = coeffs.size();
  if (p == 0) return 0.0;
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(p, p);
  for (std::size_t m = 0; m < p; ++m) companion(0, m) = coeffs[m];
  for (std::size_t m = 1; m < p; ++m) companion(m, m - 1) = 1.0;
  return companion.eigenvalues().cwiseAbs().maxCoeff();
}

namespace {

constexpr std::size_t kBurnIn = 200;

double draw_innovation(Rng& rng, double dof) {
  if (std::isinf(dof)) return rng.normal();
  return rng.student_t_unit_variance(dof);
}

// Random AR(p) coefficients rescaled so the companion spectral radius equals
// the target exactly (scaling every root by c scales coefficient m by c^m).
std::vector<double> draw_ar_coefficients(Rng& rng, std::size_t p,
                                         double target) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    std::vector<double> a(p);
    for (std::size_t m = 0; m < p; ++m)
      a[m] = rng.uniform(-0.6, 0.6) / static_cast<double>(m + 1);
    const double r0 = ar_spectral_radius(a);
    if (r0 < 1e-8) continue;
    const double c = target / r0;
    double cm = 1.0;
    for (std::size_t m = 0; m < p; ++m) {
      cm *= c;
      a[m] *= cm;
    }
    const double r = ar_spectral_radius(a);
    if (std::fabs(r - target) <= 0.02) return a;
  }
  throw std::runtime_error("could not satisfy spectral radius");
}

// Coefficients of the order-m recursion whose characteristic polynomial is
// (1 - r L)^m: a_j = (-1)^{j+1} C(m,j) r^j, an m-fold real root at radius r.
std::vector<double> repeated_root_coefficients(std::size_t m, double r) {
  if (m == 0 || m > 12)
    throw std::invalid_argument("root multiplicity must lie in [1,12]");
  std::vector<double> a(m);
  double binom = 1.0, rj = 1.0;
  for (std::size_t j = 1; j <= m; ++j) {
    binom *= static_cast<double>(m - j + 1) / static_cast<double>(j);
    rj *= r;
    a[j - 1] = (j % 2 == 1 ? 1.0 : -1.0) * binom * rj;
  }
  return a;
}

}  // namespace

Scenario generate(const ScenarioConfig& cfg) {
  if (!(cfg.spectral_radius > 0.0 && cfg.spectral_radius < 1.0))
    throw std::invalid_argument("spectral radius must lie in (0,1)");
  for (std::size_t l = 1; l < cfg.attack_path.size(); ++l)
    if (cfg.attack_path[l].onset <= cfg.attack_path[l - 1].onset)
      throw std::invalid_argument("attack onsets must be strictly increasing");
  for (const auto& hop : cfg.attack_path)
    if (hop.slice >= cfg.n_slices || hop.onset >= cfg.horizon)
      throw std::invalid_argument("attack hop out of range");
  for (const auto& rc : cfg.regime_changes) {
    if (rc.time >= cfg.horizon)
      throw std::invalid_argument("regime change beyond horizon");
    if (rc.slice != RegimeChange::kAllSlices && rc.slice >= cfg.n_slices)
      throw std::invalid_argument("regime change slice out of range");
  }
  for (const auto& cc : cfg.cross_couplings)
    if (cc.source >= cfg.n_slices || cc.target >= cfg.n_slices ||
        cc.source == cc.target || cc.onset >= cfg.horizon || cc.lag == 0)
      throw std::invalid_argument("cross coupling out of range");
  if (!cfg.allocation_shares.empty() &&
      cfg.allocation_shares.size() != cfg.n_slices * cfg.n_resources)
    throw std::invalid_argument("allocation share table has wrong size");

  const std::size_t n = cfg.n_slices;
  const std::size_t k = cfg.n_resources;
  const std::size_t total = cfg.horizon + kBurnIn;
  const double dof = innovation_dof(cfg.innovation_kurtosis);
  const double filt = longrun_filter_coefficient(cfg.longrun_ratio);
  const double filt_scale = std::sqrt(1.0 - filt * filt);

  // Static allocation shares per resource; confounded resources run hot.
  std::vector<bool> hot(k, false);
  for (const auto& cp : cfg.confounder_pairs) {
    if (cp.slice_i >= n || cp.slice_j >= n || cp.resource >= k)
      throw std::invalid_argument("confounder pair out of range");
    hot[cp.resource] = true;
  }
  Rng alloc_rng(derive_seed(cfg.seed, 2));
  std::vector<double> shares(n * k);
  std::vector<double> colsum(k, 0.0);
  if (cfg.allocation_shares.empty()) {
    for (std::size_t r = 0; r < k; ++r) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        shares[i * k + r] = 0.5 + alloc_rng.uniform();
        s += shares[i * k + r];
      }
      const double target = hot[r] ? cfg.hot_load : cfg.cold_load;
      for (std::size_t i = 0; i < n; ++i) shares[i * k + r] *= target / s;
      colsum[r] = target;
    }
  } else {
    shares = cfg.allocation_shares;
    for (std::size_t r = 0; r < k; ++r) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double a = shares[i * k + r];
        if (!(a >= 0.0 && a <= 1.0))
          throw std::invalid_argument("allocation share outside [0,1]");
        s += a;
      }
      if (s > 1.0 + 1e-9)
        throw std::invalid_argument("allocation column sum exceeds 1");
      colsum[r] = s;
    }
  }

  // Utilization: column load plus clamped AR(1) fluctuation.
  Rng util_rng(derive_seed(cfg.seed, 1));
  std::vector<double> util(total * k);
  const double util_sd =
      cfg.utilization_noise / std::sqrt(1.0 - cfg.utilization_ar * cfg.utilization_ar);
  {
    std::vector<double> state(k, 0.0);
    for (std::size_t t = 0; t < total; ++t)
      for (std::size_t r = 0; r < k; ++r) {
        state[r] = cfg.utilization_ar * state[r] +
                   cfg.utilization_noise * util_rng.normal();
        util[t * k + r] = std::clamp(colsum[r] + state[r], 0.0, 1.0);
      }
  }

  // Per-slice telemetry: stable AR(p) dynamics driven by AR(1)-pre-filtered
  // heavy-tailed innovations (the pre-filter realizes the configured long-run
  // variance ratio, so residual serial dependence survives own-lag
  // conditioning), plus a white observation-noise channel and the
  // standardized utilization loading for confounded slices.
  Rng coeff_rng(derive_seed(cfg.seed, 0));
  std::vector<std::vector<double>> coeffs(n);
  for (std::size_t i = 0; i < n; ++i)
    coeffs[i] =
        cfg.ar_root_multiplicity > 1
            ? repeated_root_coefficients(cfg.ar_root_multiplicity,
                                         cfg.spectral_radius)
            : draw_ar_coefficients(coeff_rng, cfg.lags, cfg.spectral_radius);

  std::vector<double> loading(n * k, 0.0);
  for (const auto& cp : cfg.confounder_pairs) {
    loading[cp.slice_i * k + cp.resource] = cfg.confounder_loading;
    loading[cp.slice_j * k + cp.resource] = cfg.confounder_loading;
  }

  std::vector<double> tele(total * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    Rng innov_rng(derive_seed(cfg.seed, 10 + i));
    Rng obs_rng(derive_seed(cfg.seed, 1000 + i));
    std::vector<double> latent(total, 0.0);
    double innov_state = 0.0;
    for (std::size_t t = 0; t < total; ++t) {
      innov_state =
          filt * innov_state + filt_scale * draw_innovation(innov_rng, dof);
      double s = innov_state;
      for (std::size_t m = 0; m < coeffs[i].size() && m < t; ++m)
        s += coeffs[i][m] * latent[t - 1 - m];
      latent[t] = s;
    }
    if (cfg.normalize_latent) {
      double mean = 0.0, sq = 0.0;
      for (std::size_t t = kBurnIn; t < total; ++t) mean += latent[t];
      mean /= static_cast<double>(total - kBurnIn);
      for (std::size_t t = kBurnIn; t < total; ++t) {
        const double d = latent[t] - mean;
        sq += d * d;
      }
      const double sd = std::sqrt(sq / static_cast<double>(total - kBurnIn));
      if (sd > 1e-12)
        for (double& v : latent) v /= sd;
    }
    for (std::size_t t = 0; t < total; ++t) {
      double v = latent[t] + cfg.obs_noise_scale * draw_innovation(obs_rng, dof);
      for (std::size_t r = 0; r < k; ++r)
        if (loading[i * k + r] != 0.0)
          v += loading[i * k + r] * (util[t * k + r] - colsum[r]) / util_sd;
      tele[t * n + i] = v;
    }
  }

  // Regime changes: intercept level per slice (or every slice for the
  // global sentinel), last applicable change wins.
  for (std::size_t t = kBurnIn; t < total; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      double level = 0.0;
      for (const auto& rc : cfg.regime_changes)
        if (kBurnIn + rc.time <= t &&
            (rc.slice == RegimeChange::kAllSlices || rc.slice == i))
          level = rc.magnitude;
      if (level != 0.0) tele[t * n + i] += level;
    }
  }

  // Attack hops, applied in path order so effects cascade down the chain.
  for (std::size_t l = 1; l < cfg.attack_path.size(); ++l) {
    const AttackHop& hop = cfg.attack_path[l];
    const std::size_t src = cfg.attack_path[l - 1].slice;
    for (std::size_t t = kBurnIn + hop.onset; t < total; ++t)
      if (t >= hop.lag)
        tele[t * n + hop.slice] +=
            hop.coefficient * tele[(t - hop.lag) * n + src];
  }

  // Off-path couplings, applied in list order after the attack path.
  for (const auto& cc : cfg.cross_couplings)
    for (std::size_t t = kBurnIn + cc.onset; t < total; ++t)
      if (t >= cc.lag)
        tele[t * n + cc.target] +=
            cc.coefficient * tele[(t - cc.lag) * n + cc.source];

  Scenario sc;
  sc.config = cfg;
  sc.window = TelemetryWindow::zeros(n, k, cfg.horizon, 1, cfg.sample_period);
  for (std::size_t t = 0; t < cfg.horizon; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      sc.window.tele(t, i, 0) = tele[(t + kBurnIn) * n + i];
      for (std::size_t r = 0; r < k; ++r)
        sc.window.alloc(t, i, r) = shares[i * k + r];
    }
    for (std::size_t r = 0; r < k; ++r)
      sc.window.util(t, r) = util[(t + kBurnIn) * k + r];
  }

  for (const auto& hop : cfg.attack_path)
    sc.truth_path.hops.push_back({hop.slice, hop.onset, 1.0, 0.0, 0.0});
  sc.truth_path.product_score = 1.0;
  for (const auto& rc : cfg.regime_changes)
    sc.truth_changepoints.push_back(rc.time);
  return sc;
}

TelemetryWindow apply_allocation_noise(const TelemetryWindow& w, double sigma,
                                       std::uint64_t seed) {
  if (sigma < 0.0) throw std::invalid_argument("noise sigma must be >= 0");
  TelemetryWindow out = w;
  if (sigma == 0.0) return out;
  Rng rng(derive_seed(seed, 7));
  for (double& a : out.allocation)
    a = std::clamp(a + sigma * rng.normal(), 0.0, 1.0);
  return out;
}

}  // namespace sliceattrib
