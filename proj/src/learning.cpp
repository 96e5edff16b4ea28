#include "sliceattrib/learning.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sliceattrib/contention.hpp"
#include "sliceattrib/correction.hpp"
#include "sliceattrib/granger.hpp"

namespace sliceattrib {

double effective_sample_size(double t, double c_beta, double beta_mix) {
  if (!(t > 0.0) || !(c_beta > 0.0) || !(beta_mix > 0.0))
    throw std::invalid_argument("effective sample size: inputs must be positive");
  return t * beta_mix / (c_beta * (1.0 - std::exp(-beta_mix)) + beta_mix);
}

double convergence_radius(double t_eff, std::size_t k, double lambda,
                          double delta) {
  if (!(t_eff > 0.0) || !(lambda > 0.0) || !(delta > 0.0) || !(delta < 1.0))
    throw std::invalid_argument("convergence radius: invalid inputs");
  const double dims = 2.0 * static_cast<double>(k) + 2.0;
  return (2.0 / lambda) * std::sqrt(dims * std::log(2.0 / delta) / t_eff);
}

double lipschitz_gamma(double omega2, std::size_t n, std::size_t k,
                       double w_max) {
  return omega2 * static_cast<double>(n) * static_cast<double>(k) * w_max / 4.0;
}

namespace {

constexpr double kGammaFloor = 1e-12;

struct PreparedScenario {
  std::size_t n_slices = 0;
  std::size_t n_resources = 0;
  std::vector<double> phi;   // N x N, row-major, 0 on diagonal
  std::vector<double> abar;  // N x K mean allocations
  std::vector<double> sig;   // K: sigma(Ubar_k - tau_k) recomputed per theta
  std::vector<double> ubar;  // K mean utilization
  std::vector<std::size_t> hops;  // truth path slice sequence
};

PreparedScenario prepare(const Scenario& sc, std::size_t p, std::size_t q) {
  const TelemetryWindow& w = sc.window;
  const std::size_t n = w.n_slices;
  const std::size_t k = w.n_resources;

  PreparedScenario ps;
  ps.n_slices = n;
  ps.n_resources = k;
  ps.phi.assign(n * n, 0.0);
  ps.abar.assign(n * k, 0.0);
  ps.ubar.assign(k, 0.0);
  for (std::size_t t = 0; t < w.horizon; ++t) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t r = 0; r < k; ++r) ps.abar[i * k + r] += w.alloc(t, i, r);
    for (std::size_t r = 0; r < k; ++r) ps.ubar[r] += w.util(t, r);
  }
  const double inv_t = 1.0 / static_cast<double>(w.horizon);
  for (double& v : ps.abar) v *= inv_t;
  for (double& v : ps.ubar) v *= inv_t;

  std::vector<double> f_vals(n * n, -1.0);
  double f_min = 0.0, f_max = 0.0;
  bool any = false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      try {
        const PairSeries s = extract_pair(w, i, j);
        const PairFit fit = fit_models(s, p, q);
        const RawFStat raw = f_statistic(fit, p, q, k);
        const AutocovEstimate ac = estimate_autocov(fit.unrestricted.residuals);
        const CorrectedFStat cf = corrected_f(raw, ac);
        f_vals[i * n + j] = cf.f_tilde;
        if (!any || cf.f_tilde < f_min) f_min = cf.f_tilde;
        if (!any || cf.f_tilde > f_max) f_max = cf.f_tilde;
        any = true;
      } catch (const std::exception&) {
        // degenerate pair: neutral evidence
      }
    }
  }
  for (std::size_t idx = 0; idx < n * n; ++idx) {
    if (f_vals[idx] < 0.0) {
      ps.phi[idx] = 0.5;
    } else if (f_max - f_min < 1e-300) {
      ps.phi[idx] = 0.5;
    } else {
      ps.phi[idx] = (f_vals[idx] - f_min) / (f_max - f_min);
    }
  }
  for (std::size_t i = 0; i < n; ++i) ps.phi[i * n + i] = 0.0;

  for (const PathHop& hop : sc.truth_path.hops) ps.hops.push_back(hop.slice);
  return ps;
}

double gamma_value(const PreparedScenario& ps, const ModelParams& th,
                   std::size_t i, std::size_t j) {
  const std::size_t k = ps.n_resources;
  double rho = 0.0;
  for (std::size_t r = 0; r < k; ++r)
    rho += th.w[r] * ps.abar[i * k + r] * ps.abar[j * k + r] *
           logistic(ps.ubar[r] - th.tau[r]);
  return th.omega1 * ps.phi[i * ps.n_slices + j] + th.omega2 * rho;
}

// Gradient of Gamma_ij w.r.t. (w_0..K-1, tau_0..K-1, omega1, omega2).
void gamma_gradient(const PreparedScenario& ps, const ModelParams& th,
                    std::size_t i, std::size_t j, std::vector<double>& g) {
  const std::size_t k = ps.n_resources;
  double rho = 0.0;
  for (std::size_t r = 0; r < k; ++r) {
    const double joint = ps.abar[i * k + r] * ps.abar[j * k + r];
    const double s = logistic(ps.ubar[r] - th.tau[r]);
    rho += th.w[r] * joint * s;
    g[r] = th.omega2 * joint * s;
    g[k + r] = -th.omega2 * th.w[r] * joint * s * (1.0 - s);
  }
  g[2 * k] = ps.phi[i * ps.n_slices + j];
  g[2 * k + 1] = rho;
}

double objective(const std::vector<PreparedScenario>& prepared,
                 const ModelParams& th, double lambda,
                 std::vector<double>* grad) {
  const std::size_t k = th.w.size();
  const std::size_t dim = 2 * k + 2;
  if (grad) grad->assign(dim, 0.0);
  std::vector<double> g_edge(dim), g_sum(dim);

  double ll = 0.0;
  for (const PreparedScenario& ps : prepared) {
    for (std::size_t l = 1; l < ps.hops.size(); ++l) {
      const std::size_t from = ps.hops[l - 1];
      const std::size_t to = ps.hops[l];
      double z = 0.0;
      std::fill(g_sum.begin(), g_sum.end(), 0.0);
      for (std::size_t j = 0; j < ps.n_slices; ++j) {
        if (j == from) continue;
        const double gv = std::max(kGammaFloor, gamma_value(ps, th, from, j));
        z += gv;
        if (grad) {
          gamma_gradient(ps, th, from, j, g_edge);
          for (std::size_t d = 0; d < dim; ++d) g_sum[d] += g_edge[d];
        }
      }
      const double gt = std::max(kGammaFloor, gamma_value(ps, th, from, to));
      ll += std::log(gt) - std::log(z);
      if (grad) {
        gamma_gradient(ps, th, from, to, g_edge);
        for (std::size_t d = 0; d < dim; ++d)
          (*grad)[d] += g_edge[d] / gt - g_sum[d] / z;
      }
    }
  }

  double norm2 = th.omega1 * th.omega1 + th.omega2 * th.omega2;
  for (std::size_t r = 0; r < k; ++r)
    norm2 += th.w[r] * th.w[r] + th.tau[r] * th.tau[r];
  ll -= lambda * norm2;
  if (grad) {
    for (std::size_t r = 0; r < k; ++r) {
      (*grad)[r] -= 2.0 * lambda * th.w[r];
      (*grad)[k + r] -= 2.0 * lambda * th.tau[r];
    }
    (*grad)[2 * k] -= 2.0 * lambda * th.omega1;
    (*grad)[2 * k + 1] -= 2.0 * lambda * th.omega2;
  }
  return ll;
}

void apply_step(ModelParams& th, const std::vector<double>& grad, double step) {
  const std::size_t k = th.w.size();
  for (std::size_t r = 0; r < k; ++r) {
    th.w[r] = std::max(1e-6, th.w[r] + step * grad[r]);
    th.tau[r] += step * grad[k + r];
  }
  // Euclidean projection onto the omega simplex segment.
  const double o1 = th.omega1 + step * grad[2 * k];
  const double o2 = th.omega2 + step * grad[2 * k + 1];
  th.omega1 = std::clamp((o1 - o2 + 1.0) / 2.0, 1e-6, 1.0 - 1e-6);
  th.omega2 = 1.0 - th.omega1;
}

double grad_norm(const std::vector<double>& g) {
  double s = 0.0;
  for (double v : g) s += v * v;
  return std::sqrt(s);
}

}  // namespace

double path_log_likelihood(const std::vector<Scenario>& scenarios,
                           const ModelParams& theta, double lambda) {
  std::vector<PreparedScenario> prepared;
  for (const Scenario& sc : scenarios)
    prepared.push_back(prepare(sc, theta.p, theta.q));
  return objective(prepared, theta, lambda, nullptr);
}

FitReport fit(const std::vector<Scenario>& scenarios, const FitOptions& opts) {
  if (scenarios.empty())
    throw std::invalid_argument("fit needs at least one scenario");
  std::size_t labeled = 0;
  for (const Scenario& sc : scenarios)
    if (sc.truth_path.hops.size() >= 2) ++labeled;
  if (labeled == 0)
    throw std::invalid_argument("fit needs scenarios with nonempty truth paths");

  ModelParams theta = ModelParams::defaults(scenarios[0].window.n_resources);
  std::vector<PreparedScenario> prepared;
  for (const Scenario& sc : scenarios)
    prepared.push_back(prepare(sc, theta.p, theta.q));

  std::vector<double> grad;
  double obj = objective(prepared, theta, opts.lambda, &grad);

  // Uninformative-data check: data gradient (regularizer removed) at start.
  {
    std::vector<double> data_grad;
    objective(prepared, theta, 0.0, &data_grad);
    if (grad_norm(data_grad) < 1e-12)
      throw std::runtime_error("uninformative scenarios");
  }

  std::size_t it = 0;
  for (; it < opts.max_iterations; ++it) {
    if (grad_norm(grad) < opts.gradient_tolerance) break;
    double step = opts.initial_step;
    ModelParams next = theta;
    apply_step(next, grad, step);
    double next_obj = objective(prepared, next, opts.lambda, nullptr);
    while (next_obj < obj - 1e-9 && step > 1e-12) {
      step *= 0.5;
      next = theta;
      apply_step(next, grad, step);
      next_obj = objective(prepared, next, opts.lambda, nullptr);
    }
    if (step <= 1e-12) break;  // no ascent direction survives projection
    theta = next;
    obj = objective(prepared, theta, opts.lambda, &grad);
  }

  FitReport rep;
  rep.theta = theta;
  rep.objective = obj;
  rep.iterations = it;
  rep.gradient_norm = grad_norm(grad);
  const BoundConstants bc;
  const double horizon = static_cast<double>(scenarios[0].window.horizon);
  rep.t_eff = effective_sample_size(horizon, bc.c_beta, bc.beta_mix);
  rep.convergence_radius = convergence_radius(
      rep.t_eff, scenarios[0].window.n_resources, opts.lambda, opts.delta);
  double w_max = 0.0;
  for (double v : theta.w) w_max = std::max(w_max, v);
  rep.lipschitz_gamma = lipschitz_gamma(theta.omega2, scenarios[0].window.n_slices,
                                        scenarios[0].window.n_resources, w_max);
  return rep;
}

}  // namespace sliceattrib
