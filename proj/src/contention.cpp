#include "sliceattrib/contention.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sliceattrib {

double logistic(double x) {
  if (x > 30.0) return 1.0;
  if (x < -30.0) return std::exp(x);  // underflows gracefully
  return 1.0 / (1.0 + std::exp(-x));
}

ContentionScore score(const std::vector<double>& a_i,
                      const std::vector<double>& a_j,
                      const std::vector<double>& u, const ModelParams& params) {
  const std::size_t k = params.w.size();
  if (a_i.size() != k || a_j.size() != k || u.size() != k ||
      params.tau.size() != k)
    throw std::invalid_argument("contention score: length mismatch");

  ContentionScore s;
  s.per_resource.resize(k);
  for (std::size_t r = 0; r < k; ++r) {
    const double term =
        params.w[r] * a_i[r] * a_j[r] * logistic(u[r] - params.tau[r]);
    s.per_resource[r] = term;
    s.rho += term;
  }
  return s;
}

double is_divergence(double c, double h) {
  if (!(c > 0.0) || !(h > 0.0))
    throw std::invalid_argument("I-S divergence needs positive arguments");
  const double r = c / h;
  return r - std::log(r) - 1.0;
}

RuleComparison compare_rules(const std::vector<double>& utilization_draws,
                             std::size_t n_resources,
                             const std::vector<double>& c_k,
                             const std::vector<double>& a_i,
                             const std::vector<double>& a_j,
                             const ModelParams& params) {
  if (n_resources == 0 || utilization_draws.size() % n_resources != 0)
    throw std::invalid_argument("utilization draws not a multiple of K");
  const std::size_t n = utilization_draws.size() / n_resources;
  if (n < 1000)
    throw std::invalid_argument("rule comparison needs >= 1000 draws");
  if (c_k.size() != n_resources || a_i.size() != n_resources ||
      a_j.size() != n_resources || params.tau.size() != n_resources)
    throw std::invalid_argument("rule comparison: length mismatch");

  RuleComparison out;
  out.degenerate_distribution = true;
  for (std::size_t t = 1; t < n && out.degenerate_distribution; ++t)
    for (std::size_t k = 0; k < n_resources; ++k)
      if (utilization_draws[t * n_resources + k] != utilization_draws[k]) {
        out.degenerate_distribution = false;
        break;
      }

  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t k = 0; k < n_resources; ++k) {
      const double joint = a_i[k] * a_j[k];
      if (joint <= 0.0) continue;  // no shared footprint: all rules agree at 0
      const double sig =
          logistic(utilization_draws[t * n_resources + k] - params.tau[k]);
      const double c = c_k[k] * joint * sig;
      out.sigmoid_product += is_divergence(c, joint * sig);
      out.min_sigmoid += is_divergence(c, std::min(a_i[k], a_j[k]) * sig);
      out.additive_sigmoid += is_divergence(c, (a_i[k] + a_j[k]) * sig);
    }
  }
  const double inv = 1.0 / static_cast<double>(n);
  out.sigmoid_product *= inv;
  out.min_sigmoid *= inv;
  out.additive_sigmoid *= inv;
  return out;
}

}  // namespace sliceattrib
