#include "sliceattrib/security.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sliceattrib/rng.hpp"

namespace sliceattrib {

std::vector<double> spoof(const std::vector<double>& u_series,
                          std::size_t n_resources, const AdversarySpec& spec,
                          const std::vector<double>& preferred_sign) {
  if (n_resources == 0 || u_series.size() % n_resources != 0)
    throw std::invalid_argument("utilization series not a multiple of K");
  if (spec.delta < 0.0 || spec.delta > 1.0)
    throw std::invalid_argument("spoof budget delta must lie in [0,1]");
  if (spec.k < 1 || spec.k > n_resources)
    throw std::invalid_argument("spoof channel budget out of range");
  if (spec.strategy == SpoofStrategy::kWorstCaseSign &&
      preferred_sign.size() != n_resources)
    throw std::invalid_argument("worst-case-sign strategy needs per-channel signs");

  std::vector<double> out = u_series;
  if (spec.delta == 0.0) return out;
  const std::size_t t_len = u_series.size() / n_resources;
  Rng rng(derive_seed(spec.seed, 3));

  for (std::size_t t = 0; t < t_len; ++t) {
    for (std::size_t c = 0; c < spec.k; ++c) {
      std::size_t channel = c;
      double sign = 1.0;
      switch (spec.strategy) {
        case SpoofStrategy::kUniformUp:
          sign = 1.0;
          break;
        case SpoofStrategy::kUniformDown:
          sign = -1.0;
          break;
        case SpoofStrategy::kWorstCaseSign: {
          // Perturb the channels with the largest gradient magnitude.
          // preferred_sign carries sign * |relative weight|; we use the k
          // channels as supplied in index order of decreasing magnitude.
          channel = c;
          sign = preferred_sign[channel] >= 0.0 ? 1.0 : -1.0;
          break;
        }
        case SpoofStrategy::kRandom:
          channel = static_cast<std::size_t>(rng.uniform_index(n_resources));
          sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
          break;
      }
      double& v = out[t * n_resources + channel];
      v = std::clamp(v + sign * spec.delta, 0.0, 1.0);
    }
  }
  return out;
}

double contention_perturbation_bound(double w_max, std::size_t k, double delta) {
  return w_max * static_cast<double>(k) * delta / 4.0;
}

double fdr_inflation_bound(double fdr0, double delta, std::size_t k,
                           std::size_t n_resources, std::size_t n_slices,
                           double alpha, double omega2, double w_max,
                           double c4) {
  if (!(alpha > 0.0) || n_slices < 2)
    throw std::invalid_argument("fdr inflation bound: invalid inputs");
  return fdr0 + c4 * omega2 * w_max * static_cast<double>(k) * delta *
                    std::sqrt(static_cast<double>(n_resources) *
                              std::log(static_cast<double>(n_slices) / alpha));
}

BreakdownPoint breakdown_point(double omega1, double omega2, double w_max,
                               std::size_t k, double delta_phi) {
  if (!(omega2 > 0.0) || !(w_max > 0.0) || k < 1)
    throw std::invalid_argument("breakdown point: invalid inputs");
  BreakdownPoint b;
  b.proof_form = omega1 * delta_phi / (omega2 * w_max * static_cast<double>(k));
  b.statement_form = b.proof_form / 4.0;
  return b;
}

double gaussian_dp_sigma(const PrivacySpec& spec) {
  if (!(spec.epsilon > 0.0) || !(spec.dp_delta > 0.0) || spec.dp_delta >= 1.0)
    throw std::invalid_argument("invalid differential-privacy parameters");
  return spec.sensitivity * std::sqrt(2.0 * std::log(1.25 / spec.dp_delta)) /
         spec.epsilon;
}

std::vector<double> dp_perturb(const std::vector<double>& gammas,
                               double sigma_dp, std::uint64_t seed) {
  std::vector<double> out = gammas;
  if (sigma_dp == 0.0) return out;
  Rng rng(derive_seed(seed, 5));
  for (double& g : out) g = std::clamp(g + sigma_dp * rng.normal(), 0.0, 1.0);
  return out;
}

PrivacyBound privacy_floor(std::size_t n, std::size_t l, double path_entropy) {
  if (n < 2 || l < 1)
    throw std::invalid_argument("privacy floor: N >= 2 and L >= 1 required");
  PrivacyBound b;
  b.value = path_entropy - 1.0 -
            std::log(2.0 * std::pow(static_cast<double>(n),
                                    static_cast<double>(l)));
  b.vacuous = b.value <= 0.0;
  return b;
}

PrivacyBound min_epsilon(std::size_t n, std::size_t l, double dp_delta,
                         double path_entropy) {
  if (!(dp_delta > 0.0))
    throw std::invalid_argument("min epsilon: dp_delta must be positive");
  const PrivacyBound floor = privacy_floor(n, l, path_entropy);
  const double denom =
      static_cast<double>(l) * std::log(static_cast<double>(n));
  PrivacyBound b;
  b.value = floor.value / denom - std::log(1.0 / dp_delta) / denom;
  b.vacuous = b.value <= 0.0;
  return b;
}

}  // namespace sliceattrib
