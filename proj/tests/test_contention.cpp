#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "sliceattrib/contention.hpp"
#include "sliceattrib/rng.hpp"

using namespace sliceattrib;

TEST_CASE("logistic function") {
  CHECK(logistic(0.0) == doctest::Approx(0.5));
  CHECK(logistic(2.0) == doctest::Approx(1.0 / (1.0 + std::exp(-2.0))));
  CHECK(logistic(1000.0) == doctest::Approx(1.0));
  CHECK(logistic(-1000.0) >= 0.0);
  CHECK(logistic(-1000.0) < 1e-300);
  CHECK(logistic(3.0) + logistic(-3.0) == doctest::Approx(1.0));
}

TEST_CASE("contention score arithmetic") {
  ModelParams params = ModelParams::defaults(2);
  params.w = {0.6, 0.4};
  params.tau = {0.7, 0.7};
  const std::vector<double> a_i = {0.5, 0.2};
  const std::vector<double> a_j = {0.4, 0.3};
  const std::vector<double> u = {0.9, 0.5};
  const ContentionScore s = score(a_i, a_j, u, params);
  const double want0 = 0.6 * 0.5 * 0.4 * logistic(0.2);
  const double want1 = 0.4 * 0.2 * 0.3 * logistic(-0.2);
  CHECK(s.per_resource[0] == doctest::Approx(want0));
  CHECK(s.per_resource[1] == doctest::Approx(want1));
  CHECK(s.rho == doctest::Approx(want0 + want1));
  CHECK_THROWS_AS(score({0.1}, a_j, u, params), std::invalid_argument);
}

TEST_CASE("Itakura-Saito divergence") {
  CHECK(is_divergence(3.0, 3.0) == doctest::Approx(0.0));
  CHECK(is_divergence(1.0, 2.0) ==
        doctest::Approx(0.5 - std::log(0.5) - 1.0));  // 0.19314718...
  CHECK(is_divergence(1.0, 2.0) == doctest::Approx(0.19314718).epsilon(1e-6));
  // Scale invariance: B(sc || sh) = B(c || h).
  CHECK(is_divergence(5.0 * 1.3, 5.0 * 0.9) ==
        doctest::Approx(is_divergence(1.3, 0.9)));
  CHECK_THROWS_AS(is_divergence(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(is_divergence(1.0, -1.0), std::invalid_argument);
}

namespace {

// Independent re-computation of the expected divergences from the definition.
RuleComparison reference_comparison(const std::vector<double>& draws,
                                    std::size_t k,
                                    const std::vector<double>& c_k,
                                    const std::vector<double>& a_i,
                                    const std::vector<double>& a_j,
                                    const ModelParams& params) {
  RuleComparison out;
  out.degenerate_distribution = false;
  const std::size_t n = draws.size() / k;
  for (std::size_t t = 0; t < n; ++t)
    for (std::size_t r = 0; r < k; ++r) {
      const double joint = a_i[r] * a_j[r];
      if (joint <= 0.0) continue;
      const double sig = logistic(draws[t * k + r] - params.tau[r]);
      const double truth = c_k[r] * joint * sig;
      out.sigmoid_product += is_divergence(truth, joint * sig);
      out.min_sigmoid += is_divergence(truth, std::min(a_i[r], a_j[r]) * sig);
      out.additive_sigmoid += is_divergence(truth, (a_i[r] + a_j[r]) * sig);
    }
  out.sigmoid_product /= static_cast<double>(n);
  out.min_sigmoid /= static_cast<double>(n);
  out.additive_sigmoid /= static_cast<double>(n);
  return out;
}

std::vector<double> draw_utilization(Rng& rng, std::size_t n, std::size_t k,
                                     const std::vector<double>& mu) {
  std::vector<double> draws(n * k);
  for (std::size_t t = 0; t < n; ++t)
    for (std::size_t r = 0; r < k; ++r)
      draws[t * k + r] = std::clamp(mu[r] + 0.1 * rng.normal(), 0.0, 1.0);
  return draws;
}

}  // namespace

TEST_CASE("rule comparison matches the reference implementation") {
  Rng rng(202);
  const std::size_t k = 3;
  const ModelParams params = ModelParams::defaults(k);
  const std::vector<double> mu = {0.8, 0.6, 0.7};
  const std::vector<double> c_k = {0.9, 0.8, 0.95};
  const std::vector<double> a_i = {0.5, 0.3, 0.6};
  const std::vector<double> a_j = {0.4, 0.5, 0.2};
  const auto draws = draw_utilization(rng, 1500, k, mu);

  const RuleComparison got = compare_rules(draws, k, c_k, a_i, a_j, params);
  const RuleComparison want =
      reference_comparison(draws, k, c_k, a_i, a_j, params);
  CHECK(got.sigmoid_product ==
        doctest::Approx(want.sigmoid_product).epsilon(1e-10));
  CHECK(got.min_sigmoid == doctest::Approx(want.min_sigmoid).epsilon(1e-10));
  CHECK(got.additive_sigmoid ==
        doctest::Approx(want.additive_sigmoid).epsilon(1e-10));
  CHECK(!got.degenerate_distribution);
}

TEST_CASE("multiplicative rule wins on matched profiles") {
  // When the true contention intensity is proportional to the joint
  // allocation (intensity factor <= 1), the multiplicative rule's prediction
  // ratio is closest to 1 on every resource, so its divergence is strictly
  // lowest and the additive rule (which overshoots the footprint most) is
  // strictly worst.
  Rng rng(303);
  for (int config = 0; config < 20; ++config) {
    const std::size_t k = 2 + rng.uniform_index(3);
    ModelParams params = ModelParams::defaults(k);
    std::vector<double> mu(k), c_k(k), a_i(k), a_j(k);
    for (std::size_t r = 0; r < k; ++r) {
      mu[r] = rng.uniform(0.4, 0.95);
      c_k[r] = rng.uniform(0.7, 0.99);
      a_i[r] = rng.uniform(0.2, 0.9);
      a_j[r] = rng.uniform(0.2, 0.9);
    }
    const auto draws = draw_utilization(rng, 1200, k, mu);
    const RuleComparison cmp = compare_rules(draws, k, c_k, a_i, a_j, params);
    CHECK(cmp.sigmoid_product < cmp.min_sigmoid);
    CHECK(cmp.min_sigmoid < cmp.additive_sigmoid);
    CHECK(cmp.total(ContentionRule::kSigmoidProduct) ==
          doctest::Approx(cmp.sigmoid_product));
  }
}

TEST_CASE("rule comparison input validation") {
  const ModelParams params = ModelParams::defaults(2);
  const std::vector<double> small(100, 0.5);
  CHECK_THROWS_AS(
      compare_rules(small, 2, {1.0, 1.0}, {0.5, 0.5}, {0.5, 0.5}, params),
      std::invalid_argument);
  const std::vector<double> atom(2 * 1200, 0.5);
  const RuleComparison cmp =
      compare_rules(atom, 2, {0.9, 0.9}, {0.5, 0.5}, {0.5, 0.5}, params);
  CHECK(cmp.degenerate_distribution);
}
