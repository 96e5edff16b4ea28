#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "sliceattrib/learning.hpp"
#include "sliceattrib/security.hpp"
#include "sliceattrib/simulator.hpp"

using namespace sliceattrib;

TEST_CASE("utilization spoofing respects its budgets") {
  const std::size_t k = 3, t_len = 50;
  std::vector<double> u(t_len * k, 0.5);

  AdversarySpec spec;
  spec.delta = 0.2;
  spec.k = 2;
  spec.strategy = SpoofStrategy::kUniformUp;
  const auto up = spoof(u, k, spec);
  for (std::size_t t = 0; t < t_len; ++t) {
    CHECK(up[t * k + 0] == doctest::Approx(0.7));
    CHECK(up[t * k + 1] == doctest::Approx(0.7));
    CHECK(up[t * k + 2] == doctest::Approx(0.5));  // outside the channel budget
  }

  spec.strategy = SpoofStrategy::kUniformDown;
  spec.delta = 0.8;
  const auto down = spoof(u, k, spec);
  CHECK(down[0] == doctest::Approx(0.0));  // clamped at the boundary

  spec.strategy = SpoofStrategy::kWorstCaseSign;
  spec.delta = 0.1;
  const auto worst = spoof(u, k, spec, {-1.0, 1.0, 1.0});
  CHECK(worst[0] == doctest::Approx(0.4));
  CHECK(worst[1] == doctest::Approx(0.6));
  CHECK_THROWS_AS(spoof(u, k, spec, {}), std::invalid_argument);

  spec.strategy = SpoofStrategy::kRandom;
  const auto r1 = spoof(u, k, spec);
  const auto r2 = spoof(u, k, spec);
  CHECK(r1 == r2);  // seeded and deterministic
  for (double v : r1) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }

  spec.delta = 1.5;
  CHECK_THROWS_AS(spoof(u, k, spec), std::invalid_argument);
  spec.delta = 0.1;
  spec.k = 9;
  CHECK_THROWS_AS(spoof(u, k, spec), std::invalid_argument);
}

TEST_CASE("certificate arithmetic pins") {
  CHECK(contention_perturbation_bound(0.45, 3, 0.1) ==
        doctest::Approx(0.45 * 3 * 0.1 / 4.0));

  // Slope term at delta = 0.1, k = K = 3, N = 15, alpha = 0.05.
  const double slope =
      10.1 * 0.33 * 0.45 * 3.0 * std::sqrt(3.0 * std::log(15.0 / 0.05));
  CHECK(fdr_inflation_bound(12.4, 0.1, 3, 3, 15, 0.05, 0.33, 0.45, 10.1) ==
        doctest::Approx(12.4 + slope * 0.1).epsilon(1e-12));
  CHECK(fdr_inflation_bound(12.4, 0.0, 3, 3, 15, 0.05, 0.33, 0.45, 10.1) ==
        doctest::Approx(12.4));

  const BreakdownPoint bp = breakdown_point(0.67, 0.33, 0.45, 1, 0.21);
  CHECK(bp.proof_form == doctest::Approx(0.9474747).epsilon(1e-5));
  CHECK(bp.proof_form == doctest::Approx(0.947).epsilon(1.1e-3));
  CHECK(bp.statement_form == doctest::Approx(bp.proof_form / 4.0));
}

TEST_CASE("differential-privacy noise scale") {
  PrivacySpec spec;  // sensitivity 0.0959, epsilon 0.89, dp_delta 0.02
  const double sigma = gaussian_dp_sigma(spec);
  CHECK(sigma == doctest::Approx(0.0959 * std::sqrt(2.0 * std::log(62.5)) /
                                 0.89)
                     .epsilon(1e-12));
  CHECK(sigma == doctest::Approx(0.31).epsilon(0.0162));  // 0.31 +- 0.005

  // With per-hop sensitivity, sigma scales exactly linearly in path length.
  const double per_hop = spec.sensitivity / static_cast<double>(spec.path_len);
  for (std::size_t l : {1u, 2u, 5u, 9u}) {
    PrivacySpec s = spec;
    s.path_len = l;
    s.sensitivity = per_hop * static_cast<double>(l);
    CHECK(gaussian_dp_sigma(s) ==
          doctest::Approx(sigma * static_cast<double>(l) /
                          static_cast<double>(spec.path_len))
              .epsilon(1e-12));
  }

  PrivacySpec bad = spec;
  bad.epsilon = 0.0;
  CHECK_THROWS_AS(gaussian_dp_sigma(bad), std::invalid_argument);
}

TEST_CASE("privacy floor is vacuous at uniform path entropy") {
  const double h_uniform = 5.0 * std::log(15.0);
  const PrivacyBound floor = privacy_floor(15, 5, h_uniform);
  CHECK(floor.value == doctest::Approx(-1.0 - std::log(2.0)));
  CHECK(floor.vacuous);

  // A (hypothetically) larger entropy would lift the floor above zero.
  const PrivacyBound tight = privacy_floor(15, 5, h_uniform + 3.0);
  CHECK(!tight.vacuous);

  const PrivacyBound eps = min_epsilon(15, 5, 0.02, h_uniform);
  CHECK(eps.vacuous);
}

TEST_CASE("strength perturbation for privacy is seeded and clamped") {
  const std::vector<double> g = {0.1, 0.5, 0.95};
  const auto a = dp_perturb(g, 0.31, 4);
  const auto b = dp_perturb(g, 0.31, 4);
  CHECK(a == b);
  for (double v : a) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  CHECK(dp_perturb(g, 0.0, 4) == g);
}

TEST_CASE("effective sample size and convergence radius") {
  const double t_eff = effective_sample_size(300.0, 2.1, 0.329);
  const double denom = 2.1 * (1.0 - std::exp(-0.329)) + 0.329;
  CHECK(t_eff == doctest::Approx(300.0 * 0.329 / denom).epsilon(1e-12));
  CHECK(t_eff == doctest::Approx(107.547).epsilon(1e-4));

  const double radius = convergence_radius(108.0, 3, 1e-3, 0.05);
  CHECK(radius ==
        doctest::Approx(2000.0 * std::sqrt(8.0 * std::log(40.0) / 108.0))
            .epsilon(1e-12));
  CHECK(radius == doctest::Approx(1045.47).epsilon(1e-4));

  CHECK(lipschitz_gamma(0.33, 15, 3, 0.45) ==
        doctest::Approx(0.33 * 15.0 * 3.0 * 0.45 / 4.0).epsilon(1e-12));
  CHECK(lipschitz_gamma(0.33, 15, 3, 0.45) ==
        doctest::Approx(1.670625).epsilon(1e-9));
}

TEST_CASE("parameter fitting improves the path likelihood") {
  std::vector<Scenario> scenarios;
  for (std::uint64_t seed : {100u, 101u, 102u}) {
    ScenarioConfig cfg;
    cfg.n_slices = 3;
    cfg.horizon = 150;
    cfg.normalize_latent = true;
    cfg.obs_noise_scale = 0.5;
    cfg.attack_path = {{0, 5, 1, 0.0}, {1, 10, 1, 1.0}};
    cfg.seed = seed;
    scenarios.push_back(generate(cfg));
  }

  FitOptions opts;
  opts.max_iterations = 200;
  const FitReport rep = fit(scenarios, opts);

  const ModelParams defaults = ModelParams::defaults(3);
  const double base = path_log_likelihood(scenarios, defaults, opts.lambda);
  const double fitted =
      path_log_likelihood(scenarios, rep.theta, opts.lambda);
  CHECK(fitted >= base - 1e-9);
  CHECK(rep.objective == doctest::Approx(fitted).epsilon(1e-9));
  CHECK(rep.iterations >= 1);

  // The reported uncertainty quantities follow their formulas.
  const double t_eff = effective_sample_size(150.0, 2.1, 0.329);
  CHECK(rep.t_eff == doctest::Approx(t_eff).epsilon(1e-9));
  CHECK(rep.convergence_radius ==
        doctest::Approx(convergence_radius(t_eff, 3, opts.lambda, opts.delta))
            .epsilon(1e-9));

  // Fitted parameters stay in their admissible regions.
  for (double w : rep.theta.w) CHECK(w > 0.0);
  for (double t : rep.theta.tau) {
    CHECK(t >= 0.0);
    CHECK(t <= 1.0);
  }
  CHECK(rep.theta.omega1 > 0.0);
  CHECK(rep.theta.omega2 > 0.0);
}
