#include <doctest.h>

#include <filesystem>
#include <stdexcept>

#include "sliceattrib/core.hpp"
#include "sliceattrib/io.hpp"
#include "sliceattrib/simulator.hpp"

using namespace sliceattrib;

TEST_CASE("default parameters") {
  const ModelParams p3 = ModelParams::defaults(3);
  REQUIRE(p3.w.size() == 3);
  CHECK(p3.w[0] == doctest::Approx(0.45));
  CHECK(p3.w[1] == doctest::Approx(0.31));
  CHECK(p3.w[2] == doctest::Approx(0.24));
  for (double t : p3.tau) CHECK(t == doctest::Approx(0.7));
  CHECK(p3.omega1 == doctest::Approx(0.67));
  CHECK(p3.omega2 == doctest::Approx(0.33));

  const ModelParams p5 = ModelParams::defaults(5);
  REQUIRE(p5.w.size() == 5);
  for (double w : p5.w) CHECK(w == doctest::Approx(0.2));
}

TEST_CASE("window validation") {
  TelemetryWindow w = TelemetryWindow::zeros(3, 2, 10);
  CHECK(validate_window(w).empty());

  SUBCASE("range violation is reported, not thrown") {
    w.alloc(0, 0, 0) = 1.5;
    const auto v = validate_window(w);
    REQUIRE(!v.empty());
    CHECK(v.front().field == "allocation");
  }
  SUBCASE("column sum violation") {
    for (std::size_t i = 0; i < 3; ++i) w.alloc(4, i, 1) = 0.5;
    const auto v = validate_window(w);
    REQUIRE(!v.empty());
    CHECK(v.front().message == "allocation column sum exceeds 1");
  }
  SUBCASE("shape violation") {
    w.telemetry.pop_back();
    CHECK(!validate_window(w).empty());
  }
  SUBCASE("too few slices") {
    const TelemetryWindow one = TelemetryWindow::zeros(1, 2, 10);
    CHECK(!validate_window(one).empty());
  }
}

TEST_CASE("pair extraction") {
  TelemetryWindow w = TelemetryWindow::zeros(3, 2, 4);
  for (std::size_t t = 0; t < 4; ++t) {
    w.tele(t, 0, 0) = 10.0 + static_cast<double>(t);
    w.tele(t, 2, 0) = 20.0 + static_cast<double>(t);
    w.util(t, 1) = 0.25 * static_cast<double>(t);
  }
  const PairSeries s = extract_pair(w, 0, 2);
  REQUIRE(s.length() == 4);
  CHECK(s.x[3] == doctest::Approx(13.0));
  CHECK(s.y[3] == doctest::Approx(23.0));
  CHECK(s.z[3 * 2 + 1] == doctest::Approx(0.75));
  CHECK(s.n_resources == 2);

  CHECK_THROWS_AS(extract_pair(w, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(extract_pair(w, 0, 9), std::out_of_range);
  CHECK_THROWS_AS(extract_pair(w, 0, 1, 5), std::out_of_range);
}

TEST_CASE("window round trip") {
  ScenarioConfig cfg;
  cfg.n_slices = 3;
  cfg.horizon = 40;
  cfg.seed = 11;
  const Scenario sc = generate(cfg);

  const std::string dir = "io_test_window";
  save_window(dir, sc.window);
  const TelemetryWindow back = load_window(dir);
  REQUIRE(back.horizon == sc.window.horizon);
  REQUIRE(back.n_slices == sc.window.n_slices);
  for (std::size_t i = 0; i < back.telemetry.size(); ++i)
    CHECK(back.telemetry[i] == doctest::Approx(sc.window.telemetry[i]));
  for (std::size_t i = 0; i < back.utilization.size(); ++i)
    CHECK(back.utilization[i] == doctest::Approx(sc.window.utilization[i]));
  std::filesystem::remove_all(dir);

  CHECK_THROWS(load_window("definitely_missing_dir"));
}

TEST_CASE("scenario config json round trip") {
  ScenarioConfig cfg;
  cfg.n_slices = 6;
  cfg.n_resources = 4;
  cfg.horizon = 123;
  cfg.normalize_latent = true;
  cfg.allocation_noise_sigma = 0.05;
  cfg.confounder_pairs = {{0, 1, 2}};
  cfg.attack_path = {{0, 5, 1, 0.0}, {1, 9, 2, 0.8}};
  cfg.cross_couplings = {{2, 3, 1, 0.5, 7}};
  cfg.regime_changes = {{60, 2.5}, {80, 1.0, 3}};
  cfg.allocation_shares.assign(6 * 4, 0.1);
  cfg.seed = 99;

  const ScenarioConfig back =
      scenario_config_from_json(scenario_config_to_json(cfg));
  CHECK(back.n_slices == cfg.n_slices);
  CHECK(back.n_resources == cfg.n_resources);
  CHECK(back.horizon == cfg.horizon);
  CHECK(back.normalize_latent == cfg.normalize_latent);
  CHECK(back.allocation_noise_sigma == doctest::Approx(0.05));
  REQUIRE(back.confounder_pairs.size() == 1);
  CHECK(back.confounder_pairs[0].resource == 2);
  REQUIRE(back.attack_path.size() == 2);
  CHECK(back.attack_path[1].coefficient == doctest::Approx(0.8));
  REQUIRE(back.cross_couplings.size() == 1);
  CHECK(back.cross_couplings[0].onset == 7);
  REQUIRE(back.regime_changes.size() == 2);
  CHECK(back.regime_changes[0].magnitude == doctest::Approx(2.5));
  CHECK(back.regime_changes[0].slice == RegimeChange::kAllSlices);
  CHECK(back.regime_changes[1].slice == 3);
  CHECK(back.allocation_shares == cfg.allocation_shares);
  CHECK(back.seed == 99);
}

TEST_CASE("scenario round trip keeps the truth labels") {
  ScenarioConfig cfg;
  cfg.n_slices = 4;
  cfg.horizon = 60;
  cfg.attack_path = {{0, 3, 1, 0.0}, {2, 10, 1, 0.7}};
  cfg.regime_changes = {{30, 2.0}};
  cfg.seed = 5;
  const Scenario sc = generate(cfg);

  const std::string dir = "io_test_scenario";
  save_scenario(dir, sc);
  const Scenario back = load_scenario(dir);
  REQUIRE(back.truth_path.hops.size() == 2);
  CHECK(back.truth_path.hops[1].slice == 2);
  REQUIRE(back.truth_changepoints.size() == 1);
  CHECK(back.truth_changepoints[0] == 30);
  CHECK(back.config.seed == 5);
  std::filesystem::remove_all(dir);
}
