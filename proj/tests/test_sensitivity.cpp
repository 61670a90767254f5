#include <doctest.h>

#include <cmath>
#include <set>

#include "mgamsgd/sensitivity.hpp"

using namespace mgamsgd;

TEST_CASE("morris spread measures") {
  const std::vector<double> v123 = {1.0, 2.0, 3.0};
  CHECK(morris_mu(v123) == 1.0);
  CHECK(morris_sigma(v123) == 1.0);

  const std::vector<double> two = {0.0, 4.0};
  CHECK(morris_mu(two) == 4.0);
  CHECK(morris_sigma(two) == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-15));

  const std::vector<double> constant = {2.5, 2.5, 2.5, 2.5};
  CHECK(morris_mu(constant) == 0.0);
  CHECK(morris_sigma(constant) == 0.0);

  CHECK_THROWS_AS(morris_mu(std::vector<double>{1.0}), std::domain_error);
  CHECK_THROWS_AS(morris_sigma(std::vector<double>{1.0}), std::domain_error);
}

TEST_CASE("table ranges cover the eleven framework parameters") {
  const auto ranges = table_ranges();
  REQUIRE(ranges.size() == 11);
  const std::vector<std::string> names = {"lr_c", "N_GAi", "N_h",    "N_nh",
                                          "P_sf", "N_x",   "N_x-N_y", "beta_i",
                                          "M_g",  "M_m",   "M_l"};
  for (std::size_t i = 0; i < names.size(); ++i) {
    CHECK(ranges[i].name == names[i]);
    CHECK(ranges[i].base >= ranges[i].lo);
    CHECK(ranges[i].base <= ranges[i].hi);
  }
  CHECK(ranges[0].base == 0.7);
  CHECK(ranges[1].is_integer);
  CHECK(ranges[4].base == 0.98);

  // The grid appliers keep the anisotropy convention: N_x sets a cube at the
  // base delta, N_x - N_y shrinks the lateral axes.
  TrainConfig cfg;
  ranges[5].apply(cfg, 10);
  CHECK(cfg.nx == 10);
  CHECK(cfg.ny == 10);
  CHECK(cfg.nz == 10);
  ranges[6].apply(cfg, 8);
  CHECK(cfg.nx == 10);
  CHECK(cfg.ny == 2);
  CHECK(cfg.nz == 2);
}

TEST_CASE("a constant mocked metric has zero spread") {
  const MetricRunner constant = [](const TrainConfig&, std::uint64_t) {
    return RunMetrics{7.0, 3.0};
  };
  const SensitivityResult r = morris_oat(table_ranges(), 3, 2, 1, constant, TrainConfig{});
  REQUIRE(r.params.size() == 11);
  for (const auto& p : r.params)
    for (int m = 0; m < 4; ++m) {
      CHECK(p.mu[m] == 0.0);
      CHECK(p.sigma[m] == 0.0);
    }
  CHECK(r.warnings == 0);
}

TEST_CASE("a metric equal to the swept parameter reproduces the hand values") {
  // One parameter swept over {1, 2, 3}; the metric equals its value, so mu
  // and sigma reduce to the [1,2,3] case for all four metrics.
  std::vector<ParamRange> ranges;
  ranges.push_back({"probe", 1.0, 3.0, 2.0, false,
                    [](TrainConfig& c, double v) { c.lr_c = v; }});
  const MetricRunner identity = [](const TrainConfig& c, std::uint64_t) {
    return RunMetrics{c.lr_c, c.lr_c};
  };
  const SensitivityResult r = morris_oat(ranges, 3, 2, 1, identity, TrainConfig{});
  REQUIRE(r.params.size() == 1);
  for (int m = 0; m < 4; ++m) {
    CHECK(r.params[0].mu[m] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(r.params[0].sigma[m] == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("integer sweeps deduplicate collapsed levels") {
  std::vector<ParamRange> ranges;
  ranges.push_back({"int_probe", 1.0, 2.0, 1.0, true,
                    [](TrainConfig& c, double v) { c.n_gai = static_cast<int>(v); }});
  const MetricRunner identity = [](const TrainConfig& c, std::uint64_t) {
    return RunMetrics{static_cast<double>(c.n_gai), 1.0};
  };
  const SensitivityResult r = morris_oat(ranges, 3, 1, 1, identity, TrainConfig{});
  CHECK(r.params[0].level_metrics.size() == 2);  // 1, 1.5 -> 2, 2 collapses
}

TEST_CASE("failed sweep points are excluded with a warning") {
  std::vector<ParamRange> ranges;
  ranges.push_back({"probe", 1.0, 4.0, 1.0, false,
                    [](TrainConfig& c, double v) { c.lr_c = v; }});
  const MetricRunner flaky = [](const TrainConfig& c, std::uint64_t) {
    if (c.lr_c > 3.5) throw std::runtime_error("boom");
    return RunMetrics{c.lr_c, 1.0};
  };
  const SensitivityResult r = morris_oat(ranges, 4, 2, 1, flaky, TrainConfig{});
  CHECK(r.warnings == 1);
  CHECK(r.params[0].failed_points == 1);
  CHECK(r.params[0].level_metrics.size() == 3);
  CHECK(std::isfinite(r.params[0].mu[0]));
}

TEST_CASE("each rep receives a distinct derived seed") {
  std::set<std::uint64_t> seeds;
  const MetricRunner collect = [&seeds](const TrainConfig&, std::uint64_t s) {
    seeds.insert(s);
    return RunMetrics{1.0, 1.0};
  };
  std::vector<ParamRange> ranges;
  ranges.push_back({"probe", 0.0, 1.0, 0.5, false, [](TrainConfig&, double) {}});
  morris_oat(ranges, 2, 3, 99, collect, TrainConfig{});
  CHECK(seeds.size() == 6);
}

TEST_CASE("argument validation") {
  const MetricRunner r = [](const TrainConfig&, std::uint64_t) {
    return RunMetrics{0.0, 0.0};
  };
  CHECK_THROWS_AS(morris_oat(table_ranges(), 1, 1, 0, r, TrainConfig{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(morris_oat(table_ranges(), 2, 0, 0, r, TrainConfig{}),
                  std::invalid_argument);
}
