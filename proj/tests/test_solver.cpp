#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>
#include <vector>

#include "instances.hpp"
#include "maxent/solver.hpp"
#include "oracles.hpp"

using namespace maxent;
using Catch::Approx;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("expected degrees", "[solver]") {
  const std::vector<double> ones = {1.0, 1.0, 1.0};
  CHECK(expected_degrees(WeightModel::continuous(), ones) == std::vector<double>{1.0, 1.0, 1.0});
  const double h = std::log(2.0) / 2.0;
  const auto geo = expected_degrees(WeightModel::infinite_discrete(), std::vector<double>{h, h, h});
  for (double v : geo) CHECK(v == Approx(2.0));

  Rng rng(3);
  std::vector<double> theta(6);
  for (auto& t : theta) t = -1.0 + 2.0 * rng.uniform();
  const auto got = expected_degrees(WeightModel::finite_discrete(3), theta);
  const auto want = oracle::expected_degrees(oracle::Kind::Finite, 3, theta);
  for (std::size_t i = 0; i < 6; ++i) CHECK_THAT(got[i], WithinRel(want[i], 1e-13));

  CHECK_THROWS_AS(expected_degrees(WeightModel::continuous(), std::vector<double>{1.0, -1.0, 2.0}),
                  DomainError);
}

TEST_CASE("symmetric fits", "[solver]") {
  const std::vector<double> d = {1.0, 1.0, 1.0};
  const auto c = fit(WeightModel::continuous(), d);
  REQUIRE(c.exists == Existence::Exists);
  for (double t : c.theta_hat) CHECK_THAT(t, WithinAbs(1.0, 1e-9));

  const auto b = fit(WeightModel::finite_discrete(2), d);
  REQUIRE(b.exists == Existence::Exists);
  for (double t : b.theta_hat) CHECK_THAT(t, WithinAbs(0.0, 1e-9));
  CHECK(b.converged);
  CHECK(b.residual_inf_norm <= 1e-8);
}

TEST_CASE("geometric fit matches the Newton oracle", "[solver][oracle]") {
  const std::vector<double> theta = {0.5, 0.6, 0.7, 0.8};
  const auto model = WeightModel::infinite_discrete();
  Rng rng(2024);
  int checked = 0;
  for (int attempt = 0; attempt < 200 && checked < 5; ++attempt) {
    const auto d = degrees(sample_graph(model, theta, rng));
    if (!identifiability_gauge(model, d).empty()) continue;
    const auto result = fit(model, d);
    if (result.exists != Existence::Exists) continue;
    const auto ref = oracle::damped_newton(oracle::Kind::Geometric, 0, d, theta);
    CHECK(instances::max_abs_diff(result.theta_hat, ref) < 1e-6);
    ++checked;
  }
  CHECK(checked == 5);
}

TEST_CASE("all families match the Newton oracle", "[solver][oracle]") {
  Rng rng(77);
  for (const auto& family : instances::families()) {
    for (std::size_t n : {4u, 6u, 10u}) {
      for (int k = 0; k < 3; ++k) {
        const auto obs = instances::sample_fittable(family, n, rng);
        const auto ref = oracle::damped_newton(family.kind, family.q, obs.d, obs.theta);
        INFO(family.name << " n=" << n);
        CHECK(instances::max_abs_diff(obs.fit.theta_hat, ref) < 1e-6);
      }
    }
  }
}

TEST_CASE("expected degrees round trip", "[solver]") {
  Rng rng(5);
  for (const auto& family : instances::families()) {
    for (std::size_t n : {5u, 10u, 20u}) {
      const auto theta = instances::random_theta(family, n, rng);
      const auto d = expected_degrees(family.model, theta);
      const auto result = fit(family.model, d);
      INFO(family.name << " n=" << n);
      REQUIRE(result.exists == Existence::Exists);
      CHECK(instances::max_abs_diff(result.theta_hat, theta) < 1e-7);
    }
  }
}

TEST_CASE("per-vertex start reaches the same fit", "[solver]") {
  Rng rng(8);
  for (const auto& family : instances::families()) {
    const auto theta = instances::random_theta(family, 12, rng);
    const auto d = expected_degrees(family.model, theta);
    SolverConfig cfg;
    cfg.init_mode = InitMode::PerVertex;
    const auto a = fit(family.model, d, cfg);
    const auto b = fit(family.model, d);
    REQUIRE(a.exists == Existence::Exists);
    CHECK(instances::max_abs_diff(a.theta_hat, b.theta_hat) < 1e-7);
  }
}

TEST_CASE("fitting is deterministic", "[solver]") {
  const std::vector<double> d = {3.2, 1.1, 0.7, 2.4, 1.9};
  const auto a = fit(WeightModel::continuous(), d);
  const auto b = fit(WeightModel::continuous(), d);
  CHECK(a.theta_hat == b.theta_hat);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("each sweep reduces the residual on a well-posed instance", "[solver]") {
  const auto model = WeightModel::continuous();
  const std::vector<double> theta = {0.3, 0.5, 0.9, 1.2, 0.4, 0.8};
  const auto d = expected_degrees(model, theta);
  double previous = std::numeric_limits<double>::infinity();
  for (int sweeps = 1; sweeps <= 6; ++sweeps) {
    SolverConfig cfg;
    cfg.max_sweeps = sweeps;
    cfg.tolerance = 1e-300;
    const auto r = fit(model, d, cfg);
    CHECK(r.exists == Existence::MaxIterations);
    CHECK(r.residual_inf_norm <= previous);
    previous = r.residual_inf_norm;
  }
}

TEST_CASE("identifiability gauge", "[solver]") {
  const auto geo = WeightModel::infinite_discrete();
  auto report = identifiability_gauge(geo, std::vector<double>{0, 3, 3});
  REQUIRE(report.size() == 1);
  CHECK(report[0].index == 0);
  CHECK(report[0].side == BoundarySide::Lower);

  CHECK(identifiability_gauge(geo, std::vector<double>{1, 2, 3}).empty());

  report = identifiability_gauge(WeightModel::finite_discrete(2), std::vector<double>{2, 1, 1});
  REQUIRE(report.size() == 1);
  CHECK(report[0].index == 0);
  CHECK(report[0].side == BoundarySide::Upper);
}

TEST_CASE("boundary degrees do not produce a fit", "[solver]") {
  const auto geo = fit(WeightModel::infinite_discrete(), std::vector<double>{0, 3, 3});
  CHECK(geo.exists != Existence::Exists);
  CHECK_FALSE(geo.converged);

  const auto beta = fit(WeightModel::finite_discrete(2), std::vector<double>{2, 1, 1});
  CHECK(beta.exists != Existence::Exists);

  // No vertex sits at 0 or n - 1, but vertices 1 and 2 must be joined to each
  // other and to every other vertex, which forces theta_1 + theta_2 to infinity.
  const std::vector<double> d = {2, 2, 1, 1};
  CHECK(identifiability_gauge(WeightModel::finite_discrete(2), d).empty());
  const auto inner = fit(WeightModel::finite_discrete(2), d);
  CHECK(inner.exists != Existence::Exists);
}

TEST_CASE("a tolerance below the scalar tolerance is still reached", "[solver]") {
  // weights 1, 2, 0.5 on a triangle; exact fit is (-1/4, 5/4, 3/4)
  const std::vector<double> d = {3.0, 1.5, 2.5};
  SolverConfig cfg;
  cfg.tolerance = 1e-12;
  cfg.max_sweeps = 5000;
  const auto r = fit(WeightModel::continuous(), d, cfg);
  REQUIRE(r.exists == Existence::Exists);
  CHECK(r.residual_inf_norm <= 1e-12);
  CHECK_THAT(r.theta_hat[0], WithinAbs(-0.25, 1e-11));
  CHECK_THAT(r.theta_hat[1], WithinAbs(1.25, 1e-11));
  CHECK_THAT(r.theta_hat[2], WithinAbs(0.75, 1e-11));
}

TEST_CASE("invalid degree input", "[solver]") {
  CHECK_THROWS_AS(fit(WeightModel::continuous(), std::vector<double>{1, 1}), ValidationError);
  CHECK_THROWS_AS(fit(WeightModel::continuous(), std::vector<double>{1, -1, 1}), DomainError);
  CHECK_THROWS_AS(fit(WeightModel::finite_discrete(2), std::vector<double>{3, 1, 1}), DomainError);
}

TEST_CASE("solver configuration file", "[solver]") {
  std::istringstream in(
      "# solver settings\n"
      "tolerance = 1e-9\n"
      "max_sweeps=40   # fewer\n"
      "\n"
      "init_mode = per_vertex\n"
      "parameter_cap = 20\n");
  const auto cfg = SolverConfig::from_key_value(in);
  CHECK(cfg.tolerance == 1e-9);
  CHECK(cfg.max_sweeps == 40);
  CHECK(cfg.init_mode == InitMode::PerVertex);
  CHECK(cfg.parameter_cap == 20.0);
  CHECK(cfg.scalar_tolerance == SolverConfig{}.scalar_tolerance);

  std::istringstream unknown("speed = 3\n");
  CHECK_THROWS_AS(SolverConfig::from_key_value(unknown), std::invalid_argument);
  std::istringstream bad("tolerance = fast\n");
  CHECK_THROWS_AS(SolverConfig::from_key_value(bad), std::invalid_argument);
  std::istringstream negative("tolerance = -1\n");
  CHECK_THROWS_AS(SolverConfig::from_key_value(negative), std::invalid_argument);
  std::istringstream no_eq("tolerance 1\n");
  CHECK_THROWS_AS(SolverConfig::from_key_value(no_eq), std::invalid_argument);
}
