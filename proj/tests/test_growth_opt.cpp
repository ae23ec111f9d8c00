#include <cmath>

#include "doctest.h"
#include "kellylab/growth_opt.hpp"
#include "kellylab/kelly_core.hpp"
#include "test_support.hpp"

using namespace kellylab;

TEST_CASE("ScenarioSet validation") {
  CHECK_THROWS_AS(ScenarioSet(SimplexVector({1.0}), {{0.0, 0.0}}), Error);
  CHECK_THROWS_AS(ScenarioSet(SimplexVector({1.0}), {{-1.0, 2.0}}), Error);
  CHECK_THROWS_AS(ScenarioSet(SimplexVector({0.5, 0.5}), {{1.0, 2.0}}), Error);
  CHECK_THROWS_AS(ScenarioSet(SimplexVector({0.5, 0.5}), {{1.0, 2.0}, {1.0}}), Error);
  CHECK_NOTHROW(ScenarioSet(SimplexVector({0.5, 0.5}), {{1.0, 0.0}, {0.0, 1.0}}));
}

TEST_CASE("expected_log_growth examples") {
  const ScenarioSet flat(SimplexVector({1.0}), {{1.0}});
  CHECK(expected_log_growth(flat, SimplexVector({1.0}))->value == 0.0);

  const ScenarioSet race = ScenarioSet::horse_race(SimplexVector({0.7, 0.3}), {2, 2});
  const double g = expected_log_growth(race, SimplexVector({0.7, 0.3}))->value;
  const auto kelly = horse_race_growth(HorseRace(SimplexVector({0.7, 0.3}), {2, 2}), SimplexVector({0.7, 0.3}));
  CHECK(std::abs(g - kelly->total.value) <= 1e-12);
  CHECK(g == doctest::Approx(0.082283).epsilon(1e-5));

  const ScenarioSet hedge(SimplexVector({0.5, 0.5}), {{1.1, 0.9}, {0.9, 1.1}});
  CHECK(std::abs(expected_log_growth(hedge, SimplexVector({0.5, 0.5}))->value) <= 1e-15);

  const auto ruin = expected_log_growth(race, SimplexVector({1.0, 0.0}));
  REQUIRE_FALSE(ruin.ok());
  CHECK(ruin.unbounded().kind == UnboundedKind::RuinRisk);

  // A zero-probability row cannot ruin anyone.
  const ScenarioSet ghost(SimplexVector({1.0, 0.0}), {{1.5, 0.0}, {0.0, 1.0}});
  CHECK(expected_log_growth(ghost, SimplexVector({1.0, 0.0})).ok());
}

TEST_CASE("log_optimal_portfolio examples") {
  SUBCASE("horse race: proportional betting") {
    const auto best = log_optimal_portfolio(ScenarioSet::horse_race(SimplexVector({0.2, 0.3, 0.5}), {5, 2, 1.5}));
    CHECK(best.converged);
    CHECK(best.weights.max_abs_diff(SimplexVector({0.2, 0.3, 0.5})) <= 1e-6);
    CHECK(best.certificate.max_violation <= 1e-8);
  }
  SUBCASE("pointwise dominance forces a corner") {
    const ScenarioSet sc(SimplexVector({0.3, 0.3, 0.4}), {{1.3, 1.2}, {0.9, 0.8}, {1.05, 1.0}});
    const auto best = log_optimal_portfolio(sc);
    CHECK(best.converged);
    CHECK(best.weights.max_abs_diff(SimplexVector({1, 0})) <= 1e-6);
    CHECK(best.certificate.multipliers[1] < 1.0);
  }
  SUBCASE("classic Kelly embedded as cash plus a bet") {
    const ScenarioSet sc(SimplexVector({0.6, 0.4}), {{1.0, 2.0}, {1.0, 0.0}});
    const auto best = log_optimal_portfolio(sc);
    CHECK(best.converged);
    const double f = kelly_fraction(BinaryGame(0.6, 2.0)).fraction;
    CHECK(best.weights.max_abs_diff(SimplexVector({1 - f, f})) <= 1e-6);
    CHECK(std::abs(best.growth.value - kelly_growth(BinaryGame(0.6, 2.0), f)->value) <= 1e-12);
  }
  SUBCASE("degenerate: every row proportional to one direction") {
    const ScenarioSet sc(SimplexVector({0.5, 0.5}), {{1.0, 2.0, 2.0}, {0.5, 1.0, 1.0}});
    const auto best = log_optimal_portfolio(sc);
    CHECK(best.degenerate);
    CHECK(best.weights.max_abs_diff(SimplexVector({0, 0.5, 0.5})) <= 1e-15);
    CHECK(best.certificate.max_violation <= 1e-12);

    const ScenarioSet flat(SimplexVector({0.25, 0.75}), {{1.0, 1.0}, {3.0, 3.0}});
    const auto any = log_optimal_portfolio(flat);
    CHECK(any.degenerate);
    CHECK(any.weights == SimplexVector::uniform(2));
  }
}

TEST_CASE("property: solver optimality against random portfolios and vertices") {
  testing::Rng rng(424242);
  for (int set = 0; set < 200; ++set) {
    const std::size_t m = testing::uniform_index(rng, 2, 5);
    const std::size_t rows = testing::uniform_index(rng, 2, 20);
    const ScenarioSet sc = testing::random_scenarios(rng, m, rows, 0.3, 2.0);
    const auto best = log_optimal_portfolio(sc);
    REQUIRE(best.converged);
    CHECK(best.certificate.max_violation <= 1e-8);

    for (std::size_t i = 0; i < m; ++i) {
      CHECK(best.certificate.multipliers[i] <= 1.0 + 1e-8);
      if (best.weights[i] > 1e-6) CHECK(std::abs(best.certificate.multipliers[i] - 1.0) <= 1e-6);
      CHECK(expected_log_growth(sc, SimplexVector::one_hot(m, i))->value <= best.growth.value + 1e-9);
    }
    for (int k = 0; k < 1000; ++k) {
      const SimplexVector w = testing::random_simplex(rng, m, 0.0);
      CHECK(expected_log_growth(sc, w)->value <= best.growth.value + 1e-9);
    }
  }
}

TEST_CASE("property: solver handles zero returns and sparse supports") {
  testing::Rng rng(31337);
  for (int set = 0; set < 100; ++set) {
    const std::size_t m = testing::uniform_index(rng, 2, 5);
    const std::size_t rows = testing::uniform_index(rng, 2, 12);
    std::vector<std::vector<double>> r(rows, std::vector<double>(m));
    for (auto& row : r) {
      for (auto& x : row) x = testing::uniform(rng, 0.0, 1.0) < 0.3 ? 0.0 : testing::uniform(rng, 0.2, 3.0);
      row[testing::uniform_index(rng, 0, m - 1)] = testing::uniform(rng, 0.5, 3.0);
    }
    const ScenarioSet sc(testing::random_simplex(rng, rows), std::move(r));
    const auto best = log_optimal_portfolio(sc);
    CHECK(best.converged);
    CHECK(best.certificate.max_violation <= 1e-8);
    for (int k = 0; k < 200; ++k) {
      const auto g = expected_log_growth(sc, testing::random_simplex(rng, m, 0.0));
      if (g) CHECK(g->value <= best.growth.value + 1e-9);
    }
  }
}

TEST_CASE("property: horse-race sets recover P") {
  testing::Rng rng(5);
  for (int set = 0; set < 100; ++set) {
    const std::size_t m = testing::uniform_index(rng, 2, 6);
    const SimplexVector p = testing::random_simplex(rng, m);
    std::vector<double> r(m);
    for (auto& x : r) x = testing::uniform(rng, 1.1, 8.0);
    const auto best = log_optimal_portfolio(ScenarioSet::horse_race(p, r));
    CHECK(best.weights.max_abs_diff(p) <= 1e-6);
    CHECK(std::abs(best.growth.value - horse_race_growth(HorseRace(p, r), p)->total.value) <= 1e-9);
  }
}

TEST_CASE("property: restarts agree on the optimal growth") {
  testing::Rng rng(8080);
  for (int set = 0; set < 30; ++set) {
    const std::size_t m = testing::uniform_index(rng, 2, 5);
    const ScenarioSet sc = testing::random_scenarios(rng, m, testing::uniform_index(rng, 3, 15), 0.5, 1.8);
    const auto reference = log_optimal_portfolio(sc);
    for (int start = 0; start < 10; ++start) {
      SolverOptions opt;
      opt.initial = testing::random_simplex(rng, m);
      const auto again = log_optimal_portfolio(sc, opt);
      CHECK(again.converged);
      CHECK(std::abs(again.growth.value - reference.growth.value) <= 1e-10);
    }
  }
}

TEST_CASE("wealth_path examples") {
  const ReturnMatrix ones({{1, 1, 1}, {1, 1, 1}});
  const auto flat = wealth_path(ones, SimplexVector({0.3, 0.7}));
  CHECK(flat->cumulative == 1.0);
  CHECK(flat->growth.value == 0.0);

  const ReturnMatrix two({{1.1, 1.2}, {0.9, 0.8}});
  const auto half = wealth_path(two, SimplexVector({0.5, 0.5}));
  CHECK(half->cumulative == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(half->period_returns.size() == 2);
  CHECK(std::abs(half->growth.value) <= 1e-15);

  const auto hold = wealth_path(two, SimplexVector({1, 0}));
  CHECK(hold->cumulative == doctest::Approx(1.1 * 1.2).epsilon(1e-15));

  const ReturnMatrix race({{2, 0}, {0, 2}}, true);
  CHECK_FALSE(wealth_path(race, SimplexVector({1, 0})).ok());
  CHECK_THROWS_AS(ReturnMatrix({{2, 0}, {0, 2}}), Error);
  CHECK_THROWS_AS(wealth_path(two, SimplexVector({1.0})), Error);
}

TEST_CASE("wealth_path survives long horizons in log space") {
  std::vector<std::vector<double>> v(1, std::vector<double>(100000, 1.01));
  const auto path = wealth_path(ReturnMatrix(v), SimplexVector({1.0}));
  CHECK(path->growth.value == doctest::Approx(std::log(1.01)).epsilon(1e-12));
  CHECK(std::isinf(path->cumulative));
}
