#include <cmath>
#include <numbers>

#include "doctest.h"
#include "kellylab/kelly_core.hpp"
#include "test_support.hpp"

using namespace kellylab;

namespace {

// g(f) straight from the wager outcomes, no shared code with the library.
double growth_oracle(double p, double r, double f) {
  double g = 0.0;
  if (p > 0) g += p * std::log(f * r + (1 - f));
  if (p < 1) g += (1 - p) * std::log(1 - f);
  return g;
}

double grid_argmax(double p, double r, double step) {
  double best_f = 0.0, best_g = growth_oracle(p, r, 0.0);
  const auto steps = static_cast<long>(std::floor((1.0 - step) / step));
  for (long k = 1; k <= steps; ++k) {
    const double f = static_cast<double>(k) * step;
    const double g = growth_oracle(p, r, f);
    if (g > best_g) {
      best_g = g;
      best_f = f;
    }
  }
  return best_f;
}

}  // namespace

TEST_CASE("BinaryGame validation") {
  CHECK_THROWS_AS(BinaryGame(-0.1, 2.0), Error);
  CHECK_THROWS_AS(BinaryGame(1.1, 2.0), Error);
  CHECK_THROWS_AS(BinaryGame(0.5, 1.0), Error);
  CHECK_NOTHROW(BinaryGame(0.0, 1.5));
}

TEST_CASE("kelly_fraction examples") {
  const auto f = kelly_fraction(BinaryGame(0.6, 2.0));
  CHECK_FALSE(f.no_edge);
  CHECK(f.fraction == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(std::abs(grid_argmax(0.6, 2.0, 1e-6) - f.fraction) <= 1e-5);

  const auto fair = kelly_fraction(BinaryGame(0.5, 2.0));
  CHECK(fair.no_edge);
  CHECK(fair.fraction == 0.0);

  const auto sure = kelly_fraction(BinaryGame(1.0, 2.0));
  CHECK_FALSE(sure.no_edge);
  CHECK(sure.fraction == 1.0);

  CHECK(kelly_fraction(BinaryGame(0.1, 2.0)).no_edge);
}

TEST_CASE("kelly_growth examples") {
  const BinaryGame game(0.6, 2.0);
  CHECK(kelly_growth(game, 0.0)->value == 0.0);
  CHECK(kelly_growth(BinaryGame(0.3, 7.0), 0.0)->value == 0.0);
  // 0.6 ln 1.2 + 0.4 ln 0.8 evaluated at 40 digits.
  CHECK(std::abs(kelly_growth(game, 0.2)->value - 0.020135513550688873) <= 1e-15);
  const auto ruin = kelly_growth(game, 1.0);
  REQUIRE_FALSE(ruin.ok());
  CHECK(ruin.unbounded().kind == UnboundedKind::RuinRisk);
  CHECK(kelly_growth(BinaryGame(1.0, 2.0), 1.0)->value == doctest::Approx(std::numbers::ln2));
  CHECK_THROWS_AS(kelly_growth(game, 1.5), Error);
  CHECK_THROWS_AS(kelly_growth(game, -0.1), Error);
}

TEST_CASE("kelly_growth_at_optimum_fair_odds examples") {
  CHECK(kelly_growth_at_optimum_fair_odds(BinaryGame(0.25, 4.0)).value <= 1e-15);
  const BinaryGame game(0.6, 2.0);
  const double g_star = kelly_growth_at_optimum_fair_odds(game).value;
  CHECK(std::abs(g_star - 0.020135513550688873) <= 1e-15);
  CHECK(std::abs(g_star - kelly_growth(game, kelly_fraction(game).fraction)->value) <= 1e-12);
  CHECK(kelly_growth_at_optimum_fair_odds(BinaryGame(1.0, 2.0)).value ==
        doctest::Approx(std::numbers::ln2).epsilon(1e-15));
}

TEST_CASE("property: closed form beats a 1e-4 grid and matches the fair-odds KL") {
  testing::Rng rng(7);
  int tested = 0;
  while (tested < 1000) {
    const double r = testing::uniform(rng, 1.05, 10.0);
    const double p = testing::uniform(rng, 0.0, 1.0);
    if (p * r <= 1.0) continue;
    ++tested;
    const BinaryGame game(p, r);
    const double f_star = kelly_fraction(game).fraction;
    const double g_star = kelly_growth(game, f_star)->value;
    double grid_best = -INFINITY;
    for (int k = 0; k <= 9990; ++k) {
      const double f = k * 1e-4;
      if (f >= 1.0) break;
      grid_best = std::max(grid_best, growth_oracle(p, r, f));
    }
    CHECK(grid_best <= g_star + 1e-8);
    CHECK(std::abs(g_star - kelly_growth_at_optimum_fair_odds(game).value) <= 1e-12);
  }
}

TEST_CASE("horse_race_growth examples") {
  SUBCASE("fair uniform race, agreeing with the market") {
    const HorseRace race(SimplexVector({0.5, 0.5}), {2, 2});
    const auto g = horse_race_growth(race, SimplexVector({0.5, 0.5}));
    REQUIRE(g.ok());
    CHECK(std::abs(g->total.value) <= 1e-15);
    CHECK(g->money_term.value == doctest::Approx(std::numbers::ln2).epsilon(1e-15));
    CHECK(g->entropy_term.value == doctest::Approx(std::numbers::ln2).epsilon(1e-15));
    CHECK(g->divergence_term.value == 0.0);
  }
  SUBCASE("proportional bet on a skewed race") {
    const HorseRace race(SimplexVector({0.7, 0.3}), {2, 2});
    const auto g = horse_race_growth(race, SimplexVector({0.7, 0.3}));
    REQUIRE(g.ok());
    const double oracle = 0.7 * std::log(2 * 0.7) + 0.3 * std::log(2 * 0.3);
    CHECK(std::abs(g->total.value - oracle) <= 1e-15);
    CHECK(g->total.value == doctest::Approx(0.082283).epsilon(1e-5));
    CHECK(g->residual() <= 1e-12);
  }
  SUBCASE("nothing on a live horse is ruin") {
    const HorseRace race(SimplexVector({0.5, 0.5}), {2, 2});
    const auto g = horse_race_growth(race, SimplexVector({1, 0}));
    REQUIRE_FALSE(g.ok());
    CHECK(g.unbounded().kind == UnboundedKind::RuinRisk);
  }
  SUBCASE("zero weight on a horse that never wins is fine") {
    const HorseRace race(SimplexVector({1, 0}), {3, 3});
    const auto g = horse_race_growth(race, SimplexVector({1, 0}));
    REQUIRE(g.ok());
    CHECK(g->total.value == doctest::Approx(std::log(3.0)));
  }
  CHECK_THROWS_AS(HorseRace(SimplexVector({0.5, 0.5}), {2, 0}), Error);
  CHECK_THROWS_AS(HorseRace(SimplexVector({0.5, 0.5}), {2}), Error);
}

TEST_CASE("horse_race_optimal examples") {
  const HorseRace race(SimplexVector({0.2, 0.3, 0.5}), {9, 1.5, 4});
  CHECK(horse_race_optimal(race) == SimplexVector({0.2, 0.3, 0.5}));
  CHECK(horse_race_optimal(HorseRace(SimplexVector({1, 0}), {2, 2})) == SimplexVector({1, 0}));
  CHECK(horse_race_optimal(HorseRace(SimplexVector::uniform(4), {1, 2, 3, 4})) == SimplexVector::uniform(4));
  CHECK(horse_race_growth(race, horse_race_optimal(race))->divergence_term.value == 0.0);
}

TEST_CASE("fair_odds_growth examples") {
  const HorseRace race(SimplexVector({0.7, 0.3}), {2, 2});
  SUBCASE("agreeing with the market earns nothing") {
    const auto g = fair_odds_growth(race, SimplexVector({0.5, 0.5}));
    REQUIRE(g.ok());
    CHECK(std::abs(g->growth().value) <= 1e-15);
  }
  SUBCASE("betting the truth earns KL(P||Q)") {
    const auto g = fair_odds_growth(race, SimplexVector({0.7, 0.3}));
    REQUIRE(g.ok());
    const double oracle = 0.7 * std::log(0.7 / 0.5) + 0.3 * std::log(0.3 / 0.5);
    CHECK(std::abs(g->growth().value - oracle) <= 1e-15);
    CHECK(g->market_divergence.value == doctest::Approx(0.082283).epsilon(1e-5));
  }
  SUBCASE("everyone agrees") {
    const HorseRace three(SimplexVector::uniform(3), {3, 3, 3});
    CHECK(std::abs(fair_odds_growth(three, SimplexVector::uniform(3))->growth().value) <= 1e-15);
  }
  SUBCASE("unfair odds are rejected") {
    const HorseRace vig(SimplexVector({0.5, 0.5}), {1.9, 1.9});
    CHECK_FALSE(has_fair_odds(vig));
    try {
      fair_odds_growth(vig, SimplexVector({0.5, 0.5}));
      FAIL("expected NotFairOdds");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::NotFairOdds);
    }
  }
}

TEST_CASE("property: decomposition, proportional optimality and fair-odds equivalence") {
  testing::Rng rng(99);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t m = testing::uniform_index(rng, 2, 6);
    const SimplexVector p = testing::random_simplex(rng, m);
    std::vector<double> r(m);
    for (auto& x : r) x = testing::uniform(rng, 1.01, 20.0);
    const HorseRace race(p, r);
    const SimplexVector w = testing::random_simplex(rng, m);

    const auto g = horse_race_growth(race, w);
    REQUIRE(g.ok());
    double direct = 0.0;
    for (std::size_t i = 0; i < m; ++i) direct += p[i] * std::log(r[i] * w[i]);
    CHECK(std::abs(direct - (g->money_term.value - g->entropy_term.value - g->divergence_term.value)) <= 1e-12);
    CHECK(g->residual() <= 1e-12);
  }

  for (int race_no = 0; race_no < 20; ++race_no) {
    const std::size_t m = testing::uniform_index(rng, 2, 5);
    const SimplexVector p = testing::random_simplex(rng, m);
    std::vector<double> r(m);
    for (auto& x : r) x = testing::uniform(rng, 1.01, 20.0);
    const HorseRace race(p, r);
    const double best = horse_race_growth(race, p)->total.value;
    for (int k = 0; k < 100; ++k) {
      const SimplexVector w = testing::random_simplex(rng, m);
      const double g = horse_race_growth(race, w)->total.value;
      CHECK(best >= g);
      CHECK(std::abs((best - g) - kl_divergence(p, w)->value) <= 1e-12);
    }
  }

  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = testing::uniform_index(rng, 2, 6);
    const SimplexVector q = testing::random_simplex(rng, m);
    std::vector<double> r(m);
    for (std::size_t i = 0; i < m; ++i) r[i] = 1.0 / q[i];
    const HorseRace race(testing::random_simplex(rng, m), r);
    if (!has_fair_odds(race)) continue;
    const SimplexVector w = testing::random_simplex(rng, m);
    const auto fair = fair_odds_growth(race, w);
    CHECK(std::abs(fair->growth().value - horse_race_growth(race, w)->total.value) <= 1e-12);
  }
}
