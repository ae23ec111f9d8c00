#pragma once

#include <utility>
#include <vector>

#include "kellylab/info_measures.hpp"
#include "kellylab/outcome.hpp"

namespace kellylab {

// A single wager: with probability p the stake is multiplied by the gross
// return r (odds + 1); otherwise the stake is lost.
class BinaryGame {
 public:
  // Requires 0 <= p <= 1 and r > 1.
  BinaryGame(double p, double r);

  double p() const noexcept { return p_; }
  double r() const noexcept { return r_; }
  // Market-implied win probability under fair odds.
  double fair_q() const noexcept { return 1.0 / r_; }

 private:
  double p_;
  double r_;
};

struct KellyFraction {
  double fraction = 0.0;  // in [0, 1]
  bool no_edge = false;   // p * r <= 1, optimal wager is zero
};

// f* = (p r - 1)/(r - 1), clamped to [0, 1]. No shorting, no leverage.
KellyFraction kelly_fraction(const BinaryGame& game);

// g(f) = p ln(f r + 1 - f) + (1 - p) ln(1 - f). RuinRisk when f = 1 and p < 1.
// Throws InvalidArgument for f outside [0, 1].
Outcome<Nats> kelly_growth(const BinaryGame& game, double f);

// KL(Bern(p) || Bern(1/r)). Equals kelly_growth at the Kelly fraction whenever
// p r >= 1; for p r < 1 it is the unclamped optimum, which would need a short.
Nats kelly_growth_at_optimum_fair_odds(const BinaryGame& game);

class HorseRace {
 public:
  // Requires matching dimensions and every return > 0.
  HorseRace(SimplexVector probs, std::vector<double> returns);

  const SimplexVector& probs() const noexcept { return probs_; }
  const std::vector<double>& returns() const noexcept { return returns_; }
  std::size_t size() const noexcept { return returns_.size(); }

 private:
  SimplexVector probs_;
  std::vector<double> returns_;
};

// g(W) = sum p_i ln r_i - H(P) - KL(P||W).
struct GrowthDecomposition {
  Nats money_term;       // sum p_i ln r_i
  Nats entropy_term;     // H(P)
  Nats divergence_term;  // KL(P||W)
  Nats total;            // sum p_i ln(r_i w_i), evaluated directly

  // |total - (money - entropy - divergence)|
  double residual() const {
    const double v = total.value - (money_term.value - entropy_term.value - divergence_term.value);
    return v < 0 ? -v : v;
  }
};

// RuinRisk when some horse with p_i > 0 receives w_i = 0.
Outcome<GrowthDecomposition> horse_race_growth(const HorseRace& race, const SimplexVector& w);

// Proportional betting: W* = P, independent of the returns.
SimplexVector horse_race_optimal(const HorseRace& race);

struct FairOddsGrowth {
  Nats market_divergence;      // KL(P||Q)
  Nats allocation_divergence;  // KL(P||W)
  Nats growth() const { return market_divergence - allocation_divergence; }
};

// q_i = 1/r_i must sum to 1 within kSimplexRenormTolerance, else throws
// NotFairOdds. SupportViolation when W misses P's support.
Outcome<FairOddsGrowth> fair_odds_growth(const HorseRace& race, const SimplexVector& w);

bool has_fair_odds(const HorseRace& race);

}  // namespace kellylab
