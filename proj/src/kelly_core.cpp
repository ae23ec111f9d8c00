#include "kellylab/kelly_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kellylab {

BinaryGame::BinaryGame(double p, double r) : p_(p), r_(r) {
  if (!(p >= 0.0 && p <= 1.0)) {
    std::ostringstream msg;
    msg << "win probability must lie in [0, 1], got " << p;
    throw Error(ErrorKind::InvalidArgument, msg.str());
  }
  if (!(r > 1.0) || !std::isfinite(r)) {
    std::ostringstream msg;
    msg << "gross return must be finite and > 1, got " << r;
    throw Error(ErrorKind::InvalidArgument, msg.str());
  }
}

KellyFraction kelly_fraction(const BinaryGame& game) {
  const double edge = game.p() * game.r() - 1.0;
  if (edge <= 0.0) return KellyFraction{0.0, true};
  return KellyFraction{std::clamp(edge / (game.r() - 1.0), 0.0, 1.0), false};
}

Outcome<Nats> kelly_growth(const BinaryGame& game, double f) {
  if (!(f >= 0.0 && f <= 1.0)) {
    std::ostringstream msg;
    msg << "wager fraction must lie in [0, 1], got " << f;
    throw Error(ErrorKind::InvalidArgument, msg.str());
  }
  const double p = game.p();
  const double q = 1.0 - p;
  if (f == 1.0 && q > 0.0) {
    return Outcome<Nats>::ruin("full wager with a positive probability of loss");
  }
  double g = 0.0;
  if (p > 0.0) g += p * std::log1p(f * (game.r() - 1.0));
  if (q > 0.0) g += q * std::log1p(-f);
  return Nats{g};
}

Nats kelly_growth_at_optimum_fair_odds(const BinaryGame& game) {
  const SimplexVector ours({game.p(), 1.0 - game.p()});
  const double q = game.fair_q();
  const SimplexVector market({q, 1.0 - q});
  // The market has full support because 0 < q < 1.
  return kl_divergence(ours, market).value();
}

HorseRace::HorseRace(SimplexVector probs, std::vector<double> returns)
    : probs_(std::move(probs)), returns_(std::move(returns)) {
  if (probs_.size() != returns_.size()) {
    std::ostringstream msg;
    msg << "horse race has " << probs_.size() << " probabilities but " << returns_.size()
        << " returns";
    throw Error(ErrorKind::DimensionMismatch, msg.str());
  }
  for (std::size_t i = 0; i < returns_.size(); ++i) {
    if (!(returns_[i] > 0.0) || !std::isfinite(returns_[i])) {
      std::ostringstream msg;
      msg << "return of horse " << i << " must be finite and > 0, got " << returns_[i];
      throw Error(ErrorKind::NonPositiveReturn, msg.str());
    }
  }
}

Outcome<GrowthDecomposition> horse_race_growth(const HorseRace& race, const SimplexVector& w) {
  if (w.size() != race.size()) {
    throw Error(ErrorKind::DimensionMismatch, "weight vector does not match the race");
  }
  const SimplexVector& p = race.probs();
  const auto divergence = kl_divergence(p, w);
  if (!divergence) {
    return Outcome<GrowthDecomposition>::ruin(divergence.unbounded().detail);
  }

  GrowthDecomposition d;
  double money = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    const double r = race.returns()[i];
    money += p[i] * std::log(r);
    total += p[i] * std::log(r * w[i]);
  }
  d.money_term = Nats{money};
  d.entropy_term = entropy(p);
  d.divergence_term = divergence.value();
  d.total = Nats{total};
  return d;
}

SimplexVector horse_race_optimal(const HorseRace& race) { return race.probs(); }

bool has_fair_odds(const HorseRace& race) {
  double sum = 0.0;
  for (double r : race.returns()) sum += 1.0 / r;
  return std::abs(sum - 1.0) <= kSimplexRenormTolerance;
}

Outcome<FairOddsGrowth> fair_odds_growth(const HorseRace& race, const SimplexVector& w) {
  if (w.size() != race.size()) {
    throw Error(ErrorKind::DimensionMismatch, "weight vector does not match the race");
  }
  std::vector<double> q;
  q.reserve(race.size());
  double sum = 0.0;
  for (double r : race.returns()) {
    q.push_back(1.0 / r);
    sum += q.back();
  }
  if (std::abs(sum - 1.0) > kSimplexRenormTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "implied probabilities sum to " << sum << ", odds are not fair";
    throw Error(ErrorKind::NotFairOdds, msg.str());
  }
  const SimplexVector market(std::move(q));
  const auto ours = kl_divergence(race.probs(), w);
  if (!ours) return Outcome<FairOddsGrowth>(ours.unbounded());
  return FairOddsGrowth{kl_divergence(race.probs(), market).value(), ours.value()};
}

}  // namespace kellylab
