#include "kellylab/winner_fraction.hpp"

#include <algorithm>
#include <cmath>

namespace kellylab {

SimplexVector winner_probabilities(const ScenarioSet& scenarios) {
  std::vector<double> w(scenarios.assets(), 0.0);
  for (std::size_t k = 0; k < scenarios.rows(); ++k) {
    const double p = scenarios.prob(k);
    if (p == 0.0) continue;
    const auto& r = scenarios.returns(k);
    const double best = *std::max_element(r.begin(), r.end());
    const auto ties = static_cast<double>(std::count(r.begin(), r.end(), best));
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (r[i] == best) w[i] += p / ties;
    }
  }
  return SimplexVector(std::move(w));
}

const char* to_string(BoundStatus status) {
  switch (status) {
    case BoundStatus::Satisfied: return "SATISFIED";
    case BoundStatus::Violated: return "VIOLATED";
    case BoundStatus::SatisfiedDegenerate: return "SATISFIED-DEGENERATE";
  }
  return "UNKNOWN";
}

WinnerFractionResult entropy_bound_check(const ScenarioSet& scenarios, const SolverOptions& options) {
  const OptimalPortfolio optimum = log_optimal_portfolio(scenarios, options);
  SimplexVector w_prime = winner_probabilities(scenarios);

  WinnerFractionResult result{.w_prime = w_prime,
                              .w_star = optimum.weights,
                              .entropy_bound = entropy(w_prime),
                              .optimal_growth = optimum.growth};
  const auto heuristic = expected_log_growth(scenarios, w_prime);
  if (!heuristic) {
    result.status = BoundStatus::SatisfiedDegenerate;
    result.warning = "winner-fraction portfolio is ruined: " + heuristic.unbounded().detail;
    return result;
  }
  result.heuristic_growth = heuristic.value();
  result.gap = result.optimal_growth - result.heuristic_growth;
  result.status = result.gap.value <= result.entropy_bound.value + kWinnerBoundSlack
                      ? BoundStatus::Satisfied
                      : BoundStatus::Violated;
  return result;
}

std::pair<Sequence, double> max_sequence_return(const ReturnMatrix& matrix) {
  Sequence s;
  s.path.reserve(matrix.periods());
  double log_r = 0.0;
  bool zero = false;
  for (std::size_t t = 0; t < matrix.periods(); ++t) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < matrix.assets(); ++i) {
      if (matrix(i, t) > matrix(best, t)) best = i;
    }
    s.path.push_back(best);
    if (matrix(best, t) == 0.0) {
      zero = true;
    } else {
      log_r += std::log(matrix(best, t));
    }
  }
  return {std::move(s), zero ? 0.0 : std::exp(log_r)};
}

}  // namespace kellylab
