#pragma once

#include <optional>
#include <string>
#include <utility>

#include "kellylab/growth_opt.hpp"
#include "kellylab/info_measures.hpp"
#include "kellylab/type_class.hpp"

namespace kellylab {

// w'_i = probability that asset i has the largest return in a scenario row.
// Exact ties split the row's probability evenly among the tied assets.
SimplexVector winner_probabilities(const ScenarioSet& scenarios);

enum class BoundStatus {
  Satisfied,
  Violated,
  // g(W') = -inf; the bound is vacuous.
  SatisfiedDegenerate,
};

const char* to_string(BoundStatus status);

// g(W*) - g(W') <= H(W').
struct WinnerFractionResult {
  SimplexVector w_prime;
  SimplexVector w_star;
  Nats entropy_bound{};     // H(W')
  Nats optimal_growth{};    // g(W*)
  Nats heuristic_growth{};  // g(W'); meaningless when status is SatisfiedDegenerate
  Nats gap{};               // g(W*) - g(W')
  BoundStatus status = BoundStatus::Satisfied;
  std::string warning{};
};

inline constexpr double kWinnerBoundSlack = 1e-9;

WinnerFractionResult entropy_bound_check(const ScenarioSet& scenarios, const SolverOptions& options = {});

// Per-period argmax path (lowest index on ties) and its product return.
std::pair<Sequence, double> max_sequence_return(const ReturnMatrix& matrix);

}  // namespace kellylab
