#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "kellylab/info_measures.hpp"
#include "kellylab/outcome.hpp"

namespace kellylab {

// Discrete joint distribution of gross returns: each row is one scenario
// with a probability and a return per asset.
class ScenarioSet {
 public:
  // Rows must all have the same width m >= 1, entries finite and >= 0, and
  // at least one strictly positive return per row.
  ScenarioSet(SimplexVector probs, std::vector<std::vector<double>> rows);

  // Row i pays returns[i] on asset i and 0 elsewhere, with probability p_i.
  static ScenarioSet horse_race(const SimplexVector& probs, const std::vector<double>& returns);

  std::size_t assets() const noexcept { return assets_; }
  std::size_t rows() const noexcept { return rows_.size(); }
  double prob(std::size_t row) const { return probs_[row]; }
  const SimplexVector& probs() const noexcept { return probs_; }
  const std::vector<double>& returns(std::size_t row) const { return rows_[row]; }

 private:
  SimplexVector probs_;
  std::vector<std::vector<double>> rows_;
  std::size_t assets_ = 0;
};

// m assets by n periods of gross returns r_{i,t}.
class ReturnMatrix {
 public:
  // values[i][t] is the return of asset i in period t. Entries must be
  // finite and > 0; with allow_zero (horse-race data) zeros are accepted.
  ReturnMatrix(std::vector<std::vector<double>> values, bool allow_zero = false);
  ReturnMatrix(std::vector<std::vector<double>> values, std::vector<std::string> asset_labels,
               std::vector<std::string> period_labels, bool allow_zero = false);

  std::size_t assets() const noexcept { return assets_; }
  std::size_t periods() const noexcept { return periods_; }
  double operator()(std::size_t asset, std::size_t period) const {
    return values_[asset * periods_ + period];
  }
  bool allows_zero() const noexcept { return allow_zero_; }

  const std::vector<std::string>& asset_labels() const noexcept { return asset_labels_; }
  const std::vector<std::string>& period_labels() const noexcept { return period_labels_; }

  // First n periods.
  ReturnMatrix prefix(std::size_t n) const;

 private:
  std::vector<double> values_;  // asset-major
  std::size_t assets_ = 0;
  std::size_t periods_ = 0;
  std::vector<std::string> asset_labels_;
  std::vector<std::string> period_labels_;
  bool allow_zero_ = false;
};

// sum_rows prob * ln(W . r). RuinRisk when a positive-probability row has W . r = 0.
Outcome<Nats> expected_log_growth(const ScenarioSet& scenarios, const SimplexVector& w);

// Bell-Cover first-order conditions: E[r_i / (W . r)] <= 1 everywhere, = 1 on
// the support of W.
struct OptimalityCertificate {
  std::vector<double> multipliers;
  double max_violation = 0.0;
};

OptimalityCertificate certify(const ScenarioSet& scenarios, const SimplexVector& w);

struct SolverOptions {
  static constexpr double kCertificateTolerance = 1e-8;
  static constexpr double kWeightTolerance = 1e-6;

  double tolerance = kCertificateTolerance;
  std::size_t max_iterations = 100000;
  // Multiplicative updates run before switching to active-set Newton steps.
  std::size_t multiplicative_iterations = 200;
  // Starting point; uniform when empty. Zero entries are blended with uniform.
  std::optional<SimplexVector> initial;
};

struct OptimalPortfolio {
  SimplexVector weights;
  OptimalityCertificate certificate;
  Nats growth;
  // Every scenario row is a scalar multiple of one base row.
  bool degenerate = false;
  bool converged = false;
  std::size_t iterations = 0;
};

OptimalPortfolio log_optimal_portfolio(const ScenarioSet& scenarios, const SolverOptions& options = {});

struct WealthPath {
  std::vector<double> period_returns;  // W . r_t
  double log_wealth = 0.0;             // ln R_n
  double cumulative = 1.0;             // R_n; may overflow to inf for long paths
  Nats growth;                         // ln(R_n) / n
};

// Constant-rebalanced portfolio compounding. RuinRisk when some W . r_t <= 0.
Outcome<WealthPath> wealth_path(const ReturnMatrix& matrix, const SimplexVector& w);

}  // namespace kellylab
