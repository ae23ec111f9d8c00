#pragma once

#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "kellylab/outcome.hpp"

namespace kellylab {

inline constexpr double kLn2 = std::numbers::ln2;

// Drift tolerated (and renormalized away) when building a SimplexVector.
inline constexpr double kSimplexRenormTolerance = 1e-9;

struct Bits {
  double value = 0.0;
};

// Information and growth quantities are carried in natural-log units
// internally; bits only appear at reporting boundaries.
struct Nats {
  double value = 0.0;

  Bits to_bits() const { return Bits{value / kLn2}; }

  friend Nats operator+(Nats a, Nats b) { return Nats{a.value + b.value}; }
  friend Nats operator-(Nats a, Nats b) { return Nats{a.value - b.value}; }
  friend Nats operator-(Nats a) { return Nats{-a.value}; }
  friend auto operator<=>(const Nats&, const Nats&) = default;
};

inline Bits to_bits(Nats x) { return x.to_bits(); }

// Nonnegative weights summing to one. Used for portfolios, true
// probabilities, market-implied probabilities and winner fractions.
class SimplexVector {
 public:
  // Throws Error(InvalidSimplex) on empty input, negative or non-finite
  // entries, or when |sum - 1| exceeds kSimplexRenormTolerance. Smaller
  // drift is renormalized away.
  explicit SimplexVector(std::vector<double> weights);

  static SimplexVector uniform(std::size_t m);
  static SimplexVector one_hot(std::size_t m, std::size_t index);

  std::size_t size() const noexcept { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }
  std::span<const double> weights() const noexcept { return weights_; }
  const std::vector<double>& vector() const noexcept { return weights_; }

  auto begin() const noexcept { return weights_.begin(); }
  auto end() const noexcept { return weights_.end(); }

  double max_abs_diff(const SimplexVector& other) const;

  friend bool operator==(const SimplexVector&, const SimplexVector&) = default;

 private:
  std::vector<double> weights_;
};

// H(P) = sum p_i ln(1/p_i), with 0 ln(1/0) = 0.
Nats entropy(const SimplexVector& p);

// KL(P||Q) = sum p_i ln(p_i/q_i). SupportViolation when some p_i > 0 has q_i = 0.
Outcome<Nats> kl_divergence(const SimplexVector& p, const SimplexVector& q);

// H(P,Q) = sum p_i ln(1/q_i). Same support rule as kl_divergence.
Outcome<Nats> cross_entropy(const SimplexVector& p, const SimplexVector& q);

}  // namespace kellylab
