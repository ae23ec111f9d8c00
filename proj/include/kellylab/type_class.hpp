#pragma once

// Brute-force view of a constant-rebalanced portfolio as a sum of products:
// R_n(W) = prod_t sum_i w_i r_{i,t} = sum over asset-index sequences s of
// w_s r_s, grouped into type classes (sequences sharing symbol counts).
//
// Everything here enumerates exactly and is meant as a ground-truth oracle
// at desk scale. Products are accumulated in log space.

#include <cstddef>
#include <cstdint>
#include <iterator>
#include <optional>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "kellylab/growth_opt.hpp"
#include "kellylab/info_measures.hpp"
#include "kellylab/outcome.hpp"

namespace kellylab {

using BigInt = boost::multiprecision::cpp_int;

inline constexpr std::uint64_t kDefaultEnumerationBudget = 10'000'000;

// Above this length cardinalities are evaluated with lgamma only.
inline constexpr std::size_t kExactCardinalityMaxPeriods = 64;

// An asset index per period.
struct Sequence {
  std::vector<std::size_t> path;

  std::size_t length() const noexcept { return path.size(); }
  friend bool operator==(const Sequence&, const Sequence&) = default;
};

// m^n, saturating at UINT64_MAX.
std::uint64_t sequence_count(std::size_t m, std::size_t n);

// Throws BudgetExceeded when m^n > budget.
void check_budget(std::size_t m, std::size_t n, std::uint64_t budget);

// All m^n sequences in lexicographic order, without materializing them.
class SequenceRange {
 public:
  class iterator {
   public:
    using value_type = Sequence;
    using difference_type = std::ptrdiff_t;
    using reference = const Sequence&;
    using pointer = const Sequence*;
    using iterator_category = std::input_iterator_tag;

    iterator() = default;
    iterator(std::size_t m, std::size_t n);

    reference operator*() const { return current_; }
    pointer operator->() const { return &current_; }
    iterator& operator++();
    void operator++(int) { ++*this; }

    // Index of the leftmost position changed by the last increment; positions
    // before it are unchanged.
    std::size_t first_changed() const noexcept { return first_changed_; }

    friend bool operator==(const iterator& a, const iterator& b) { return a.done_ == b.done_; }

   private:
    std::size_t m_ = 0;
    Sequence current_;
    std::size_t first_changed_ = 0;
    bool done_ = true;
  };

  SequenceRange(std::size_t m, std::size_t n) : m_(m), n_(n) {}

  iterator begin() const { return iterator(m_, n_); }
  iterator end() const { return iterator(); }

 private:
  std::size_t m_;
  std::size_t n_;
};

// Throws BudgetExceeded (with the required count) when m^n > budget, and
// InvalidArgument for m = 0 or n = 0.
SequenceRange enumerate_sequences(std::size_t m, std::size_t n,
                                  std::uint64_t budget = kDefaultEnumerationBudget);

// prod_t w_{s_t}; 0 when any selected weight is 0.
double sequence_weight(const Sequence& s, const SimplexVector& w);
double log_sequence_weight(const Sequence& s, const SimplexVector& w);

// prod_t r_{s_t, t}.
double sequence_return(const Sequence& s, const ReturnMatrix& matrix);
double log_sequence_return(const Sequence& s, const ReturnMatrix& matrix);

// n! / prod n_i!
BigInt multinomial(const std::vector<std::size_t>& counts);
// Exact for n <= kExactCardinalityMaxPeriods, lgamma beyond.
double log_multinomial(const std::vector<std::size_t>& counts);

// Counts n_i = n w_i. Throws NotAType when some n w_i is not an integer.
std::vector<std::size_t> type_counts(const SimplexVector& w, std::size_t n);

// Calls fn(counts) for every composition of n into m nonnegative parts, in
// lexicographic order of counts.
template <typename Fn>
void for_each_composition(std::size_t m, std::size_t n, Fn&& fn) {
  std::vector<std::size_t> counts(m, 0);
  auto rec = [&](auto& self, std::size_t i, std::size_t left) -> void {
    if (i + 1 == m) {
      counts[i] = left;
      fn(static_cast<const std::vector<std::size_t>&>(counts));
      return;
    }
    for (std::size_t c = left + 1; c-- > 0;) {
      counts[i] = c;
      self(self, i + 1, left - c);
    }
  };
  rec(rec, 0, n);
}

// Number of compositions of n into m parts, C(n + m - 1, m - 1).
BigInt composition_count(std::size_t m, std::size_t n);

struct IdentityCheck {
  double lhs = 0.0;      // prod_t W . r_t
  double rhs = 0.0;      // sum_s w_s r_s
  double rel_err = 0.0;  // |lhs - rhs| / lhs
  std::uint64_t terms = 0;
};

IdentityCheck expand_identity_check(const ReturnMatrix& matrix, const SimplexVector& w,
                                    std::uint64_t budget = kDefaultEnumerationBudget);

struct TypeClassSummary {
  std::vector<std::size_t> counts;  // n_i, summing to n
  SimplexVector freq;               // n_i / n
  std::optional<BigInt> cardinality{};// exact, for n <= kExactCardinalityMaxPeriods
  double log_cardinality = 0.0;
  std::uint64_t members_enumerated = 0;
  double per_seq_log_weight = 0.0;  // sum n_i ln w_i, -inf when a used weight is 0
  double total_mass = 0.0;          // cardinality * exp(per_seq_log_weight)
  double log_class_return_sum = 0.0;  // ln sum_{s in T} r_s
  double class_return_sum = 0.0;
  double per_period_geo_rate = 0.0;   // (sum_{s in T} r_s)^(1/n)
};

// One summary per composition of n, ordered as for_each_composition.
std::vector<TypeClassSummary> summarize_type_classes(const ReturnMatrix& matrix, const SimplexVector& w,
                                                     std::uint64_t budget = kDefaultEnumerationBudget);

struct MassConcentrationRow {
  std::vector<std::size_t> counts;
  double exact_log_mass = 0.0;  // ln(|T_n(P)| prod w_i^{n_i})
  double minus_n_kl = 0.0;      // -n KL(P||W)
  double lower_bound = 0.0;     // -n KL(P||W) - m ln(n + 1)
  double gap = 0.0;             // minus_n_kl - exact_log_mass, >= 0
  bool within_bounds = false;
};

// Every class at length n, whose count must not exceed budget. Classes
// outside W's support have exact_log_mass = minus_n_kl = -inf and gap 0.
std::vector<MassConcentrationRow> mass_concentration_check(const SimplexVector& w, std::size_t n,
                                                           std::uint64_t budget = kDefaultEnumerationBudget);

struct DominantClassGrowth {
  std::vector<std::size_t> counts;  // the class kept
  double approx_log_wealth = 0.0;   // sum n_i ln w_i + ln sum_{s in T} r_s
  double exact_log_wealth = 0.0;    // ln R_n
  double per_period_gap = 0.0;      // |approx - exact| / n
};

// Keeps only the type class of `reference` (W itself when empty), which must
// be a type at the matrix length (NotAType otherwise). Unbounded when the
// portfolio is ruined or the kept class selects an asset W holds none of.
// Budget applies to the cardinality of the kept class.
Outcome<DominantClassGrowth> dominant_class_growth(const ReturnMatrix& matrix, const SimplexVector& w,
                                                   std::uint64_t budget = kDefaultEnumerationBudget,
                                                   const std::optional<SimplexVector>& reference = std::nullopt);

}  // namespace kellylab
