#include "kellylab/type_class.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "log_sum.hpp"

namespace kellylab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::string budget_message(const std::string& what, const BigInt& required, std::uint64_t budget) {
  std::ostringstream msg;
  msg << what << " requires " << required << " terms, budget is " << budget;
  return msg.str();
}

std::vector<double> log_weights(const SimplexVector& w) {
  std::vector<double> lw(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) lw[i] = w[i] > 0.0 ? std::log(w[i]) : kNegInf;
  return lw;
}

// lr[i * n + t] = ln r_{i,t}
std::vector<double> log_returns(const ReturnMatrix& matrix) {
  std::vector<double> lr(matrix.assets() * matrix.periods());
  for (std::size_t i = 0; i < matrix.assets(); ++i) {
    for (std::size_t t = 0; t < matrix.periods(); ++t) {
      const double r = matrix(i, t);
      lr[i * matrix.periods() + t] = r > 0.0 ? std::log(r) : kNegInf;
    }
  }
  return lr;
}

void require_assets(const ReturnMatrix& matrix, const SimplexVector& w) {
  if (matrix.assets() != w.size()) {
    std::ostringstream msg;
    msg << "weights have " << w.size() << " entries, matrix has " << matrix.assets() << " assets";
    throw Error(ErrorKind::DimensionMismatch, msg.str());
  }
}

double per_sequence_log_weight(const std::vector<std::size_t>& counts, const std::vector<double>& lw) {
  double s = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) continue;
    if (lw[i] == kNegInf) return kNegInf;
    s += static_cast<double>(counts[i]) * lw[i];
  }
  return s;
}

SimplexVector frequencies(const std::vector<std::size_t>& counts, std::size_t n) {
  std::vector<double> f(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    f[i] = static_cast<double>(counts[i]) / static_cast<double>(n);
  }
  return SimplexVector(std::move(f));
}

struct CountsHash {
  std::size_t operator()(const std::vector<std::size_t>& v) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (std::size_t x : v) h = (h ^ x) * 1099511628211ull;
    return h;
  }
};

}  // namespace

// ---------------------------------------------------------------------------
// Sequences
// ---------------------------------------------------------------------------

std::uint64_t sequence_count(std::size_t m, std::size_t n) {
  std::uint64_t total = 1;
  for (std::size_t t = 0; t < n; ++t) {
    if (m != 0 && total > std::numeric_limits<std::uint64_t>::max() / m) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    total *= m;
  }
  return total;
}

void check_budget(std::size_t m, std::size_t n, std::uint64_t budget) {
  BigInt required = 1;
  for (std::size_t t = 0; t < n; ++t) required *= m;
  if (required > budget) {
    std::ostringstream what;
    what << "enumerating " << m << "^" << n << " sequences";
    throw Error(ErrorKind::BudgetExceeded, budget_message(what.str(), required, budget));
  }
}

SequenceRange::iterator::iterator(std::size_t m, std::size_t n) : m_(m), done_(false) {
  current_.path.assign(n, 0);
}

SequenceRange::iterator& SequenceRange::iterator::operator++() {
  auto& path = current_.path;
  for (std::size_t j = path.size(); j-- > 0;) {
    if (path[j] + 1 < m_) {
      ++path[j];
      std::fill(path.begin() + static_cast<std::ptrdiff_t>(j) + 1, path.end(), 0);
      first_changed_ = j;
      return *this;
    }
  }
  done_ = true;
  return *this;
}

SequenceRange enumerate_sequences(std::size_t m, std::size_t n, std::uint64_t budget) {
  if (m == 0 || n == 0) throw Error(ErrorKind::InvalidArgument, "need m >= 1 assets and n >= 1 periods");
  check_budget(m, n, budget);
  return SequenceRange(m, n);
}

double log_sequence_weight(const Sequence& s, const SimplexVector& w) {
  double lw = 0.0;
  for (std::size_t idx : s.path) {
    if (idx >= w.size()) throw Error(ErrorKind::InvalidArgument, "sequence index out of range");
    if (w[idx] == 0.0) return kNegInf;
    lw += std::log(w[idx]);
  }
  return lw;
}

double sequence_weight(const Sequence& s, const SimplexVector& w) {
  return std::exp(log_sequence_weight(s, w));
}

double log_sequence_return(const Sequence& s, const ReturnMatrix& matrix) {
  if (s.length() != matrix.periods()) {
    throw Error(ErrorKind::DimensionMismatch, "sequence length differs from the period count");
  }
  double lr = 0.0;
  for (std::size_t t = 0; t < s.length(); ++t) {
    if (s.path[t] >= matrix.assets()) throw Error(ErrorKind::InvalidArgument, "sequence index out of range");
    const double r = matrix(s.path[t], t);
    if (r == 0.0) return kNegInf;
    lr += std::log(r);
  }
  return lr;
}

double sequence_return(const Sequence& s, const ReturnMatrix& matrix) {
  return std::exp(log_sequence_return(s, matrix));
}

// ---------------------------------------------------------------------------
// Counting
// ---------------------------------------------------------------------------

BigInt multinomial(const std::vector<std::size_t>& counts) {
  BigInt result = 1;
  std::size_t seen = 0;
  for (std::size_t c : counts) {
    // Multiply by C(seen + c, c) incrementally; every partial is an integer.
    for (std::size_t k = 1; k <= c; ++k) {
      ++seen;
      result *= seen;
      result /= k;
    }
  }
  return result;
}

double log_multinomial(const std::vector<std::size_t>& counts) {
  std::size_t n = 0;
  for (std::size_t c : counts) n += c;
  if (n <= kExactCardinalityMaxPeriods) return std::log(multinomial(counts).convert_to<double>());
  double v = std::lgamma(static_cast<double>(n) + 1.0);
  for (std::size_t c : counts) v -= std::lgamma(static_cast<double>(c) + 1.0);
  return v;
}

BigInt composition_count(std::size_t m, std::size_t n) {
  if (m == 0) return 0;
  return multinomial({n, m - 1});
}

std::vector<std::size_t> type_counts(const SimplexVector& w, std::size_t n) {
  constexpr double kIntegralTolerance = 1e-9;
  std::vector<std::size_t> counts(w.size());
  std::size_t total = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double x = w[i] * static_cast<double>(n);
    const double rounded = std::round(x);
    if (std::abs(x - rounded) > kIntegralTolerance) {
      std::ostringstream msg;
      msg << "n * w[" << i << "] = " << x << " is not an integer at n = " << n;
      throw Error(ErrorKind::NotAType, msg.str());
    }
    counts[i] = static_cast<std::size_t>(rounded);
    total += counts[i];
  }
  if (total != n) throw Error(ErrorKind::NotAType, "type counts do not add up to n");
  return counts;
}

// ---------------------------------------------------------------------------
// Identity and class summaries
// ---------------------------------------------------------------------------

IdentityCheck expand_identity_check(const ReturnMatrix& matrix, const SimplexVector& w,
                                    std::uint64_t budget) {
  require_assets(matrix, w);
  const std::size_t m = matrix.assets();
  const std::size_t n = matrix.periods();
  const auto range = enumerate_sequences(m, n, budget);

  IdentityCheck check;
  const auto wealth = wealth_path(matrix, w);
  check.lhs = wealth ? wealth->cumulative : 0.0;

  const auto lw = log_weights(w);
  const auto lr = log_returns(matrix);
  std::vector<double> prefix(n + 1, 0.0);
  detail::LogSumExp acc;
  for (auto it = range.begin(); it != range.end(); ++it) {
    const auto& path = it->path;
    for (std::size_t t = it.first_changed(); t < n; ++t) {
      prefix[t + 1] = prefix[t] + lw[path[t]] + lr[path[t] * n + t];
    }
    acc.add(prefix[n]);
    ++check.terms;
  }
  check.rhs = std::exp(acc.value());
  const double diff = std::abs(check.lhs - check.rhs);
  check.rel_err = check.lhs > 0.0 ? diff / check.lhs : diff;
  return check;
}

std::vector<TypeClassSummary> summarize_type_classes(const ReturnMatrix& matrix, const SimplexVector& w,
                                                     std::uint64_t budget) {
  require_assets(matrix, w);
  const std::size_t m = matrix.assets();
  const std::size_t n = matrix.periods();
  const auto range = enumerate_sequences(m, n, budget);

  std::vector<std::vector<std::size_t>> classes;
  std::unordered_map<std::vector<std::size_t>, std::size_t, CountsHash> index;
  for_each_composition(m, n, [&](const std::vector<std::size_t>& counts) {
    index.emplace(counts, classes.size());
    classes.push_back(counts);
  });

  std::vector<detail::LogSumExp> sums(classes.size());
  std::vector<std::uint64_t> members(classes.size(), 0);
  const auto lr = log_returns(matrix);
  std::vector<double> prefix(n + 1, 0.0);
  std::vector<std::size_t> counts(m);
  for (auto it = range.begin(); it != range.end(); ++it) {
    const auto& path = it->path;
    for (std::size_t t = it.first_changed(); t < n; ++t) {
      prefix[t + 1] = prefix[t] + lr[path[t] * n + t];
    }
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t idx : path) ++counts[idx];
    const std::size_t c = index.at(counts);
    sums[c].add(prefix[n]);
    ++members[c];
  }

  const auto lw = log_weights(w);
  std::vector<TypeClassSummary> out;
  out.reserve(classes.size());
  for (std::size_t c = 0; c < classes.size(); ++c) {
    TypeClassSummary s{.counts = classes[c], .freq = frequencies(classes[c], n)};
    if (n <= kExactCardinalityMaxPeriods) s.cardinality = multinomial(classes[c]);
    s.log_cardinality = log_multinomial(classes[c]);
    s.members_enumerated = members[c];
    s.per_seq_log_weight = per_sequence_log_weight(classes[c], lw);
    s.total_mass = std::exp(s.log_cardinality + s.per_seq_log_weight);
    s.log_class_return_sum = sums[c].value();
    s.class_return_sum = std::exp(s.log_class_return_sum);
    s.per_period_geo_rate = std::exp(s.log_class_return_sum / static_cast<double>(n));
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<MassConcentrationRow> mass_concentration_check(const SimplexVector& w, std::size_t n,
                                                           std::uint64_t budget) {
  constexpr double kSlack = 1e-12;
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "need n >= 1 periods");
  const std::size_t m = w.size();
  const BigInt classes = composition_count(m, n);
  if (classes > budget) {
    throw Error(ErrorKind::BudgetExceeded, budget_message("listing type classes", classes, budget));
  }

  const auto lw = log_weights(w);
  const double polynomial_slack = static_cast<double>(m) * std::log(static_cast<double>(n) + 1.0);
  std::vector<MassConcentrationRow> rows;
  for_each_composition(m, n, [&](const std::vector<std::size_t>& counts) {
    MassConcentrationRow row;
    row.counts = counts;
    row.exact_log_mass = log_multinomial(counts) + per_sequence_log_weight(counts, lw);
    const auto kl = kl_divergence(frequencies(counts, n), w);
    row.minus_n_kl = kl ? 0.0 - static_cast<double>(n) * kl->value : kNegInf;
    row.lower_bound = row.minus_n_kl - polynomial_slack;
    if (row.minus_n_kl == kNegInf) {
      row.gap = 0.0;
      row.within_bounds = row.exact_log_mass == kNegInf;
    } else {
      row.gap = row.minus_n_kl - row.exact_log_mass;
      row.within_bounds = row.exact_log_mass <= row.minus_n_kl + kSlack &&
                          row.exact_log_mass >= row.lower_bound - kSlack;
    }
    rows.push_back(std::move(row));
  });
  return rows;
}

Outcome<DominantClassGrowth> dominant_class_growth(const ReturnMatrix& matrix, const SimplexVector& w,
                                                   std::uint64_t budget,
                                                   const std::optional<SimplexVector>& reference) {
  require_assets(matrix, w);
  const SimplexVector& kept = reference ? *reference : w;
  if (kept.size() != w.size()) {
    throw Error(ErrorKind::DimensionMismatch, "reference class differs in dimension from the weights");
  }
  const std::size_t n = matrix.periods();
  DominantClassGrowth out;
  out.counts = type_counts(kept, n);

  const BigInt cardinality = multinomial(out.counts);
  if (cardinality > budget) {
    throw Error(ErrorKind::BudgetExceeded, budget_message("enumerating the kept class", cardinality, budget));
  }

  const auto wealth = wealth_path(matrix, w);
  if (!wealth) return Outcome<DominantClassGrowth>(wealth.unbounded());
  out.exact_log_wealth = wealth->log_wealth;

  const double weight = per_sequence_log_weight(out.counts, log_weights(w));
  if (weight == kNegInf) {
    return Outcome<DominantClassGrowth>::support_violation(
        "kept class selects an asset the portfolio holds no weight in");
  }

  // Members of the class are the distinct permutations of a sorted path.
  std::vector<std::size_t> path;
  for (std::size_t i = 0; i < out.counts.size(); ++i) path.insert(path.end(), out.counts[i], i);
  const auto lr = log_returns(matrix);
  detail::LogSumExp acc;
  do {
    double s = 0.0;
    for (std::size_t t = 0; t < n; ++t) s += lr[path[t] * n + t];
    acc.add(s);
  } while (std::next_permutation(path.begin(), path.end()));
  if (acc.empty()) {
    return Outcome<DominantClassGrowth>::ruin("every sequence in the kept class returns 0");
  }

  out.approx_log_wealth = weight + acc.value();
  out.per_period_gap = std::abs(out.approx_log_wealth - out.exact_log_wealth) / static_cast<double>(n);
  return out;
}

}  // namespace kellylab
