#include "kellylab/info_measures.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace kellylab {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidSimplex: return "InvalidSimplex";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotFairOdds: return "NotFairOdds";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::NotAType: return "NotAType";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::NonPositiveReturn: return "NonPositiveReturn";
    case ErrorKind::DuplicatePeriod: return "DuplicatePeriod";
    case ErrorKind::UnorderedPeriod: return "UnorderedPeriod";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
  }
  return "Unknown";
}

const char* to_string(UnboundedKind kind) {
  switch (kind) {
    case UnboundedKind::SupportViolation: return "SupportViolation";
    case UnboundedKind::RuinRisk: return "RuinRisk";
  }
  return "Unknown";
}

SimplexVector::SimplexVector(std::vector<double> weights) : weights_(std::move(weights)) {
  if (weights_.empty()) {
    throw Error(ErrorKind::InvalidSimplex, "simplex vector must have at least one entry");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    const double w = weights_[i];
    if (!std::isfinite(w) || w < 0.0) {
      std::ostringstream msg;
      msg << "simplex entry " << i << " is " << w << "; entries must be finite and >= 0";
      throw Error(ErrorKind::InvalidSimplex, msg.str());
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > kSimplexRenormTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "simplex entries sum to " << sum << ", not 1";
    throw Error(ErrorKind::InvalidSimplex, msg.str());
  }
  if (sum != 1.0) {
    for (double& w : weights_) w /= sum;
  }
}

SimplexVector SimplexVector::uniform(std::size_t m) {
  if (m == 0) throw Error(ErrorKind::InvalidSimplex, "uniform simplex needs m >= 1");
  return SimplexVector(std::vector<double>(m, 1.0 / static_cast<double>(m)));
}

SimplexVector SimplexVector::one_hot(std::size_t m, std::size_t index) {
  if (index >= m) throw Error(ErrorKind::InvalidSimplex, "one_hot index out of range");
  std::vector<double> w(m, 0.0);
  w[index] = 1.0;
  return SimplexVector(std::move(w));
}

double SimplexVector::max_abs_diff(const SimplexVector& other) const {
  if (other.size() != size()) {
    throw Error(ErrorKind::DimensionMismatch, "simplex vectors differ in dimension");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    worst = std::max(worst, std::abs(weights_[i] - other.weights_[i]));
  }
  return worst;
}

namespace {

void require_same_dimension(const SimplexVector& p, const SimplexVector& q) {
  if (p.size() != q.size()) {
    std::ostringstream msg;
    msg << "dimension mismatch: " << p.size() << " vs " << q.size();
    throw Error(ErrorKind::DimensionMismatch, msg.str());
  }
}

std::string support_message(std::size_t i, double p) {
  std::ostringstream msg;
  msg << "p[" << i << "] = " << p << " > 0 but q[" << i << "] = 0";
  return msg.str();
}

}  // namespace

Nats entropy(const SimplexVector& p) {
  double h = 0.0;
  for (double pi : p) {
    if (pi > 0.0) h -= pi * std::log(pi);
  }
  return Nats{h};
}

Outcome<Nats> kl_divergence(const SimplexVector& p, const SimplexVector& q) {
  require_same_dimension(p, q);
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) return Outcome<Nats>::support_violation(support_message(i, p[i]));
    d += p[i] * std::log(p[i] / q[i]);
  }
  // Gibbs: round-off can leave a tiny negative value for p ~= q.
  return Nats{std::max(d, 0.0)};
}

Outcome<Nats> cross_entropy(const SimplexVector& p, const SimplexVector& q) {
  require_same_dimension(p, q);
  double h = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) return Outcome<Nats>::support_violation(support_message(i, p[i]));
    h -= p[i] * std::log(q[i]);
  }
  return Nats{h};
}

}  // namespace kellylab
