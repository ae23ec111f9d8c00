#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <variant>

namespace kellylab {

// Failures that stop a computation. Anything thrown from the library is an
// Error carrying one of these kinds.
enum class ErrorKind {
  InvalidArgument,
  InvalidSimplex,
  DimensionMismatch,
  NotFairOdds,
  BudgetExceeded,
  NotAType,
  ParseError,
  NonPositiveReturn,
  DuplicatePeriod,
  UnorderedPeriod,
  InvalidSpec,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Growth or divergence that is infinite. These are answers, not failures:
// KL(P||Q) = +inf when Q misses P's support, log-growth = -inf on ruin.
enum class UnboundedKind {
  SupportViolation,
  RuinRisk,
};

const char* to_string(UnboundedKind kind);

struct Unbounded {
  UnboundedKind kind;
  std::string detail;
};

template <typename T>
class Outcome {
 public:
  Outcome(T value) : state_(std::move(value)) {}
  Outcome(Unbounded unbounded) : state_(std::move(unbounded)) {}

  static Outcome support_violation(std::string detail) {
    return Outcome(Unbounded{UnboundedKind::SupportViolation, std::move(detail)});
  }
  static Outcome ruin(std::string detail) {
    return Outcome(Unbounded{UnboundedKind::RuinRisk, std::move(detail)});
  }

  bool ok() const noexcept { return std::holds_alternative<T>(state_); }
  explicit operator bool() const noexcept { return ok(); }

  const T& value() const {
    if (const T* v = std::get_if<T>(&state_)) return *v;
    throw std::logic_error(std::string("Outcome::value() on unbounded result: ") +
                           to_string(unbounded().kind));
  }
  const T& operator*() const { return value(); }
  const T* operator->() const { return &value(); }

  const Unbounded& unbounded() const { return std::get<Unbounded>(state_); }

 private:
  std::variant<T, Unbounded> state_;
};

}  // namespace kellylab
