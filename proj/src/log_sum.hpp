#pragma once

#include <cmath>
#include <limits>

namespace kellylab::detail {

// Streaming ln(sum_k exp(x_k)). The running sum is kept relative to the
// largest term seen so far and compensated (Neumaier), so the result does not
// depend on the order terms arrive in beyond round-off.
class LogSumExp {
 public:
  void add(double x) {
    if (x == -std::numeric_limits<double>::infinity()) return;
    if (x > shift_) {
      const double scale = std::exp(shift_ - x);
      sum_ *= scale;
      comp_ *= scale;
      shift_ = x;
    }
    accumulate(std::exp(x - shift_));
  }

  void merge(const LogSumExp& other) {
    if (other.empty()) return;
    if (other.shift_ > shift_) {
      const double scale = std::exp(shift_ - other.shift_);
      sum_ *= scale;
      comp_ *= scale;
      shift_ = other.shift_;
    }
    const double scale = std::exp(other.shift_ - shift_);
    accumulate(other.sum_ * scale);
    accumulate(other.comp_ * scale);
  }

  bool empty() const { return shift_ == -std::numeric_limits<double>::infinity(); }

  double value() const {
    if (empty()) return -std::numeric_limits<double>::infinity();
    return shift_ + std::log(sum_ + comp_);
  }

 private:
  void accumulate(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }

  double shift_ = -std::numeric_limits<double>::infinity();
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace kellylab::detail
