#pragma once

#include <cmath>
#include <limits>
#include <vector>

namespace atypia {

/// Streaming log(sum exp(x_i)) with a running maximum.
class LogSumExp {
 public:
  void add(double x) {
    if (x == -std::numeric_limits<double>::infinity()) return;
    if (x <= max_) {
      sum_ += std::exp(x - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - x) + 1.0;
      max_ = x;
    }
  }
  void merge(const LogSumExp& other) {
    if (other.sum_ == 0.0) return;
    if (sum_ == 0.0) {
      *this = other;
      return;
    }
    if (other.max_ <= max_) {
      sum_ += other.sum_ * std::exp(other.max_ - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - other.max_) + other.sum_;
      max_ = other.max_;
    }
  }
  /// -inf when empty.
  double value() const {
    return sum_ == 0.0 ? -std::numeric_limits<double>::infinity() : max_ + std::log(sum_);
  }

 private:
  double max_ = -std::numeric_limits<double>::infinity();
  double sum_ = 0.0;
};

double log_sum_exp(const std::vector<double>& xs);

/// (sum w)^2 / sum w^2 from log weights.
double effective_sample_size(const std::vector<double>& log_weights);

/// Sums of w and w^2 over the accepted draws of an importance sampler.
struct WeightSums {
  LogSumExp w;
  LogSumExp w2;
  unsigned long long hits = 0;

  void add(double log_w) {
    w.add(log_w);
    w2.add(2.0 * log_w);
    ++hits;
  }
  void merge(const WeightSums& o) {
    w.merge(o.w);
    w2.merge(o.w2);
    hits += o.hits;
  }
  double ess() const { return hits == 0 ? 0.0 : std::exp(2.0 * w.value() - w2.value()); }
};

}  // namespace atypia
