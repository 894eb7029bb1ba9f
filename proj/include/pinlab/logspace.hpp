#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace pinlab {

// All probabilities are carried in nats; log(0) is represented by -infinity.
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

inline bool is_neg_inf(double x) { return x == kNegInf; }

/// log(exp(a) + exp(b)) with the -inf sentinel handled.
inline double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (is_neg_inf(b)) return a;
  return a + std::log1p(std::exp(b - a));
}

/// log Σ exp(x_i), max-subtracted. Returns -inf for empty input or all -inf.
inline double log_sum_exp(std::span<const double> xs) {
  double mx = kNegInf;
  for (double x : xs) mx = std::max(mx, x);
  if (is_neg_inf(mx)) return kNegInf;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - mx);
  return mx + std::log(s);
}

/// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace pinlab
