#pragma once

#include "crn/kinetics.hpp"

#include <cmath>
#include <limits>

namespace crn {

// Streaming log(sum_i exp(a_i)).
class LogSumExp {
 public:
  void add(double log_term) {
    if (log_term == -std::numeric_limits<double>::infinity()) return;
    if (log_term <= max_) {
      sum_ += std::exp(log_term - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - log_term) + 1.0;
      max_ = log_term;
    }
  }

  double value() const {
    return sum_ == 0.0 ? -std::numeric_limits<double>::infinity() : max_ + std::log(sum_);
  }

 private:
  double max_ = -std::numeric_limits<double>::infinity();
  double sum_ = 0.0;
};

inline double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == -std::numeric_limits<double>::infinity()) return a;
  return a + std::log1p(std::exp(b - a));
}

/// Terms t_x = c^x / (theta(1) ... theta(x)), x >= 0, of one species' factor
/// of the product-form measure, held in log space.
class ThetaSeries {
 public:
  ThetaSeries(const ThetaSpec& theta, double log_c) : theta_(theta), log_c_(log_c) {}

  double log_term(long x) const {
    return static_cast<double>(x) * log_c_ - theta_.log_factorial(x);
  }

  /// Log of a certified upper bound on sum_{j > n} t_j, or +inf when the
  /// ratio argument does not apply at n.
  ///
  /// Past the last override theta is A j^d with d > 0, so the ratios
  /// rho_j = c / theta(j + 1) are non-increasing in j and the tail is dominated
  /// by the geometric series t_n rho_n / (1 - rho_n). Certified only once
  /// rho_n <= 1/2.
  double log_tail_bound(long n) const {
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (theta_.tail_d <= 0.0 || n < theta_.last_override() || n < 0) return inf;
    const double log_rho = log_c_ - theta_.log_value(n + 1);
    if (log_rho > -std::log(2.0)) return inf;
    return log_term(n) + log_rho - std::log1p(-std::exp(log_rho));
  }

  const ThetaSpec& theta() const { return theta_; }
  double log_c() const { return log_c_; }

 private:
  ThetaSpec theta_;
  double log_c_;
};

struct SeriesSum {
  double log_sum = 0.0;        // log of sum_{x <= truncation} t_x
  long truncation = 0;
  double log_tail_bound = 0.0;  // log of the certified bound on the remainder
};

/// Sums t_0 + ... + t_N, growing N until the certified remainder is at most
/// rel_tol times the partial sum. Throws DomainError for tail_d <= 0 or an
/// interior zero of theta, NumericalError if max_terms is reached first.
SeriesSum sum_with_tail_bound(const ThetaSeries& series, double rel_tol,
                              long max_terms = 200'000'000);

}  // namespace crn
