#include "crn/series.hpp"

#include "crn/errors.hpp"

namespace crn {

SeriesSum sum_with_tail_bound(const ThetaSeries& series, double rel_tol, long max_terms) {
  if (series.theta().tail_d <= 0.0) {
    throw DomainError(
        "unnormalizable: theta tail exponent d must be positive so that theta -> infinity");
  }
  if (series.theta().has_interior_zero()) {
    throw DomainError("product-form weight undefined: theta has a zero at x >= 1");
  }
  if (!(rel_tol > 0.0)) throw DomainError("rel_tol must be positive");

  const double log_rel_tol = std::log(rel_tol);
  LogSumExp partial;
  for (long x = 0; x < max_terms; ++x) {
    partial.add(series.log_term(x));
    const double log_tail = series.log_tail_bound(x);
    if (log_tail - partial.value() <= log_rel_tol) {
      return {partial.value(), x, log_tail};
    }
  }
  throw NumericalError("series did not reach its tail tolerance within the term limit");
}

}  // namespace crn
