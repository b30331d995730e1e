#include "hyperdiff/taylor.hpp"

namespace hyperdiff {

LogMagnitude exp_tail_bound(double x, long n) {
  if (!(x >= 0.0)) throw PreconditionError("exp_tail_bound: need x >= 0");
  if (n < 0) return LogMagnitude::from_log(x);
  if (x == 0.0) return LogMagnitude::zero();
  // x^{n+1}/(n+1)! * sum_i (x/(n+2))^i, geometric once x < n + 2.
  const double ratio = x / static_cast<double>(n + 2);
  if (ratio < 1.0) {
    return LogMagnitude::from_log(static_cast<double>(n + 1) * std::log(x) - log_factorial(n + 1) -
                                  std::log1p(-ratio));
  }
  return LogMagnitude::from_log(x);
}

}  // namespace hyperdiff
