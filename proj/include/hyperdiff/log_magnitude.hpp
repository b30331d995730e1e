#pragma once

#include <compare>
#include <iosfwd>
#include <span>

namespace hyperdiff {

/// A nonnegative real stored as its natural logarithm.
///
/// Products, powers and comparisons never overflow, so quantities such as
/// 2^m, m! or m^d with m in the hundreds of thousands stay representable.
/// Zero is an explicit state; its log value is meaningless.
class LogMagnitude {
 public:
  constexpr LogMagnitude() = default;

  static constexpr LogMagnitude zero() { return {}; }
  static constexpr LogMagnitude one() { return from_log(0.0); }
  static constexpr LogMagnitude from_log(double log_value) {
    LogMagnitude m;
    m.is_zero_ = false;
    m.log_ = log_value;
    return m;
  }
  /// Requires value >= 0.
  static LogMagnitude from_value(double value);

  constexpr bool is_zero() const { return is_zero_; }
  /// Natural log; -inf for zero.
  double log() const;
  /// Converts back to a double; may overflow to +inf or underflow to 0.
  double value() const;

  LogMagnitude& operator+=(const LogMagnitude& other);
  LogMagnitude& operator*=(const LogMagnitude& other);
  LogMagnitude& operator/=(const LogMagnitude& other);

  friend LogMagnitude operator+(LogMagnitude a, const LogMagnitude& b) { return a += b; }
  friend LogMagnitude operator*(LogMagnitude a, const LogMagnitude& b) { return a *= b; }
  friend LogMagnitude operator/(LogMagnitude a, const LogMagnitude& b) { return a /= b; }

  /// Raises to a real exponent; zero stays zero for positive exponents.
  LogMagnitude pow(double exponent) const;

  /// max(0, a - b): the saturating difference.
  static LogMagnitude saturating_sub(const LogMagnitude& a, const LogMagnitude& b);

  friend std::partial_ordering operator<=>(const LogMagnitude& a, const LogMagnitude& b);
  friend bool operator==(const LogMagnitude& a, const LogMagnitude& b);

 private:
  bool is_zero_ = true;
  double log_ = 0.0;
};

/// Log-sum-exp over a set of magnitudes.
LogMagnitude sum(std::span<const LogMagnitude> terms);

/// log(n!) via lgamma.
double log_factorial(long long n);

/// a <= b with a relative guard band on the log scale, so that ties computed
/// with rounding error do not pass.
bool certainly_less(const LogMagnitude& a, const LogMagnitude& b, double guard = 1e-12);

std::ostream& operator<<(std::ostream& os, const LogMagnitude& m);

}  // namespace hyperdiff
