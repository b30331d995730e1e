#include "hyperdiff/log_magnitude.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "hyperdiff/error.hpp"

namespace hyperdiff {

LogMagnitude LogMagnitude::from_value(double value) {
  if (!(value >= 0.0)) throw PreconditionError("LogMagnitude::from_value: negative or NaN input");
  if (value == 0.0) return zero();
  return from_log(std::log(value));
}

double LogMagnitude::log() const {
  return is_zero_ ? -std::numeric_limits<double>::infinity() : log_;
}

double LogMagnitude::value() const { return is_zero_ ? 0.0 : std::exp(log_); }

LogMagnitude& LogMagnitude::operator+=(const LogMagnitude& other) {
  if (other.is_zero_) return *this;
  if (is_zero_) return *this = other;
  const double hi = std::max(log_, other.log_);
  const double lo = std::min(log_, other.log_);
  log_ = hi + std::log1p(std::exp(lo - hi));
  return *this;
}

LogMagnitude& LogMagnitude::operator*=(const LogMagnitude& other) {
  if (is_zero_ || other.is_zero_) return *this = zero();
  log_ += other.log_;
  return *this;
}

LogMagnitude& LogMagnitude::operator/=(const LogMagnitude& other) {
  if (other.is_zero_) throw PreconditionError("LogMagnitude: division by zero");
  if (is_zero_) return *this;
  log_ -= other.log_;
  return *this;
}

LogMagnitude LogMagnitude::pow(double exponent) const {
  if (exponent == 0.0) return one();
  if (is_zero_) {
    if (exponent < 0.0) throw PreconditionError("LogMagnitude: zero to a negative power");
    return zero();
  }
  return from_log(log_ * exponent);
}

LogMagnitude LogMagnitude::saturating_sub(const LogMagnitude& a, const LogMagnitude& b) {
  if (b.is_zero_) return a;
  if (a.is_zero_ || a.log_ <= b.log_) return zero();
  const double rel = -std::expm1(b.log_ - a.log_);  // 1 - b/a in (0, 1]
  if (rel <= 0.0) return zero();
  return from_log(a.log_ + std::log(rel));
}

std::partial_ordering operator<=>(const LogMagnitude& a, const LogMagnitude& b) {
  if (a.is_zero_ && b.is_zero_) return std::partial_ordering::equivalent;
  if (a.is_zero_) return std::partial_ordering::less;
  if (b.is_zero_) return std::partial_ordering::greater;
  return a.log_ <=> b.log_;
}

bool operator==(const LogMagnitude& a, const LogMagnitude& b) {
  return (a <=> b) == std::partial_ordering::equivalent;
}

LogMagnitude sum(std::span<const LogMagnitude> terms) {
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& t : terms)
    if (!t.is_zero()) hi = std::max(hi, t.log());
  if (std::isinf(hi)) return LogMagnitude::zero();
  double acc = 0.0;
  for (const auto& t : terms)
    if (!t.is_zero()) acc += std::exp(t.log() - hi);
  return LogMagnitude::from_log(hi + std::log(acc));
}

double log_factorial(long long n) {
  if (n < 0) throw PreconditionError("log_factorial: negative argument");
  return std::lgamma(static_cast<double>(n) + 1.0);
}

bool certainly_less(const LogMagnitude& a, const LogMagnitude& b, double guard) {
  if (b.is_zero()) return false;
  if (a.is_zero()) return true;
  return a.log() + guard * std::max(1.0, std::abs(b.log())) < b.log();
}

std::ostream& operator<<(std::ostream& os, const LogMagnitude& m) {
  if (m.is_zero()) return os << "zero";
  return os << "exp(" << m.log() << ")";
}

}  // namespace hyperdiff
