#pragma once

#include <complex>
#include <cstdint>
#include <string>

#include <gmpxx.h>

#include "hyperdiff/log_magnitude.hpp"

namespace hyperdiff {

/// Exact complex number with arbitrary-precision rational parts.
struct ExactComplex {
  mpq_class re{0};
  mpq_class im{0};

  ExactComplex() = default;
  ExactComplex(mpq_class r, mpq_class i = 0) : re(std::move(r)), im(std::move(i)) {
    re.canonicalize();
    im.canonicalize();
  }
  ExactComplex(long v) : re(v), im(0) {}
  ExactComplex(int v) : re(v), im(0) {}

  bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
  bool is_real() const { return sgn(im) == 0; }
  /// re^2 + im^2, exactly.
  mpq_class norm() const { return re * re + im * im; }

  ExactComplex& operator+=(const ExactComplex& o);
  ExactComplex& operator-=(const ExactComplex& o);
  ExactComplex& operator*=(const ExactComplex& o);
  ExactComplex& operator/=(const ExactComplex& o);

  friend ExactComplex operator+(ExactComplex a, const ExactComplex& b) { return a += b; }
  friend ExactComplex operator-(ExactComplex a, const ExactComplex& b) { return a -= b; }
  friend ExactComplex operator*(ExactComplex a, const ExactComplex& b) { return a *= b; }
  friend ExactComplex operator/(ExactComplex a, const ExactComplex& b) { return a /= b; }
  friend ExactComplex operator-(const ExactComplex& a) { return ExactComplex(-a.re, -a.im); }
  friend bool operator==(const ExactComplex& a, const ExactComplex& b) {
    return a.re == b.re && a.im == b.im;
  }
};

/// Double-precision complex mantissa with a 64-bit binary exponent.
///
/// Used for floating sweeps where values like 1/n^n or m!/(m-s)! leave the
/// range of a native double. The mantissa is normalized so that its larger
/// component lies in [0.5, 1), or is exactly zero.
class ExtComplex {
 public:
  ExtComplex() = default;
  ExtComplex(std::complex<double> z) : mant_(z) { normalize(); }
  ExtComplex(double x) : mant_(x, 0.0) { normalize(); }
  ExtComplex(int x) : mant_(static_cast<double>(x), 0.0) { normalize(); }

  static ExtComplex from_parts(std::complex<double> mantissa, std::int64_t exp2);
  /// magnitude * phase, where |phase| = 1 (or phase = 0 for a zero value).
  static ExtComplex from_polar(const LogMagnitude& magnitude, std::complex<double> phase);

  bool is_zero() const { return mant_ == std::complex<double>(0.0, 0.0); }
  std::complex<double> mantissa() const { return mant_; }
  std::int64_t exponent() const { return exp_; }
  LogMagnitude abs() const;
  /// Unit-modulus direction; zero for zero.
  std::complex<double> phase() const;
  /// May overflow to inf or underflow to 0.
  std::complex<double> to_complex() const;

  ExtComplex& operator+=(const ExtComplex& o);
  ExtComplex& operator-=(const ExtComplex& o) { return *this += -o; }
  ExtComplex& operator*=(const ExtComplex& o);
  ExtComplex& operator/=(const ExtComplex& o);

  friend ExtComplex operator+(ExtComplex a, const ExtComplex& b) { return a += b; }
  friend ExtComplex operator-(ExtComplex a, const ExtComplex& b) { return a -= b; }
  friend ExtComplex operator*(ExtComplex a, const ExtComplex& b) { return a *= b; }
  friend ExtComplex operator/(ExtComplex a, const ExtComplex& b) { return a /= b; }
  friend ExtComplex operator-(const ExtComplex& a) { return from_parts(-a.mant_, a.exp_); }
  friend bool operator==(const ExtComplex& a, const ExtComplex& b) {
    return a.mant_ == b.mant_ && a.exp_ == b.exp_;
  }

 private:
  void normalize();

  std::complex<double> mant_{0.0, 0.0};
  std::int64_t exp_ = 0;
};

/// log|q| for a nonzero rational.
double log_abs(const mpq_class& q);
/// Rounds re + i*im into extended range without overflow.
ExtComplex to_ext(const mpq_class& re, const mpq_class& im);

/// Formats a rational as "p" or "p/q".
std::string to_string(const mpq_class& q);
/// Parses "p", "p/q", or a decimal literal such as "-0.125" or "1e-3"
/// into an exact rational. Throws ConfigError on malformed input.
mpq_class parse_rational(const std::string& text);

/// Shortest decimal that round-trips the double.
std::string format_double(double x);

/// Natural log of a magnitude as format_double text, or "-inf" for zero.
std::string format_log(const LogMagnitude& m);

/// Per-scalar operations used by the generic algorithms.
template <typename S>
struct ScalarTraits;

template <>
struct ScalarTraits<ExactComplex> {
  static constexpr bool exact = true;
  static constexpr const char* name = "exact";
  static ExactComplex from_rational(const mpq_class& re, const mpq_class& im = 0) {
    return ExactComplex(re, im);
  }
  /// Exact conversion of the binary value.
  static ExactComplex from_complex(std::complex<double> z) {
    return ExactComplex(mpq_class(z.real()), mpq_class(z.imag()));
  }
  static ExactComplex from_ext(const ExtComplex& z);
  static bool is_zero(const ExactComplex& z) { return z.is_zero(); }
  static LogMagnitude abs(const ExactComplex& z);
  static std::complex<double> to_complex(const ExactComplex& z);
  static ExactComplex conj(const ExactComplex& z) { return ExactComplex(z.re, -z.im); }
  /// z * top! / (top - count)!
  static ExactComplex mul_falling(const ExactComplex& z, long top, long count);
  /// z * (top - count)! / top!
  static ExactComplex div_falling(const ExactComplex& z, long top, long count);
};

template <>
struct ScalarTraits<ExtComplex> {
  static constexpr bool exact = false;
  static constexpr const char* name = "float";
  static ExtComplex from_rational(const mpq_class& re, const mpq_class& im = 0) {
    return to_ext(re, im);
  }
  static ExtComplex from_complex(std::complex<double> z) { return ExtComplex(z); }
  static ExtComplex from_ext(const ExtComplex& z) { return z; }
  static bool is_zero(const ExtComplex& z) { return z.is_zero(); }
  static LogMagnitude abs(const ExtComplex& z) { return z.abs(); }
  static std::complex<double> to_complex(const ExtComplex& z) { return z.to_complex(); }
  static ExtComplex conj(const ExtComplex& z) {
    return ExtComplex::from_parts(std::conj(z.mantissa()), z.exponent());
  }
  static ExtComplex mul_falling(const ExtComplex& z, long top, long count);
  static ExtComplex div_falling(const ExtComplex& z, long top, long count);
};

template <>
struct ScalarTraits<std::complex<double>> {
  static constexpr bool exact = false;
  static constexpr const char* name = "double";
  static std::complex<double> from_rational(const mpq_class& re, const mpq_class& im = 0) {
    return {re.get_d(), im.get_d()};
  }
  static std::complex<double> from_complex(std::complex<double> z) { return z; }
  static std::complex<double> from_ext(const ExtComplex& z) { return z.to_complex(); }
  static bool is_zero(const std::complex<double>& z) { return z == std::complex<double>{}; }
  static LogMagnitude abs(const std::complex<double>& z) { return LogMagnitude::from_value(std::abs(z)); }
  static std::complex<double> to_complex(const std::complex<double>& z) { return z; }
  static std::complex<double> conj(const std::complex<double>& z) { return std::conj(z); }
  static std::complex<double> mul_falling(const std::complex<double>& z, long top, long count) {
    return ScalarTraits<ExtComplex>::mul_falling(ExtComplex(z), top, count).to_complex();
  }
  static std::complex<double> div_falling(const std::complex<double>& z, long top, long count) {
    return ScalarTraits<ExtComplex>::div_falling(ExtComplex(z), top, count).to_complex();
  }
};

/// Concept satisfied by the supported coefficient fields.
template <typename S>
concept Scalar = requires { ScalarTraits<S>::exact; };

/// top! / (top - count)! as a big integer.
mpz_class falling_factorial(long top, long count);

}  // namespace hyperdiff
