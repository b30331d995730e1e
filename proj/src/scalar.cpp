#include "hyperdiff/scalar.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>

#include "hyperdiff/error.hpp"

namespace hyperdiff {

// ---------------------------------------------------------------- ExactComplex

ExactComplex& ExactComplex::operator+=(const ExactComplex& o) {
  re += o.re;
  im += o.im;
  return *this;
}

ExactComplex& ExactComplex::operator-=(const ExactComplex& o) {
  re -= o.re;
  im -= o.im;
  return *this;
}

ExactComplex& ExactComplex::operator*=(const ExactComplex& o) {
  if (is_real() && o.is_real()) {
    re *= o.re;
    return *this;
  }
  mpq_class r = re * o.re - im * o.im;
  mpq_class i = re * o.im + im * o.re;
  re = std::move(r);
  im = std::move(i);
  return *this;
}

ExactComplex& ExactComplex::operator/=(const ExactComplex& o) {
  if (o.is_zero()) throw PreconditionError("ExactComplex: division by zero");
  if (o.is_real()) {
    re /= o.re;
    im /= o.re;
    return *this;
  }
  const mpq_class n = o.norm();
  mpq_class r = (re * o.re + im * o.im) / n;
  mpq_class i = (im * o.re - re * o.im) / n;
  re = std::move(r);
  im = std::move(i);
  return *this;
}

// ----------------------------------------------------------------- ExtComplex

ExtComplex ExtComplex::from_parts(std::complex<double> mantissa, std::int64_t exp2) {
  ExtComplex z;
  z.mant_ = mantissa;
  z.exp_ = exp2;
  z.normalize();
  return z;
}

ExtComplex ExtComplex::from_polar(const LogMagnitude& magnitude, std::complex<double> phase) {
  if (magnitude.is_zero() || phase == std::complex<double>(0.0, 0.0)) return {};
  const double l2 = magnitude.log() / std::numbers::ln2;
  const double whole = std::floor(l2);
  const double frac = std::exp2(l2 - whole);
  return from_parts(phase * frac, static_cast<std::int64_t>(whole));
}

void ExtComplex::normalize() {
  if (!std::isfinite(mant_.real()) || !std::isfinite(mant_.imag()))
    throw InvariantViolation("ExtComplex: non-finite mantissa");
  const double big = std::max(std::abs(mant_.real()), std::abs(mant_.imag()));
  if (big == 0.0) {
    mant_ = {0.0, 0.0};
    exp_ = 0;
    return;
  }
  int e = 0;
  std::frexp(big, &e);
  mant_ = {std::ldexp(mant_.real(), -e), std::ldexp(mant_.imag(), -e)};
  exp_ += e;
}

LogMagnitude ExtComplex::abs() const {
  if (is_zero()) return LogMagnitude::zero();
  return LogMagnitude::from_log(std::log(std::abs(mant_)) +
                                static_cast<double>(exp_) * std::numbers::ln2);
}

std::complex<double> ExtComplex::phase() const {
  if (is_zero()) return {0.0, 0.0};
  return mant_ / std::abs(mant_);
}

std::complex<double> ExtComplex::to_complex() const {
  if (is_zero()) return {0.0, 0.0};
  const auto e = static_cast<int>(std::clamp<std::int64_t>(exp_, -100000, 100000));
  return {std::ldexp(mant_.real(), e), std::ldexp(mant_.imag(), e)};
}

ExtComplex& ExtComplex::operator+=(const ExtComplex& o) {
  if (o.is_zero()) return *this;
  if (is_zero()) return *this = o;
  const std::int64_t hi = std::max(exp_, o.exp_);
  const auto shift = [hi](const ExtComplex& z) {
    const std::int64_t d = z.exp_ - hi;
    if (d < -1100) return std::complex<double>(0.0, 0.0);
    const int di = static_cast<int>(d);
    return std::complex<double>(std::ldexp(z.mant_.real(), di), std::ldexp(z.mant_.imag(), di));
  };
  mant_ = shift(*this) + shift(o);
  exp_ = hi;
  normalize();
  return *this;
}

ExtComplex& ExtComplex::operator*=(const ExtComplex& o) {
  if (is_zero() || o.is_zero()) return *this = ExtComplex{};
  mant_ *= o.mant_;
  exp_ += o.exp_;
  normalize();
  return *this;
}

ExtComplex& ExtComplex::operator/=(const ExtComplex& o) {
  if (o.is_zero()) throw PreconditionError("ExtComplex: division by zero");
  if (is_zero()) return *this;
  mant_ /= o.mant_;
  exp_ -= o.exp_;
  normalize();
  return *this;
}

// ------------------------------------------------------------------ rationals

namespace {

/// z = d * 2^e with d in [0.5, 1).
std::pair<double, long> split_mpz(const mpz_class& z) {
  long e = 0;
  const double d = mpz_get_d_2exp(&e, z.get_mpz_t());
  return {d, e};
}

/// q as mantissa * 2^exp without overflow.
std::pair<double, std::int64_t> split_mpq(const mpq_class& q) {
  if (sgn(q) == 0) return {0.0, 0};
  const auto [dn, en] = split_mpz(q.get_num());
  const auto [dd, ed] = split_mpz(q.get_den());
  return {dn / dd, static_cast<std::int64_t>(en) - static_cast<std::int64_t>(ed)};
}

}  // namespace

double log_abs(const mpq_class& q) {
  if (sgn(q) == 0) throw PreconditionError("log_abs: zero rational");
  const auto [d, e] = split_mpq(q);
  return std::log(std::abs(d)) + static_cast<double>(e) * std::numbers::ln2;
}

ExtComplex to_ext(const mpq_class& re, const mpq_class& im) {
  const auto [dr, er] = split_mpq(re);
  const auto [di, ei] = split_mpq(im);
  return ExtComplex::from_parts({dr, 0.0}, er) + ExtComplex::from_parts({0.0, di}, ei);
}

std::string to_string(const mpq_class& q) { return q.get_str(); }

mpq_class parse_rational(const std::string& text) {
  auto fail = [&]() -> mpq_class { throw ConfigError("malformed number: '" + text + "'"); };
  if (text.empty()) return fail();
  if (const auto slash = text.find('/'); slash != std::string::npos) {
    const std::string num = text.substr(0, slash), den = text.substr(slash + 1);
    const auto is_int = [](const std::string& s, bool allow_sign) {
      std::size_t i = 0;
      if (allow_sign && i < s.size() && (s[i] == '-' || s[i] == '+')) ++i;
      if (i == s.size()) return false;
      for (; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
      return true;
    };
    if (!is_int(num, true) || !is_int(den, false)) return fail();
    mpz_class n(num[0] == '+' ? num.substr(1) : num, 10), d(den, 10);
    if (d == 0) throw ConfigError("zero denominator: '" + text + "'");
    mpq_class q(n, d);
    q.canonicalize();
    return q;
  }
  // Decimal: [sign] digits [. digits] [e|E [sign] digits]
  std::size_t i = 0;
  bool negative = false;
  if (text[i] == '-' || text[i] == '+') negative = text[i++] == '-';
  std::string digits;
  long frac_len = 0;
  bool any = false;
  for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i, any = true)
    digits += text[i];
  if (i < text.size() && text[i] == '.') {
    for (++i; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i, any = true) {
      digits += text[i];
      ++frac_len;
    }
  }
  if (!any) return fail();
  long exponent = 0;
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    const std::size_t start = i;
    if (i < text.size() && (text[i] == '-' || text[i] == '+')) ++i;
    if (i == text.size()) return fail();
    for (std::size_t j = i; j < text.size(); ++j)
      if (!std::isdigit(static_cast<unsigned char>(text[j]))) return fail();
    exponent = std::stol(text.substr(start));
    i = text.size();
  }
  if (i != text.size()) return fail();
  mpz_class mant(digits.empty() ? "0" : digits, 10);
  const long shift = exponent - frac_len;
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(shift)));
  mpq_class q = shift >= 0 ? mpq_class(mant * scale) : mpq_class(mant, scale);
  q.canonicalize();
  return negative ? mpq_class(-q) : q;
}

std::string format_double(double x) {
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

mpz_class falling_factorial(long top, long count) {
  if (count < 0 || top < count) throw PreconditionError("falling_factorial: need 0 <= count <= top");
  if (count <= 64) {
    mpz_class r = 1;
    for (long i = 0; i < count; ++i) r *= top - i;
    return r;
  }
  mpz_class num, den;
  mpz_fac_ui(num.get_mpz_t(), static_cast<unsigned long>(top));
  mpz_fac_ui(den.get_mpz_t(), static_cast<unsigned long>(top - count));
  mpz_divexact(num.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  return num;
}

// ---------------------------------------------------------------- traits impl

ExactComplex ScalarTraits<ExactComplex>::from_ext(const ExtComplex& z) {
  const auto m = z.mantissa();
  mpq_class re(m.real()), im(m.imag());
  mpz_class p2 = 1;
  const auto e = z.exponent();
  mpz_mul_2exp(p2.get_mpz_t(), p2.get_mpz_t(), static_cast<mp_bitcnt_t>(std::llabs(e)));
  if (e >= 0) {
    re *= p2;
    im *= p2;
  } else {
    re /= p2;
    im /= p2;
  }
  return ExactComplex(re, im);
}

LogMagnitude ScalarTraits<ExactComplex>::abs(const ExactComplex& z) {
  if (z.is_zero()) return LogMagnitude::zero();
  if (z.is_real()) return LogMagnitude::from_log(log_abs(z.re));
  if (sgn(z.re) == 0) return LogMagnitude::from_log(log_abs(z.im));
  return LogMagnitude::from_log(0.5 * log_abs(z.norm()));
}

std::complex<double> ScalarTraits<ExactComplex>::to_complex(const ExactComplex& z) {
  return {z.re.get_d(), z.im.get_d()};
}

ExactComplex ScalarTraits<ExactComplex>::mul_falling(const ExactComplex& z, long top, long count) {
  if (z.is_zero() || count == 0) return z;
  const mpq_class f(falling_factorial(top, count));
  return ExactComplex(z.re * f, z.im * f);
}

ExactComplex ScalarTraits<ExactComplex>::div_falling(const ExactComplex& z, long top, long count) {
  if (z.is_zero() || count == 0) return z;
  const mpq_class f(falling_factorial(top, count));
  return ExactComplex(z.re / f, z.im / f);
}

namespace {

ExtComplex falling_ext(long top, long count) {
  if (count < 0 || top < count) throw PreconditionError("falling_factorial: need 0 <= count <= top");
  if (count <= 256) {
    ExtComplex r(1.0);
    double chunk = 1.0;
    for (long i = 0; i < count; ++i) {
      chunk *= static_cast<double>(top - i);
      if (chunk > 1e280) {
        r *= ExtComplex(chunk);
        chunk = 1.0;
      }
    }
    return r * ExtComplex(chunk);
  }
  return ExtComplex::from_polar(
      LogMagnitude::from_log(log_factorial(top) - log_factorial(top - count)), {1.0, 0.0});
}

}  // namespace

ExtComplex ScalarTraits<ExtComplex>::mul_falling(const ExtComplex& z, long top, long count) {
  if (z.is_zero() || count == 0) return z;
  return z * falling_ext(top, count);
}

ExtComplex ScalarTraits<ExtComplex>::div_falling(const ExtComplex& z, long top, long count) {
  if (z.is_zero() || count == 0) return z;
  return z / falling_ext(top, count);
}

std::string format_log(const LogMagnitude& m) { return m.is_zero() ? "-inf" : format_double(m.log()); }

}  // namespace hyperdiff
