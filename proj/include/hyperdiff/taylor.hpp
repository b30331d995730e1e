#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "hyperdiff/error.hpp"
#include "hyperdiff/log_magnitude.hpp"
#include "hyperdiff/scalar.hpp"

namespace hyperdiff {

/// A truncated power series a_0 + a_1 z + ... + a_N z^N.
///
/// The truncation degree N is part of the value: two series with the same
/// nonzero coefficients but different N compare equal, yet operations keep
/// track of N so every finite stand-in for an entire function is explicit.
template <Scalar S>
class TaylorPolynomial {
 public:
  using Traits = ScalarTraits<S>;

  /// The zero series truncated at degree 0.
  TaylorPolynomial() : coeffs_(1, S{}) {}

  /// Zero series with truncation degree n.
  explicit TaylorPolynomial(long truncation) : coeffs_(static_cast<std::size_t>(std::max(truncation, 0L)) + 1, S{}) {}

  explicit TaylorPolynomial(std::vector<S> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) coeffs_.emplace_back();
  }

  static TaylorPolynomial monomial(long k, S coeff = S(1)) {
    TaylorPolynomial p(k);
    p.coeffs_[static_cast<std::size_t>(k)] = std::move(coeff);
    return p;
  }

  long truncation() const { return static_cast<long>(coeffs_.size()) - 1; }

  /// Highest index with a nonzero coefficient; -1 for the zero series.
  long degree() const {
    for (long i = truncation(); i >= 0; --i)
      if (!Traits::is_zero(coeffs_[static_cast<std::size_t>(i)])) return i;
    return -1;
  }

  bool is_zero() const { return degree() < 0; }

  /// Coefficient at i; zero beyond the truncation.
  S operator[](long i) const {
    if (i < 0 || i > truncation()) return S{};
    return coeffs_[static_cast<std::size_t>(i)];
  }

  const std::vector<S>& coefficients() const { return coeffs_; }

  void set(long i, S value) {
    if (i < 0) throw PreconditionError("TaylorPolynomial::set: negative index");
    if (i > truncation()) coeffs_.resize(static_cast<std::size_t>(i) + 1, S{});
    coeffs_[static_cast<std::size_t>(i)] = std::move(value);
  }

  /// Raises the truncation degree to at least n (never lowers it).
  void extend(long n) {
    if (n > truncation()) coeffs_.resize(static_cast<std::size_t>(n) + 1, S{});
  }

  /// Copy with trailing zeros removed (truncation = max(degree, 0)).
  TaylorPolynomial trimmed() const {
    const long d = std::max(degree(), 0L);
    return TaylorPolynomial(std::vector<S>(coeffs_.begin(), coeffs_.begin() + d + 1));
  }

  TaylorPolynomial& operator+=(const TaylorPolynomial& o) {
    extend(o.truncation());
    for (long i = 0; i <= o.truncation(); ++i)
      if (!Traits::is_zero(o.coeffs_[static_cast<std::size_t>(i)]))
        coeffs_[static_cast<std::size_t>(i)] += o.coeffs_[static_cast<std::size_t>(i)];
    return *this;
  }

  TaylorPolynomial& operator-=(const TaylorPolynomial& o) {
    extend(o.truncation());
    for (long i = 0; i <= o.truncation(); ++i)
      if (!Traits::is_zero(o.coeffs_[static_cast<std::size_t>(i)]))
        coeffs_[static_cast<std::size_t>(i)] -= o.coeffs_[static_cast<std::size_t>(i)];
    return *this;
  }

  TaylorPolynomial& operator*=(const S& scale) {
    for (auto& c : coeffs_)
      if (!Traits::is_zero(c)) c *= scale;
    return *this;
  }

  friend TaylorPolynomial operator+(TaylorPolynomial a, const TaylorPolynomial& b) { return a += b; }
  friend TaylorPolynomial operator-(TaylorPolynomial a, const TaylorPolynomial& b) { return a -= b; }
  friend TaylorPolynomial operator*(const S& s, TaylorPolynomial a) { return a *= s; }
  friend TaylorPolynomial operator*(TaylorPolynomial a, const S& s) { return a *= s; }

  /// Equality of the nonzero coefficients; truncation degrees are ignored.
  friend bool operator==(const TaylorPolynomial& a, const TaylorPolynomial& b) {
    const long n = std::max(a.truncation(), b.truncation());
    for (long i = 0; i <= n; ++i)
      if (!(a[i] == b[i])) return false;
    return true;
  }

 private:
  std::vector<S> coeffs_;
};

/// D^order f. Coefficient i of the result is a_{i+order} (i+order)!/i!,
/// with the factorial ratio applied exactly (exact mode) or in extended
/// range (floating modes). order > N yields the zero series.
template <Scalar S>
TaylorPolynomial<S> differentiate(const TaylorPolynomial<S>& f, long order) {
  using T = ScalarTraits<S>;
  if (order < 0) throw PreconditionError("differentiate: negative order");
  const long n = f.truncation();
  if (order > n) return TaylorPolynomial<S>(0L);
  TaylorPolynomial<S> out(n - order);
  for (long t = order; t <= n; ++t) {
    const S& a = f.coefficients()[static_cast<std::size_t>(t)];
    if (T::is_zero(a)) continue;
    out.set(t - order, T::mul_falling(a, t, order));
  }
  return out;
}

/// Horner evaluation.
template <Scalar S>
S eval(const TaylorPolynomial<S>& f, const S& z) {
  S acc{};
  for (long i = f.truncation(); i >= 0; --i) {
    acc *= z;
    acc += f.coefficients()[static_cast<std::size_t>(i)];
  }
  return acc;
}

/// Sum_j |a_j| r^j in log domain; an upper bound for max |f| on |z| <= r.
template <Scalar S>
LogMagnitude majorant_norm(const TaylorPolynomial<S>& f, double r) {
  using T = ScalarTraits<S>;
  if (!(r > 0.0)) throw PreconditionError("majorant_norm: need r > 0");
  const double log_r = std::log(r);
  std::vector<LogMagnitude> terms;
  for (long j = 0; j <= f.truncation(); ++j) {
    const S& a = f.coefficients()[static_cast<std::size_t>(j)];
    if (T::is_zero(a)) continue;
    terms.push_back(T::abs(a) * LogMagnitude::from_log(static_cast<double>(j) * log_r));
  }
  return sum(terms);
}

/// Upper bound for sum_{j > n} x^j / j!, x >= 0. For n < 0 this is e^x.
LogMagnitude exp_tail_bound(double x, long n);

/// Truncation of e_w(z) = e^{wz} at degree n, together with a bound on the
/// omitted tail's majorant on |z| <= r.
template <Scalar S>
std::pair<TaylorPolynomial<S>, LogMagnitude> exp_truncate(const S& w, long n, double r) {
  using T = ScalarTraits<S>;
  if (n < 0) throw PreconditionError("exp_truncate: need N >= 0");
  if (!(r > 0.0)) throw PreconditionError("exp_truncate: need r > 0");
  TaylorPolynomial<S> p(n);
  S term(1);
  p.set(0, term);
  for (long j = 1; j <= n; ++j) {
    term *= w;
    term /= S(static_cast<int>(j));
    p.set(j, term);
  }
  const double x = T::abs(w).value() * r;
  return {std::move(p), exp_tail_bound(x, n)};
}

/// Converts between coefficient fields (exact values round into floating
/// modes; floating values convert exactly into rationals).
template <Scalar To, Scalar From>
TaylorPolynomial<To> convert(const TaylorPolynomial<From>& f) {
  std::vector<To> out;
  out.reserve(f.coefficients().size());
  for (const auto& c : f.coefficients()) {
    if constexpr (std::is_same_v<To, From>) {
      out.push_back(c);
    } else if constexpr (std::is_same_v<From, ExactComplex>) {
      out.push_back(ScalarTraits<To>::from_rational(c.re, c.im));
    } else if constexpr (std::is_same_v<From, ExtComplex>) {
      out.push_back(ScalarTraits<To>::from_ext(c));
    } else {
      out.push_back(ScalarTraits<To>::from_complex(c));
    }
  }
  return TaylorPolynomial<To>(std::move(out));
}

}  // namespace hyperdiff
