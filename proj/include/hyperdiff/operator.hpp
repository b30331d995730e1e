#pragma once

#include <cmath>
#include <map>
#include <vector>

#include "hyperdiff/taylor.hpp"

namespace hyperdiff {

/// P(z) = sum_{j=m}^{d} c_j z^j, acting as P(D) = sum c_j D^j.
///
/// Invariants: d >= 1, m <= d, c_m != 0, c_d != 0.
template <Scalar S>
class PolynomialOperator {
 public:
  using Traits = ScalarTraits<S>;

  /// From dense polynomial coefficients c_0..c_n; valence and degree are
  /// read off the nonzero entries.
  explicit PolynomialOperator(const std::vector<S>& dense) {
    long lo = -1, hi = -1;
    for (long j = 0; j < static_cast<long>(dense.size()); ++j) {
      if (Traits::is_zero(dense[static_cast<std::size_t>(j)])) continue;
      if (lo < 0) lo = j;
      hi = j;
    }
    if (hi < 1) throw PreconditionError("PolynomialOperator: polynomial must be nonconstant");
    valence_ = lo;
    coeffs_.assign(dense.begin() + lo, dense.begin() + hi + 1);
  }

  explicit PolynomialOperator(const std::map<long, S>& sparse) {
    std::vector<S> dense;
    for (const auto& [j, c] : sparse) {
      if (j < 0) throw PreconditionError("PolynomialOperator: negative exponent");
      if (static_cast<long>(dense.size()) <= j) dense.resize(static_cast<std::size_t>(j) + 1);
      dense[static_cast<std::size_t>(j)] = c;
    }
    *this = PolynomialOperator(dense);
  }

  long valence() const { return valence_; }
  long degree() const { return valence_ + static_cast<long>(coeffs_.size()) - 1; }

  /// c_j; zero outside [valence, degree].
  S coeff(long j) const {
    if (j < valence_ || j > degree()) return S{};
    return coeffs_[static_cast<std::size_t>(j - valence_)];
  }

  /// P(w), i.e. the eigenvalue of P(D) on e_w.
  S operator()(const S& w) const {
    S acc{};
    for (long j = degree(); j >= valence_; --j) {
      acc *= w;
      acc += coeffs_[static_cast<std::size_t>(j - valence_)];
    }
    for (long j = 0; j < valence_; ++j) acc *= w;
    return acc;
  }

  /// Sum_j |c_j|.
  LogMagnitude coefficient_sum() const {
    std::vector<LogMagnitude> t;
    for (const auto& c : coeffs_) t.push_back(Traits::abs(c));
    return sum(t);
  }

  friend bool operator==(const PolynomialOperator& a, const PolynomialOperator& b) {
    return a.valence_ == b.valence_ && a.coeffs_ == b.coeffs_;
  }

 private:
  long valence_ = 0;
  std::vector<S> coeffs_;
};

/// P(D) f = sum_j c_j D^j f. The result keeps truncation N - valence.
template <Scalar S>
TaylorPolynomial<S> apply_operator(const PolynomialOperator<S>& p, const TaylorPolynomial<S>& f) {
  using T = ScalarTraits<S>;
  const long n = f.truncation();
  const long m = p.valence();
  if (m > n) return TaylorPolynomial<S>(0L);
  TaylorPolynomial<S> out(n - m);
  std::vector<S> acc(static_cast<std::size_t>(n - m) + 1);
  for (long t = m; t <= n; ++t) {
    const S& a = f.coefficients()[static_cast<std::size_t>(t)];
    if (T::is_zero(a)) continue;
    for (long j = m; j <= std::min(p.degree(), t); ++j) {
      const S c = p.coeff(j);
      if (T::is_zero(c)) continue;
      acc[static_cast<std::size_t>(t - j)] += c * T::mul_falling(a, t, j);
    }
  }
  return TaylorPolynomial<S>(std::move(acc));
}

/// P(w): P(D) e_w = P(w) e_w.
template <Scalar S>
S apply_to_exponential(const PolynomialOperator<S>& p, const S& w) {
  return p(w);
}

/// Bound on the majorant (radius r) of P(D)E_N - P(w)E_N, where E_N is the
/// degree-N truncation of e_w. The difference equals
/// -sum_s c_s w^s (E_N - E_{N-s}), so the bound is
/// sum_s |c_s| |w|^s tail(N - s).
template <Scalar S>
LogMagnitude exponential_defect_bound(const PolynomialOperator<S>& p, const S& w, long n, double r) {
  using T = ScalarTraits<S>;
  const LogMagnitude aw = T::abs(w);
  const double x = aw.value() * r;
  std::vector<LogMagnitude> terms;
  for (long s = p.valence(); s <= p.degree(); ++s) {
    const S c = p.coeff(s);
    if (T::is_zero(c)) continue;
    terms.push_back(T::abs(c) * aw.pow(static_cast<double>(s)) * exp_tail_bound(x, n - s));
  }
  return sum(terms);
}

/// A finite combination sum_i weight_i e_{w_i} with distinct frequencies.
template <Scalar S>
struct ExponentialCombo {
  struct Term {
    S weight;
    S frequency;
  };
  std::vector<Term> terms;

  bool is_zero() const { return terms.empty(); }

  void add(const S& weight, const S& frequency) {
    for (auto& t : terms)
      if (t.frequency == frequency) {
        t.weight += weight;
        return;
      }
    terms.push_back({weight, frequency});
  }

  /// Degree-N truncation and tail bound on |z| <= r.
  std::pair<TaylorPolynomial<S>, LogMagnitude> truncate(long n, double r) const {
    TaylorPolynomial<S> out(n);
    std::vector<LogMagnitude> tails;
    for (const auto& t : terms) {
      auto [e, tail] = exp_truncate(t.frequency, n, r);
      out += t.weight * e;
      tails.push_back(ScalarTraits<S>::abs(t.weight) * tail);
    }
    return {std::move(out), sum(tails)};
  }
};

}  // namespace hyperdiff
