#include "hyperdiff/right_inverse.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace hyperdiff {

template <Scalar S>
std::string RightInverse<S>::header() const {
  return "right_inverse n=" + std::to_string(n) + " k=" + std::to_string(k) + " route=" + route;
}

template <Scalar S>
ExponentialCombo<S> exp_inverse(const PolynomialOperator<S>& p, const S& w) {
  ExponentialCombo<S> out;
  const S pw = p(w);
  if (ScalarTraits<S>::is_zero(pw)) return out;
  out.add(S(1) / pw, w);
  return out;
}

template <Scalar S>
LogMagnitude exp_inverse_defect_bound(const PolynomialOperator<S>& p, const S& w, long n, double r) {
  const S pw = p(w);
  if (ScalarTraits<S>::is_zero(pw)) return LogMagnitude::zero();
  return exponential_defect_bound(p, w, n, r) / ScalarTraits<S>::abs(pw);
}

template <Scalar S>
std::vector<S> shifted_coeffs(const PolynomialOperator<S>& p) {
  std::vector<S> a;
  for (long j = p.valence(); j <= p.degree(); ++j) a.push_back(p.coeff(j));
  return a;
}

namespace {

template <Scalar S>
S at(const std::vector<S>& a, long i) {
  return i >= 0 && i < static_cast<long>(a.size()) ? a[static_cast<std::size_t>(i)] : S{};
}

/// Back substitution for sum_{j>=s} a_{j-s} g_j j!/s! = y_s, s = top..0.
template <Scalar S>
std::vector<S> triangular_solve(const std::vector<S>& a, const std::vector<S>& y) {
  using T = ScalarTraits<S>;
  if (a.empty() || T::is_zero(a[0])) throw PreconditionError("solve_monic_system: a_0 must be nonzero");
  const long top = static_cast<long>(y.size()) - 1;
  std::vector<S> g(y.size());
  for (long s = top; s >= 0; --s) {
    S acc = y[static_cast<std::size_t>(s)];
    for (long j = s + 1; j <= top; ++j) {
      const S aj = at(a, j - s);
      const S& gj = g[static_cast<std::size_t>(j)];
      if (T::is_zero(aj) || T::is_zero(gj)) continue;
      acc -= T::mul_falling(aj * gj, j, j - s);
    }
    g[static_cast<std::size_t>(s)] = acc / a[0];
  }
  return g;
}

/// Polynomials in t = a_0 with coefficients in S.
template <Scalar S>
using TPoly = std::vector<S>;

template <Scalar S>
TPoly<S> tpoly_mul(const TPoly<S>& x, const TPoly<S>& y) {
  if (x.empty() || y.empty()) return {};
  TPoly<S> out(x.size() + y.size() - 1);
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) out[i + j] += x[i] * y[j];
  return out;
}

template <Scalar S>
void tpoly_add(TPoly<S>& acc, const TPoly<S>& x, bool negate) {
  if (acc.size() < x.size()) acc.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (negate) acc[i] -= x[i];
    else acc[i] += x[i];
  }
}

/// Determinant by cofactor expansion along successive rows, memoized on the
/// set of columns still available.
template <Scalar S>
class Laplace {
 public:
  explicit Laplace(std::vector<std::vector<TPoly<S>>> m) : m_(std::move(m)) {}

  TPoly<S> det() { return minor(0, (1u << m_.size()) - 1); }

 private:
  TPoly<S> minor(std::size_t row, unsigned cols) {
    if (row == m_.size()) return {S(1)};
    if (auto it = memo_.find(cols); it != memo_.end()) return it->second;
    TPoly<S> acc;
    int sign_index = 0;
    for (std::size_t c = 0; c < m_.size(); ++c) {
      if (!(cols & (1u << c))) continue;
      const auto& entry = m_[row][c];
      const bool nonzero = std::any_of(entry.begin(), entry.end(), [](const S& v) { return !ScalarTraits<S>::is_zero(v); });
      if (nonzero) tpoly_add(acc, tpoly_mul(entry, minor(row + 1, cols & ~(1u << c))), sign_index % 2 == 1);
      ++sign_index;
    }
    memo_[cols] = acc;
    return acc;
  }

  std::vector<std::vector<TPoly<S>>> m_;
  std::map<unsigned, TPoly<S>> memo_;
};

template <Scalar S>
bool exact_identity(const PolynomialOperator<S>& p, const TaylorPolynomial<S>& f, const TaylorPolynomial<S>& y) {
  if constexpr (ScalarTraits<S>::exact) return apply_operator(p, f) == y;
  return true;
}

}  // namespace

template <Scalar S>
std::vector<S> solve_monic_system(const std::vector<S>& a, long k) {
  if (k < 0) throw PreconditionError("solve_monic_system: need k >= 0");
  std::vector<S> rhs(static_cast<std::size_t>(k) + 1);
  rhs.back() = S(1);
  return triangular_solve(a, rhs);
}

template <Scalar S>
CramerSolution<S> cramer_cross_check(const std::vector<S>& a, long k) {
  using T = ScalarTraits<S>;
  if (k < 0) throw PreconditionError("cramer_cross_check: need k >= 0");
  if (k > 8) throw PreconditionError("cramer_cross_check: size cap k <= 8 exceeded");
  if (a.empty() || T::is_zero(a[0])) throw PreconditionError("cramer_cross_check: a_0 must be nonzero");
  const auto size = static_cast<std::size_t>(k) + 1;
  // Entry (s, j) = a_{j-s} j!/s!, with the diagonal a_0 kept symbolic as t.
  std::vector<std::vector<TPoly<S>>> m(size, std::vector<TPoly<S>>(size));
  for (std::size_t s = 0; s < size; ++s)
    for (std::size_t j = s; j < size; ++j) {
      if (j == s) {
        m[s][j] = {S{}, S(1)};
      } else {
        const S v = at(a, static_cast<long>(j - s));
        if (!T::is_zero(v)) m[s][j] = {T::mul_falling(v, static_cast<long>(j), static_cast<long>(j - s))};
      }
    }

  CramerSolution<S> out;
  const S a0 = a[0];
  S a0_pow(1);
  for (std::size_t i = 0; i < size; ++i) a0_pow *= a0;
  std::vector<LogMagnitude> mags;
  for (std::size_t s = 0; s < size; ++s) {
    auto ms = m;
    for (std::size_t r = 0; r < size; ++r) ms[r][s] = r + 1 == size ? TPoly<S>{S(1)} : TPoly<S>{};
    TPoly<S> phi = Laplace<S>(ms).det();
    phi.resize(size);
    S value{}, t_pow(1);
    for (std::size_t j = 0; j < size; ++j) {
      value += phi[j] * t_pow;
      t_pow *= a0;
      mags.push_back(T::abs(phi[j]));
    }
    out.b.push_back(value / a0_pow);
    out.phi.push_back(std::move(phi));
  }
  out.c_constant = *std::max_element(mags.begin(), mags.end(), [](const auto& x, const auto& y) { return x < y; });
  return out;
}

LogMagnitude cramer_coefficient_bound(const LogMagnitude& c_constant, const LogMagnitude& abs_a0, long k,
                                      long j_first) {
  std::vector<LogMagnitude> terms;
  for (long j = j_first; j <= k; ++j) terms.push_back(c_constant / abs_a0.pow(static_cast<double>(k + 1 - j)));
  return sum(terms);
}

template <Scalar S>
RightInverse<S> build_f_nk(const PolynomialOperator<S>& p, long k) {
  RightInverse<S> out;
  out.route = "polynomial";
  out.k = k;
  out.a = shifted_coeffs(p);
  out.b = solve_monic_system(out.a, k);
  const long m = p.valence();
  out.f = TaylorPolynomial<S>(k + m);
  for (long s = 0; s <= k; ++s) {
    const S& bs = out.b[static_cast<std::size_t>(s)];
    if (!ScalarTraits<S>::is_zero(bs)) out.f.set(s + m, ScalarTraits<S>::div_falling(bs, s + m, m));
  }
  if (!exact_identity(p, out.f, TaylorPolynomial<S>::monomial(k)))
    throw InvariantViolation("build_f_nk: P(D) f != z^" + std::to_string(k));
  return out;
}

template <Scalar S>
TaylorPolynomial<S> inverse_for_polynomial(const PolynomialOperator<S>& p, const TaylorPolynomial<S>& y) {
  const long deg = y.degree();
  const long m = p.valence();
  if (deg < 0) return TaylorPolynomial<S>(0L);
  std::vector<S> rhs(y.coefficients().begin(), y.coefficients().begin() + deg + 1);
  const auto g = triangular_solve(shifted_coeffs(p), rhs);
  TaylorPolynomial<S> h(deg + m);
  for (long s = 0; s <= deg; ++s) {
    const S& gs = g[static_cast<std::size_t>(s)];
    if (!ScalarTraits<S>::is_zero(gs)) h.set(s + m, ScalarTraits<S>::div_falling(gs, s + m, m));
  }
  if (!exact_identity(p, h, y)) throw InvariantViolation("inverse_for_polynomial: P(D) h != y");
  return h;
}

template <Scalar S>
FnkDecayReport fnk_decay(const OperatorSequence& seq, long k, double r, long n_first, long n_last) {
  if (!(r > 1.0)) throw PreconditionError("fnk_decay: need r > 1");
  if (k < 0) throw PreconditionError("fnk_decay: need k >= 0");
  if (n_first < 1 || n_last < n_first) throw PreconditionError("fnk_decay: need 1 <= n_first <= n_last");
  FnkDecayReport rep;
  rep.k = k;
  rep.r = r;
  StatisticSeries inv;
  for (long n = n_first; n <= n_last; ++n) {
    const auto p = seq.operator_at<S>(n);
    FnkDecayRow row;
    row.n = n;
    row.norm = majorant_norm(build_f_nk(p, k).f, r);
    const long m = p.valence();
    const double log_c = seq.coefficient_abs(n, m).log();
    for (long j = 1; j <= k; ++j) {
      const double lhs = (static_cast<double>(k + 1 - j) * log_c + log_factorial(m)) / static_cast<double>(m);
      row.threshold_pass = row.threshold_pass && m > 0 && lhs > std::log(2.0 * r);
    }
    inv.n.push_back(n);
    inv.value.push_back(row.norm.is_zero() ? LogMagnitude::from_log(INFINITY) : LogMagnitude::one() / row.norm);
    rep.rows.push_back(row);
  }
  GrowthRule rule = GrowthRule::coefficient();
  rule.threshold_log = 0.0;
  evaluate_series(inv, rule);
  rep.verdict = inv.verdict;
  return rep;
}

#define HYPERDIFF_INSTANTIATE(S)                                                                           \
  template struct RightInverse<S>;                                                                         \
  template ExponentialCombo<S> exp_inverse<S>(const PolynomialOperator<S>&, const S&);                     \
  template LogMagnitude exp_inverse_defect_bound<S>(const PolynomialOperator<S>&, const S&, long, double); \
  template std::vector<S> shifted_coeffs<S>(const PolynomialOperator<S>&);                                 \
  template std::vector<S> solve_monic_system<S>(const std::vector<S>&, long);                              \
  template CramerSolution<S> cramer_cross_check<S>(const std::vector<S>&, long);                           \
  template RightInverse<S> build_f_nk<S>(const PolynomialOperator<S>&, long);                              \
  template TaylorPolynomial<S> inverse_for_polynomial<S>(const PolynomialOperator<S>&,                     \
                                                         const TaylorPolynomial<S>&);                      \
  template FnkDecayReport fnk_decay<S>(const OperatorSequence&, long, double, long, long);

HYPERDIFF_INSTANTIATE(ExactComplex)
HYPERDIFF_INSTANTIATE(ExtComplex)
HYPERDIFF_INSTANTIATE(std::complex<double>)

#undef HYPERDIFF_INSTANTIATE

}  // namespace hyperdiff
