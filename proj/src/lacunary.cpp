#include "hyperdiff/lacunary.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

namespace hyperdiff {

namespace {

constexpr double kGuard = 1e-12;

bool strictly_below(double lhs, double rhs) { return lhs + kGuard * std::max(1.0, std::abs(rhs)) < rhs; }

}  // namespace

LacunaryBasis make_basis(const OperatorSequence& seq, const std::vector<long>& indices) {
  LacunaryBasis b{seq, {}, {}, {}, {}};
  for (long n : indices) {
    if (!b.n.empty() && n <= b.n.back()) throw PreconditionError("make_basis: indices must increase");
    b.n.push_back(n);
    b.m.push_back(seq.valence(n));
    b.d.push_back(seq.degree(n));
    b.a_sum.push_back(seq.coefficient_sum(n));
  }
  return b;
}

bool recursion_admits(const LogMagnitude& a_prev, long d_prev, long m_prev, long m_candidate) {
  if (m_candidate <= m_prev || m_candidate < 3) return false;
  const double log_plus = std::max(0.0, a_prev.log());
  const double m = static_cast<double>(m_candidate);
  return strictly_below(log_plus + static_cast<double>(d_prev), m * std::numbers::ln2 / std::log(m));
}

LacunaryBasis select_indices(const OperatorSequence& seq, long J, long n_start, long n_cap) {
  if (J < 2) throw PreconditionError("select_indices: need J >= 2");
  if (n_start < 1) throw PreconditionError("select_indices: need n_start >= 1");
  if (n_cap < 1) throw PreconditionError("select_indices: need n_cap >= 1");

  const auto exhausted = [&](long step, long from) {
    return CapExhausted("select_indices: no admissible index for step " + std::to_string(step) + " in (" +
                        std::to_string(from) + ", " + std::to_string(from + n_cap) + "]");
  };

  std::vector<long> chosen;
  long n = n_start;
  for (long scanned = 0;; ++n, ++scanned) {
    if (scanned >= n_cap || !seq.has_index(n)) throw exhausted(1, n_start - 1);
    if (seq.valence(n) >= 3) break;
  }
  chosen.push_back(n);
  LogMagnitude a_prev = seq.coefficient_sum(n);
  long d_prev = seq.degree(n), m_prev = seq.valence(n);

  while (static_cast<long>(chosen.size()) < J) {
    const long from = chosen.back();
    long cand = from + 1;
    for (;; ++cand) {
      if (cand - from > n_cap || !seq.has_index(cand)) throw exhausted(static_cast<long>(chosen.size()) + 1, from);
      if (recursion_admits(a_prev, d_prev, m_prev, seq.valence(cand))) break;
    }
    chosen.push_back(cand);
    a_prev = seq.coefficient_sum(cand);
    d_prev = seq.degree(cand);
    m_prev = seq.valence(cand);
  }

  LacunaryBasis basis = make_basis(seq, chosen);
  const auto check = verify_ineq_ak(basis);
  if (!check.ok)
    throw InvariantViolation("select_indices: selected basis violates the pairwise inequality at (" +
                             std::to_string(check.violation->k) + ", " + std::to_string(check.violation->j) + ")");
  return basis;
}

IneqReport verify_ineq_ak(const LacunaryBasis& basis) {
  IneqReport rep;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    for (std::size_t j = k + 1; j < basis.size(); ++j) {
      const double mj = static_cast<double>(basis.m[j]);
      const double rhs = mj * std::numbers::ln2;
      const double lhs = basis.a_sum[k].log() + static_cast<double>(basis.d[k]) * std::log(mj);
      PairMargin p{static_cast<long>(k + 1), static_cast<long>(j + 1), rhs - lhs};
      rep.pairs.push_back(p);
      if (!strictly_below(lhs, rhs) && rep.ok) {
        rep.ok = false;
        rep.violation = p;
      }
    }
  }
  return rep;
}

template <Scalar S>
TaylorPolynomial<S> m0_member(const LacunaryBasis& basis, const std::vector<S>& a) {
  if (a.size() > basis.size()) throw PreconditionError("m0_member: more coefficients than basis elements");
  TaylorPolynomial<S> f(a.empty() ? 0L : basis.m[a.size() - 1]);
  for (std::size_t j = 0; j < a.size(); ++j)
    if (!ScalarTraits<S>::is_zero(a[j])) f.set(basis.m[j], a[j]);
  return f;
}

template <Scalar S>
std::vector<DecayRow> decay_report(const LacunaryBasis& basis, const TaylorPolynomial<S>& f, double r) {
  using T = ScalarTraits<S>;
  if (!(r > 0.0)) throw PreconditionError("decay_report: need r > 0");
  for (long i = 0; i <= f.truncation(); ++i) {
    if (T::is_zero(f.coefficients()[static_cast<std::size_t>(i)])) continue;
    if (!std::binary_search(basis.m.begin(), basis.m.end(), i))
      throw PreconditionError("decay_report: f has a coefficient at z^" + std::to_string(i) +
                              " off the lacunary support");
  }
  const std::size_t J = basis.size();
  std::vector<LogMagnitude> term_bound(J);
  for (std::size_t j = 0; j < J; ++j)
    term_bound[j] = T::abs(f[basis.m[j]]) *
                    LogMagnitude::from_log(static_cast<double>(basis.m[j]) * std::log(2.0 * r));

  std::vector<DecayRow> rows;
  for (std::size_t k = 0; k < J; ++k) {
    const auto p = basis.seq.template operator_at<S>(basis.n[k]);
    DecayRow row;
    row.k = static_cast<long>(k + 1);
    row.measured = majorant_norm(apply_operator(p, f), r);

    TaylorPolynomial<S> tail(f.truncation());
    for (std::size_t j = k + 1; j < J; ++j) tail.set(basis.m[j], f[basis.m[j]]);
    row.tail_measured = majorant_norm(apply_operator(p, tail), r);

    const S& ak = f[basis.m[k]];
    row.diagonal = T::abs(ak) * T::abs(p.coeff(basis.m[k])) *
                   LogMagnitude::from_log(log_factorial(basis.m[k]));
    if (T::is_zero(ak)) row.diagonal = LogMagnitude::zero();

    row.tail_bound = sum(std::span<const LogMagnitude>(term_bound).subspan(k + 1));
    row.bound = term_bound[k] + row.tail_bound;
    row.within_bound = row.measured <= row.bound;
    row.tail_within_bound = row.tail_measured <= row.tail_bound;
    rows.push_back(row);
  }
  return rows;
}

void write_basis_csv(std::ostream& os, const LacunaryBasis& basis) {
  os << "k,n_k,m(n_k),d(n_k),logA_k\n";
  for (std::size_t k = 0; k < basis.size(); ++k)
    os << k + 1 << ',' << basis.n[k] << ',' << basis.m[k] << ',' << basis.d[k] << ','
       << format_double(basis.a_sum[k].log()) << '\n';
}

void write_decay_csv(std::ostream& os, const std::vector<DecayRow>& rows) {
  const auto fmt = format_log;
  os << "k,measured_log,bound_log,diagonal_log,tail_log,tail_bound_log\n";
  for (const auto& r : rows)
    os << r.k << ',' << fmt(r.measured) << ',' << fmt(r.bound) << ',' << fmt(r.diagonal) << ','
       << fmt(r.tail_measured) << ',' << fmt(r.tail_bound) << '\n';
}

#define HYPERDIFF_INSTANTIATE(S)                                                                  \
  template TaylorPolynomial<S> m0_member<S>(const LacunaryBasis&, const std::vector<S>&);         \
  template std::vector<DecayRow> decay_report<S>(const LacunaryBasis&, const TaylorPolynomial<S>&, double);

HYPERDIFF_INSTANTIATE(ExactComplex)
HYPERDIFF_INSTANTIATE(ExtComplex)
HYPERDIFF_INSTANTIATE(std::complex<double>)

#undef HYPERDIFF_INSTANTIATE

}  // namespace hyperdiff
