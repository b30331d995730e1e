#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "hyperdiff/sequence.hpp"

namespace hyperdiff {

/// Indices n_1 < ... < n_J of a sequence with their valences m, degrees d and
/// coefficient sums A_k = sum_s |c_{s,n_k}|. Positions are 1-based in reports.
struct LacunaryBasis {
  OperatorSequence seq;
  std::vector<long> n;
  std::vector<long> m;
  std::vector<long> d;
  std::vector<LogMagnitude> a_sum;

  std::size_t size() const { return n.size(); }
};

/// Basis over explicitly chosen indices (no admissibility check).
LacunaryBasis make_basis(const OperatorSequence& seq, const std::vector<long>& indices);

/// One admissibility test of the selection recursion: candidate n with
/// valence m extends a basis ending at (A, d) when
///   log+ A + d < m log 2 / log m   (log+ x = max(0, log x)),
/// and m exceeds the previous valence. Using log+ makes the recursion imply
/// the pairwise inequality for every later index, including when A < 1.
bool recursion_admits(const LogMagnitude& a_prev, long d_prev, long m_prev, long m_candidate);

/// Greedy selection: n_1 is the first index >= n_start with m(n) >= 3, and
/// each further index is the least one admitted by recursion_admits. Throws
/// CapExhausted when a step scans n_cap candidates (or reaches the end of a
/// finite table) without success, and InvariantViolation if the resulting
/// basis fails verify_ineq_ak.
LacunaryBasis select_indices(const OperatorSequence& seq, long J, long n_start, long n_cap = 1000000);

struct PairMargin {
  long k = 0;  // 1-based
  long j = 0;
  /// m(n_j) log 2 - log A_k - d(n_k) log m(n_j).
  double margin = 0.0;
};

struct IneqReport {
  std::vector<PairMargin> pairs;
  bool ok = true;
  /// First offending pair, if any.
  std::optional<PairMargin> violation;
};

/// Checks log A_k + d(n_k) log m(n_j) < m(n_j) log 2 for all k < j with the
/// relative guard band of certainly_less.
IneqReport verify_ineq_ak(const LacunaryBasis& basis);

/// f = sum_j a_j z^{m(n_j)} over the first |a| basis elements.
template <Scalar S>
TaylorPolynomial<S> m0_member(const LacunaryBasis& basis, const std::vector<S>& a);

struct DecayRow {
  long k = 0;  // 1-based
  /// ||P_{n_k}(D) f||_r.
  LogMagnitude measured;
  /// sum_{j >= k} |a_j| (2r)^{m(n_j)}.
  LogMagnitude bound;
  /// |a_k| |c_{m(n_k),n_k}| m(n_k)!: the contribution of the k-th term itself.
  LogMagnitude diagonal;
  /// ||P_{n_k}(D) sum_{j > k} a_j z^{m(n_j)}||_r.
  LogMagnitude tail_measured;
  /// sum_{j > k} |a_j| (2r)^{m(n_j)}.
  LogMagnitude tail_bound;
  bool within_bound = false;       // measured <= bound
  bool tail_within_bound = false;  // tail_measured <= tail_bound
};

/// Per-k decay of P_{n_k}(D) f for f in the lacunary span. The rows report
/// the stated bound and, separately, the diagonal term and the tail, since
/// only the tail is controlled by the pairwise inequality. Throws
/// PreconditionError when f has a coefficient off the lacunary support.
template <Scalar S>
std::vector<DecayRow> decay_report(const LacunaryBasis& basis, const TaylorPolynomial<S>& f, double r);

/// CSV `k,n_k,m(n_k),d(n_k),logA_k`.
void write_basis_csv(std::ostream& os, const LacunaryBasis& basis);
/// CSV `k,measured_log,bound_log,diagonal_log,tail_log,tail_bound_log`.
void write_decay_csv(std::ostream& os, const std::vector<DecayRow>& rows);

}  // namespace hyperdiff
