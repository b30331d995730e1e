#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hyperdiff/evidence.hpp"
#include "hyperdiff/sequence.hpp"

namespace hyperdiff {

/// Approximate right inverse of P(D), in one of two forms.
///
/// polynomial: f with P(D) f = z^k, built from the shifted coefficients
///   a_j = c_{j+m} and the solution b_0..b_k of the triangular system below.
/// exponential: (1/P(w)) e_w, or zero when P(w) = 0.
template <Scalar S>
struct RightInverse {
  std::string route;
  long n = 0;  // sequence index when known, 0 otherwise
  long k = 0;
  std::vector<S> a;
  std::vector<S> b;
  TaylorPolynomial<S> f;
  S frequency{};
  S scale{};

  /// `#right_inverse n= k= route=` header line (without the leading '#').
  std::string header() const;
};

/// (1/P(w)) e_w, or the zero combination when P(w) = 0.
template <Scalar S>
ExponentialCombo<S> exp_inverse(const PolynomialOperator<S>& p, const S& w);

/// Bound on the majorant (radius r) of P(D)(E_N / P(w)) - E_N, E_N the
/// degree-N truncation of e_w. Zero when P(w) = 0.
template <Scalar S>
LogMagnitude exp_inverse_defect_bound(const PolynomialOperator<S>& p, const S& w, long n, double r);

/// a_j = c_{j+m}, j = 0..d-m; a_0 != 0 by the operator invariants.
template <Scalar S>
std::vector<S> shifted_coeffs(const PolynomialOperator<S>& p);

/// Solves sum_{j=s}^{k} a_{j-s} b_j j!/s! = [s == k] for s = 0..k by back
/// substitution (b_k = 1/a_0 first). Entries of a beyond its length are 0.
/// The system matrix is upper triangular with determinant a_0^{k+1}.
template <Scalar S>
std::vector<S> solve_monic_system(const std::vector<S>& a, long k);

/// Cramer's rule on the same system, with determinants by cofactor
/// expansion. det(M_s), M_s the matrix with column s replaced by e_k, is a
/// polynomial in a_0 whose coefficients are phi[s][j], j = 0..k, so
/// b_s = a_0^{-(k+1)} sum_j phi[s][j] a_0^j.
template <Scalar S>
struct CramerSolution {
  std::vector<S> b;
  std::vector<std::vector<S>> phi;
  /// max over s, j of |phi[s][j]|.
  LogMagnitude c_constant;
};

/// Cross-check route; capped at k <= 8 because the expansion is factorial.
template <Scalar S>
CramerSolution<S> cramer_cross_check(const std::vector<S>& a, long k);

/// sum_{j=j_first}^{k} C / |a_0|^{k+1-j}. With j_first = 0 this bounds every
/// |b_s|; starting at j_first = 1 drops the a_0-free cofactor term and is not
/// a valid bound in general.
LogMagnitude cramer_coefficient_bound(const LogMagnitude& c_constant, const LogMagnitude& abs_a0, long k,
                                      long j_first = 0);

/// f_{n,k} = sum_s b_s z^{s+m} s!/(s+m)!. In exact mode the identity
/// P(D) f = z^k is verified and InvariantViolation thrown if it fails.
template <Scalar S>
RightInverse<S> build_f_nk(const PolynomialOperator<S>& p, long k);

/// Solves P(D) h = y with h supported in degrees [m, deg y + m]; by
/// linearity h = sum_k y_k f_{n,k}. Verified exactly in exact mode.
template <Scalar S>
TaylorPolynomial<S> inverse_for_polynomial(const PolynomialOperator<S>& p, const TaylorPolynomial<S>& y);

struct FnkDecayRow {
  long n = 0;
  LogMagnitude norm;
  /// ((k+1-j) log|c_{m,n}| + log m!)/m > log(2r) for all j in 1..k.
  bool threshold_pass = true;
};

struct FnkDecayReport {
  long k = 0;
  double r = 0.0;
  std::vector<FnkDecayRow> rows;
  /// Decay evidence: the growth rule applied to 1/||f_{n,k}||_r with
  /// threshold 0 (final norm below 1) and floor 1 (norms above 1 refute).
  Verdict verdict = Verdict::inconclusive;
};

template <Scalar S>
FnkDecayReport fnk_decay(const OperatorSequence& seq, long k, double r, long n_first, long n_last);

}  // namespace hyperdiff
