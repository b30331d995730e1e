#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hyperdiff/sequence.hpp"

namespace hyperdiff {

/// Polynomials with Gaussian-rational coefficients in a fixed order.
///
/// rational-diagonal: by height H = deg g + sum_i h(a_i), where a rational
/// p/q in lowest terms has h = |p| + q - 1 (so h(0) = 0) and a Gaussian
/// rational x + iy has h(x) + h(y). The zero polynomial has height 0 and
/// comes first. Within a height, higher degrees come first, then
/// coefficients in lexicographic order from a_0 of their enumeration index.
/// Every height class is finite, so every polynomial appears.
///
/// With zero_recurrent the even positions (1-based) are 0 and the odd
/// positions run through the enumeration.
std::vector<TaylorPolynomial<ExactComplex>> enumerate_targets(const std::string& scheme, long count,
                                                              bool zero_recurrent = false,
                                                              const std::vector<TaylorPolynomial<ExactComplex>>& user = {});

/// Height used by the rational-diagonal scheme.
long target_height(const TaylorPolynomial<ExactComplex>& g);

struct SynthesisOptions {
  /// r_k for step k = 1..K; empty means r_k = k.
  std::vector<double> radii;
  /// eps_k = eps_ratio^k.
  double eps_ratio = 0.5;
  /// The scan for n_k covers at most n_cap candidates per step.
  long n_cap = 100000;
  long n_start = 1;

  double radius(long k) const;
  double eps(long k) const;
};

template <Scalar S>
struct SynthesisStep {
  long k = 0;  // 1-based
  long n = 0;
  long valence = 0;
  TaylorPolynomial<S> target;
  double radius = 0.0;
  double eps = 0.0;
  TaylorPolynomial<S> correction;
  LogMagnitude correction_norm;
  /// ||P_{n_i}(D) h_k||_{r_i} for i < k.
  std::vector<LogMagnitude> cross;
};

/// One hypercyclic-vector construction: steps, the accumulated x_K and the
/// independently recomputed residuals ||P_{n_i}(D) x_K - y_i||_{r_i}.
template <Scalar S>
struct SynthesisTrace {
  OperatorSequence seq;
  std::vector<SynthesisStep<S>> steps;
  TaylorPolynomial<S> x;
  std::vector<LogMagnitude> residuals;

  std::size_t size() const { return steps.size(); }
};

/// Greedy construction: step k takes the least n > n_{k-1} with
///   (a) m(n) > deg h_i for all i < k,
///   (b) h_k = inverse_for_polynomial(P_n, y_k) has ||h_k||_{r_k} < eps_k,
///   (c) ||P_{n_i}(D) h_k||_{r_i} < eps_k for all i < k.
/// Throws CapExhausted naming the condition that failed last.
template <Scalar S>
SynthesisTrace<S> synthesize(const OperatorSequence& seq, const std::vector<TaylorPolynomial<S>>& targets, long K,
                             const SynthesisOptions& opt = {});

/// Several traces on one shared schedule (n_k): at step k track t aims at
/// targets[t][k-1], and (a)-(c) must hold for every track. Tracks whose
/// target is 0 at a step receive the zero correction there, so tracks with
/// disjoint nonzero steps have disjoint supports.
template <Scalar S>
std::vector<SynthesisTrace<S>> synthesize_tracks(const OperatorSequence& seq,
                                                 const std::vector<std::vector<TaylorPolynomial<S>>>& targets,
                                                 long K, const SynthesisOptions& opt = {});

/// ||P_{n_i}(D) x - y_i||_{r_i} for every step, recomputed from scratch.
template <Scalar S>
std::vector<LogMagnitude> recompute_residuals(const SynthesisTrace<S>& trace, const TaylorPolynomial<S>& x);

template <Scalar S>
struct PerturbationRow {
  long k = 0;
  long n = 0;
  bool annihilated = false;  // m(n_k) > deg g
  LogMagnitude before;
  LogMagnitude after;
  /// P_{n_k}(D)(x + g) and P_{n_k}(D) x are the same polynomial.
  bool identical = false;
};

template <Scalar S>
struct PerturbationReport {
  std::vector<PerturbationRow<S>> rows;
  /// Whether any step annihilates g.
  bool any_annihilated = false;
};

template <Scalar S>
PerturbationReport<S> perturb(const SynthesisTrace<S>& trace, const TaylorPolynomial<S>& g);

/// One witnessed approximation of a target by a combination of traces.
struct CombinationRow {
  std::vector<ExactComplex> coeffs;
  TaylorPolynomial<ExactComplex> target;
  long k = 0;
  long n = 0;
  double radius = 0.0;
  /// ||P_{n_k}(D) sum_j c_j x_j - y||_{r_k} computed directly.
  LogMagnitude measured;
  /// sum_j |c_j| residual_j(k).
  LogMagnitude bound;
  /// The stated tolerance for this row.
  LogMagnitude tolerance;
  bool pass = false;
};

struct AugmentReport {
  SynthesisTrace<ExactComplex> base;
  SynthesisTrace<ExactComplex> v;
  std::vector<CombinationRow> rows;
};

/// Base x_0 with zero-recurrent targets and a second trace v on the same
/// schedule: at odd steps x_0 aims at the enumeration and v at 0; at even
/// step 2t, x_0 aims at 0 and v at extra_targets[t-1] (0 once the extra
/// targets run out). For each lambda and each extra target y the row at its
/// even step reports ||P_n(D)(v + lambda x_0) - y||_r against
/// residual_v + |lambda| residual_x0 and the tolerance 2^{-k+2}.
AugmentReport augment(const OperatorSequence& seq, long K,
                      const std::vector<TaylorPolynomial<ExactComplex>>& extra_targets,
                      const std::vector<ExactComplex>& lambdas, const SynthesisOptions& opt = {});

struct JointReport {
  std::vector<SynthesisTrace<ExactComplex>> traces;
  std::vector<CombinationRow> rows;
};

/// J traces on one schedule. Each (combination c, target y) pair gets its
/// own step: the track j* with the first nonzero c_j aims at y / c_{j*}, the
/// others at 0. The remaining steps up to K aim every track at 0. The row's
/// tolerance is sum_j |c_j| 2^{-k+1}.
JointReport joint_family(const OperatorSequence& seq, long J, long K,
                         const std::vector<TaylorPolynomial<ExactComplex>>& targets,
                         const std::vector<std::vector<ExactComplex>>& combos, const SynthesisOptions& opt = {});

/// JSON-lines, one record per step with exact rational or decimal scalars.
template <Scalar S>
void write_trace_jsonl(std::ostream& os, const SynthesisTrace<S>& trace);
template <Scalar S>
void write_perturbation_jsonl(std::ostream& os, const PerturbationReport<S>& rep);
void write_combination_jsonl(std::ostream& os, const std::vector<CombinationRow>& rows);

}  // namespace hyperdiff
