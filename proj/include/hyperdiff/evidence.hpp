#pragma once

#include <complex>
#include <functional>
#include <iosfwd>
#include <numbers>
#include <string>
#include <vector>

#include "hyperdiff/sequence.hpp"

namespace hyperdiff {

/// Finite evidence never decides a limit, so every verdict is three-valued.
enum class Verdict { supports, refutes, inconclusive };

std::string to_string(Verdict v);

/// Decision rules applied to a per-n statistic.
///
/// supports: split the last half of the range into `blocks` consecutive
/// blocks; the block minima must increase strictly and the final value must
/// exceed e^{threshold_log}. Block minima rather than raw monotonicity keep
/// sequences with an oscillating secondary parameter (such as an enumerated
/// rational) from failing on noise that does not affect growth.
///
/// refutes: at least `min_witnesses` indices n in the last half have a
/// statistic below e^{floor_log - floor_slope * n}.
///
/// When both rules fire the verdict is inconclusive.
struct GrowthRule {
  double threshold_log = 20.0;
  int blocks = 4;
  double floor_log = 0.0;
  double floor_slope = std::numbers::ln2;
  int min_witnesses = 3;

  /// Floor for pointwise values: decay faster than 2^{-n}.
  static GrowthRule pointwise() { return {}; }
  /// Floor for the (Q) growth statistic: values below 1.
  static GrowthRule coefficient() {
    GrowthRule r;
    r.floor_slope = 0.0;
    return r;
  }
};

/// One statistic tracked over the n-range.
struct StatisticSeries {
  std::string label;
  std::vector<long> n;
  /// Statistic tested by the growth rule.
  std::vector<LogMagnitude> value;
  /// Statistic tested by the floor rule (an upper bound where `value` is a
  /// lower bound; otherwise identical).
  std::vector<LogMagnitude> refute_value;
  Verdict verdict = Verdict::inconclusive;
  /// Verdict using only the data up to and including each n.
  std::vector<Verdict> running;
  /// Indices below the floor.
  std::vector<long> witnesses;
};

struct EvidenceReport {
  char property = 'P';
  long n_first = 0;
  long n_last = 0;
  std::vector<StatisticSeries> series;
  Verdict verdict = Verdict::inconclusive;
  std::string note;
};

/// Applies the rule to a complete series, filling verdict, running verdicts
/// and witnesses.
void evaluate_series(StatisticSeries& s, const GrowthRule& rule);

/// Verdict of the rule on value[0..count) alone.
Verdict rule_verdict(const std::vector<long>& n, const std::vector<LogMagnitude>& value,
                     const std::vector<LogMagnitude>& refute_value, std::size_t count,
                     const GrowthRule& rule, std::vector<long>* witnesses = nullptr);

/// (P): |P_n(z)| for each sample z. Supports when every sample supports,
/// refutes when some sample refutes.
EvidenceReport check_property_P(const OperatorSequence& seq, const std::vector<std::complex<double>>& samples,
                                long n_first, long n_last, const GrowthRule& rule = GrowthRule::pointwise());

/// (Q): for each k <= k_max the growth statistic m(n)|c_{m(n),n}|^{k/m(n)}
/// and the boundedness statistic |c_{k+m(n),n}|. Supports when every growth
/// series supports and every boundedness series stays at or below
/// e^{bound_cap_log}; refutes when some growth series refutes.
EvidenceReport check_property_Q(const OperatorSequence& seq, long k_max, long n_first, long n_last,
                                const GrowthRule& rule = GrowthRule::coefficient(),
                                double bound_cap_log = 20.0);

/// Result of sampling |P| on the circle |z| = r at M equally spaced angles,
/// starting at z = r.
struct CircleMin {
  /// Certified: max(0, sampled_min - (pi r / M) * B), B a bound on |P'|.
  LogMagnitude lower;
  /// Minimum over the samples; an upper bound for the true minimum.
  LogMagnitude sampled_min;
  /// |P(r)|.
  LogMagnitude at_r;
};

/// Circle minimum of an explicit operator. Single-term polynomials have
/// constant modulus on the circle and return it exactly.
template <Scalar S>
CircleMin circle_min(const PolynomialOperator<S>& p, double r, long samples);

/// Circle minimum of P_n using the family's closed forms.
CircleMin circle_min(const OperatorSequence& seq, long n, double r, long samples);

/// (R): certified lower bounds of min |P_n| on |z| = r drive "supports";
/// sampled minima (upper bounds) drive "refutes".
EvidenceReport check_property_R(const OperatorSequence& seq, double r, long n_first, long n_last,
                                long samples, const GrowthRule& rule = GrowthRule::pointwise());

/// CSV `n,statistic_log,verdict_running`, one block per series, each block
/// preceded by a `#series` comment line with its verdict and witnesses.
void write_evidence_csv(std::ostream& os, const EvidenceReport& report);

}  // namespace hyperdiff
