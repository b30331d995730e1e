#pragma once

#include <array>
#include <complex>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hyperdiff/evidence.hpp"
#include "hyperdiff/lacunary.hpp"

namespace hyperdiff {

/// Right inverses used by the criterion: exponential (P) or polynomial (Q).
enum class Route { P, Q };

std::string to_string(Route r);
/// Accepts "P", "Q", "P-route", "Q-route".
Route parse_route(const std::string& s);

/// true iff the valence of P exceeds deg g. A true result is confirmed by
/// applying P(D) and checking for the exact zero polynomial.
template <Scalar S>
bool check_annihilation(const PolynomialOperator<S>& p, const TaylorPolynomial<S>& g);

struct CriterionConfig {
  long n_first = 1;
  long n_last = 20;
  /// Hypothesis (i) battery: one random rational polynomial of each degree
  /// 0..test_degree, drawn from `seed`.
  long test_degree = 5;
  unsigned long seed = 1;
  /// Q-route test set z^0..z^k_max.
  long k_max = 5;
  /// Radius for the (ii) and (iii) norms.
  double r = 2.0;
  /// P-route frequencies w.
  std::vector<std::complex<double>> samples;
  /// P-route truncation degree is d(n) + truncation_margin.
  long truncation_margin = 80;
  /// Tolerance for identities that hold only up to truncation or rounding.
  double tolerance = 1e-6;
  /// Hypothesis (iv): lacunary basis of this size, scanned from basis_start.
  long basis_size = 3;
  long basis_start = 1;
  long basis_cap = 100000;
  double basis_r = 1.0;
};

struct HypothesisRecord {
  long n = 0;
  std::string statistic;
  /// Largest value of the statistic over the test set at this n.
  LogMagnitude value;
  /// Companion bound where one applies (tail bound, decay bound).
  std::optional<LogMagnitude> bound;
  /// Whether the statistic was computed in exact arithmetic.
  bool exact = false;
  bool pass = false;
};

struct HypothesisReport {
  std::string id;  // "i" .. "iv"
  std::vector<HypothesisRecord> records;
  Verdict verdict = Verdict::inconclusive;
  /// (i): first n from which the whole battery is annihilated.
  std::optional<long> crossing;
  std::string note;
};

struct CriterionReport {
  Route route = Route::Q;
  std::string family;
  std::array<HypothesisReport, 4> hypotheses;
  /// supports only if all four support; refutes if any refutes.
  Verdict verdict = Verdict::inconclusive;
};

/// Evidence for the four hypotheses over [n_first, n_last]:
///   (i)   exact annihilation of the battery once m(n) > deg g;
///   (ii)  decay of ||S_n y||_r over the route's test set;
///   (iii) P_n(D) S_n y = y, exactly (Q) or up to truncation tails (P);
///   (iv)  decay_report on an auto-selected lacunary basis with
///         a_j = 1/(2^{m_j} m_j! |c_{m_j,n_j}|).
/// Throws PreconditionError when the route's inputs are missing or a finite
/// table cannot supply the lacunary basis; CapExhausted when an infinite
/// family runs past basis_cap.
CriterionReport verify_hypotheses(const OperatorSequence& seq, Route route, const CriterionConfig& config);

/// JSON-lines: one record per (hypothesis, n), then one summary line per
/// hypothesis and an overall line.
void write_criterion_jsonl(std::ostream& os, const CriterionReport& report);

}  // namespace hyperdiff
