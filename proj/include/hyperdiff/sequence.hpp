#pragma once

#include <complex>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hyperdiff/operator.hpp"

namespace hyperdiff {

/// One operator coefficient, kept exactly when it is rational and always
/// available as magnitude and phase.
struct Coefficient {
  std::optional<ExactComplex> exact;
  LogMagnitude magnitude;
  std::complex<double> phase{1.0, 0.0};

  static Coefficient from_exact(const ExactComplex& z);
  static Coefficient from_polar(LogMagnitude magnitude, std::complex<double> phase = {1.0, 0.0});

  /// Converts to the coefficient field; throws PreconditionError when an
  /// exact value is requested for an irrational coefficient.
  template <Scalar S>
  S as() const {
    if constexpr (std::is_same_v<S, ExactComplex>) {
      if (!exact) throw PreconditionError("coefficient is not rational; use floating mode");
      return *exact;
    } else if (exact) {
      return ScalarTraits<S>::from_rational(exact->re, exact->im);
    } else {
      return ScalarTraits<S>::from_ext(ExtComplex::from_polar(magnitude, phase));
    }
  }
};

/// The n-th positive rational in the diagonal enumeration: p/q with p, q >= 1
/// in increasing p + q, ties by p, duplicates kept. n starts at 1, so the
/// sequence begins 1/1, 1/2, 2/1, 1/3, 2/2, 3/1, ...
mpq_class positive_rational(long n);

/// z^n in extended range.
ExtComplex ext_pow(const ExtComplex& z, long n);

/// A sequence n -> P_n of nonconstant polynomials, n >= 1.
///
/// Families override the closed forms they know; everything else falls back
/// to the explicit coefficients.
class OperatorSequence {
 public:
  class Family {
   public:
    virtual ~Family() = default;
    virtual std::string tag() const = 0;
    virtual long valence(long n) const = 0;
    virtual long degree(long n) const = 0;
    virtual std::map<long, Coefficient> coefficients(long n) const = 0;
    virtual bool rational() const = 0;
    virtual std::optional<long> last_index() const { return std::nullopt; }
    /// Whether valence/degree are closed-form metadata rather than detected.
    virtual bool closed_form() const { return true; }

    virtual LogMagnitude coefficient_abs(long n, long j) const;
    virtual LogMagnitude coefficient_sum(long n) const;
    virtual ExtComplex value_at(long n, std::complex<double> z) const;
    /// Sum_j j |c_j| r^{j-1}: a bound for |P_n'| on |z| = r.
    virtual LogMagnitude derivative_majorant(long n, double r) const;
  };

  explicit OperatorSequence(std::shared_ptr<const Family> family) : family_(std::move(family)) {}

  std::string tag() const { return family_->tag(); }
  long valence(long n) const { check(n); return family_->valence(n); }
  long degree(long n) const { check(n); return family_->degree(n); }
  bool rational() const { return family_->rational(); }
  bool closed_form() const { return family_->closed_form(); }
  std::optional<long> last_index() const { return family_->last_index(); }
  bool has_index(long n) const { return n >= 1 && (!last_index() || n <= *last_index()); }

  std::map<long, Coefficient> coefficients(long n) const { check(n); return family_->coefficients(n); }
  /// |c_{j,n}|; zero outside [m(n), d(n)].
  LogMagnitude coefficient_abs(long n, long j) const { check(n); return family_->coefficient_abs(n, j); }
  /// A_n = sum_j |c_{j,n}|.
  LogMagnitude coefficient_sum(long n) const { check(n); return family_->coefficient_sum(n); }
  ExtComplex value_at(long n, std::complex<double> z) const { check(n); return family_->value_at(n, z); }
  LogMagnitude derivative_majorant(long n, double r) const { check(n); return family_->derivative_majorant(n, r); }

  template <Scalar S>
  PolynomialOperator<S> operator_at(long n) const {
    std::map<long, S> sparse;
    for (const auto& [j, c] : coefficients(n)) sparse[j] = c.template as<S>();
    return PolynomialOperator<S>(sparse);
  }

 private:
  void check(long n) const {
    if (!has_index(n)) throw PreconditionError("operator sequence " + tag() + ": index " +
                                               std::to_string(n) + " out of range");
  }

  std::shared_ptr<const Family> family_;
};

/// Family parameters as key=value strings:
///   F1  P_n = z^n/n^n + z^{n+1}
///   F2  P_n = c_n z^n (1+z), c_n = n^{-n/log_b(n+1)}
///       f2_coeff=natural|unit (unit: c_n = 1), log_base=e|2|10
///   F3  P_n = z^n (z - q_n)^n, q_n = positive_rational(n)
///   F4  P_n = c_n z^n, c_n = c * b^{n^p}; c=<rational> b=<rational> p=0|1|2
///   F5  explicit table: table=<path>, or pass operators directly
OperatorSequence make_family(const std::string& tag, const std::map<std::string, std::string>& params = {});

/// F5 from an explicit list; element i is P_{i+1}.
OperatorSequence make_table_family(std::vector<PolynomialOperator<ExactComplex>> table);

}  // namespace hyperdiff
