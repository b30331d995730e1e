#include "hyperdiff/sequence.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

#include "hyperdiff/coeff_io.hpp"

namespace hyperdiff {

Coefficient Coefficient::from_exact(const ExactComplex& z) {
  Coefficient c;
  c.exact = z;
  c.magnitude = ScalarTraits<ExactComplex>::abs(z);
  const auto d = to_ext(z.re, z.im);
  c.phase = d.phase();
  return c;
}

Coefficient Coefficient::from_polar(LogMagnitude magnitude, std::complex<double> phase) {
  Coefficient c;
  c.magnitude = magnitude;
  c.phase = phase;
  return c;
}

mpq_class positive_rational(long n) {
  if (n < 1) throw PreconditionError("positive_rational: index starts at 1");
  // Block s = p + q holds s - 1 entries and starts after (s-2)(s-1)/2 of them.
  long s = static_cast<long>(std::floor((3.0 + std::sqrt(8.0 * static_cast<double>(n))) / 2.0));
  while (s > 2 && (s - 2) * (s - 1) / 2 >= n) --s;
  while ((s - 1) * s / 2 < n) ++s;
  const long t = n - (s - 2) * (s - 1) / 2 - 1;
  const long p = 1 + t;
  mpq_class q(p, s - p);
  q.canonicalize();
  return q;
}

ExtComplex ext_pow(const ExtComplex& z, long n) {
  if (n < 0) throw PreconditionError("ext_pow: negative exponent");
  ExtComplex result(1.0), base = z;
  while (n > 0) {
    if (n & 1) result *= base;
    n >>= 1;
    if (n) base *= base;
  }
  return result;
}

// ------------------------------------------------------------ generic fallbacks

LogMagnitude OperatorSequence::Family::coefficient_abs(long n, long j) const {
  const auto cs = coefficients(n);
  const auto it = cs.find(j);
  return it == cs.end() ? LogMagnitude::zero() : it->second.magnitude;
}

LogMagnitude OperatorSequence::Family::coefficient_sum(long n) const {
  std::vector<LogMagnitude> t;
  for (const auto& [j, c] : coefficients(n)) t.push_back(c.magnitude);
  return sum(t);
}

ExtComplex OperatorSequence::Family::value_at(long n, std::complex<double> z) const {
  const auto cs = coefficients(n);
  const ExtComplex ez(z);
  ExtComplex acc;
  long prev = cs.rbegin()->first;
  for (auto it = cs.rbegin(); it != cs.rend(); ++it) {
    acc *= ext_pow(ez, prev - it->first);
    acc += ExtComplex::from_polar(it->second.magnitude, it->second.phase);
    prev = it->first;
  }
  return acc * ext_pow(ez, prev);
}

LogMagnitude OperatorSequence::Family::derivative_majorant(long n, double r) const {
  std::vector<LogMagnitude> t;
  for (const auto& [j, c] : coefficients(n)) {
    if (j == 0) continue;
    t.push_back(c.magnitude * LogMagnitude::from_log(std::log(static_cast<double>(j)) +
                                                      static_cast<double>(j - 1) * std::log(r)));
  }
  return sum(t);
}

namespace {

double ln(long n) { return std::log(static_cast<double>(n)); }

LogMagnitude mag_log(double v) { return LogMagnitude::from_log(v); }

// F1: z^n/n^n + z^{n+1}.
class FamilyF1 final : public OperatorSequence::Family {
 public:
  std::string tag() const override { return "F1"; }
  long valence(long n) const override { return n; }
  long degree(long n) const override { return n + 1; }
  bool rational() const override { return true; }

  std::map<long, Coefficient> coefficients(long n) const override {
    mpz_class nn;
    mpz_ui_pow_ui(nn.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(n));
    return {{n, Coefficient::from_exact(ExactComplex(mpq_class(1, nn)))},
            {n + 1, Coefficient::from_exact(ExactComplex(1))}};
  }
  LogMagnitude coefficient_abs(long n, long j) const override {
    if (j == n) return mag_log(-static_cast<double>(n) * ln(n));
    if (j == n + 1) return LogMagnitude::one();
    return LogMagnitude::zero();
  }
  LogMagnitude coefficient_sum(long n) const override {
    return LogMagnitude::one() + coefficient_abs(n, n);
  }
  ExtComplex value_at(long n, std::complex<double> z) const override {
    const ExtComplex small = ExtComplex::from_polar(coefficient_abs(n, n), {1.0, 0.0});
    return ext_pow(ExtComplex(z), n) * (small + ExtComplex(z));
  }
  LogMagnitude derivative_majorant(long n, double r) const override {
    const double lr = std::log(r);
    const LogMagnitude a = mag_log(ln(n) + static_cast<double>(n - 1) * lr - static_cast<double>(n) * ln(n));
    const LogMagnitude b = mag_log(ln(n + 1) + static_cast<double>(n) * lr);
    return a + b;
  }
};

// F2: c_n z^n (1 + z).
class FamilyF2 final : public OperatorSequence::Family {
 public:
  FamilyF2(bool unit, double log_base) : unit_(unit), log_base_(log_base) {}

  std::string tag() const override { return "F2"; }
  long valence(long n) const override { return n; }
  long degree(long n) const override { return n + 1; }
  bool rational() const override { return unit_; }

  LogMagnitude c(long n) const {
    if (unit_ || n == 1) return LogMagnitude::one();
    return mag_log(-static_cast<double>(n) * ln(n) * log_base_ / ln(n + 1));
  }
  std::map<long, Coefficient> coefficients(long n) const override {
    const Coefficient k = unit_ ? Coefficient::from_exact(ExactComplex(1)) : Coefficient::from_polar(c(n));
    return {{n, k}, {n + 1, k}};
  }
  LogMagnitude coefficient_abs(long n, long j) const override {
    return (j == n || j == n + 1) ? c(n) : LogMagnitude::zero();
  }
  LogMagnitude coefficient_sum(long n) const override { return c(n) * mag_log(std::log(2.0)); }
  ExtComplex value_at(long n, std::complex<double> z) const override {
    return ExtComplex::from_polar(c(n), {1.0, 0.0}) * ext_pow(ExtComplex(z), n) *
           ExtComplex(1.0 + z);
  }
  LogMagnitude derivative_majorant(long n, double r) const override {
    const double lr = std::log(r);
    return c(n) * (mag_log(ln(n) + static_cast<double>(n - 1) * lr) +
                   mag_log(ln(n + 1) + static_cast<double>(n) * lr));
  }

 private:
  bool unit_;
  double log_base_;  // natural log of the base b in log_b(n+1)
};

// F3: z^n (z - q_n)^n.
class FamilyF3 final : public OperatorSequence::Family {
 public:
  std::string tag() const override { return "F3"; }
  long valence(long n) const override { return n; }
  long degree(long n) const override { return 2 * n; }
  bool rational() const override { return true; }

  std::map<long, Coefficient> coefficients(long n) const override {
    const mpq_class q = positive_rational(n);
    std::map<long, Coefficient> out;
    mpq_class neg_q_pow = 1;  // (-q)^{n-i}, built from i = n downward
    for (long i = n; i >= 0; --i) {
      mpz_class binom;
      mpz_bin_uiui(binom.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(i));
      out[n + i] = Coefficient::from_exact(ExactComplex(mpq_class(binom) * neg_q_pow));
      neg_q_pow *= -q;
    }
    return out;
  }
  LogMagnitude coefficient_abs(long n, long j) const override {
    const long i = j - n;
    if (i < 0 || i > n) return LogMagnitude::zero();
    const double lq = log_abs(positive_rational(n));
    return mag_log(log_factorial(n) - log_factorial(i) - log_factorial(n - i) +
                   static_cast<double>(n - i) * lq);
  }
  LogMagnitude coefficient_sum(long n) const override {
    return mag_log(static_cast<double>(n) * std::log1p(positive_rational(n).get_d()));
  }
  ExtComplex value_at(long n, std::complex<double> z) const override {
    const double q = positive_rational(n).get_d();
    return ext_pow(ExtComplex(z), n) * ext_pow(ExtComplex(z - q), n);
  }
  LogMagnitude derivative_majorant(long n, double r) const override {
    const double q = positive_rational(n).get_d();
    return mag_log(ln(n) + static_cast<double>(n - 1) * (std::log(r) + std::log(r + q)) +
                   std::log(2.0 * r + q));
  }
};

// F4: c * b^{n^p} z^n.
class FamilyF4 final : public OperatorSequence::Family {
 public:
  FamilyF4(mpq_class c, mpq_class b, int p) : c_(std::move(c)), b_(std::move(b)), p_(p) {}

  std::string tag() const override { return "F4"; }
  long valence(long n) const override { return n; }
  long degree(long n) const override { return n; }
  bool rational() const override { return true; }

  double exponent(long n) const { return std::pow(static_cast<double>(n), p_); }

  std::map<long, Coefficient> coefficients(long n) const override {
    const double e = exponent(n);
    if (e > 4.0e6) throw PreconditionError("F4: exact coefficient b^(n^p) too large at n=" + std::to_string(n));
    const auto ue = static_cast<unsigned long>(e);
    mpz_class num, den;
    mpz_pow_ui(num.get_mpz_t(), b_.get_num_mpz_t(), ue);
    mpz_pow_ui(den.get_mpz_t(), b_.get_den_mpz_t(), ue);
    mpq_class cn = c_ * mpq_class(num, den);
    cn.canonicalize();
    return {{n, Coefficient::from_exact(ExactComplex(cn))}};
  }
  LogMagnitude coefficient_abs(long n, long j) const override {
    if (j != n) return LogMagnitude::zero();
    return mag_log(log_abs(c_) + exponent(n) * log_abs(b_));
  }
  LogMagnitude coefficient_sum(long n) const override { return coefficient_abs(n, n); }
  double sign(long n) const {
    double s = sgn(c_) < 0 ? -1.0 : 1.0;
    if (sgn(b_) < 0 && static_cast<long long>(exponent(n)) % 2 == 1) s = -s;
    return s;
  }
  ExtComplex value_at(long n, std::complex<double> z) const override {
    return ExtComplex::from_polar(coefficient_abs(n, n), {sign(n), 0.0}) * ext_pow(ExtComplex(z), n);
  }
  LogMagnitude derivative_majorant(long n, double r) const override {
    return coefficient_abs(n, n) * mag_log(ln(n) + static_cast<double>(n - 1) * std::log(r));
  }

 private:
  mpq_class c_, b_;
  int p_;
};

// F5: explicit table.
class FamilyTable final : public OperatorSequence::Family {
 public:
  explicit FamilyTable(std::vector<PolynomialOperator<ExactComplex>> table) : table_(std::move(table)) {
    if (table_.empty()) throw ConfigError("F5: empty operator table");
  }

  std::string tag() const override { return "F5"; }
  long valence(long n) const override { return at(n).valence(); }
  long degree(long n) const override { return at(n).degree(); }
  bool rational() const override { return true; }
  bool closed_form() const override { return false; }
  std::optional<long> last_index() const override { return static_cast<long>(table_.size()); }

  std::map<long, Coefficient> coefficients(long n) const override {
    const auto& p = at(n);
    std::map<long, Coefficient> out;
    for (long j = p.valence(); j <= p.degree(); ++j)
      if (!p.coeff(j).is_zero()) out[j] = Coefficient::from_exact(p.coeff(j));
    return out;
  }

 private:
  const PolynomialOperator<ExactComplex>& at(long n) const {
    return table_.at(static_cast<std::size_t>(n - 1));
  }
  std::vector<PolynomialOperator<ExactComplex>> table_;
};

void reject_unknown(const std::string& tag, const std::map<std::string, std::string>& params,
                    const std::set<std::string>& allowed) {
  for (const auto& [k, v] : params)
    if (!allowed.count(k)) throw ConfigError("family " + tag + ": unknown parameter '" + k + "'");
}

std::string get(const std::map<std::string, std::string>& params, const std::string& key,
                const std::string& fallback) {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

}  // namespace

OperatorSequence make_family(const std::string& tag, const std::map<std::string, std::string>& params) {
  if (tag == "F1" || tag == "F3") {
    reject_unknown(tag, params, {});
    if (tag == "F1") return OperatorSequence(std::make_shared<FamilyF1>());
    return OperatorSequence(std::make_shared<FamilyF3>());
  }
  if (tag == "F2") {
    reject_unknown(tag, params, {"f2_coeff", "log_base"});
    const std::string mode = get(params, "f2_coeff", "natural");
    if (mode != "natural" && mode != "unit") throw ConfigError("F2: f2_coeff must be natural or unit");
    const std::string base = get(params, "log_base", "e");
    double lb = 1.0;
    if (base == "2") lb = std::numbers::ln2;
    else if (base == "10") lb = std::numbers::ln10;
    else if (base != "e") throw ConfigError("F2: log_base must be e, 2 or 10");
    return OperatorSequence(std::make_shared<FamilyF2>(mode == "unit", lb));
  }
  if (tag == "F4") {
    reject_unknown(tag, params, {"c", "b", "p"});
    const mpq_class c = parse_rational(get(params, "c", "1"));
    const mpq_class b = parse_rational(get(params, "b", "1"));
    const std::string ps = get(params, "p", "1");
    if (ps != "0" && ps != "1" && ps != "2") throw ConfigError("F4: p must be 0, 1 or 2");
    if (sgn(c) == 0 || sgn(b) == 0) throw ConfigError("F4: c and b must be nonzero");
    return OperatorSequence(std::make_shared<FamilyF4>(c, b, std::stoi(ps)));
  }
  if (tag == "F5") {
    reject_unknown(tag, params, {"table"});
    const auto it = params.find("table");
    if (it == params.end()) throw ConfigError("F5: missing table=<path>");
    std::ifstream in(it->second);
    if (!in) throw ConfigError("F5: cannot open table '" + it->second + "'");
    return make_table_family(read_operator_table(in));
  }
  throw ConfigError("unknown family tag '" + tag + "'");
}

OperatorSequence make_table_family(std::vector<PolynomialOperator<ExactComplex>> table) {
  return OperatorSequence(std::make_shared<FamilyTable>(std::move(table)));
}

}  // namespace hyperdiff
