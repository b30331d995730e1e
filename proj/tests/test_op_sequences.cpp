#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "hyperdiff/evidence.hpp"
#include "hyperdiff/unicity.hpp"
#include "test_util.hpp"

using namespace hyperdiff;
using namespace hyperdiff::testing;
using C = std::complex<double>;

TEST_CASE("family coefficients") {
  CHECK(make_family("F1").operator_at<ExactComplex>(2) == op({"0", "0", "1/4", "1"}));
  CHECK(make_family("F4").operator_at<ExactComplex>(5) == op({"0", "0", "0", "0", "0", "1"}));
  CHECK(make_family("F3").operator_at<ExactComplex>(1) == op({"0", "-1", "1"}));
  CHECK(make_family("F2", {{"f2_coeff", "unit"}}).operator_at<ExactComplex>(4) ==
        op({"0", "0", "0", "0", "1", "1"}));
  CHECK(make_family("F4", {{"c", "3"}, {"b", "1/2"}, {"p", "2"}}).operator_at<ExactComplex>(2) ==
        op({"0", "0", "3/16"}));
  // F2 natural: c_n = n^{-n/log(n+1)}.
  const auto f2 = make_family("F2");
  CHECK(f2.coefficient_abs(5, 5).log() == doctest::Approx(-5 * std::log(5.0) / std::log(6.0)));
  CHECK_THROWS_AS(f2.operator_at<ExactComplex>(5), PreconditionError);
  CHECK(make_family("F2", {{"log_base", "2"}}).coefficient_abs(5, 5).log() ==
        doctest::Approx(-5 * std::log(5.0) / std::log2(6.0)));
}

TEST_CASE("family errors") {
  CHECK_THROWS_AS(make_family("F9"), ConfigError);
  CHECK_THROWS_AS(make_family("F1", {{"c", "2"}}), ConfigError);
  CHECK_THROWS_AS(make_family("F2", {{"log_base", "3"}}), ConfigError);
  CHECK_THROWS_AS(make_family("F4", {{"p", "5"}}), ConfigError);
  CHECK_THROWS_AS(make_family("F5"), ConfigError);
  CHECK_THROWS_AS(make_family("F1").valence(0), PreconditionError);
  const auto t = make_table_family({op({"0", "1"}), op({"0", "0", "1"})});
  CHECK(t.degree(2) == 2);
  CHECK_THROWS_AS(t.degree(3), PreconditionError);
}

TEST_CASE("property: family metadata matches coefficients") {
  for (const char* tag : {"F1", "F2", "F3", "F4"}) {
    const auto seq = make_family(tag);
    for (long n = 1; n <= 50; ++n) {
      const auto cs = seq.coefficients(n);
      CHECK(seq.valence(n) == cs.begin()->first);
      CHECK(seq.degree(n) == cs.rbegin()->first);
      std::vector<LogMagnitude> mags;
      for (const auto& [j, c] : cs) {
        CHECK(seq.coefficient_abs(n, j).log() == doctest::Approx(c.magnitude.log()).epsilon(1e-9));
        mags.push_back(c.magnitude);
      }
      CHECK(seq.coefficient_sum(n).log() == doctest::Approx(sum(mags).log()).epsilon(1e-9));
    }
  }
}

TEST_CASE("property: closed-form values agree with coefficient evaluation") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (const char* tag : {"F1", "F2", "F3", "F4"}) {
    const auto seq = make_family(tag);
    for (long n = 1; n <= 25; ++n) {
      const C z(u(rng), u(rng));
      const auto closed = seq.value_at(n, z).to_complex();
      ExtComplex acc;
      LogMagnitude scale;
      for (const auto& [j, c] : seq.coefficients(n)) {
        acc += ExtComplex::from_polar(c.magnitude, c.phase) * ext_pow(ExtComplex(z), j);
        scale += c.magnitude * LogMagnitude::from_value(std::pow(std::abs(z), j));
      }
      // The coefficient sum cancels heavily for F3; compare against its scale.
      CHECK(std::abs(closed - acc.to_complex()) <= 1e-12 * scale.value());
    }
  }
}

TEST_CASE("rational enumeration") {
  const char* first[] = {"1", "1/2", "2", "1/3", "1", "3", "1/4", "2/3", "3/2", "4"};
  for (long n = 1; n <= 10; ++n) CHECK(positive_rational(n) == q(first[n - 1]));
  // Deterministic and covering: every p/q with p + q <= 20 occurs.
  std::set<std::pair<long, long>> seen;
  for (long n = 1; n <= 190; ++n) {
    const auto r = positive_rational(n);
    CHECK(r == positive_rational(n));
    seen.insert({r.get_num().get_si(), r.get_den().get_si()});
  }
  for (long p = 1; p < 20; ++p)
    for (long d = 1; p + d <= 20; ++d) {
      mpq_class r(p, d);
      r.canonicalize();
      CHECK(seen.count({r.get_num().get_si(), r.get_den().get_si()}) == 1);
    }
}

TEST_CASE("growth rule") {
  const GrowthRule rule;
  std::vector<long> n;
  std::vector<LogMagnitude> up, down;
  for (long i = 1; i <= 40; ++i) {
    n.push_back(i);
    up.push_back(LogMagnitude::from_log(static_cast<double>(i)));
    down.push_back(LogMagnitude::from_log(-static_cast<double>(i)));
  }
  std::vector<long> w;
  CHECK(rule_verdict(n, up, up, 40, rule, &w) == Verdict::supports);
  CHECK(w.empty());
  CHECK(rule_verdict(n, up, up, 19, rule) == Verdict::inconclusive);  // final value too small
  CHECK(rule_verdict(n, down, down, 40, rule, &w) == Verdict::refutes);
  CHECK(w.size() == 20);
  CHECK(rule_verdict(n, up, up, 0, rule) == Verdict::inconclusive);
}

TEST_CASE("check_property_P") {
  const std::vector<C> neg{-2.0, -3.0, -5.0};
  const auto f3 = check_property_P(make_family("F3"), neg, 1, 40);
  CHECK(f3.verdict == Verdict::supports);
  // |P_n(-x)| > x^n pointwise.
  for (std::size_t s = 0; s < 3; ++s)
    for (std::size_t i = 0; i < f3.series[s].n.size(); ++i)
      CHECK(f3.series[s].value[i].log() > f3.series[s].n[i] * std::log(-neg[s].real()));

  std::vector<C> ring;
  for (int i = 0; i < 8; ++i) ring.push_back(std::polar(2.0, i * std::numbers::pi / 4));
  CHECK(check_property_P(make_family("F4"), ring, 1, 60).verdict == Verdict::supports);

  const auto f1 = check_property_P(make_family("F1"), {0.5}, 1, 60);
  CHECK(f1.verdict == Verdict::refutes);
  CHECK_FALSE(f1.series[0].witnesses.empty());
  CHECK_THROWS_AS(check_property_P(make_family("F1"), {}, 1, 5), PreconditionError);
}

TEST_CASE("check_property_Q") {
  auto rule = GrowthRule::coefficient();
  rule.threshold_log = 2.0;
  CHECK(check_property_Q(make_family("F2"), 3, 2, 200, rule).verdict == Verdict::supports);

  const auto f1 = check_property_Q(make_family("F1"), 2, 1, 60, rule);
  CHECK(f1.verdict == Verdict::refutes);
  // Growth statistic for k = 2 is n^{1-k} exactly.
  const auto& g = f1.series[2];
  CHECK(g.label == "growth k=2");
  for (std::size_t i = 0; i < g.n.size(); ++i)
    CHECK(std::abs(g.value[i].log() + std::log(static_cast<double>(g.n[i]))) < 1e-9);

  rule.threshold_log = 3.0;
  const auto f4 = check_property_Q(make_family("F4"), 4, 1, 60, rule);
  CHECK(f4.verdict == Verdict::supports);
  for (std::size_t i = 0; i < f4.series[0].n.size(); ++i)
    CHECK(f4.series[0].value[i].log() == doctest::Approx(std::log(static_cast<double>(f4.series[0].n[i]))));
}

TEST_CASE("circle_min") {
  for (long n : {1L, 5L, 12L}) {
    const auto cm = circle_min(XOp(std::map<long, Exact>{{n, Exact(1)}}), 2.0, 128);
    CHECK(cm.lower.log() == doctest::Approx(n * std::numbers::ln2));
  }
  CHECK(circle_min(op({"-1", "1"}), 1.0, 256).lower.is_zero());
  const auto cm = circle_min(op({"-2", "0", "1"}), 1.0, 1024);
  CHECK(std::abs(cm.lower.value() - 1.0) < 0.05);
  CHECK(cm.lower.value() <= 1.0);
  CHECK_THROWS_AS(circle_min(op({"-1", "1"}), 1.0, 32), PreconditionError);
}

TEST_CASE("property: circle_min lower bound below its samples and the true minimum") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 40; ++trial) {
    auto p = random_poly(rng, 4);
    p.set(4, Exact(1));
    const XOp P(p.coefficients());
    const double r = 0.5 + 0.25 * (trial % 8);
    const auto cm = circle_min(P, r, 128);
    CHECK(cm.lower <= cm.sampled_min);
    // Dense reference sampling never goes below the certified bound.
    const auto fine = circle_min(P, r, 8192);
    CHECK(cm.lower.value() <= fine.sampled_min.value() * (1 + 1e-12));
  }
}

TEST_CASE("check_property_R") {
  const auto f1 = check_property_R(make_family("F1"), 2.0, 1, 40, 1024);
  CHECK(f1.verdict == Verdict::supports);
  for (std::size_t i = 0; i < f1.series[0].n.size(); ++i) {
    const double n = static_cast<double>(f1.series[0].n[i]);
    const double exact_min = std::pow(2.0, n) * (2.0 - std::pow(n, -n));
    const double derivative = n * std::pow(2.0, n - 1) * std::pow(n, -n) + (n + 1) * std::pow(2.0, n);
    const double correction = std::numbers::pi * 2.0 / 1024 * derivative;
    CHECK(f1.series[0].value[i].value() <= exact_min * (1 + 1e-12));
    CHECK(f1.series[0].value[i].value() >= (exact_min - correction) * (1 - 1e-12));
  }
  CHECK(check_property_R(make_family("F2"), 1.0, 2, 100, 256).verdict == Verdict::refutes);
  const auto f4 = check_property_R(make_family("F4"), 1.0, 1, 60, 64);
  CHECK(f4.verdict == Verdict::inconclusive);
  for (const auto& v : f4.series[0].value) CHECK(v.log() == doctest::Approx(0.0));
}

TEST_CASE("F3 refutes (R) through near-root witnesses") {
  const auto seq = make_family("F3");
  for (double r : {1.0, 2.0, 3.0}) {
    const auto rep = check_property_R(seq, r, 1, 2000, 64);
    CHECK(rep.verdict == Verdict::refutes);
    for (long n : rep.series[0].witnesses) {
      CHECK(seq.value_at(n, r).abs().log() < -n * std::numbers::ln2);
      const double gap = r - positive_rational(n).get_d();
      CHECK(std::abs(gap) < 1.0 / (2.0 * r));
    }
  }
}

TEST_CASE("evidence CSV") {
  std::ostringstream os;
  write_evidence_csv(os, check_property_P(make_family("F1"), {0.5}, 1, 3));
  CHECK(os.str().find("n,statistic_log,verdict_running\n1,") != std::string::npos);
}

TEST_CASE("unicity exponent") {
  const auto s = unicity_exponent(builtin_point_set("sqrt"), 1e6);
  CHECK(std::abs(s.chi - 2.0) < 0.1);
  CHECK(s.unicity_supported);
  const auto l = unicity_exponent(builtin_point_set("linear"), 1e6);
  CHECK(std::abs(l.chi - 1.0) < 0.05);
  CHECK_FALSE(l.unicity_supported);
  const auto p = unicity_exponent(builtin_point_set("pow2"), 1e6);
  CHECK(p.chi < 0.25);
  for (std::size_t i = 1; i < s.counts.size(); ++i) CHECK(s.counts[i] >= s.counts[i - 1]);
  // Doubling r_max barely moves the estimate.
  CHECK(std::abs(unicity_exponent(builtin_point_set("sqrt"), 2e6).chi - s.chi) < 0.02);
  // Explicit lists agree with the generator.
  std::vector<double> pts;
  for (int n = 1; n <= 100000; ++n) pts.push_back(static_cast<double>(n));
  CHECK(unicity_exponent(pts, 1e5).chi == doctest::Approx(unicity_exponent(builtin_point_set("linear"), 1e5).chi));
  CHECK_THROWS_AS(unicity_exponent(std::vector<double>{1, 2, 3}, 100.0), PreconditionError);
  CHECK_THROWS_AS(builtin_point_set("cube"), ConfigError);
}

TEST_CASE("density demo") {
  std::vector<C> w;
  for (int k = 0; k < 12; ++k) w.push_back(-1.0 - k / 10.0);
  using CPoly = TaylorPolynomial<C>;
  const auto zero = density_demo(w, CPoly(), 1.0, 4);
  CHECK(zero.combo.is_zero());
  CHECK(zero.max_residual == 0.0);

  const auto z8 = density_demo(w, CPoly::monomial(1, 1.0), 1.0, 8);
  CHECK(z8.max_residual < 1.5e-3);
  CHECK(z8.max_residual > 1.2e-3);
  CHECK(z8.grid_points == 513);

  double prev = INFINITY;
  for (long m = 1; m <= 10; ++m) {
    const auto res = density_demo(w, CPoly::monomial(0, 1.0), 1.0, m);
    CHECK(res.l2_residual <= prev * (1 + 1e-9));
    prev = res.l2_residual;
  }
  CHECK_THROWS_AS(density_demo(w, CPoly::monomial(1, 1.0), 1.0, 12), PreconditionError);
  CHECK_THROWS_AS(density_demo(w, CPoly::monomial(1, 1.0), 1.0, 13), PreconditionError);
}
