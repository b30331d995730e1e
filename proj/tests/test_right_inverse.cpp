#include <doctest.h>

#include <cmath>

#include "hyperdiff/right_inverse.hpp"
#include "test_util.hpp"

using namespace hyperdiff;
using namespace hyperdiff::testing;

namespace {

std::vector<Exact> ex(std::initializer_list<const char*> v) {
  std::vector<Exact> out;
  for (const char* s : v) out.emplace_back(parse_rational(s));
  return out;
}

XOp random_operator(std::mt19937_64& rng, long max_valence, long max_extra) {
  std::uniform_int_distribution<long> val(0, max_valence), extra(0, max_extra);
  const long m = val(rng), d = std::max(m + extra(rng), 1L);
  std::map<long, Exact> c;
  for (long j = m; j <= d; ++j) c[j] = random_exact(rng);
  c[m] = Exact(random_rational(rng, true), random_rational(rng));
  c[d] = Exact(random_rational(rng, true));
  return XOp(c);
}

}  // namespace

TEST_CASE("exp_inverse") {
  CHECK(exp_inverse(op({"0", "0", "1"}), Exact(0)).is_zero());
  const auto c = exp_inverse(op({"0", "0", "1"}), Exact(2));
  REQUIRE(c.terms.size() == 1);
  CHECK(c.terms[0].weight == Exact(mpq_class(1, 4)));
  CHECK(c.terms[0].frequency == Exact(2));
  // F3 at n = 2 has q_2 = 1/2: P(-2) = 4 * (5/2)^2 = 25.
  const auto f3 = exp_inverse(make_family("F3").operator_at<ExactComplex>(2), Exact(-2));
  CHECK(f3.terms[0].weight == Exact(mpq_class(1, 25)));
}

TEST_CASE("property: exponential right-inverse identity up to truncation tails") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = random_operator(rng, 3, 3);
    const Exact w = random_exact(rng);
    for (long n : {40L, 80L}) {
      const double r = 1.0;
      const auto inv = exp_inverse(p, w);
      if (inv.is_zero()) continue;
      const auto [e, tail] = exp_truncate(w, n, r);
      const auto defect = apply_operator(p, inv.terms[0].weight * e) - e;
      CHECK(majorant_norm(defect, r) <= exp_inverse_defect_bound(p, w, n, r));
    }
  }
}

TEST_CASE("shifted_coeffs") {
  CHECK(shifted_coeffs(XOp(std::map<long, Exact>{{5, Exact(1)}})) == ex({"1"}));
  CHECK(shifted_coeffs(make_family("F1").operator_at<ExactComplex>(3)) == ex({"1/27", "1"}));
  const auto f3 = make_family("F3").operator_at<ExactComplex>(1);
  CHECK(f3.valence() == 1);
  CHECK(shifted_coeffs(f3) == ex({"-1", "1"}));
}

TEST_CASE("solve_monic_system") {
  CHECK(solve_monic_system(ex({"1"}), 3) == ex({"0", "0", "0", "1"}));
  CHECK(solve_monic_system(ex({"1", "1"}), 1) == ex({"-1", "1"}));
  CHECK(solve_monic_system(ex({"2"}), 0) == ex({"1/2"}));
  CHECK_THROWS_AS(solve_monic_system(ex({"0", "1"}), 1), PreconditionError);
  CHECK_THROWS_AS(solve_monic_system(ex({"1"}), -1), PreconditionError);
}

TEST_CASE("cramer_cross_check") {
  CHECK(cramer_cross_check(ex({"1", "1"}), 1).b == ex({"-1", "1"}));
  CHECK(cramer_cross_check(ex({"1"}), 2).b == ex({"0", "0", "1"}));
  CHECK(cramer_cross_check(ex({"1", "0", "1"}), 2).b == solve_monic_system(ex({"1", "0", "1"}), 2));
  CHECK_THROWS_AS(cramer_cross_check(ex({"1"}), 9), PreconditionError);
  CHECK(cramer_cross_check(ex({"3", "1"}), 8).b == solve_monic_system(ex({"3", "1"}), 8));
}

TEST_CASE("property: back substitution equals Cramer's rule") {
  std::mt19937_64 rng(43);
  std::uniform_int_distribution<long> kd(0, 6), len(1, 8);
  for (int trial = 0; trial < 200; ++trial) {
    const long k = kd(rng);
    std::vector<Exact> a;
    for (long i = len(rng); i > 0; --i) a.push_back(random_exact(rng));
    a[0] = Exact(random_rational(rng, true), random_rational(rng));
    const auto back = solve_monic_system(a, k);
    const auto cr = cramer_cross_check(a, k);
    CHECK(back == cr.b);
    // |b_s| <= sum_{j=0}^{k} C / |a_0|^{k+1-j}.
    const auto bound = cramer_coefficient_bound(cr.c_constant, ScalarTraits<ExactComplex>::abs(a[0]), k);
    for (const auto& bs : back) CHECK_FALSE(certainly_less(bound, ScalarTraits<ExactComplex>::abs(bs), 1e-9));
    // det(M_s) has degree <= k in a_0, and the system determinant is a_0^{k+1}.
    for (const auto& phi : cr.phi) CHECK(static_cast<long>(phi.size()) == k + 1);
  }
}

TEST_CASE("the cofactor bound needs the a_0-free term") {
  // a = (1/10, 1), k = 1: b_0 = -1/a_0^2 = -100.
  const auto a = ex({"1/10", "1"});
  const auto cr = cramer_cross_check(a, 1);
  CHECK(cr.b == ex({"-100", "10"}));
  CHECK(cr.phi[0][0] == Exact(-1));
  CHECK(cr.c_constant.value() == doctest::Approx(1.0));
  const auto a0 = ScalarTraits<ExactComplex>::abs(a[0]);
  CHECK(cramer_coefficient_bound(cr.c_constant, a0, 1).value() == doctest::Approx(110.0));
  CHECK(cramer_coefficient_bound(cr.c_constant, a0, 1, 1).value() == doctest::Approx(10.0));
  CHECK(certainly_less(cramer_coefficient_bound(cr.c_constant, a0, 1, 1), ScalarTraits<ExactComplex>::abs(cr.b[0])));
}

TEST_CASE("property: triangularity") {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 50; ++trial) {
    const long k = 5;
    std::vector<Exact> a;
    for (int i = 0; i <= k; ++i) a.push_back(random_exact(rng));
    a[0] = Exact(random_rational(rng, true));
    const auto b = solve_monic_system(a, k);
    for (long s = 0; s <= k; ++s) {
      auto perturbed = a;
      for (long j = k - s + 1; j <= k; ++j) perturbed[static_cast<std::size_t>(j)] += Exact(7);
      CHECK(solve_monic_system(perturbed, k)[static_cast<std::size_t>(s)] == b[static_cast<std::size_t>(s)]);
    }
  }
}

TEST_CASE("build_f_nk") {
  for (long m : {1L, 3L, 6L}) {
    const XOp p(std::map<long, Exact>{{m, Exact(1)}});
    const auto inv = build_f_nk(p, 0);
    CHECK(inv.f == XPoly::monomial(m, Exact(mpq_class(1, falling_factorial(m, m)))));
    CHECK(differentiate(inv.f, m) == poly({"1"}));
  }
  const auto f1_shape = build_f_nk(op({"0", "0", "0", "1", "1"}), 1);
  CHECK(apply_operator(op({"0", "0", "0", "1", "1"}), f1_shape.f) == XPoly::monomial(1));
  CHECK(f1_shape.f.degree() == 4);
  const auto scaled = build_f_nk(op({"0", "0", "0", "0", "0", "2"}), 0);
  CHECK(scaled.f == XPoly::monomial(5, Exact(mpq_class(1, 240))));
  CHECK(scaled.header() == "right_inverse n=0 k=0 route=polynomial");
}

TEST_CASE("property: exact right-inverse identity") {
  std::mt19937_64 rng(53);
  std::uniform_int_distribution<long> kd(0, 6);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = random_operator(rng, 12, 4);
    const long k = kd(rng);
    const auto inv = build_f_nk(p, k);
    CHECK(apply_operator(p, inv.f) == XPoly::monomial(k));
    CHECK(inv.f.degree() <= k + p.valence());
    for (long i = 0; i < p.valence(); ++i) CHECK(inv.f[i] == Exact(0));
  }
}

TEST_CASE("inverse_for_polynomial") {
  const XOp zm(std::map<long, Exact>{{4, Exact(1)}});
  CHECK(inverse_for_polynomial(zm, XPoly()).is_zero());
  CHECK(inverse_for_polynomial(zm, poly({"1", "1"})) == poly({"0", "0", "0", "0", "1/24", "1/120"}));
  std::mt19937_64 rng(59);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = random_operator(rng, 6, 3);
    const auto y = random_poly(rng, 5);
    const auto h = inverse_for_polynomial(p, y);
    CHECK(apply_operator(p, h) == y);
    XPoly by_terms;
    for (long k = 0; k <= 5; ++k) by_terms += y[k] * build_f_nk(p, k).f;
    CHECK(h == by_terms);
    CHECK(inverse_for_polynomial(p, XPoly::monomial(3)) == build_f_nk(p, 3).f);
  }
}

TEST_CASE("floating-mode right inverse matches exact") {
  const auto p = make_family("F1").operator_at<ExactComplex>(6);
  const auto exact = build_f_nk(p, 3);
  const auto approx = build_f_nk(make_family("F1").operator_at<ExtComplex>(6), 3);
  for (long i = 0; i <= exact.f.truncation(); ++i) {
    const auto e = ScalarTraits<ExactComplex>::to_complex(exact.f[i]);
    CHECK(std::abs(approx.f[i].to_complex() - e) <= 1e-12 * std::abs(e) + 1e-300);
  }
}

TEST_CASE("fnk_decay") {
  const auto seq = make_family("F4");
  const auto rep = fnk_decay<ExactComplex>(seq, 0, 2.0, 1, 40);
  for (const auto& row : rep.rows) {
    CHECK(row.norm.log() == doctest::Approx(row.n * std::log(2.0) - log_factorial(row.n)));
    CHECK(row.threshold_pass);
  }
  CHECK(rep.rows[5].norm < rep.rows[4].norm);
  CHECK(rep.verdict == Verdict::supports);

  const auto f2 = fnk_decay<ExtComplex>(make_family("F2"), 1, 2.0, 2, 200);
  long crossing = 0;
  for (const auto& row : f2.rows)
    if (row.threshold_pass && crossing == 0) crossing = row.n;
  CHECK(crossing > 0);
  for (const auto& row : f2.rows) {
    if (row.n >= crossing) CHECK(row.threshold_pass);
    CHECK(row.norm >= LogMagnitude::zero());
  }
  CHECK(f2.rows.back().norm < f2.rows[static_cast<std::size_t>(crossing)].norm);
  CHECK(f2.verdict == Verdict::supports);
  CHECK_THROWS_AS(fnk_decay<ExactComplex>(seq, 0, 1.0, 1, 5), PreconditionError);
}
