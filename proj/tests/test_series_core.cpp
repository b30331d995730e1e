#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "hyperdiff/coeff_io.hpp"
#include "test_util.hpp"

using namespace hyperdiff;
using namespace hyperdiff::testing;

TEST_CASE("log magnitude arithmetic") {
  const auto a = LogMagnitude::from_value(3.0), b = LogMagnitude::from_value(5.0);
  CHECK((a + b).value() == doctest::Approx(8.0));
  CHECK((a * b).value() == doctest::Approx(15.0));
  CHECK((b / a).value() == doctest::Approx(5.0 / 3.0));
  CHECK(LogMagnitude::saturating_sub(b, a).value() == doctest::Approx(2.0));
  CHECK(LogMagnitude::saturating_sub(a, b).is_zero());
  CHECK((LogMagnitude::zero() + a) == a);
  CHECK((LogMagnitude::zero() * a).is_zero());
  CHECK(LogMagnitude::zero() < a);
  // 2^100000 and 100000! stay comparable.
  const auto big = LogMagnitude::from_log(100000 * std::numbers::ln2);
  const auto fact = LogMagnitude::from_log(log_factorial(100000));
  CHECK(big < fact);
  CHECK(certainly_less(a, b));
  CHECK_FALSE(certainly_less(a, a));
}

TEST_CASE("rational parsing") {
  CHECK(parse_rational("3/6") == mpq_class(1, 2));
  CHECK(parse_rational("-0.125") == mpq_class(-1, 8));
  CHECK(parse_rational("1e-3") == mpq_class(1, 1000));
  CHECK(parse_rational("2.5E2") == mpq_class(250));
  CHECK(parse_rational("+7") == mpq_class(7));
  CHECK_THROWS_AS(parse_rational("1/0"), ConfigError);
  CHECK_THROWS_AS(parse_rational("abc"), ConfigError);
  CHECK_THROWS_AS(parse_rational("1.2.3"), ConfigError);
  CHECK_THROWS_AS(parse_rational(""), ConfigError);
}

TEST_CASE("extended-range complex agrees with std::complex in range") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int i = 0; i < 200; ++i) {
    const std::complex<double> a(u(rng), u(rng)), b(u(rng), u(rng));
    const ExtComplex ea(a), eb(b);
    CHECK(std::abs((ea + eb).to_complex() - (a + b)) <= 1e-12 * (1 + std::abs(a + b)));
    CHECK(std::abs((ea * eb).to_complex() - (a * b)) <= 1e-12 * std::abs(a * b));
    CHECK(std::abs((ea / eb).to_complex() - (a / b)) <= 1e-12 * std::abs(a / b));
    CHECK(ea.abs().log() == doctest::Approx(std::log(std::abs(a))));
  }
  // Far outside double range.
  const ExtComplex tiny = ExtComplex::from_polar(LogMagnitude::from_log(-5000.0), {0.0, 1.0});
  CHECK((tiny * tiny).abs().log() == doctest::Approx(-10000.0));
  CHECK((tiny + tiny).abs().log() == doctest::Approx(-5000.0 + std::numbers::ln2));
  CHECK(ScalarTraits<ExtComplex>::mul_falling(ExtComplex(1.0), 5, 3).to_complex().real() ==
        doctest::Approx(60.0));
}

TEST_CASE("differentiate") {
  CHECK(differentiate(poly({"0", "0", "0", "1"}), 1) == poly({"0", "0", "3"}));
  for (long k = 0; k < 6; ++k)
    CHECK(differentiate(XPoly::monomial(k), k + 1).is_zero());
  // e^z truncated at degree 3, twice differentiated.
  CHECK(differentiate(poly({"1", "1", "1/2", "1/6"}), 2) == poly({"1", "1"}));
  CHECK_THROWS_AS(differentiate(poly({"1"}), -1), PreconditionError);
  // Floating mode with a falling factorial far outside double range.
  const auto f = TaylorPolynomial<ExtComplex>::monomial(400, ExtComplex(1.0));
  const auto d = differentiate(f, 400);
  CHECK(d[0].abs().log() == doctest::Approx(log_factorial(400)));
}

TEST_CASE("apply_operator") {
  CHECK(apply_operator(op({"0", "1"}), poly({"0", "0", "0", "0", "1"})) == poly({"0", "0", "0", "4"}));
  CHECK(apply_operator(op({"0", "0", "1"}), poly({"0", "1", "0", "1"})) == poly({"0", "6"}));
  // c3 D^3 + c4 D^4 on z^5 with c = 1.
  CHECK(apply_operator(op({"0", "0", "0", "1", "1"}), XPoly::monomial(5)) == poly({"0", "120", "60"}));
}

TEST_CASE("apply_to_exponential") {
  const Exact zero(0), two(2), minus_two(-2);
  CHECK(apply_to_exponential(op({"0", "0", "0", "1"}), zero) == Exact(0));
  CHECK(apply_to_exponential(op({"0", "0", "1"}), two) == Exact(4));
  // z^3 (z-1)^3 = z^6 - 3z^5 + 3z^4 - z^3
  CHECK(apply_to_exponential(op({"0", "0", "0", "-1", "3", "-3", "1"}), minus_two) == Exact(216));
}

TEST_CASE("majorant_norm") {
  CHECK(majorant_norm(XPoly::monomial(7), 1.0).value() == doctest::Approx(1.0));
  CHECK(majorant_norm(poly({"1", "1"}), 2.0).value() == doctest::Approx(3.0));
  std::vector<Exact> c;
  mpz_class fact = 1;
  for (int j = 0; j <= 10; ++j) {
    if (j) fact *= j;
    c.emplace_back(mpq_class(1, fact));
  }
  const double v = majorant_norm(XPoly(c), 1.0).value();
  CHECK(v <= std::numbers::e);
  CHECK(v >= std::numbers::e - 3e-7);
  CHECK(majorant_norm(XPoly(), 1.0).is_zero());
  CHECK_THROWS_AS(majorant_norm(poly({"1"}), 0.0), PreconditionError);
}

TEST_CASE("eval") {
  CHECK(eval(poly({"0", "0", "1"}), Exact(3)) == Exact(9));
  CHECK(eval(XPoly(), Exact(mpq_class(5), mpq_class(-2))) == Exact(0));
  CHECK(eval(poly({"1", "2", "1"}), Exact(1, 1)) == Exact(3, 4));
}

TEST_CASE("exp_truncate") {
  {
    auto [p, tail] = exp_truncate(Exact(0), 10, 1.0);
    CHECK(p == poly({"1"}));
    CHECK(tail.is_zero());
  }
  {
    auto [p, tail] = exp_truncate(Exact(1), 0, 1.0);
    CHECK(tail.value() >= std::numbers::e - 1);
  }
  {
    auto [p, tail] = exp_truncate(Exact(1), 20, 1.0);
    CHECK(tail.value() <= 1e-18);
    CHECK(p[20] == Exact(mpq_class(1, mpz_class("2432902008176640000"))));
  }
}

TEST_CASE("property: apply_operator is linear (exact)") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto f = random_poly(rng, 12), g = random_poly(rng, 9);
    const auto alpha = random_exact(rng), beta = random_exact(rng);
    auto coeffs = random_poly(rng, 6).coefficients();
    coeffs.back() = Exact(1);
    coeffs[2] = Exact(3, -1);
    const XOp p(coeffs);
    CHECK(apply_operator(p, alpha * f + beta * g) ==
          alpha * apply_operator(p, f) + beta * apply_operator(p, g));
  }
}

TEST_CASE("property: eigen consistency of truncated exponentials") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    auto coeffs = random_poly(rng, 5).coefficients();
    coeffs.back() = Exact(2);
    const XOp p(coeffs);
    const Exact w = random_exact(rng);
    const double r = 1.5;
    LogMagnitude previous;
    bool first = true;
    for (long n : {20L, 40L, 80L}) {
      auto [e, tail] = exp_truncate(w, n, r);
      const auto defect = apply_operator(p, e) - apply_to_exponential(p, w) * e;
      const auto bound = exponential_defect_bound(p, w, n, r);
      CHECK(majorant_norm(defect, r) <= bound);
      if (!first) CHECK(bound < previous);
      previous = bound;
      first = false;
    }
  }
}

TEST_CASE("property: majorant bounds point values, is monotone and subadditive") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const auto f = convert<std::complex<double>>(random_poly(rng, 15));
    const auto g = convert<std::complex<double>>(random_poly(rng, 8));
    const double r = 0.5 + 2.0 * u(rng);
    const auto m = majorant_norm(f, r);
    for (int i = 0; i < 100; ++i) {
      const auto z = std::polar(r * std::sqrt(u(rng)), 2 * std::numbers::pi * u(rng));
      CHECK(std::abs(eval(f, z)) <= m.value() * (1 + 1e-12));
    }
    CHECK(majorant_norm(f, r) <= majorant_norm(f, r * 1.1));
    CHECK(majorant_norm(f + g, r).value() <= (majorant_norm(f, r) + majorant_norm(g, r)).value() * (1 + 1e-12));
  }
}

TEST_CASE("property: coefficient files round-trip") {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 10; ++trial) {
    const auto f = random_poly(rng, 10);
    std::stringstream ss;
    write_taylor(ss, f, {"right_inverse n=3 k=1 route=polynomial"});
    CoeffFileHeader h;
    const auto back = read_taylor<ExactComplex>(ss, &h);
    CHECK(back == f);
    CHECK(back.truncation() == f.truncation());
    CHECK(h.fields.at("route") == "polynomial");

    std::uniform_real_distribution<double> u(-1e3, 1e3);
    std::vector<std::complex<double>> c;
    for (int i = 0; i < 8; ++i) c.emplace_back(u(rng) / 7.0, u(rng) * 1e-200);
    const TaylorPolynomial<std::complex<double>> fd(c);
    std::stringstream sd;
    write_taylor(sd, fd);
    CHECK(read_taylor<std::complex<double>>(sd) == fd);
  }
  std::stringstream op_file;
  write_operator(op_file, op({"0", "0", "1/4", "1"}));
  CHECK(op_file.str() == "#operator m=2 d=3\n2,1/4,0\n3,1,0\n");
  CHECK(read_operator<ExactComplex>(op_file) == op({"0", "0", "1/4", "1"}));
}

TEST_CASE("coefficient file errors") {
  std::stringstream bad1("0,1,0\n");
  CHECK_THROWS_AS(read_taylor<ExactComplex>(bad1), ConfigError);
  std::stringstream bad2("#operator m=1 d=3\n2,1,0\n3,1,0\n");
  CHECK_THROWS_AS(read_operator<ExactComplex>(bad2), ConfigError);
  std::stringstream bad3("#taylor N=2\n5,1,0\n");
  CHECK_THROWS_AS(read_taylor<ExactComplex>(bad3), ConfigError);
  std::stringstream decimal("#taylor N=1\n1,0.25,-1.5\n");
  CHECK(read_taylor<ExactComplex>(decimal)[1] == Exact(mpq_class(1, 4), mpq_class(-3, 2)));
}

TEST_CASE("operator invariants") {
  CHECK_THROWS_AS(op({"5"}), PreconditionError);
  CHECK_THROWS_AS(op({"0", "0"}), PreconditionError);
  const auto p = op({"0", "0", "-2", "0", "1"});
  CHECK(p.valence() == 2);
  CHECK(p.degree() == 4);
  CHECK(p.coefficient_sum().value() == doctest::Approx(3.0));
}
