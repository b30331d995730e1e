#pragma once

#include <initializer_list>
#include <random>
#include <string>
#include <vector>

#include "hyperdiff/operator.hpp"

namespace hyperdiff::testing {

using Exact = ExactComplex;
using XPoly = TaylorPolynomial<ExactComplex>;
using XOp = PolynomialOperator<ExactComplex>;

inline mpq_class q(const char* s) { return parse_rational(s); }

/// Exact real polynomial from rational literals a_0, a_1, ...
inline XPoly poly(std::initializer_list<const char*> coeffs) {
  std::vector<Exact> c;
  for (const char* s : coeffs) c.emplace_back(parse_rational(s));
  return XPoly(std::move(c));
}

inline XOp op(std::initializer_list<const char*> coeffs) {
  std::vector<Exact> c;
  for (const char* s : coeffs) c.emplace_back(parse_rational(s));
  return XOp(c);
}

/// Random small rational p/q with |p| <= 9, 1 <= q <= 9.
inline mpq_class random_rational(std::mt19937_64& rng, bool nonzero = false) {
  std::uniform_int_distribution<int> num(-9, 9), den(1, 9);
  int p = num(rng);
  while (nonzero && p == 0) p = num(rng);
  mpq_class r(p, den(rng));
  r.canonicalize();
  return r;
}

inline Exact random_exact(std::mt19937_64& rng, bool complex_part = true) {
  return Exact(random_rational(rng), complex_part ? random_rational(rng) : mpq_class(0));
}

inline XPoly random_poly(std::mt19937_64& rng, long degree) {
  std::vector<Exact> c;
  for (long i = 0; i <= degree; ++i) c.push_back(random_exact(rng));
  return XPoly(std::move(c));
}

}  // namespace hyperdiff::testing
