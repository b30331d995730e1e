#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "hyperdiff/operator.hpp"

namespace hyperdiff {

// Coefficient files: a header line `#taylor N=<degree>` or
// `#operator m=<valence> d=<degree>`, optional further `#key=value ...`
// metadata lines, then one `index,re,im` line per nonzero coefficient.
// Numbers are decimal or exact `p/q`.

std::string format_scalar_part(const mpq_class& q);
std::string format_scalar_part(double x);

/// "re,im" for one coefficient. Exact values print as rationals; floating
/// values print as round-tripping decimals (or as exact rationals when they
/// leave double range).
std::string format_scalar(const ExactComplex& z);
std::string format_scalar(const ExtComplex& z);
std::string format_scalar(const std::complex<double>& z);

template <Scalar S>
S parse_scalar(const std::string& re, const std::string& im);

/// Parsed header plus any `key=value` metadata found on comment lines.
struct CoeffFileHeader {
  std::string kind;  // "taylor" or "operator"
  std::map<std::string, std::string> fields;
};

template <Scalar S>
void write_taylor(std::ostream& os, const TaylorPolynomial<S>& f,
                  const std::vector<std::string>& extra_headers = {});

template <Scalar S>
TaylorPolynomial<S> read_taylor(std::istream& is, CoeffFileHeader* header = nullptr);

template <Scalar S>
void write_operator(std::ostream& os, const PolynomialOperator<S>& p);

template <Scalar S>
PolynomialOperator<S> read_operator(std::istream& is);

/// Reads consecutive `#operator` blocks; block i becomes P_{i+1}.
std::vector<PolynomialOperator<ExactComplex>> read_operator_table(std::istream& is);

/// Polynomial literal used on the command line: coefficients a_0:a_1:...:a_n,
/// each rational or decimal (real). "0" is the zero polynomial.
TaylorPolynomial<ExactComplex> parse_polynomial_literal(const std::string& text);
std::string format_polynomial_literal(const TaylorPolynomial<ExactComplex>& f);

}  // namespace hyperdiff
