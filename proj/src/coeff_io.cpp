#include "hyperdiff/coeff_io.hpp"

#include <array>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

namespace hyperdiff {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(trim(cur));
  return out;
}

double parse_double_token(const std::string& t) {
  if (t.find('/') != std::string::npos) return parse_rational(t).get_d();
  parse_rational(t);  // validates the syntax
  return std::strtod(t.c_str(), nullptr);
}

long parse_long_field(const std::map<std::string, std::string>& f, const std::string& key) {
  const auto it = f.find(key);
  if (it == f.end()) throw ConfigError("coefficient file: header lacks '" + key + "='");
  try {
    std::size_t used = 0;
    const long v = std::stol(it->second, &used);
    if (used != it->second.size()) throw ConfigError("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("coefficient file: bad integer for '" + key + "'");
  }
}

/// One parsed block: header fields and (index, re, im) rows.
struct Block {
  CoeffFileHeader header;
  std::vector<std::array<std::string, 3>> rows;
};

void parse_comment(const std::string& line, Block& block, bool& saw_kind) {
  std::istringstream ss(line.substr(1));
  std::string tok;
  bool first = true;
  while (ss >> tok) {
    if (first && (tok == "taylor" || tok == "operator")) {
      block.header.kind = tok;
      saw_kind = true;
    } else if (const auto eq = tok.find('='); eq != std::string::npos) {
      block.header.fields[tok.substr(0, eq)] = tok.substr(eq + 1);
    } else if (first) {
      block.header.fields["tag"] = tok;
    }
    first = false;
  }
}

std::vector<Block> read_blocks(std::istream& is) {
  std::vector<Block> blocks;
  std::string line;
  long line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    if (line[0] == '#') {
      const bool starts_block = line.rfind("#taylor", 0) == 0 || line.rfind("#operator", 0) == 0;
      if (starts_block || blocks.empty()) blocks.emplace_back();
      bool saw = false;
      parse_comment(line, blocks.back(), saw);
      continue;
    }
    if (blocks.empty() || blocks.back().header.kind.empty())
      throw ConfigError("coefficient file: data before '#taylor' or '#operator' header (line " +
                        std::to_string(line_no) + ")");
    const auto parts = split(line, ',');
    if (parts.size() != 3)
      throw ConfigError("coefficient file: expected 'index,re,im' at line " + std::to_string(line_no));
    blocks.back().rows.push_back({parts[0], parts[1], parts[2]});
  }
  return blocks;
}

long parse_index(const std::string& t) {
  const mpq_class q = parse_rational(t);
  if (q.get_den() != 1 || sgn(q) < 0 || q.get_num() > 100000000)
    throw ConfigError("coefficient file: bad index '" + t + "'");
  return q.get_num().get_si();
}

template <Scalar S>
std::map<long, S> rows_to_map(const Block& b) {
  std::map<long, S> out;
  for (const auto& r : b.rows) {
    const long i = parse_index(r[0]);
    if (out.count(i)) throw ConfigError("coefficient file: duplicate index " + r[0]);
    out[i] = parse_scalar<S>(r[1], r[2]);
  }
  return out;
}

template <Scalar S>
PolynomialOperator<S> block_to_operator(const Block& b) {
  if (b.header.kind != "operator") throw ConfigError("coefficient file: expected '#operator' header");
  const long m = parse_long_field(b.header.fields, "m");
  const long d = parse_long_field(b.header.fields, "d");
  PolynomialOperator<S> p(rows_to_map<S>(b));
  if (p.valence() != m || p.degree() != d)
    throw ConfigError("coefficient file: header m/d disagree with coefficients");
  return p;
}

}  // namespace

std::string format_scalar_part(const mpq_class& q) { return to_string(q); }
std::string format_scalar_part(double x) { return format_double(x); }

std::string format_scalar(const ExactComplex& z) {
  return format_scalar_part(z.re) + "," + format_scalar_part(z.im);
}

std::string format_scalar(const std::complex<double>& z) {
  return format_scalar_part(z.real()) + "," + format_scalar_part(z.imag());
}

std::string format_scalar(const ExtComplex& z) {
  const auto c = z.to_complex();
  if (std::isfinite(c.real()) && std::isfinite(c.imag()) && ExtComplex(c) == z)
    return format_scalar(c);
  return format_scalar(ScalarTraits<ExactComplex>::from_ext(z));
}

template <>
ExactComplex parse_scalar<ExactComplex>(const std::string& re, const std::string& im) {
  return ExactComplex(parse_rational(re), parse_rational(im));
}

template <>
std::complex<double> parse_scalar<std::complex<double>>(const std::string& re, const std::string& im) {
  return {parse_double_token(re), parse_double_token(im)};
}

template <>
ExtComplex parse_scalar<ExtComplex>(const std::string& re, const std::string& im) {
  if (re.find('/') != std::string::npos || im.find('/') != std::string::npos)
    return to_ext(parse_rational(re), parse_rational(im));
  return ExtComplex(parse_scalar<std::complex<double>>(re, im));
}

template <Scalar S>
void write_taylor(std::ostream& os, const TaylorPolynomial<S>& f,
                  const std::vector<std::string>& extra_headers) {
  os << "#taylor N=" << f.truncation() << '\n';
  for (const auto& h : extra_headers) os << '#' << h << '\n';
  for (long i = 0; i <= f.truncation(); ++i) {
    const S& c = f.coefficients()[static_cast<std::size_t>(i)];
    if (ScalarTraits<S>::is_zero(c)) continue;
    os << i << ',' << format_scalar(c) << '\n';
  }
}

template <Scalar S>
TaylorPolynomial<S> read_taylor(std::istream& is, CoeffFileHeader* header) {
  const auto blocks = read_blocks(is);
  if (blocks.size() != 1 || blocks[0].header.kind != "taylor")
    throw ConfigError("coefficient file: expected exactly one '#taylor' block");
  const long n = parse_long_field(blocks[0].header.fields, "N");
  if (n < 0) throw ConfigError("coefficient file: N must be >= 0");
  TaylorPolynomial<S> f(n);
  for (const auto& [i, c] : rows_to_map<S>(blocks[0])) {
    if (i > n) throw ConfigError("coefficient file: index beyond N");
    f.set(i, c);
  }
  if (header) *header = blocks[0].header;
  return f;
}

template <Scalar S>
void write_operator(std::ostream& os, const PolynomialOperator<S>& p) {
  os << "#operator m=" << p.valence() << " d=" << p.degree() << '\n';
  for (long j = p.valence(); j <= p.degree(); ++j) {
    const S c = p.coeff(j);
    if (ScalarTraits<S>::is_zero(c)) continue;
    os << j << ',' << format_scalar(c) << '\n';
  }
}

template <Scalar S>
PolynomialOperator<S> read_operator(std::istream& is) {
  const auto blocks = read_blocks(is);
  if (blocks.size() != 1) throw ConfigError("coefficient file: expected exactly one '#operator' block");
  return block_to_operator<S>(blocks[0]);
}

std::vector<PolynomialOperator<ExactComplex>> read_operator_table(std::istream& is) {
  std::vector<PolynomialOperator<ExactComplex>> out;
  for (const auto& b : read_blocks(is)) out.push_back(block_to_operator<ExactComplex>(b));
  if (out.empty()) throw ConfigError("operator table: no '#operator' blocks");
  return out;
}

TaylorPolynomial<ExactComplex> parse_polynomial_literal(const std::string& text) {
  const auto parts = split(text, ':');
  std::vector<ExactComplex> c;
  for (const auto& p : parts) c.emplace_back(parse_rational(p));
  return TaylorPolynomial<ExactComplex>(std::move(c));
}

std::string format_polynomial_literal(const TaylorPolynomial<ExactComplex>& f) {
  const auto t = f.trimmed();
  std::string out;
  for (long i = 0; i <= t.truncation(); ++i) {
    if (i) out += ':';
    const auto& c = t.coefficients()[static_cast<std::size_t>(i)];
    out += to_string(c.re);
    if (!c.is_real()) out += (sgn(c.im) > 0 ? "+" : "") + to_string(c.im) + "i";
  }
  return out;
}

#define HYPERDIFF_INSTANTIATE(S)                                                              \
  template void write_taylor<S>(std::ostream&, const TaylorPolynomial<S>&,                   \
                                const std::vector<std::string>&);                            \
  template TaylorPolynomial<S> read_taylor<S>(std::istream&, CoeffFileHeader*);              \
  template void write_operator<S>(std::ostream&, const PolynomialOperator<S>&);              \
  template PolynomialOperator<S> read_operator<S>(std::istream&);

HYPERDIFF_INSTANTIATE(ExactComplex)
HYPERDIFF_INSTANTIATE(ExtComplex)
HYPERDIFF_INSTANTIATE(std::complex<double>)

#undef HYPERDIFF_INSTANTIATE

}  // namespace hyperdiff
