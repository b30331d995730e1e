#include "hyperdiff/unicity.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

namespace hyperdiff {

namespace {

UnicityEstimate estimate(const std::function<long long(double)>& count, double r_max, const UnicityOptions& opt) {
  if (!(r_max > std::numbers::e)) throw PreconditionError("unicity_exponent: need r_max > e");
  if (opt.radii < 2) throw PreconditionError("unicity_exponent: need at least 2 radii");
  if (count(r_max) < 10) throw PreconditionError("unicity_exponent: fewer than 10 points below r_max");
  UnicityEstimate u;
  u.margin = opt.margin;
  const double lo = std::log(std::max(r_max / 10.0, std::numbers::e)), hi = std::log(r_max);
  for (int i = 0; i < opt.radii; ++i) {
    const double r = i + 1 == opt.radii ? r_max : std::exp(lo + (hi - lo) * i / (opt.radii - 1));
    const long long c = count(r);
    u.radii.push_back(r);
    u.counts.push_back(c);
    u.slopes.push_back(c > 0 ? std::log(static_cast<double>(c)) / std::log(r) : 0.0);
  }
  u.chi = *std::max_element(u.slopes.begin(), u.slopes.end());
  u.unicity_supported = u.chi > 1.0 + u.margin;
  return u;
}

}  // namespace

UnicityEstimate unicity_exponent(std::vector<double> moduli, double r_max, const UnicityOptions& opt) {
  for (double m : moduli)
    if (!(m >= 0.0)) throw PreconditionError("unicity_exponent: moduli must be nonnegative");
  std::sort(moduli.begin(), moduli.end());
  return estimate(
      [&](double r) {
        return static_cast<long long>(std::upper_bound(moduli.begin(), moduli.end(), r) - moduli.begin());
      },
      r_max, opt);
}

UnicityEstimate unicity_exponent(const std::function<double(long long)>& generator, double r_max,
                                 const UnicityOptions& opt) {
  const auto count = [&](double r) -> long long {
    if (generator(1) > r) return 0;
    long long good = 1, bad = 2;
    while (generator(bad) <= r) {
      good = bad;
      if (bad > (1LL << 61)) throw PreconditionError("unicity_exponent: generator does not leave the disk");
      bad *= 2;
    }
    while (bad - good > 1) {
      const long long mid = good + (bad - good) / 2;
      (generator(mid) <= r ? good : bad) = mid;
    }
    return good;
  };
  return estimate(count, r_max, opt);
}

std::function<double(long long)> builtin_point_set(const std::string& name) {
  if (name == "sqrt") return [](long long n) { return std::sqrt(static_cast<double>(n)); };
  if (name == "linear") return [](long long n) { return static_cast<double>(n); };
  if (name == "pow2") return [](long long n) { return std::ldexp(1.0, static_cast<int>(std::min(n, 4000LL))); };
  throw ConfigError("unknown point set '" + name + "' (expected sqrt, linear or pow2)");
}

DensityResult density_demo(const std::vector<std::complex<double>>& frequencies,
                           const TaylorPolynomial<std::complex<double>>& target, double r, long m_terms,
                           const DensityOptions& opt) {
  using C = std::complex<double>;
  if (!(r > 0.0)) throw PreconditionError("density_demo: need r > 0");
  if (m_terms < 1 || m_terms > static_cast<long>(frequencies.size()))
    throw PreconditionError("density_demo: need 1 <= m_terms <= number of frequencies");

  std::vector<C> grid{C(0.0, 0.0)};
  for (int ring = 1; ring <= opt.rings; ++ring)
    for (int a = 0; a < opt.angles; ++a)
      grid.push_back(std::polar(r * ring / opt.rings, 2.0 * std::numbers::pi * a / opt.angles));

  DensityResult out;
  out.grid_points = static_cast<long>(grid.size());
  const auto rows = static_cast<Eigen::Index>(grid.size());
  Eigen::VectorXcd b(rows);
  for (Eigen::Index i = 0; i < rows; ++i) b(i) = eval(target, grid[static_cast<std::size_t>(i)]);
  if (target.is_zero()) return out;

  Eigen::MatrixXcd a(rows, m_terms);
  for (long j = 0; j < m_terms; ++j) {
    const auto e = exp_truncate(frequencies[static_cast<std::size_t>(j)], opt.truncation, r).first;
    for (Eigen::Index i = 0; i < rows; ++i) a(i, j) = eval(e, grid[static_cast<std::size_t>(i)]);
  }
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  out.condition = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : INFINITY;
  if (!(out.condition <= opt.max_condition))
    throw PreconditionError("density_demo: ill-conditioned fit (condition number " +
                            format_double(out.condition) + ")");
  const Eigen::VectorXcd x = svd.solve(b);
  const Eigen::VectorXcd res = a * x - b;
  out.max_residual = res.cwiseAbs().maxCoeff();
  out.l2_residual = res.norm();
  for (long j = 0; j < m_terms; ++j) out.combo.add(x(j), frequencies[static_cast<std::size_t>(j)]);
  return out;
}

}  // namespace hyperdiff
