#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "hyperdiff/operator.hpp"

namespace hyperdiff {

/// Convergence-exponent estimate chi = limsup log n(r) / log r for a point
/// set, where n(r) counts the points of modulus at most r.
struct UnicityEstimate {
  std::vector<double> radii;
  std::vector<long long> counts;
  /// log n(r) / log r per radius.
  std::vector<double> slopes;
  /// Maximum slope over the largest decade [r_max/10, r_max].
  double chi = 0.0;
  double margin = 0.05;
  /// chi > 1 + margin.
  bool unicity_supported = false;
};

struct UnicityOptions {
  int radii = 64;
  double margin = 0.05;
};

/// From explicit moduli (any order).
UnicityEstimate unicity_exponent(std::vector<double> moduli, double r_max, const UnicityOptions& opt = {});

/// From a nondecreasing generator n -> |z_n|, n >= 1; n(r) is found by
/// binary search, so the point set may be far too large to list.
UnicityEstimate unicity_exponent(const std::function<double(long long)>& generator, double r_max,
                                 const UnicityOptions& opt = {});

/// Built-in point sets: "sqrt" (n^{1/2}), "linear" (n), "pow2" (2^n).
std::function<double(long long)> builtin_point_set(const std::string& name);

struct DensityResult {
  ExponentialCombo<std::complex<double>> combo;
  /// Maximum absolute error over the grid.
  double max_residual = 0.0;
  /// Root-sum-square error over the grid; nonincreasing in the number of
  /// frequencies because the fitting spaces are nested.
  double l2_residual = 0.0;
  double condition = 1.0;
  long grid_points = 0;
};

struct DensityOptions {
  int rings = 8;
  int angles = 64;
  long truncation = 60;
  /// Fits whose design matrix exceeds this condition number are rejected.
  double max_condition = 1e13;
};

/// Least-squares fit of `target` on a polar grid of |z| <= r (the center plus
/// `rings` circles of `angles` points) by combinations of truncated e_w over
/// the first m_terms frequencies. Ill-conditioned fits throw
/// PreconditionError instead of returning a meaningless combination.
DensityResult density_demo(const std::vector<std::complex<double>>& frequencies,
                           const TaylorPolynomial<std::complex<double>>& target, double r, long m_terms,
                           const DensityOptions& opt = {});

}  // namespace hyperdiff
