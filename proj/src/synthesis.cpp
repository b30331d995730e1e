#include "hyperdiff/synthesis.hpp"

#include <json.hpp>

#include <cmath>
#include <functional>
#include <numeric>
#include <ostream>

#include "hyperdiff/coeff_io.hpp"
#include "hyperdiff/right_inverse.hpp"

namespace hyperdiff {

namespace {

using Exact = ExactComplex;
using XPoly = TaylorPolynomial<Exact>;

/// Rationals of height c: 0 for c = 0, else +-p/q in lowest terms with
/// p + q = c + 1, by increasing q.
std::vector<mpq_class> rationals_of_height(long c) {
  if (c == 0) return {mpq_class(0)};
  std::vector<mpq_class> out;
  for (long q = 1; q <= c; ++q) {
    const long p = c + 1 - q;
    if (std::gcd(p, q) != 1) continue;
    out.emplace_back(p, q);
    out.emplace_back(-p, q);
  }
  return out;
}

/// Gaussian rationals of height c, real part heaviest first.
std::vector<Exact> gaussian_of_height(long c) {
  std::vector<Exact> out;
  for (long a = c; a >= 0; --a)
    for (const auto& x : rationals_of_height(a))
      for (const auto& y : rationals_of_height(c - a)) out.emplace_back(x, y);
  return out;
}

long rational_height(const mpq_class& v) {
  if (v == 0) return 0;
  return static_cast<long>(mpz_class(abs(v.get_num())).get_si() + v.get_den().get_si() - 1);
}

/// Calls emit for each polynomial of the given height until it returns false.
bool enumerate_height(long height, const std::function<bool(const XPoly&)>& emit) {
  if (height == 0) return emit(XPoly());
  for (long deg = height - 1; deg >= 0; --deg) {
    std::vector<Exact> coeffs(static_cast<std::size_t>(deg) + 1);
    std::function<bool(long, long)> fill = [&](long pos, long budget) -> bool {
      if (pos == deg) {
        if (budget < 1) return true;
        for (const auto& c : gaussian_of_height(budget)) {
          coeffs[static_cast<std::size_t>(pos)] = c;
          if (!emit(XPoly(coeffs))) return false;
        }
        return true;
      }
      for (long c = 0; c < budget; ++c)
        for (const auto& v : gaussian_of_height(c)) {
          coeffs[static_cast<std::size_t>(pos)] = v;
          if (!fill(pos + 1, budget - c)) return false;
        }
      return true;
    };
    if (!fill(0, height - deg)) return false;
  }
  return true;
}

LogMagnitude eps_magnitude(double eps) { return LogMagnitude::from_value(eps); }

template <Scalar S>
TaylorPolynomial<S> sum_corrections(const SynthesisTrace<S>& t) {
  TaylorPolynomial<S> x;
  for (const auto& s : t.steps) x += s.correction;
  return x;
}

}  // namespace

long target_height(const XPoly& g) {
  const long deg = g.degree();
  if (deg < 0) return 0;
  long h = deg;
  for (long i = 0; i <= deg; ++i) h += rational_height(g[i].re) + rational_height(g[i].im);
  return h;
}

std::vector<XPoly> enumerate_targets(const std::string& scheme, long count, bool zero_recurrent,
                                     const std::vector<XPoly>& user) {
  if (count < 0) throw PreconditionError("enumerate_targets: need count >= 0");
  std::vector<XPoly> base;
  const long needed = zero_recurrent ? (count + 1) / 2 : count;
  if (scheme == "rational-diagonal") {
    for (long h = 0; static_cast<long>(base.size()) < needed; ++h)
      enumerate_height(h, [&](const XPoly& g) {
        base.push_back(g);
        return static_cast<long>(base.size()) < needed;
      });
  } else if (scheme == "user-list") {
    if (needed > static_cast<long>(user.size()))
      throw PreconditionError("enumerate_targets: user list has " + std::to_string(user.size()) + " entries, " +
                              std::to_string(needed) + " needed");
    base.assign(user.begin(), user.begin() + needed);
  } else {
    throw ConfigError("unknown target scheme '" + scheme + "' (expected rational-diagonal or user-list)");
  }
  if (!zero_recurrent) return base;
  std::vector<XPoly> out;
  for (long i = 0; i < count; ++i) out.push_back(i % 2 == 0 ? base[static_cast<std::size_t>(i / 2)] : XPoly());
  return out;
}

double SynthesisOptions::radius(long k) const {
  if (radii.empty()) return static_cast<double>(k);
  return radii.at(static_cast<std::size_t>(k - 1));
}

double SynthesisOptions::eps(long k) const { return std::pow(eps_ratio, static_cast<double>(k)); }

template <Scalar S>
std::vector<LogMagnitude> recompute_residuals(const SynthesisTrace<S>& trace, const TaylorPolynomial<S>& x) {
  std::vector<LogMagnitude> out;
  for (const auto& s : trace.steps) {
    const auto p = trace.seq.template operator_at<S>(s.n);
    out.push_back(majorant_norm(apply_operator(p, x) - s.target, s.radius));
  }
  return out;
}

template <Scalar S>
std::vector<SynthesisTrace<S>> synthesize_tracks(const OperatorSequence& seq,
                                                 const std::vector<std::vector<TaylorPolynomial<S>>>& targets,
                                                 long K, const SynthesisOptions& opt) {
  if (K < 1) throw PreconditionError("synthesize: need K >= 1");
  if (targets.empty()) throw PreconditionError("synthesize: need at least one track");
  for (const auto& t : targets)
    if (static_cast<long>(t.size()) < K)
      throw PreconditionError("synthesize: " + std::to_string(t.size()) + " targets for K=" + std::to_string(K));
  if (!opt.radii.empty() && static_cast<long>(opt.radii.size()) < K)
    throw PreconditionError("synthesize: fewer radii than steps");
  for (long k = 1; k <= K; ++k)
    if (!(opt.radius(k) > 0.0)) throw PreconditionError("synthesize: radii must be positive");
  if (!(opt.eps_ratio > 0.0 && opt.eps_ratio < 1.0)) throw PreconditionError("synthesize: need 0 < eps_ratio < 1");
  if (opt.n_cap < 1 || opt.n_start < 1) throw PreconditionError("synthesize: need n_cap, n_start >= 1");

  const std::size_t T = targets.size();
  std::vector<SynthesisTrace<S>> traces(T, SynthesisTrace<S>{seq, {}, {}, {}});
  std::vector<PolynomialOperator<S>> chosen;
  long n_prev = opt.n_start - 1;
  long max_degree = -1;

  for (long k = 1; k <= K; ++k) {
    const double r = opt.radius(k);
    const double eps = opt.eps(k);
    const auto eps_mag = eps_magnitude(eps);
    char failed = '-';
    std::vector<TaylorPolynomial<S>> h(T);
    std::vector<LogMagnitude> norms(T);
    std::vector<std::vector<LogMagnitude>> cross(T);
    long n = n_prev + 1;
    for (;; ++n) {
      if (n - n_prev > opt.n_cap || !seq.has_index(n))
        throw CapExhausted("synthesize: step " + std::to_string(k) + ": no admissible n in (" +
                           std::to_string(n_prev) + ", " + std::to_string(n - 1) + "]; last failing condition (" +
                           failed + ")");
      if (seq.valence(n) <= max_degree) {
        failed = 'a';
        continue;
      }
      const auto p = seq.template operator_at<S>(n);
      bool ok = true;
      for (std::size_t t = 0; t < T && ok; ++t) {
        const auto& y = targets[t][static_cast<std::size_t>(k - 1)];
        h[t] = y.is_zero() ? TaylorPolynomial<S>() : inverse_for_polynomial(p, y);
        norms[t] = majorant_norm(h[t], r);
        if (!certainly_less(norms[t], eps_mag)) {
          failed = 'b';
          ok = false;
        }
      }
      for (std::size_t t = 0; t < T && ok; ++t) {
        cross[t].clear();
        for (std::size_t i = 0; i < chosen.size() && ok; ++i) {
          const auto c = majorant_norm(apply_operator(chosen[i], h[t]), opt.radius(static_cast<long>(i) + 1));
          cross[t].push_back(c);
          if (!certainly_less(c, eps_mag)) {
            failed = 'c';
            ok = false;
          }
        }
      }
      if (ok) break;
    }
    chosen.push_back(seq.template operator_at<S>(n));
    for (std::size_t t = 0; t < T; ++t) {
      SynthesisStep<S> step;
      step.k = k;
      step.n = n;
      step.valence = seq.valence(n);
      step.target = targets[t][static_cast<std::size_t>(k - 1)];
      step.radius = r;
      step.eps = eps;
      step.correction = h[t];
      step.correction_norm = norms[t];
      step.cross = cross[t];
      max_degree = std::max(max_degree, h[t].degree());
      traces[t].steps.push_back(std::move(step));
    }
    n_prev = n;
  }
  for (auto& t : traces) {
    t.x = sum_corrections(t);
    t.residuals = recompute_residuals(t, t.x);
  }
  return traces;
}

template <Scalar S>
SynthesisTrace<S> synthesize(const OperatorSequence& seq, const std::vector<TaylorPolynomial<S>>& targets, long K,
                             const SynthesisOptions& opt) {
  return synthesize_tracks<S>(seq, {targets}, K, opt).front();
}

template <Scalar S>
PerturbationReport<S> perturb(const SynthesisTrace<S>& trace, const TaylorPolynomial<S>& g) {
  PerturbationReport<S> rep;
  auto xg = trace.x;
  xg += g;
  for (const auto& s : trace.steps) {
    const auto p = trace.seq.template operator_at<S>(s.n);
    const auto before = apply_operator(p, trace.x);
    const auto after = apply_operator(p, xg);
    PerturbationRow<S> row;
    row.k = s.k;
    row.n = s.n;
    row.annihilated = s.valence > g.degree();
    row.before = majorant_norm(before - s.target, s.radius);
    row.after = majorant_norm(after - s.target, s.radius);
    row.identical = before == after;
    rep.any_annihilated = rep.any_annihilated || row.annihilated;
    rep.rows.push_back(row);
  }
  return rep;
}

namespace {

CombinationRow combination_row(const std::vector<const SynthesisTrace<Exact>*>& traces,
                               const std::vector<Exact>& coeffs, const XPoly& y, long k,
                               const LogMagnitude& tolerance) {
  using T = ScalarTraits<Exact>;
  const auto& step = traces.front()->steps[static_cast<std::size_t>(k - 1)];
  CombinationRow row;
  row.coeffs = coeffs;
  row.target = y;
  row.k = k;
  row.n = step.n;
  row.radius = step.radius;
  XPoly combo;
  std::vector<LogMagnitude> parts;
  for (std::size_t j = 0; j < traces.size(); ++j) {
    if (T::is_zero(coeffs[j])) continue;
    combo += coeffs[j] * traces[j]->x;
    parts.push_back(T::abs(coeffs[j]) * traces[j]->residuals[static_cast<std::size_t>(k - 1)]);
  }
  const auto p = traces.front()->seq.operator_at<Exact>(step.n);
  row.measured = majorant_norm(apply_operator(p, combo) - y, step.radius);
  row.bound = sum(parts);
  row.tolerance = tolerance;
  row.pass = !certainly_less(row.bound, row.measured, 1e-9) && row.bound <= tolerance;
  return row;
}

}  // namespace

AugmentReport augment(const OperatorSequence& seq, long K, const std::vector<XPoly>& extra_targets,
                      const std::vector<Exact>& lambdas, const SynthesisOptions& opt) {
  if (2 * static_cast<long>(extra_targets.size()) > K)
    throw PreconditionError("augment: K must cover one even step per extra target");
  const auto base_targets = enumerate_targets("rational-diagonal", K, true);
  std::vector<XPoly> v_targets(static_cast<std::size_t>(K));
  for (std::size_t t = 0; t < extra_targets.size(); ++t) v_targets[2 * t + 1] = extra_targets[t];
  auto tracks = synthesize_tracks<Exact>(seq, {base_targets, v_targets}, K, opt);
  AugmentReport rep{tracks[0], tracks[1], {}};
  for (const auto& lambda : lambdas)
    for (std::size_t t = 0; t < extra_targets.size(); ++t) {
      const long k = 2 * static_cast<long>(t) + 2;
      rep.rows.push_back(combination_row({&rep.v, &rep.base}, {Exact(1), lambda}, extra_targets[t], k,
                                         LogMagnitude::from_log(static_cast<double>(2 - k) * std::log(2.0))));
    }
  return rep;
}

JointReport joint_family(const OperatorSequence& seq, long J, long K, const std::vector<XPoly>& targets,
                         const std::vector<std::vector<Exact>>& combos, const SynthesisOptions& opt) {
  using T = ScalarTraits<Exact>;
  if (J < 2) throw PreconditionError("joint_family: need J >= 2");
  for (const auto& c : combos)
    if (static_cast<long>(c.size()) != J) throw PreconditionError("joint_family: combination length must be J");
  const long pairs = static_cast<long>(combos.size() * targets.size());
  if (pairs > K) throw PreconditionError("joint_family: K must cover one step per (combination, target) pair");

  std::vector<std::vector<XPoly>> schedule(static_cast<std::size_t>(J), std::vector<XPoly>(static_cast<std::size_t>(K)));
  std::size_t step = 0;
  for (const auto& c : combos)
    for (const auto& y : targets) {
      const auto lead = std::find_if(c.begin(), c.end(), [](const Exact& v) { return !T::is_zero(v); });
      if (lead == c.end()) {
        if (!y.is_zero()) throw PreconditionError("joint_family: the zero combination cannot reach a nonzero target");
      } else {
        schedule[static_cast<std::size_t>(lead - c.begin())][step] = (Exact(1) / *lead) * y;
      }
      ++step;
    }

  JointReport rep{synthesize_tracks<Exact>(seq, schedule, K, opt), {}};
  std::vector<const SynthesisTrace<Exact>*> ptrs;
  for (const auto& t : rep.traces) ptrs.push_back(&t);
  long k = 1;
  for (const auto& c : combos)
    for (const auto& y : targets) {
      std::vector<LogMagnitude> tol;
      for (const auto& cj : c) tol.push_back(T::abs(cj));
      const auto tolerance = sum(tol) * LogMagnitude::from_log(static_cast<double>(1 - k) * std::log(2.0));
      rep.rows.push_back(combination_row(ptrs, c, y, k, tolerance));
      ++k;
    }
  return rep;
}

namespace {

using nlohmann::ordered_json;

ordered_json log_json(const LogMagnitude& m) {
  if (m.is_zero()) return nullptr;
  return m.log();
}

/// Nonzero coefficients as [index, "re,im"] pairs.
template <Scalar S>
ordered_json poly_json(const TaylorPolynomial<S>& f) {
  ordered_json out = ordered_json::array();
  for (long i = 0; i <= f.degree(); ++i)
    if (!ScalarTraits<S>::is_zero(f[i])) out.push_back(ordered_json::array({i, format_scalar(f[i])}));
  return out;
}

}  // namespace

template <Scalar S>
void write_trace_jsonl(std::ostream& os, const SynthesisTrace<S>& trace) {
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const auto& s = trace.steps[i];
    ordered_json j;
    j["step"] = s.k;
    j["n"] = s.n;
    j["valence"] = s.valence;
    j["radius"] = s.radius;
    j["eps"] = s.eps;
    j["target"] = poly_json(s.target);
    j["correction_degree"] = s.correction.degree();
    j["correction_norm_log"] = log_json(s.correction_norm);
    ordered_json cross = ordered_json::array();
    for (const auto& c : s.cross) cross.push_back(log_json(c));
    j["cross_log"] = cross;
    j["residual_log"] = log_json(trace.residuals[i]);
    j["correction"] = poly_json(s.correction);
    os << j.dump() << '\n';
  }
}

template <Scalar S>
void write_perturbation_jsonl(std::ostream& os, const PerturbationReport<S>& rep) {
  for (const auto& r : rep.rows) {
    ordered_json j;
    j["step"] = r.k;
    j["n"] = r.n;
    j["annihilated"] = r.annihilated;
    j["residual_log"] = log_json(r.before);
    j["perturbed_residual_log"] = log_json(r.after);
    j["identical"] = r.identical;
    os << j.dump() << '\n';
  }
  ordered_json j;
  j["any_annihilated"] = rep.any_annihilated;
  os << j.dump() << '\n';
}

void write_combination_jsonl(std::ostream& os, const std::vector<CombinationRow>& rows) {
  for (const auto& r : rows) {
    ordered_json j;
    ordered_json coeffs = ordered_json::array();
    for (const auto& c : r.coeffs) coeffs.push_back(format_scalar(c));
    j["coeffs"] = coeffs;
    j["target"] = poly_json(r.target);
    j["step"] = r.k;
    j["n"] = r.n;
    j["radius"] = r.radius;
    j["measured_log"] = log_json(r.measured);
    j["bound_log"] = log_json(r.bound);
    j["tolerance_log"] = log_json(r.tolerance);
    j["pass"] = r.pass;
    os << j.dump() << '\n';
  }
}

#define HYPERDIFF_INSTANTIATE(S)                                                                                  \
  template std::vector<LogMagnitude> recompute_residuals<S>(const SynthesisTrace<S>&, const TaylorPolynomial<S>&); \
  template std::vector<SynthesisTrace<S>> synthesize_tracks<S>(                                                   \
      const OperatorSequence&, const std::vector<std::vector<TaylorPolynomial<S>>>&, long, const SynthesisOptions&); \
  template SynthesisTrace<S> synthesize<S>(const OperatorSequence&, const std::vector<TaylorPolynomial<S>>&, long, \
                                           const SynthesisOptions&);                                              \
  template PerturbationReport<S> perturb<S>(const SynthesisTrace<S>&, const TaylorPolynomial<S>&);                \
  template void write_trace_jsonl<S>(std::ostream&, const SynthesisTrace<S>&);                                    \
  template void write_perturbation_jsonl<S>(std::ostream&, const PerturbationReport<S>&);

HYPERDIFF_INSTANTIATE(ExactComplex)
HYPERDIFF_INSTANTIATE(ExtComplex)

#undef HYPERDIFF_INSTANTIATE

}  // namespace hyperdiff
