#include "hyperdiff/criterion.hpp"

#include <json.hpp>

#include <cmath>
#include <numbers>
#include <ostream>
#include <random>

#include "hyperdiff/right_inverse.hpp"

namespace hyperdiff {

std::string to_string(Route r) { return r == Route::P ? "P" : "Q"; }

Route parse_route(const std::string& s) {
  if (s == "P" || s == "P-route") return Route::P;
  if (s == "Q" || s == "Q-route") return Route::Q;
  throw ConfigError("unknown route '" + s + "' (expected P or Q)");
}

template <Scalar S>
bool check_annihilation(const PolynomialOperator<S>& p, const TaylorPolynomial<S>& g) {
  if (p.valence() <= g.degree()) return false;
  return apply_operator(p, g).is_zero();
}

namespace {

using Exact = ExactComplex;

/// Degree-g rational polynomials with small numerators and denominators and a
/// nonzero leading coefficient, one per degree.
std::vector<TaylorPolynomial<Exact>> battery(long max_degree, unsigned long seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> num(-9, 9), den(1, 9);
  const auto draw = [&](bool nonzero) {
    int p = num(rng);
    while (nonzero && p == 0) p = num(rng);
    mpq_class v(p, den(rng));
    v.canonicalize();
    return v;
  };
  std::vector<TaylorPolynomial<Exact>> out;
  for (long deg = 0; deg <= max_degree; ++deg) {
    std::vector<Exact> c;
    for (long i = 0; i < deg; ++i) c.emplace_back(draw(false), draw(false));
    c.emplace_back(draw(true), draw(false));
    out.emplace_back(std::move(c));
  }
  return out;
}

Verdict combine(const std::vector<Verdict>& parts) {
  bool all = !parts.empty();
  for (Verdict v : parts) {
    if (v == Verdict::refutes) return Verdict::refutes;
    all = all && v == Verdict::supports;
  }
  return all ? Verdict::supports : Verdict::inconclusive;
}

template <Scalar S>
HypothesisReport annihilation(const OperatorSequence& seq, const CriterionConfig& cfg) {
  HypothesisReport rep{"i", {}, Verdict::inconclusive, std::nullopt, ""};
  std::vector<TaylorPolynomial<S>> tests;
  for (const auto& g : battery(cfg.test_degree, cfg.seed)) tests.push_back(convert<S>(g));
  bool all_zero = true;
  for (long n = cfg.n_first; n <= cfg.n_last; ++n) {
    const auto p = seq.operator_at<S>(n);
    HypothesisRecord rec;
    rec.n = n;
    rec.exact = ScalarTraits<S>::exact;
    rec.value = LogMagnitude::zero();
    rec.pass = true;
    long annihilated = 0;
    for (const auto& g : tests) {
      if (g.degree() >= p.valence()) continue;
      ++annihilated;
      const auto out = apply_operator(p, g);
      rec.value = std::max(rec.value, majorant_norm(out, 1.0));
      rec.pass = rec.pass && out.is_zero();
    }
    rec.statistic = "annihilated " + std::to_string(annihilated) + "/" + std::to_string(tests.size());
    all_zero = all_zero && rec.pass;
    if (annihilated == static_cast<long>(tests.size())) {
      if (!rep.crossing) rep.crossing = n;
    } else {
      rep.crossing.reset();
    }
    rep.records.push_back(rec);
  }
  if (!all_zero) {
    rep.verdict = Verdict::refutes;
    rep.note = "a battery polynomial below the valence was not annihilated";
  } else if (rep.crossing) {
    rep.verdict = Verdict::supports;
    rep.note = "whole battery annihilated from n=" + std::to_string(*rep.crossing);
  } else {
    rep.note = "valence does not exceed the battery degree by the end of the range";
  }
  return rep;
}

GrowthRule decay_rule() {
  GrowthRule rule = GrowthRule::coefficient();
  rule.threshold_log = 0.0;
  return rule;
}

template <Scalar S>
void q_route(const OperatorSequence& seq, const CriterionConfig& cfg, HypothesisReport& decay,
             HypothesisReport& identity) {
  if (!(cfg.r > 1.0)) throw PreconditionError("verify_hypotheses: Q-route needs r > 1");
  if (cfg.k_max < 0) throw PreconditionError("verify_hypotheses: need k_max >= 0");
  std::vector<StatisticSeries> inverse_norms(static_cast<std::size_t>(cfg.k_max) + 1);
  bool identities = true;
  for (long n = cfg.n_first; n <= cfg.n_last; ++n) {
    const auto p = seq.operator_at<S>(n);
    HypothesisRecord norm_rec, id_rec;
    norm_rec.n = id_rec.n = n;
    norm_rec.statistic = "max_k ||f_{n,k}||_r";
    id_rec.statistic = "max_k ||P_n(D) f_{n,k} - z^k||_r";
    norm_rec.exact = id_rec.exact = ScalarTraits<S>::exact;
    id_rec.pass = true;
    for (long k = 0; k <= cfg.k_max; ++k) {
      const auto f = build_f_nk(p, k).f;
      const auto norm = majorant_norm(f, cfg.r);
      norm_rec.value = std::max(norm_rec.value, norm);
      auto& s = inverse_norms[static_cast<std::size_t>(k)];
      s.n.push_back(n);
      s.value.push_back(norm.is_zero() ? LogMagnitude::from_log(INFINITY) : LogMagnitude::one() / norm);

      const auto residual = majorant_norm(apply_operator(p, f) - TaylorPolynomial<S>::monomial(k), cfg.r);
      id_rec.value = std::max(id_rec.value, residual);
      if constexpr (ScalarTraits<S>::exact) {
        id_rec.pass = id_rec.pass && residual.is_zero();
      } else {
        id_rec.pass = id_rec.pass && residual <= LogMagnitude::from_value(cfg.tolerance);
      }
    }
    norm_rec.pass = norm_rec.value < LogMagnitude::one();
    identities = identities && id_rec.pass;
    decay.records.push_back(norm_rec);
    identity.records.push_back(id_rec);
  }
  std::vector<Verdict> parts;
  for (std::size_t k = 0; k < inverse_norms.size(); ++k) {
    inverse_norms[k].label = "k=" + std::to_string(k);
    evaluate_series(inverse_norms[k], decay_rule());
    parts.push_back(inverse_norms[k].verdict);
  }
  decay.verdict = combine(parts);
  decay.note = "norms of f_{n,k} for k <= " + std::to_string(cfg.k_max);
  identity.verdict = identities ? Verdict::supports : Verdict::refutes;
  identity.note = ScalarTraits<S>::exact ? "exact identity P_n(D) f_{n,k} = z^k"
                                          : "identity within tolerance in floating mode";
}

template <Scalar S>
void p_route(const OperatorSequence& seq, const CriterionConfig& cfg, HypothesisReport& decay,
             HypothesisReport& identity) {
  if (cfg.samples.empty()) throw PreconditionError("verify_hypotheses: P-route needs frequency samples");
  if (!(cfg.r > 0.0)) throw PreconditionError("verify_hypotheses: need r > 0");
  if (cfg.truncation_margin < 1) throw PreconditionError("verify_hypotheses: need truncation_margin >= 1");
  const auto tol = LogMagnitude::from_value(cfg.tolerance);
  bool identities = true;
  for (long n = cfg.n_first; n <= cfg.n_last; ++n) {
    const auto p = seq.operator_at<S>(n);
    const long trunc = p.degree() + cfg.truncation_margin;
    HypothesisRecord norm_rec, id_rec;
    norm_rec.n = id_rec.n = n;
    norm_rec.statistic = "max_w ||e_w||_r / |P_n(w)|";
    id_rec.statistic = "max_w ||P_n(D)(E_N/P_n(w)) - E_N||_r";
    norm_rec.exact = false;
    id_rec.exact = ScalarTraits<S>::exact;
    id_rec.bound = LogMagnitude::zero();
    id_rec.pass = true;
    for (const auto& z : cfg.samples) {
      const auto pw = seq.value_at(n, z).abs();
      norm_rec.value = std::max(norm_rec.value, pw.is_zero() ? LogMagnitude::from_log(INFINITY)
                                                             : LogMagnitude::from_log(std::abs(z) * cfg.r) / pw);
      const S w = ScalarTraits<S>::from_complex(z);
      const auto inv = exp_inverse(p, w);
      if (inv.is_zero()) {
        id_rec.pass = false;
        continue;
      }
      const auto e = exp_truncate(w, trunc, cfg.r).first;
      const auto measured = majorant_norm(apply_operator(p, inv.terms[0].weight * e) - e, cfg.r);
      const auto bound = exp_inverse_defect_bound(p, w, trunc, cfg.r);
      id_rec.value = std::max(id_rec.value, measured);
      id_rec.bound = std::max(*id_rec.bound, bound);
      bool ok = bound <= tol && measured <= tol;
      if constexpr (ScalarTraits<S>::exact) ok = ok && measured <= bound;
      id_rec.pass = id_rec.pass && ok;
    }
    norm_rec.pass = norm_rec.value < LogMagnitude::one();
    identities = identities && id_rec.pass;
    decay.records.push_back(norm_rec);
    identity.records.push_back(id_rec);
  }
  const auto growth = check_property_P(seq, cfg.samples, cfg.n_first, cfg.n_last);
  decay.verdict = growth.verdict;
  decay.note = "decay of e_w/P_n(w) follows growth of |P_n(w)| on the samples (" + to_string(growth.verdict) + ")";
  identity.verdict = identities ? Verdict::supports : Verdict::refutes;
  identity.note = "identity up to truncation tails, N = d(n) + " + std::to_string(cfg.truncation_margin);
}

HypothesisReport lacunary_decay(const OperatorSequence& seq, const CriterionConfig& cfg) {
  HypothesisReport rep{"iv", {}, Verdict::inconclusive, std::nullopt, ""};
  LacunaryBasis basis = [&] {
    try {
      return select_indices(seq, cfg.basis_size, cfg.basis_start, cfg.basis_cap);
    } catch (const CapExhausted& e) {
      if (seq.last_index())
        throw PreconditionError(std::string("lacunary selection impossible: valences of the table do not grow enough (") +
                                e.what() + ")");
      throw;
    }
  }();
  std::vector<ExtComplex> a;
  for (std::size_t j = 0; j < basis.size(); ++j) {
    const double log_a = -static_cast<double>(basis.m[j]) * std::numbers::ln2 - log_factorial(basis.m[j]);
    a.push_back(ExtComplex::from_polar(LogMagnitude::from_log(log_a) / seq.coefficient_abs(basis.n[j], basis.m[j]),
                                       {1.0, 0.0}));
  }
  const auto rows = decay_report(basis, m0_member(basis, a), cfg.basis_r);
  bool tails = true, decreasing = true;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    HypothesisRecord rec;
    rec.n = basis.n[k];
    rec.statistic = "||P_{n_k}(D) f||_r";
    rec.value = rows[k].measured;
    rec.bound = rows[k].diagonal + rows[k].tail_bound;
    const bool down = k == 0 || certainly_less(rows[k].measured, rows[k - 1].measured);
    rec.pass = rows[k].tail_within_bound && down;
    tails = tails && rows[k].tail_within_bound;
    decreasing = decreasing && down;
    rep.records.push_back(rec);
  }
  rep.verdict = !tails ? Verdict::refutes : decreasing ? Verdict::supports : Verdict::inconclusive;
  rep.note = "a_j = 1/(2^m_j m_j! |c|); bound column is diagonal term plus tail bound";
  return rep;
}

}  // namespace

CriterionReport verify_hypotheses(const OperatorSequence& seq, Route route, const CriterionConfig& cfg) {
  if (cfg.n_first < 1 || cfg.n_last < cfg.n_first)
    throw PreconditionError("verify_hypotheses: need 1 <= n_first <= n_last");
  if (!seq.has_index(cfg.n_last)) throw PreconditionError("verify_hypotheses: n_last beyond the sequence");
  if (cfg.test_degree < 0) throw PreconditionError("verify_hypotheses: need test_degree >= 0");

  CriterionReport rep;
  rep.route = route;
  rep.family = seq.tag();
  auto& [h1, h2, h3, h4] = rep.hypotheses;
  h1 = seq.rational() ? annihilation<ExactComplex>(seq, cfg) : annihilation<ExtComplex>(seq, cfg);
  h2.id = "ii";
  h3.id = "iii";
  if (route == Route::Q) {
    if (seq.rational()) q_route<ExactComplex>(seq, cfg, h2, h3);
    else q_route<ExtComplex>(seq, cfg, h2, h3);
  } else {
    if (seq.rational()) p_route<ExactComplex>(seq, cfg, h2, h3);
    else p_route<ExtComplex>(seq, cfg, h2, h3);
  }
  h4 = lacunary_decay(seq, cfg);
  const std::string range = " [range-sensitive: n in " + std::to_string(cfg.n_first) + ".." +
                            std::to_string(cfg.n_last) + "]";
  h2.note += range;
  h4.note += range;
  rep.verdict = combine({h1.verdict, h2.verdict, h3.verdict, h4.verdict});
  return rep;
}

namespace {

nlohmann::ordered_json log_json(const LogMagnitude& m) {
  if (m.is_zero()) return nullptr;
  return m.log();
}

}  // namespace

void write_criterion_jsonl(std::ostream& os, const CriterionReport& report) {
  using nlohmann::ordered_json;
  const std::string route = to_string(report.route);
  for (const auto& h : report.hypotheses) {
    for (const auto& r : h.records) {
      ordered_json j;
      j["hypothesis"] = h.id;
      j["route"] = route;
      j["n"] = r.n;
      j["statistic"] = r.statistic;
      j["value_log"] = log_json(r.value);
      if (r.bound) j["bound_log"] = log_json(*r.bound);
      j["exact"] = r.exact;
      j["pass"] = r.pass;
      os << j.dump() << '\n';
    }
  }
  for (const auto& h : report.hypotheses) {
    ordered_json j;
    j["hypothesis"] = h.id;
    j["route"] = route;
    j["summary"] = true;
    j["verdict"] = to_string(h.verdict);
    j["crossing"] = h.crossing ? ordered_json(*h.crossing) : ordered_json(nullptr);
    j["note"] = h.note;
    os << j.dump() << '\n';
  }
  ordered_json j;
  j["family"] = report.family;
  j["route"] = route;
  j["verdict"] = to_string(report.verdict);
  os << j.dump() << '\n';
}

template bool check_annihilation<ExactComplex>(const PolynomialOperator<ExactComplex>&,
                                               const TaylorPolynomial<ExactComplex>&);
template bool check_annihilation<ExtComplex>(const PolynomialOperator<ExtComplex>&,
                                             const TaylorPolynomial<ExtComplex>&);
template bool check_annihilation<std::complex<double>>(const PolynomialOperator<std::complex<double>>&,
                                                       const TaylorPolynomial<std::complex<double>>&);

}  // namespace hyperdiff
