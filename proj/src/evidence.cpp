#include "hyperdiff/evidence.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace hyperdiff {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::supports: return "supports";
    case Verdict::refutes: return "refutes";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

Verdict rule_verdict(const std::vector<long>& n, const std::vector<LogMagnitude>& value,
                     const std::vector<LogMagnitude>& refute_value, std::size_t count,
                     const GrowthRule& rule, std::vector<long>* witnesses) {
  if (count == 0) return Verdict::inconclusive;
  const std::size_t start = count / 2;
  const std::size_t len = count - start;
  const auto blocks = static_cast<std::size_t>(std::max(rule.blocks, 1));

  bool supports = false;
  if (len >= blocks) {
    supports = true;
    LogMagnitude prev;
    for (std::size_t b = 0; b < blocks && supports; ++b) {
      const std::size_t lo = start + b * len / blocks, hi = start + (b + 1) * len / blocks;
      LogMagnitude lowest = value[lo];
      for (std::size_t i = lo + 1; i < hi; ++i) lowest = std::min(lowest, value[i], [](const auto& x, const auto& y) { return x < y; });
      if (b > 0 && !certainly_less(prev, lowest)) supports = false;
      prev = lowest;
    }
    const LogMagnitude& last = value[count - 1];
    supports = supports && !last.is_zero() && last.log() > rule.threshold_log;
  }

  std::vector<long> found;
  for (std::size_t i = start; i < count; ++i) {
    const double floor = rule.floor_log - rule.floor_slope * static_cast<double>(n[i]);
    if (refute_value[i].is_zero() || refute_value[i].log() < floor) found.push_back(n[i]);
  }
  const bool refutes = static_cast<long>(found.size()) >= rule.min_witnesses;
  if (witnesses) *witnesses = std::move(found);

  if (supports && !refutes) return Verdict::supports;
  if (refutes && !supports) return Verdict::refutes;
  return Verdict::inconclusive;
}

void evaluate_series(StatisticSeries& s, const GrowthRule& rule) {
  if (s.refute_value.empty()) s.refute_value = s.value;
  s.running.clear();
  for (std::size_t c = 1; c <= s.value.size(); ++c)
    s.running.push_back(rule_verdict(s.n, s.value, s.refute_value, c, rule));
  s.verdict = rule_verdict(s.n, s.value, s.refute_value, s.value.size(), rule, &s.witnesses);
}

namespace {

void check_range(long n_first, long n_last) {
  if (n_first < 1 || n_last < n_first) throw PreconditionError("evidence: need 1 <= n_first <= n_last");
}

/// supports iff all support; refutes iff any refutes; otherwise inconclusive.
Verdict combine(const std::vector<StatisticSeries>& series) {
  bool all_support = !series.empty(), any_refute = false;
  for (const auto& s : series) {
    all_support = all_support && s.verdict == Verdict::supports;
    any_refute = any_refute || s.verdict == Verdict::refutes;
  }
  if (any_refute) return Verdict::refutes;
  return all_support ? Verdict::supports : Verdict::inconclusive;
}

std::string format_point(std::complex<double> z) {
  if (z.imag() == 0.0) return format_double(z.real());
  return format_double(z.real()) + (z.imag() < 0 ? "" : "+") + format_double(z.imag()) + "i";
}

template <Scalar S>
ExtComplex as_ext(const S& s) {
  if constexpr (std::is_same_v<S, ExactComplex>) {
    return to_ext(s.re, s.im);
  } else if constexpr (std::is_same_v<S, ExtComplex>) {
    return s;
  } else {
    return ExtComplex(s);
  }
}

CircleMin finish_circle(const std::vector<ExtComplex>& values, const LogMagnitude& derivative_bound, double r,
                        long samples, bool constant_modulus) {
  CircleMin out;
  out.at_r = values.front().abs();
  out.sampled_min = out.at_r;
  for (const auto& v : values) out.sampled_min = std::min(out.sampled_min, v.abs(), [](const auto& x, const auto& y) { return x < y; });
  if (constant_modulus) {
    out.lower = out.sampled_min;
  } else {
    const auto correction =
        derivative_bound * LogMagnitude::from_value(std::numbers::pi * r / static_cast<double>(samples));
    out.lower = LogMagnitude::saturating_sub(out.sampled_min, correction);
  }
  return out;
}

std::complex<double> circle_point(double r, long i, long samples) {
  if (i == 0) return {r, 0.0};
  return std::polar(r, 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(samples));
}

void check_circle(double r, long samples) {
  if (!(r > 0.0)) throw PreconditionError("circle_min: need r > 0");
  if (samples < 64) throw PreconditionError("circle_min: need at least 64 samples");
}

}  // namespace

EvidenceReport check_property_P(const OperatorSequence& seq, const std::vector<std::complex<double>>& samples,
                                long n_first, long n_last, const GrowthRule& rule) {
  check_range(n_first, n_last);
  if (samples.empty()) throw PreconditionError("check_property_P: empty sample set");
  EvidenceReport rep{'P', n_first, n_last, {}, Verdict::inconclusive, {}};
  for (const auto& z : samples) {
    StatisticSeries s;
    s.label = "z=" + format_point(z);
    for (long n = n_first; n <= n_last; ++n) {
      s.n.push_back(n);
      s.value.push_back(seq.value_at(n, z).abs());
    }
    evaluate_series(s, rule);
    rep.series.push_back(std::move(s));
  }
  rep.verdict = combine(rep.series);
  return rep;
}

EvidenceReport check_property_Q(const OperatorSequence& seq, long k_max, long n_first, long n_last,
                                const GrowthRule& rule, double bound_cap_log) {
  check_range(n_first, n_last);
  if (k_max < 1) throw PreconditionError("check_property_Q: need k_max >= 1");
  EvidenceReport rep{'Q', n_first, n_last, {}, Verdict::inconclusive, {}};
  bool all_growth = true, any_refute = false, bounded = true;
  for (long k = 1; k <= k_max; ++k) {
    StatisticSeries growth, bound;
    growth.label = "growth k=" + std::to_string(k);
    bound.label = "bounded k=" + std::to_string(k);
    for (long n = n_first; n <= n_last; ++n) {
      const long m = seq.valence(n);
      growth.n.push_back(n);
      bound.n.push_back(n);
      if (m < 1) {
        growth.value.push_back(LogMagnitude::zero());
      } else {
        const auto c = seq.coefficient_abs(n, m);
        growth.value.push_back(LogMagnitude::from_log(std::log(static_cast<double>(m))) *
                               c.pow(static_cast<double>(k) / static_cast<double>(m)));
      }
      bound.value.push_back(seq.coefficient_abs(n, m + k));
    }
    evaluate_series(growth, rule);
    bound.refute_value = bound.value;
    bound.running.clear();
    LogMagnitude running_max;
    for (const auto& v : bound.value) {
      running_max = std::max(running_max, v, [](const auto& x, const auto& y) { return x < y; });
      const bool ok = running_max.is_zero() || running_max.log() <= bound_cap_log;
      bound.running.push_back(ok ? Verdict::supports : Verdict::inconclusive);
    }
    bound.verdict = bound.running.back();
    all_growth = all_growth && growth.verdict == Verdict::supports;
    any_refute = any_refute || growth.verdict == Verdict::refutes;
    bounded = bounded && bound.verdict == Verdict::supports;
    rep.series.push_back(std::move(growth));
    rep.series.push_back(std::move(bound));
  }
  if (any_refute) rep.verdict = Verdict::refutes;
  else if (all_growth && bounded) rep.verdict = Verdict::supports;
  if (!bounded) rep.note = "boundedness statistic exceeded the cap";
  return rep;
}

template <Scalar S>
CircleMin circle_min(const PolynomialOperator<S>& p, double r, long samples) {
  check_circle(r, samples);
  std::vector<ExtComplex> c;
  std::vector<LogMagnitude> deriv;
  for (long j = p.valence(); j <= p.degree(); ++j) {
    c.push_back(as_ext(p.coeff(j)));
    if (j > 0 && !c.back().is_zero())
      deriv.push_back(c.back().abs() * LogMagnitude::from_log(std::log(static_cast<double>(j)) +
                                                              static_cast<double>(j - 1) * std::log(r)));
  }
  std::vector<ExtComplex> values;
  for (long i = 0; i < samples; ++i) {
    const ExtComplex z(circle_point(r, i, samples));
    ExtComplex acc;
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
      acc *= z;
      acc += *it;
    }
    values.push_back(acc * ext_pow(z, p.valence()));
  }
  return finish_circle(values, sum(deriv), r, samples, p.valence() == p.degree());
}

CircleMin circle_min(const OperatorSequence& seq, long n, double r, long samples) {
  check_circle(r, samples);
  std::vector<ExtComplex> values;
  for (long i = 0; i < samples; ++i) values.push_back(seq.value_at(n, circle_point(r, i, samples)));
  const bool single = seq.closed_form() ? seq.valence(n) == seq.degree(n) : seq.coefficients(n).size() == 1;
  return finish_circle(values, seq.derivative_majorant(n, r), r, samples, single);
}

EvidenceReport check_property_R(const OperatorSequence& seq, double r, long n_first, long n_last, long samples,
                                const GrowthRule& rule) {
  check_range(n_first, n_last);
  EvidenceReport rep{'R', n_first, n_last, {}, Verdict::inconclusive, {}};
  StatisticSeries s;
  s.label = "r=" + format_double(r);
  for (long n = n_first; n <= n_last; ++n) {
    const auto cm = circle_min(seq, n, r, samples);
    s.n.push_back(n);
    s.value.push_back(cm.lower);
    s.refute_value.push_back(cm.sampled_min);
  }
  evaluate_series(s, rule);
  rep.series.push_back(std::move(s));
  rep.verdict = combine(rep.series);
  return rep;
}

void write_evidence_csv(std::ostream& os, const EvidenceReport& report) {
  os << "#property " << report.property << " n=" << report.n_first << ".." << report.n_last
     << " verdict=" << to_string(report.verdict) << '\n';
  if (!report.note.empty()) os << "#note " << report.note << '\n';
  for (const auto& s : report.series) {
    os << "#series " << s.label << " verdict=" << to_string(s.verdict) << " witnesses=";
    for (std::size_t i = 0; i < s.witnesses.size(); ++i) os << (i ? ";" : "") << s.witnesses[i];
    os << '\n' << "n,statistic_log,verdict_running\n";
    for (std::size_t i = 0; i < s.n.size(); ++i)
      os << s.n[i] << ',' << format_log(s.value[i]) << ',' << to_string(s.running[i]) << '\n';
  }
}

template CircleMin circle_min<ExactComplex>(const PolynomialOperator<ExactComplex>&, double, long);
template CircleMin circle_min<ExtComplex>(const PolynomialOperator<ExtComplex>&, double, long);
template CircleMin circle_min<std::complex<double>>(const PolynomialOperator<std::complex<double>>&, double, long);

}  // namespace hyperdiff
