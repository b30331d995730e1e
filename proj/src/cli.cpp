#include "hyperdiff/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "hyperdiff/coeff_io.hpp"
#include "hyperdiff/criterion.hpp"
#include "hyperdiff/evidence.hpp"
#include "hyperdiff/lacunary.hpp"
#include "hyperdiff/right_inverse.hpp"
#include "hyperdiff/synthesis.hpp"
#include "hyperdiff/unicity.hpp"

namespace hyperdiff {

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys{
      "command", "family", "table", "c", "b", "p", "f2_coeff", "log_base",
      "n", "n_min", "n_max", "k", "k_max", "r", "r_max", "radii", "samples", "circle_samples", "property",
      "threshold_log", "points", "mode", "seed", "route", "w", "truncation", "test_degree", "tolerance",
      "truncation_margin", "J", "n_start", "n_cap", "coeffs", "K", "targets", "target_list", "zero_recurrent",
      "eps_ratio", "g", "lambdas", "extra", "combos", "out", "decay_out", "coeff_out"};
  return keys;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  const auto& keys = known_keys();
  if (std::find(keys.begin(), keys.end(), key) == keys.end()) throw ConfigError("unknown key '" + key + "'");
  if (key == "command") command = value;
  else values[key] = value;
}

std::string RunConfig::get(const std::string& key, const std::string& fallback) const {
  const auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

long RunConfig::get_long(const std::string& key, long fallback) const {
  if (!has(key)) return fallback;
  const std::string& v = values.at(key);
  try {
    std::size_t used = 0;
    const long out = std::stol(v, &used);
    if (used == v.size()) return out;
  } catch (const std::exception&) {
  }
  throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'");
}

double RunConfig::get_double(const std::string& key, double fallback) const {
  if (!has(key)) return fallback;
  const std::string& v = values.at(key);
  try {
    std::size_t used = 0;
    const double out = std::stod(v, &used);
    if (used == v.size() && std::isfinite(out)) return out;
  } catch (const std::exception&) {
  }
  throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void merge(RunConfig& into, const RunConfig& from) {
  if (!from.command.empty()) into.command = from.command;
  for (const auto& [k, v] : from.values) into.values[k] = v;
}

}  // namespace

RunConfig RunConfig::from_text(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line without '=': '" + line + "'");
    cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

RunConfig RunConfig::from_args(const std::vector<std::string>& args) {
  RunConfig cfg;
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string a = args[i];
    if (a.rfind("--", 0) == 0) {
      a.erase(0, 2);
      std::string key = a, value;
      if (const auto eq = a.find('='); eq != std::string::npos) {
        key = a.substr(0, eq);
        value = a.substr(eq + 1);
      } else {
        if (i + 1 >= args.size()) throw ConfigError("flag --" + key + " needs a value");
        value = args[++i];
      }
      if (key == "config") merge(cfg, from_text(read_file(value)));
      else cfg.set(key, value);
    } else if (const auto eq = a.find('='); eq != std::string::npos) {
      cfg.set(a.substr(0, eq), a.substr(eq + 1));
    } else if (cfg.command.empty()) {
      cfg.command = a;
    } else {
      throw ConfigError("unexpected argument '" + a + "'");
    }
  }
  return cfg;
}

namespace {

using Exact = ExactComplex;
using XPoly = TaylorPolynomial<Exact>;

OperatorSequence family_of(const RunConfig& cfg) {
  if (!cfg.has("family")) throw ConfigError("missing key 'family'");
  std::map<std::string, std::string> params;
  for (const char* key : {"table", "c", "b", "p", "f2_coeff", "log_base"})
    if (cfg.has(key)) params[key] = cfg.get(key, "");
  return make_family(cfg.get("family", ""), params);
}

bool exact_mode(const RunConfig& cfg, const std::string& fallback) {
  const std::string mode = cfg.get("mode", fallback);
  if (mode == "exact") return true;
  if (mode == "float") return false;
  throw ConfigError("mode must be exact or float, got '" + mode + "'");
}

std::complex<double> parse_complex(const std::string& s) {
  const auto parts = split(s, ':');
  if (parts.empty() || parts.size() > 2) throw ConfigError("bad complex number '" + s + "'");
  const double re = parse_rational(parts[0]).get_d();
  const double im = parts.size() == 2 ? parse_rational(parts[1]).get_d() : 0.0;
  return {re, im};
}

std::vector<std::complex<double>> complex_list(const RunConfig& cfg, const std::string& key,
                                               const std::string& fallback) {
  std::vector<std::complex<double>> out;
  for (const auto& s : split(cfg.get(key, fallback), ',')) out.push_back(parse_complex(s));
  return out;
}

std::vector<Exact> rational_list(const std::string& text, char sep) {
  std::vector<Exact> out;
  for (const auto& s : split(text, sep)) {
    const auto parts = split(s, ':');
    if (parts.empty() || parts.size() > 2) throw ConfigError("bad rational '" + s + "'");
    out.emplace_back(parse_rational(parts[0]), parts.size() == 2 ? parse_rational(parts[1]) : mpq_class(0));
  }
  return out;
}

std::vector<XPoly> polynomial_list(const std::string& text) {
  std::vector<XPoly> out;
  for (const auto& s : split(text, ';')) out.push_back(parse_polynomial_literal(s));
  return out;
}

std::vector<double> double_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& s : split(text, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(s, &used));
      if (used != s.size()) throw ConfigError("bad number '" + s + "'");
    } catch (const std::logic_error&) {
      throw ConfigError("bad number '" + s + "'");
    }
  }
  return out;
}

/// The report stream: the `out` file when given, the log otherwise.
class Output {
 public:
  Output(const RunConfig& cfg, const std::string& key, std::ostream& fallback) : stream_(&fallback) {
    if (!cfg.has(key)) return;
    file_ = std::make_unique<std::ofstream>(cfg.get(key, ""), std::ios::trunc);
    if (!*file_) throw ConfigError("cannot write '" + cfg.get(key, "") + "'");
    stream_ = file_.get();
  }
  std::ostream& stream() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

void range_of(const RunConfig& cfg, long& first, long& last, long default_last) {
  first = cfg.get_long("n_min", 1);
  last = cfg.get_long("n_max", default_last);
  if (first < 1 || last < first) throw ConfigError("need 1 <= n_min <= n_max");
}

int cmd_check_properties(const RunConfig& cfg, std::ostream& log) {
  const auto seq = family_of(cfg);
  long first = 0, last = 0;
  range_of(cfg, first, last, 40);
  Output out(cfg, "out", log);
  for (const auto& prop : split(cfg.get("property", "P,Q,R"), ',')) {
    EvidenceReport rep;
    if (prop == "P") {
      GrowthRule rule = GrowthRule::pointwise();
      rule.threshold_log = cfg.get_double("threshold_log", rule.threshold_log);
      rep = check_property_P(seq, complex_list(cfg, "samples", "-2,-3,-5"), first, last, rule);
    } else if (prop == "Q") {
      GrowthRule rule = GrowthRule::coefficient();
      rule.threshold_log = cfg.get_double("threshold_log", rule.threshold_log);
      rep = check_property_Q(seq, cfg.get_long("k_max", 3), first, last, rule);
    } else if (prop == "R") {
      GrowthRule rule = GrowthRule::pointwise();
      rule.threshold_log = cfg.get_double("threshold_log", rule.threshold_log);
      rep = check_property_R(seq, cfg.get_double("r", 1.0), first, last, cfg.get_long("circle_samples", 1024), rule);
    } else {
      throw ConfigError("property must be P, Q or R, got '" + prop + "'");
    }
    write_evidence_csv(out.stream(), rep);
    log << "property " << prop << ": " << to_string(rep.verdict) << '\n';
  }
  return 0;
}

int cmd_unicity(const RunConfig& cfg, std::ostream& log) {
  const double r_max = cfg.get_double("r_max", 1e6);
  const auto est = unicity_exponent(builtin_point_set(cfg.get("points", "sqrt")), r_max);
  Output out(cfg, "out", log);
  auto& os = out.stream();
  os << "#chi=" << format_double(est.chi) << " unicity_supported=" << (est.unicity_supported ? 1 : 0) << '\n';
  os << "r,count,slope\n";
  for (std::size_t i = 0; i < est.radii.size(); ++i)
    os << format_double(est.radii[i]) << ',' << est.counts[i] << ',' << format_double(est.slopes[i]) << '\n';
  log << "chi: " << format_double(est.chi) << '\n';
  return 0;
}

template <Scalar S>
std::vector<DecayRow> m0_decay(const LacunaryBasis& basis, const std::string& coeffs, double r) {
  std::vector<S> a;
  for (std::size_t j = 0; j < basis.size(); ++j) {
    const long m = basis.m[j];
    if (coeffs == "pow4") {
      if constexpr (ScalarTraits<S>::exact) {
        mpz_class den;
        mpz_ui_pow_ui(den.get_mpz_t(), 4, static_cast<unsigned long>(m));
        a.push_back(Exact(mpq_class(1, den)));
      } else {
        a.push_back(ScalarTraits<S>::from_ext(
            ExtComplex::from_polar(LogMagnitude::from_log(-static_cast<double>(m) * std::log(4.0)), {1.0, 0.0})));
      }
    } else if (coeffs == "damped") {
      if constexpr (ScalarTraits<S>::exact) {
        throw ConfigError("coeffs=damped needs mode=float");
      } else {
        const double log_a = -static_cast<double>(m) * std::log(2.0) - log_factorial(m);
        a.push_back(ScalarTraits<S>::from_ext(ExtComplex::from_polar(
            LogMagnitude::from_log(log_a) / basis.seq.coefficient_abs(basis.n[j], m), {1.0, 0.0})));
      }
    } else {
      throw ConfigError("coeffs must be pow4 or damped, got '" + coeffs + "'");
    }
  }
  return decay_report(basis, m0_member(basis, a), r);
}

int cmd_build_m0(const RunConfig& cfg, std::ostream& log) {
  const auto seq = family_of(cfg);
  const auto basis = select_indices(seq, cfg.get_long("J", 6), cfg.get_long("n_start", 1), cfg.get_long("n_cap", 1000000));
  const auto ineq = verify_ineq_ak(basis);
  {
    Output out(cfg, "out", log);
    write_basis_csv(out.stream(), basis);
  }
  double min_margin = INFINITY;
  for (const auto& p : ineq.pairs) min_margin = std::min(min_margin, p.margin);
  log << "indices:";
  for (long n : basis.n) log << ' ' << n;
  log << "\npairwise inequality: " << (ineq.ok ? "ok" : "violated") << " (min margin " << format_double(min_margin)
      << ")\n";
  if (cfg.has("decay_out")) {
    const std::string coeffs = cfg.get("coeffs", "pow4");
    const double r = cfg.get_double("r", 1.0);
    const auto rows = exact_mode(cfg, "float") ? m0_decay<Exact>(basis, coeffs, r) : m0_decay<ExtComplex>(basis, coeffs, r);
    Output out(cfg, "decay_out", log);
    write_decay_csv(out.stream(), rows);
    long within = 0;
    for (const auto& row : rows) within += row.within_bound ? 1 : 0;
    log << "decay rows within bound: " << within << '/' << rows.size() << '\n';
  }
  return 0;
}

template <Scalar S>
int build_inverse(const RunConfig& cfg, const OperatorSequence& seq, std::ostream& log) {
  const long n = cfg.get_long("n", 1);
  const auto p = seq.operator_at<S>(n);
  const std::string route = cfg.get("route", "polynomial");
  Output out(cfg, "out", log);
  if (route == "polynomial") {
    auto inv = build_f_nk(p, cfg.get_long("k", 0));
    inv.n = n;
    write_taylor(out.stream(), inv.f, {inv.header()});
    if constexpr (ScalarTraits<S>::exact) {
      log << "identity: exact\n";
    } else {
      const auto res = majorant_norm(apply_operator(p, inv.f) - TaylorPolynomial<S>::monomial(inv.k), 1.0);
      log << "identity: residual_log=" << format_log(res) << '\n';
    }
  } else if (route == "exponential") {
    if (!cfg.has("w")) throw ConfigError("route=exponential needs w");
    const S w = ScalarTraits<S>::from_complex(parse_complex(cfg.get("w", "")));
    const long trunc = cfg.get_long("truncation", p.degree() + 40);
    const double r = cfg.get_double("r", 1.0);
    const auto combo = exp_inverse(p, w);
    if (combo.is_zero()) throw PreconditionError("build-inverse: P_n(w) = 0, no exponential inverse");
    const auto e = exp_truncate(w, trunc, r).first;
    RightInverse<S> inv;
    inv.route = "exponential";
    inv.n = n;
    inv.f = combo.terms[0].weight * e;
    write_taylor(out.stream(), inv.f,
                 {inv.header(), "frequency=" + format_scalar(w), "weight=" + format_scalar(combo.terms[0].weight)});
    log << "identity: up to tail, bound_log=" << format_log(exp_inverse_defect_bound(p, w, trunc, r)) << '\n';
  } else {
    throw ConfigError("route must be polynomial or exponential, got '" + route + "'");
  }
  return 0;
}

int cmd_build_inverse(const RunConfig& cfg, std::ostream& log) {
  const auto seq = family_of(cfg);
  return exact_mode(cfg, "exact") ? build_inverse<Exact>(cfg, seq, log) : build_inverse<ExtComplex>(cfg, seq, log);
}

int cmd_verify_criterion(const RunConfig& cfg, std::ostream& log) {
  const auto seq = family_of(cfg);
  CriterionConfig c;
  range_of(cfg, c.n_first, c.n_last, 20);
  c.test_degree = cfg.get_long("test_degree", c.test_degree);
  c.seed = static_cast<unsigned long>(cfg.get_long("seed", static_cast<long>(c.seed)));
  c.k_max = cfg.get_long("k_max", c.k_max);
  c.r = cfg.get_double("r", c.r);
  if (cfg.has("samples")) c.samples = complex_list(cfg, "samples", "");
  c.truncation_margin = cfg.get_long("truncation_margin", c.truncation_margin);
  c.tolerance = cfg.get_double("tolerance", c.tolerance);
  c.basis_size = cfg.get_long("J", c.basis_size);
  c.basis_start = cfg.get_long("n_start", c.basis_start);
  c.basis_cap = cfg.get_long("n_cap", c.basis_cap);
  const auto rep = verify_hypotheses(seq, parse_route(cfg.get("route", "Q")), c);
  Output out(cfg, "out", log);
  write_criterion_jsonl(out.stream(), rep);
  for (const auto& h : rep.hypotheses) log << '(' << h.id << ") " << to_string(h.verdict) << '\n';
  log << "overall: " << to_string(rep.verdict) << '\n';
  return 0;
}

SynthesisOptions synthesis_options(const RunConfig& cfg) {
  SynthesisOptions opt;
  if (cfg.has("radii")) opt.radii = double_list(cfg.get("radii", ""));
  opt.eps_ratio = cfg.get_double("eps_ratio", opt.eps_ratio);
  opt.n_cap = cfg.get_long("n_cap", opt.n_cap);
  opt.n_start = cfg.get_long("n_start", opt.n_start);
  return opt;
}

std::vector<XPoly> targets_of(const RunConfig& cfg, long K) {
  const std::string scheme = cfg.get("targets", "rational-diagonal");
  const bool zero_recurrent = cfg.get_long("zero_recurrent", 0) != 0;
  const auto user = cfg.has("target_list") ? polynomial_list(cfg.get("target_list", "")) : std::vector<XPoly>{};
  return enumerate_targets(scheme, K, zero_recurrent, user);
}

template <Scalar S>
SynthesisTrace<S> run_synthesis(const RunConfig& cfg, const OperatorSequence& seq, long K) {
  std::vector<TaylorPolynomial<S>> targets;
  for (const auto& t : targets_of(cfg, K)) targets.push_back(convert<S>(t));
  return synthesize<S>(seq, targets, K, synthesis_options(cfg));
}

template <Scalar S>
int synthesize_cmd(const RunConfig& cfg, const OperatorSequence& seq, std::ostream& log) {
  const long K = cfg.get_long("K", 8);
  const auto trace = run_synthesis<S>(cfg, seq, K);
  {
    Output out(cfg, "out", log);
    write_trace_jsonl(out.stream(), trace);
  }
  if (cfg.has("coeff_out")) {
    Output out(cfg, "coeff_out", log);
    write_taylor(out.stream(), trace.x, {"synthesis K=" + std::to_string(K) + " family=" + seq.tag()});
  }
  log << "x_K degree: " << trace.x.degree() << '\n';
  const auto check = recompute_residuals(trace, trace.x);
  for (std::size_t i = 0; i < check.size(); ++i) {
    const auto limit = LogMagnitude::from_log(-static_cast<double>(i) * std::log(2.0));
    if (!(check[i] <= limit))
      throw InvariantViolation("synthesize: residual certificate fails at step " + std::to_string(i + 1));
  }
  log << "residual certificate: ok\n";
  return 0;
}

int cmd_synthesize(const RunConfig& cfg, std::ostream& log) {
  const auto seq = family_of(cfg);
  return exact_mode(cfg, "exact") ? synthesize_cmd<Exact>(cfg, seq, log) : synthesize_cmd<ExtComplex>(cfg, seq, log);
}

template <Scalar S>
int perturb_cmd(const RunConfig& cfg, const OperatorSequence& seq, std::ostream& log) {
  if (!cfg.has("g")) throw ConfigError("perturb needs g");
  const auto trace = run_synthesis<S>(cfg, seq, cfg.get_long("K", 8));
  const auto rep = perturb(trace, convert<S>(parse_polynomial_literal(cfg.get("g", ""))));
  Output out(cfg, "out", log);
  write_perturbation_jsonl(out.stream(), rep);
  long unchanged = 0;
  for (const auto& r : rep.rows) unchanged += r.identical ? 1 : 0;
  log << "unchanged residuals: " << unchanged << '/' << rep.rows.size() << '\n';
  if (!rep.any_annihilated) log << "no step annihilates g\n";
  return 0;
}

int cmd_perturb(const RunConfig& cfg, std::ostream& log) {
  const auto seq = family_of(cfg);
  return exact_mode(cfg, "exact") ? perturb_cmd<Exact>(cfg, seq, log) : perturb_cmd<ExtComplex>(cfg, seq, log);
}

void report_rows(const RunConfig& cfg, const std::vector<CombinationRow>& rows, std::ostream& log) {
  Output out(cfg, "out", log);
  write_combination_jsonl(out.stream(), rows);
  long pass = 0;
  for (const auto& r : rows) pass += r.pass ? 1 : 0;
  log << "rows within tolerance: " << pass << '/' << rows.size() << '\n';
}

int cmd_augment(const RunConfig& cfg, std::ostream& log) {
  if (!exact_mode(cfg, "exact")) throw ConfigError("augment runs in exact mode only");
  const auto seq = family_of(cfg);
  const auto rep = augment(seq, cfg.get_long("K", 8), polynomial_list(cfg.get("extra", "1;0:1")),
                           rational_list(cfg.get("lambdas", "-1,1,2"), ','), synthesis_options(cfg));
  report_rows(cfg, rep.rows, log);
  return 0;
}

int cmd_joint(const RunConfig& cfg, std::ostream& log) {
  if (!exact_mode(cfg, "exact")) throw ConfigError("joint runs in exact mode only");
  const auto seq = family_of(cfg);
  std::vector<std::vector<Exact>> combos;
  for (const auto& c : split(cfg.get("combos", "1,0;0,1"), ';')) combos.push_back(rational_list(c, ','));
  const auto targets = polynomial_list(cfg.get("target_list", "1"));
  const long pairs = static_cast<long>(combos.size() * targets.size());
  const auto rep = joint_family(seq, cfg.get_long("J", 2), cfg.get_long("K", pairs), targets, combos,
                                synthesis_options(cfg));
  report_rows(cfg, rep.rows, log);
  return 0;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& log, std::ostream& err) {
  try {
    if (cfg.command.empty()) throw ConfigError("no command given");
    if (cfg.command == "check-properties") return cmd_check_properties(cfg, log);
    if (cfg.command == "unicity") return cmd_unicity(cfg, log);
    if (cfg.command == "build-m0") return cmd_build_m0(cfg, log);
    if (cfg.command == "build-inverse") return cmd_build_inverse(cfg, log);
    if (cfg.command == "verify-criterion") return cmd_verify_criterion(cfg, log);
    if (cfg.command == "synthesize") return cmd_synthesize(cfg, log);
    if (cfg.command == "perturb") return cmd_perturb(cfg, log);
    if (cfg.command == "augment") return cmd_augment(cfg, log);
    if (cfg.command == "joint") return cmd_joint(cfg, log);
    throw ConfigError("unknown command '" + cfg.command + "'");
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.exit_code();
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& log, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = RunConfig::from_args(std::vector<std::string>(argv + 1, argv + argc));
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.exit_code();
  }
  return run(cfg, log, err);
}

}  // namespace hyperdiff
