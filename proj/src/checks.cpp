#include "checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ipslab/functionals.hpp"
#include "ipslab/graphical.hpp"
#include "ipslab/influence.hpp"
#include "ipslab/talagrand.hpp"
#include "ipslab/trees.hpp"

namespace ipslab::cli {

using nlohmann::json;

namespace {

// Seed offsets keep the random families of different sections independent.
constexpr std::uint64_t kOptimizerStream = 0;
constexpr std::uint64_t kAuditStream = 1;
constexpr std::uint64_t kFunctionStream = 2;

std::uint64_t sub_seed(const CheckContext& ctx, std::uint64_t stream) { return ctx.flags().seed * 1000003ULL + stream; }

json log_constant(LogConstant c) {
  return {{"log", c.log_value}, {"log10", c.log_value / std::log(10.0)}};
}

json vector_json(const FunctionOnOmega& f) { return std::vector<double>(f.data(), f.data() + f.size()); }

json per_site(const Model& model, const std::vector<double>& values) {
  json out = json::object();
  for (std::size_t x = 0; x < values.size(); ++x) out[model.sites().id(x)] = values[x];
  return out;
}

// Worst lhs / rhs tracker; ratio is +inf when rhs = 0 < lhs.
struct Worst {
  double ratio = -std::numeric_limits<double>::infinity();
  std::size_t index = 0;
  std::size_t violations = 0;

  void add(std::size_t i, double lhs, double rhs, bool pass) {
    const double r = rhs > 0.0 ? lhs / rhs : (lhs > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    if (r > ratio) {
      ratio = r;
      index = i;
    }
    if (!pass) ++violations;
  }
  [[nodiscard]] json to_json() const { return {{"violations", violations}, {"worstRatio", ratio}, {"worstIndex", index}}; }
};

std::vector<FunctionOnOmega> test_functions(const CheckContext& ctx, std::size_t fallback) {
  return gaussian_functions(ctx.model().n_states(), ctx.functions_or(fallback), sub_seed(ctx, kFunctionStream));
}

LogConstant audited_talagrand_constant(CheckContext& ctx) {
  const Model& m = ctx.model();
  return talagrand_constant(std::pow(m.alpha(), -3.0), m.neighborhood_size(), ctx.constants().audit.rho);
}

const ParamFamily& require_family(const CheckContext& ctx, const std::string& what) {
  if (!ctx.config().family) throw ConfigLoadError("/family", what + " needs a parameter family");
  return *ctx.config().family;
}

// The config's events, or dictators and majority when none are given.
std::vector<Event> events_for(const CheckContext& ctx, const Model& model) {
  require_binary(model);
  if (!ctx.config().events.empty()) return ctx.config().events;
  std::vector<Event> out;
  for (std::size_t x = 0; x < model.n_sites(); ++x) out.push_back(certify_increasing(model, dictator_event(model, x)));
  out.push_back(certify_increasing(model, majority_event(model)));
  return out;
}

std::string rational_string(const Rational& r) {
  const BigInt num = boost::multiprecision::numerator(r);
  const BigInt den = boost::multiprecision::denominator(r);
  return den == 1 ? num.str() : num.str() + "/" + den.str();
}

}  // namespace

CheckContext::CheckContext(const LabConfig* config, ToleranceProfile tolerance, RunFlags flags)
    : config_(config), tolerance_(std::move(tolerance)), flags_(std::move(flags)) {}

const LabConfig& CheckContext::config() const {
  if (config_ == nullptr) throw ConfigLoadError("", "this subcommand needs --config");
  return *config_;
}

const Model& CheckContext::model() const {
  const LabConfig& c = config();
  if (!c.model) throw ConfigLoadError("", "the config defines no model");
  return *c.model;
}

const Generator& CheckContext::generator() {
  if (!generator_) generator_.emplace(model());
  return *generator_;
}

const AuditedConstants& CheckContext::constants() {
  if (!constants_) {
    const Generator& gen = generator();
    AuditedConstants a;
    a.kappa = spectral_gap(gen);
    a.upper = log_sobolev_upper(gen, 8, sub_seed(*this, kOptimizerStream));
    a.audit = audit_log_sobolev(gen, a.upper.rho_upper, 500, sub_seed(*this, kAuditStream), tolerance_.slack);
    constants_ = std::move(a);
  }
  return *constants_;
}

json model_summary(const Model& model) {
  return {{"sites", model.sites().ids()},
          {"alphabet", model.alphabet().symbols()},
          {"states", model.n_states()},
          {"alpha", model.alpha()},
          {"neighborhoodSize", model.neighborhood_size()}};
}

Section constants_section(CheckContext& ctx) {
  const Model& m = ctx.model();
  const Generator& gen = ctx.generator();
  const AuditedConstants& c = ctx.constants();
  const double slack = ctx.tolerance().slack;
  const auto fs = test_functions(ctx, 100);
  const std::vector<double> t_grid{0.1, 0.5, 1.0};

  Worst poincare;
  Worst log_sobolev;
  Worst hyper;
  for (std::size_t i = 0; i < fs.size(); ++i) {
    const auto p = poincare_check(m, fs[i], c.kappa, slack);
    poincare.add(i, p.lhs, p.rhs, p.pass);
    const auto l = log_sobolev_check(m, fs[i], c.audit.rho, slack);
    log_sobolev.add(i, l.lhs, l.rhs, l.pass);
    for (double t : t_grid) {
      const auto h = hypercontractivity_check(gen, fs[i], c.audit.rho, t, slack);
      hyper.add(i, h.lhs, h.rhs, h.pass);
    }
  }

  Section s;
  const bool bounded = c.upper.rho_upper <= c.kappa + 1e-8;
  s.pass = bounded && c.audit.passed && poincare.violations == 0 && log_sobolev.violations == 0 &&
           hyper.violations == 0;
  s.body = {{"kappa", c.kappa},
            {"rhoUpper", c.upper.rho_upper},
            {"rhoUpperBelowKappa", bounded},
            {"rhoAudited", c.audit.rho},
            {"auditRounds", c.audit.rounds},
            {"auditPassed", c.audit.passed},
            {"auditFunctions", c.audit.functions},
            {"optimizer",
             {{"starts", c.upper.trace.starts},
              {"evaluations", c.upper.trace.evaluations},
              {"bestStart", c.upper.trace.best_start},
              {"startValues", c.upper.trace.start_values}}},
            {"witness", vector_json(c.upper.rho_witness)},
            {"chain",
             {{"functions", fs.size()},
              {"poincare", poincare.to_json()},
              {"logSobolev", log_sobolev.to_json()},
              {"hypercontractivity", hyper.to_json()},
              {"hypercontractivityTimes", t_grid}}},
            {"pass", s.pass}};
  s.witness.push_back({"constants", "rhoWitness", c.upper.rho_witness});
  s.witness.push_back({"constants", "gapEigenfunction", gap_eigenfunction(gen)});
  return s;
}

Section talagrand_section(CheckContext& ctx) {
  const Model& m = ctx.model();
  const Generator& gen = ctx.generator();
  const double slack = ctx.tolerance().slack;
  const double k = std::pow(m.alpha(), -3.0);
  const LogConstant c = audited_talagrand_constant(ctx);
  const LogConstant c1c = LogConstant::from_value(kCalibratedOrliczL2Constant) * c;
  const auto fs = test_functions(ctx, 500);

  std::size_t violations = 0;
  std::size_t worst = 0;
  double worst_log = -std::numeric_limits<double>::infinity();
  std::vector<TalagrandReport> reports;
  std::size_t corollary_violations = 0;
  double corollary_worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < fs.size(); ++i) {
    reports.push_back(verify_talagrand(m, fs[i], c, slack));
    if (!reports.back().pass) ++violations;
    if (reports.back().log_ratio > worst_log) {
      worst_log = reports.back().log_ratio;
      worst = i;
    }
    const auto cor = verify_corollary(m, fs[i], c1c, slack);
    if (!cor.pass) ++corollary_violations;
    corollary_worst = std::max(corollary_worst, cor.log_ratio);
  }

  // E(P_t f) <= alpha^-3 sum_x ||D_x P_t f||^2 on the first 100 functions.
  const std::vector<double> t_grid{0.0, 0.1, 1.0, 10.0};
  std::size_t good_violations = 0;
  double good_worst = 0.0;
  for (std::size_t i = 0; i < std::min<std::size_t>(fs.size(), 100); ++i) {
    const auto g = good_constant_check(gen, fs[i], k, t_grid, slack);
    good_violations += g.violations;
    good_worst = std::max(good_worst, g.worst_ratio);
  }

  Section s;
  s.pass = violations == 0 && corollary_violations == 0 && good_violations == 0;
  const auto& w = reports[worst];
  s.body = {{"K", k},
            {"rho", ctx.constants().audit.rho},
            {"constant", log_constant(c)},
            {"functions", fs.size()},
            {"violations", violations},
            {"worst",
             {{"index", worst},
              {"logRatio", worst_log},
              {"variance", w.lhs},
              {"orliczTerms", per_site(m, w.rhs_terms)}}},
            {"corollary",
             {{"orliczConstant", kCalibratedOrliczL2Constant},
              {"constant", log_constant(c1c)},
              {"violations", corollary_violations},
              {"worstLogRatio", corollary_worst}}},
            {"goodConstant",
             {{"K", k}, {"t", t_grid}, {"violations", good_violations}, {"worstRatio", good_worst}}},
            {"pass", s.pass}};
  s.witness.push_back({"talagrand", "worstFunction", fs[worst]});
  return s;
}

Section commutation_section(CheckContext& ctx) {
  const Model& m = ctx.model();
  const Generator& gen = ctx.generator();
  const double rho = ctx.constants().audit.rho;
  const auto fs = test_functions(ctx, 100);
  const std::vector<double> t_grid{0.1, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0};

  json per_t = json::array();
  std::size_t violations = 0;
  double worst_log = -std::numeric_limits<double>::infinity();
  std::size_t worst_f = 0;
  double worst_t = 0.0;
  for (double t : t_grid) {
    std::size_t v = 0;
    double wl = -std::numeric_limits<double>::infinity();
    double exponent = 0.0;
    for (std::size_t i = 0; i < fs.size(); ++i) {
      const auto r = verify_commutation(gen, fs[i], t, rho, ctx.tolerance().slack);
      exponent = r.exponent;
      if (!r.pass) ++v;
      if (r.log_ratio > wl) wl = r.log_ratio;
      if (r.log_ratio > worst_log) {
        worst_log = r.log_ratio;
        worst_f = i;
        worst_t = t;
      }
    }
    violations += v;
    per_t.push_back({{"t", t}, {"exponent", exponent}, {"violations", v}, {"worstLogRatio", wl}});
  }
  // Per-site breakdown of the worst pair.
  const FunctionOnOmega& fw = fs[worst_f];
  const FunctionOnOmega ptf = gen.semigroup(worst_t, fw);
  const double pw = hypercontract_exponent(worst_t, 2.0, rho);
  std::vector<double> lhs_terms;
  std::vector<double> rhs_terms;
  for (std::size_t x = 0; x < m.n_sites(); ++x) {
    lhs_terms.push_back(std::pow(lp_norm(m.mu(), d_x(m, x, ptf), 2.0), 2));
    rhs_terms.push_back(std::pow(lp_norm(m.mu(), d_x(m, x, fw), pw), 2));
  }

  Section s;
  s.pass = violations == 0;
  s.body = {{"rho", rho},
            {"constant", log_constant(commutation_constant(m.neighborhood_size()))},
            {"functions", fs.size()},
            {"grid", per_t},
            {"violations", violations},
            {"worst",
             {{"index", worst_f},
              {"t", worst_t},
              {"logRatio", worst_log},
              {"semigroupTerms", per_site(m, lhs_terms)},
              {"initialTerms", per_site(m, rhs_terms)}}},
            {"pass", s.pass}};
  s.witness.push_back({"commutation", "worstFunction", fs[worst_f]});
  return s;
}

Section reverse_section(CheckContext& ctx) {
  const Model& m = ctx.model();
  const auto fs = test_functions(ctx, 500);
  const auto r = reverse_talagrand_check(m, fs, ctx.tolerance().slack, ctx.flags().workers);
  std::vector<double> orlicz_terms;
  for (std::size_t x = 0; x < m.n_sites(); ++x) {
    orlicz_terms.push_back(std::pow(orlicz_norm(m.mu(), d_x(m, x, fs[r.worst_index]), kPhi), 2));
  }
  Section s;
  s.pass = r.pass;
  s.body = {{"entropyForm", r.entropy_form},
            {"note", "the entropy is taken of f^2; the bound is not checked for Ent(f)"},
            {"factor", kReverseTalagrandFactor},
            {"fittedConstant", r.constant},
            {"fittedConstantWitness", r.constant_witness},
            {"functions", fs.size()},
            {"violations", r.violations},
            {"worst",
             {{"index", r.worst_index},
              {"ratio", r.worst_ratio},
              {"entropy", r.entropy[r.worst_index]},
              {"bound", r.bound[r.worst_index]},
              {"orliczTerms", per_site(m, orlicz_terms)}}},
            {"pass", s.pass}};
  s.witness.push_back({"reverse", "worstFunction", fs[r.worst_index]});
  return s;
}

Section russo_section(CheckContext& ctx) {
  const ParamFamily& fam = require_family(ctx, "russo");
  const double a = fam.a();
  const double b = fam.b();
  const Model mid = fam.at(0.5 * (a + b));
  const auto events = events_for(ctx, mid);
  const double h = std::min(1e-3, (b - a) / 40.0);

  Section s;
  json rows = json::array();
  for (const Event& e : events) {
    if (!is_increasing(mid, e)) {
      rows.push_back({{"event", e.name()}, {"skipped", "not increasing"}});
      continue;
    }
    json points = json::array();
    bool pass = true;
    for (int i = 1; i <= 9; ++i) {
      const double p = a + (b - a) * i / 10.0;
      const auto r = russo_check(fam, e, p, h, ctx.tolerance().slack);
      pass = pass && r.pass;
      points.push_back({{"p", p},
                        {"derivative", r.derivative.value},
                        {"derivativeError", r.derivative.error},
                        {"converged", r.derivative.converged},
                        {"beta", r.beta.value},
                        {"middle", r.middle},
                        {"lower", r.lower},
                        {"pass", r.pass}});
    }
    s.pass = s.pass && pass;
    rows.push_back({{"event", e.name()}, {"points", points}, {"pass", pass}});
  }
  s.body = {{"family", fam.description()}, {"interval", {a, b}}, {"events", rows}, {"pass", s.pass}};
  return s;
}

Section kkl_section(CheckContext& ctx) {
  const Model& m = ctx.model();
  const auto events = events_for(ctx, m);
  const LogConstant c = audited_talagrand_constant(ctx);
  const double slack = ctx.tolerance().slack;

  Section s;
  json rows = json::array();
  for (const Event& e : events) {
    std::size_t sandwich_violations = 0;
    for (std::size_t x = 0; x < m.n_sites(); ++x) {
      for (double q : {1.0, 2.0}) {
        if (!dx_indicator_bounds(m, e, x, q, slack).pass) ++sandwich_violations;
      }
    }
    json row = {{"event", e.name()}, {"increasing", is_increasing(m, e)}, {"sandwichViolations", sandwich_violations}};
    bool pass = sandwich_violations == 0;
    try {
      const auto k = kkl_check(m, e, c, slack);
      row["kkl"] = {{"maxPivotal", k.lhs},   {"support", k.support}, {"R", k.r},
                    {"logFirst", k.log_first}, {"second", k.second}, {"bound", k.rhs},
                    {"pass", k.pass}};
      pass = pass && k.pass;
    } catch (const Error& err) {
      if (err.code() != ErrorCode::DegenerateEvent) throw;
      row["kkl"] = {{"skipped", "mu(A) is 0 or 1"}};
    }
    row["pass"] = pass;
    s.pass = s.pass && pass;
    rows.push_back(row);
  }
  s.body = {{"constant", log_constant(c)}, {"events", rows}, {"pass", s.pass}};
  return s;
}

Section threshold_section(CheckContext& ctx) {
  const ParamFamily& fam = require_family(ctx, "threshold");
  const Model mid = fam.at(0.5 * (fam.a() + fam.b()));
  const auto events = events_for(ctx, mid);
  const RhoAuditSettings settings{4, 500, sub_seed(ctx, kAuditStream)};

  Section s;
  json rows = json::array();
  for (const Event& e : events) {
    if (!is_increasing(mid, e)) {
      rows.push_back({{"event", e.name()}, {"skipped", "not increasing"}});
      continue;
    }
    try {
      const auto r = sharp_threshold_check(fam, e, fam.a(), fam.b(), 5, settings, ctx.tolerance().slack);
      json points = json::array();
      for (const auto& pt : r.points) {
        points.push_back({{"p", pt.p},
                          {"muA", pt.mu_a},
                          {"delta", pt.delta},
                          {"alpha", pt.alpha},
                          {"beta", pt.beta},
                          {"rho", pt.rho},
                          {"applicable", pt.applicable},
                          {"derivative", pt.derivative},
                          {"logBound", pt.log_rhs},
                          {"pass", pt.pass}});
      }
      rows.push_back({{"event", e.name()},
                      {"points", points},
                      {"productLhs", r.product_lhs},
                      {"productLogBound", r.product_log_rhs},
                      {"productVacuous", r.product_vacuous},
                      {"constant", log_constant(r.c_prime)},
                      {"pass", r.pass}});
      s.pass = s.pass && r.pass;
    } catch (const Error& err) {
      if (err.code() != ErrorCode::ThresholdHypothesisFailed) throw;
      rows.push_back({{"event", e.name()}, {"skipped", "delta_p >= e^2 alpha_p^2 at every grid point"}});
    }
  }
  s.body = {{"family", fam.description()},
            {"interval", {fam.a(), fam.b()}},
            {"orliczConstant", kCalibratedOrliczL2Constant},
            {"verdictsRelativeTo", "calibrated Orlicz/L2 constant"},
            {"events", rows},
            {"pass", s.pass}};
  return s;
}

Section simulate_section(CheckContext& ctx) {
  const Model& m = ctx.model();
  const auto& fl = ctx.flags();
  if (!(fl.t >= 0.0)) throw ConfigLoadError("", "--t must be nonnegative");
  if (fl.samples < 100) throw ConfigLoadError("", "--samples must be at least 100");
  const FunctionOnOmega f = gaussian_functions(m.n_states(), 1, sub_seed(ctx, kFunctionStream)).front();
  const auto est = mc_semigroup(m, fl.t, f, fl.samples, fl.seed, fl.workers);
  const FunctionOnOmega exact = ctx.generator().semigroup(fl.t, f);
  const double k = ctx.tolerance().mc_sigmas;
  std::size_t within = 0;
  double worst_z = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    const double dev = std::abs(est.estimate[i] - exact[i]);
    if (dev <= k * est.std_err[i] + 1e-12) ++within;
    if (est.std_err[i] > 0.0) worst_z = std::max(worst_z, dev / est.std_err[i]);
  }
  const double fraction = static_cast<double>(within) / static_cast<double>(f.size());
  Section s;
  s.pass = fraction >= 0.99;
  s.body = {{"t", fl.t},
            {"samples", est.samples},
            {"sigmas", k},
            {"withinFraction", fraction},
            {"worstZ", worst_z},
            {"estimate", vector_json(est.estimate)},
            {"stdErr", vector_json(est.std_err)},
            {"exact", vector_json(exact)},
            {"pass", s.pass}};
  s.witness.push_back({"simulate", "f", f});
  s.witness.push_back({"simulate", "estimate", est.estimate});
  s.witness.push_back({"simulate", "stdErr", est.std_err});
  s.witness.push_back({"simulate", "exact", exact});
  return s;
}

Section trees_section(CheckContext& ctx) {
  const std::size_t n = ctx.flags().n;
  if (n == 0 || n > kMaxEnumeratedLeaves) {
    throw ConfigLoadError("", "--n must be between 1 and " + std::to_string(kMaxEnumeratedLeaves));
  }
  const auto trees = enumerate_trees(n);
  const Rational bound = mass_bound_coefficient(n);
  Section s;
  json list = json::array();
  bool all_bounded = true;
  bool attained = false;
  for (const auto& t : trees) {
    const auto poly = tree_mass_polynomial(t);
    const Rational c = poly.coefficients().empty() ? Rational(0) : poly.coefficients().back();
    const bool bounded = poly.degree() == 2 * n - 2 && c <= bound;
    all_bounded = all_bounded && bounded;
    attained = attained || c == bound;
    list.push_back({{"code", t.code()},
                    {"massCoefficient", rational_string(c)},
                    {"degree", poly.degree()},
                    {"massAtOne", poly(1.0)},
                    {"withinBound", bounded},
                    {"attainsBound", c == bound}});
  }
  json decompositions = json::array();
  bool decompositions_ok = true;
  for (std::size_t k = 1; k < n && k <= 8; ++k) {
    const auto d = check_decomposition(k);
    decompositions_ok = decompositions_ok && d.ok;
    decompositions.push_back({{"n", k},
                              {"targets", d.target_count},
                              {"produced", d.produced},
                              {"minMultiplicity", d.min_multiplicity},
                              {"maxMultiplicity", d.max_multiplicity},
                              {"ok", d.ok}});
  }
  const auto [lhs, rhs] = catalan_identity_sides(n - 1);
  const bool counts = BigInt(trees.size()) == catalan(n - 1);
  s.pass = counts && all_bounded && attained && decompositions_ok && lhs == rhs;
  s.body = {{"n", n},
            {"count", trees.size()},
            {"catalan", catalan(n - 1).str()},
            {"countMatchesCatalan", counts},
            {"boundCoefficient", rational_string(bound)},
            {"boundAttained", attained},
            {"trees", list},
            {"decompositions", decompositions},
            {"catalanIdentity", {{"lhs", rational_string(lhs)}, {"rhs", rational_string(rhs)}, {"equal", lhs == rhs}}},
            {"pass", s.pass}};
  return s;
}

}  // namespace ipslab::cli
