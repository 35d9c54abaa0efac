#include "ipslab/influence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "ipslab/constants.hpp"
#include "ipslab/functionals.hpp"

namespace ipslab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kE2 = std::exp(2.0);

std::size_t flip(const StateSpace& space, std::size_t s, std::size_t x) {
  return space.with_digit(s, x, 1 - space.digit(s, x));
}

void require_event_size(const Model& model, const Event& event) {
  if (event.size() != model.n_states()) throw Error(ErrorCode::BadArgs, "event size does not match |Omega|");
}

double event_probability(const Model& model, const Event& event) {
  double total = 0.0;
  for (std::size_t s = 0; s < event.size(); ++s) {
    if (event.contains(s)) total += model.mu()[s];
  }
  return total;
}

// Second-order difference quotient of F at p with step h that stays inside
// [a, b]: central when possible, one-sided otherwise.
template <class F>
double difference(F&& fn, double p, double h, double a, double b) {
  if (p - h >= a && p + h <= b) return (fn(p + h) - fn(p - h)) / (2.0 * h);
  if (p + 2.0 * h <= b) return (-3.0 * fn(p) + 4.0 * fn(p + h) - fn(p + 2.0 * h)) / (2.0 * h);
  if (p - 2.0 * h >= a) return (3.0 * fn(p) - 4.0 * fn(p - h) + fn(p - 2.0 * h)) / (2.0 * h);
  throw Error(ErrorCode::BadArgs, "difference step does not fit in the parameter interval");
}

}  // namespace

Event::Event(std::vector<char> mask, std::string name) : mask_(std::move(mask)), name_(std::move(name)) {
  for (auto& m : mask_) m = m != 0 ? 1 : 0;
}

FunctionOnOmega Event::indicator() const {
  FunctionOnOmega f(static_cast<Eigen::Index>(mask_.size()));
  for (std::size_t i = 0; i < mask_.size(); ++i) f[static_cast<Eigen::Index>(i)] = mask_[i] != 0 ? 1.0 : 0.0;
  return f;
}

Formula Formula::atom(std::size_t site) { return Formula{Kind::Site, site, 0, {}}; }
Formula Formula::all_of(std::vector<Formula> children) { return Formula{Kind::And, 0, 0, std::move(children)}; }
Formula Formula::any_of(std::vector<Formula> children) { return Formula{Kind::Or, 0, 0, std::move(children)}; }
Formula Formula::at_least(std::size_t k, std::vector<Formula> children) {
  return Formula{Kind::Threshold, 0, k, std::move(children)};
}

bool Formula::evaluate(const StateSpace& space, std::size_t state) const {
  switch (kind) {
    case Kind::Site:
      return space.digit(state, site) == 1;
    case Kind::And:
      return std::all_of(children.begin(), children.end(), [&](const Formula& c) { return c.evaluate(space, state); });
    case Kind::Or:
      return std::any_of(children.begin(), children.end(), [&](const Formula& c) { return c.evaluate(space, state); });
    case Kind::Threshold: {
      std::size_t count = 0;
      for (const auto& c : children) count += c.evaluate(space, state) ? 1 : 0;
      return count >= k;
    }
  }
  return false;
}

void require_binary(const Model& model) {
  if (!model.alphabet().is_binary01()) throw Error(ErrorCode::BadAlphabet, "influence operations need E = {0, 1}");
}

namespace {

void check_formula_sites(const Model& model, const Formula& f) {
  if (f.kind == Formula::Kind::Site && f.site >= model.n_sites()) {
    throw Error(ErrorCode::UnknownSite, "formula refers to site index " + std::to_string(f.site));
  }
  for (const auto& c : f.children) check_formula_sites(model, c);
}

}  // namespace

Event compile_formula(const Model& model, const Formula& formula, std::string name) {
  require_binary(model);
  check_formula_sites(model, formula);
  std::vector<char> mask(model.n_states());
  for (std::size_t s = 0; s < mask.size(); ++s) mask[s] = formula.evaluate(model.space(), s) ? 1 : 0;
  return Event(std::move(mask), std::move(name));
}

Event event_from_states(const Model& model, const std::vector<Configuration>& states, std::string name) {
  std::vector<char> mask(model.n_states(), 0);
  for (const auto& c : states) {
    if (c.size() != model.n_sites()) throw Error(ErrorCode::BadArgs, "event configuration has the wrong length");
    for (auto a : c) {
      if (a >= model.alphabet().size()) throw Error(ErrorCode::BadArgs, "event configuration has an unknown symbol");
    }
    mask[model.space().index(c)] = 1;
  }
  return Event(std::move(mask), std::move(name));
}

Event dictator_event(const Model& model, std::size_t x) {
  return compile_formula(model, Formula::atom(x), "dictator(" + model.sites().id(x) + ")");
}

Event majority_event(const Model& model) {
  std::vector<Formula> atoms;
  for (std::size_t x = 0; x < model.n_sites(); ++x) atoms.push_back(Formula::atom(x));
  return compile_formula(model, Formula::at_least(model.n_sites() / 2 + 1, std::move(atoms)), "majority");
}

Event parity_event(const Model& model) {
  require_binary(model);
  std::vector<char> mask(model.n_states());
  for (std::size_t s = 0; s < mask.size(); ++s) {
    std::size_t ones = 0;
    for (std::size_t x = 0; x < model.n_sites(); ++x) ones += model.space().digit(s, x);
    mask[s] = ones % 2 == 1 ? 1 : 0;
  }
  return Event(std::move(mask), "parity");
}

bool is_increasing(const Model& model, const Event& event) {
  require_binary(model);
  require_event_size(model, event);
  const auto& space = model.space();
  for (std::size_t s = 0; s < space.size(); ++s) {
    if (!event.contains(s)) continue;
    for (std::size_t x = 0; x < space.n_sites(); ++x) {
      if (space.digit(s, x) == 0 && !event.contains(space.with_digit(s, x, 1))) return false;
    }
  }
  return true;
}

Event certify_increasing(const Model& model, Event event) {
  if (!is_increasing(model, event)) {
    throw Error(ErrorCode::NotIncreasing, "event '" + event.name() + "' is not increasing");
  }
  event.certified_ = true;
  return event;
}

double pivotal_measure(const Model& model, const Event& event, std::size_t x) {
  require_binary(model);
  require_event_size(model, event);
  if (x >= model.n_sites()) throw Error(ErrorCode::UnknownSite, "site index out of range");
  double total = 0.0;
  for (std::size_t s = 0; s < event.size(); ++s) {
    if (event.contains(s) && !event.contains(flip(model.space(), s, x))) total += model.mu()[s];
  }
  return total;
}

IndicatorBoundsReport dx_indicator_bounds(const Model& model, const Event& event, std::size_t x, double q,
                                          double slack) {
  if (!(q >= 1.0)) throw Error(ErrorCode::BadArgs, "dx_indicator_bounds needs q >= 1");
  IndicatorBoundsReport r;
  r.pivotal = pivotal_measure(model, event, x);
  r.increasing = is_increasing(model, event);
  const FunctionOnOmega d = d_x(model, x, event.indicator());
  r.norm_q = model.mu().weights().dot(d.cwiseAbs().array().pow(q).matrix());
  double inf0 = 1.0;
  double inf_any = 1.0;
  for (std::size_t s = 0; s < model.n_states(); ++s) {
    inf0 = std::min(inf0, model.kernels().prob(x, s, 0));
    inf_any = std::min({inf_any, model.kernels().prob(x, s, 0), model.kernels().prob(x, s, 1)});
  }
  r.lower = std::pow(inf0, q) * r.pivotal;
  r.lower_general = std::pow(inf_any, q) * r.pivotal;
  r.upper = 2.0 * r.pivotal;
  const double lower = r.increasing ? r.lower : r.lower_general;
  r.pass = within_slack(lower, r.norm_q, slack) && within_slack(r.norm_q, r.upper, slack);
  return r;
}

ParamFamily::ParamFamily(double a, double b, Builder builder, std::string description)
    : a_(a), b_(b), builder_(std::move(builder)), description_(std::move(description)) {
  if (!(a < b)) throw Error(ErrorCode::BadArgs, "parameter interval needs a < b");
}

ParamFamily ParamFamily::bernoulli(std::vector<std::string> sites, double a, double b) {
  if (!(a > 0.0 && b < 1.0)) throw Error(ErrorCode::BadArgs, "Bernoulli families need [a, b] inside (0, 1)");
  auto ids = std::make_shared<const std::vector<std::string>>(std::move(sites));
  return ParamFamily(
      a, b,
      [ids](double p) {
        const StateSpace space(2, ids->size());
        const std::vector<double> ps(ids->size(), p);
        return heat_bath_model(Alphabet({0.0, 1.0}), SiteSet::isolated(*ids), bernoulli_product(space, ps));
      },
      "bernoulli");
}

ParamFamily ParamFamily::gibbs_field(Alphabet alphabet, SiteSet sites, Hamiltonian base, double slope,
                                     double offset, double a, double b) {
  auto shared = std::make_shared<const std::tuple<Alphabet, SiteSet, Hamiltonian>>(std::move(alphabet),
                                                                                   std::move(sites), std::move(base));
  return ParamFamily(
      a, b,
      [shared, slope, offset](double p) {
        const auto& [alph, ss, h0] = *shared;
        Hamiltonian h = h0;
        h.field.assign(ss.size(), offset + slope * p);
        const StateSpace space(alph.size(), ss.size());
        return heat_bath_model(alph, ss, gibbs_measure(space, alph, h));
      },
      "gibbs_field");
}

Model ParamFamily::at(double p) const {
  if (!(p >= a_ && p <= b_)) throw Error(ErrorCode::BadArgs, "parameter outside the family interval");
  return builder_(p);
}

MonotoneCertificate certify_monotone(const ParamFamily& family, std::size_t points) {
  if (points < 2) throw Error(ErrorCode::BadArgs, "monotonicity grid needs two points");
  MonotoneCertificate cert;
  std::optional<Model> prev;
  for (std::size_t i = 0; i < points; ++i) {
    const double p = family.a() + (family.b() - family.a()) * static_cast<double>(i) / static_cast<double>(points - 1);
    Model m = family.at(p);
    if (prev) {
      for (std::size_t x = 0; x < m.n_sites(); ++x) {
        for (std::size_t s = 0; s < m.n_states(); ++s) {
          cert.worst_decrease = std::min(cert.worst_decrease, m.kernels().prob(x, s, 1) - prev->kernels().prob(x, s, 1));
        }
      }
    }
    prev.emplace(std::move(m));
  }
  cert.ok = cert.worst_decrease >= -kStructuralTol;
  return cert;
}

void require_heat_bath(const Model& model) {
  const KernelFamily hb = build_heat_bath_kernels(model.space(), model.mu(), model.sites());
  // Finite-range canonicalization can move entries by rounding; compare densely.
  double worst = 0.0;
  for (std::size_t x = 0; x < model.n_sites(); ++x) {
    const auto& a = model.kernels().tables()[x];
    const auto& b = hb.tables()[x];
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  }
  if (worst > kStructuralTol) {
    throw Error(ErrorCode::NotHeatBath, "kernels differ from the conditionals of mu by " + std::to_string(worst));
  }
}

Derivative event_probability_derivative(const ParamFamily& family, const Event& event, double p, double h) {
  auto prob = [&](double q) { return event_probability(family.at(q), event); };
  Derivative d;
  double coarse = difference(prob, p, h, family.a(), family.b());
  double previous = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t k = 1; k <= 12; ++k) {
    h /= 2.0;
    const double fine = difference(prob, p, h, family.a(), family.b());
    const double extrapolated = (4.0 * fine - coarse) / 3.0;
    d.halvings = k;
    d.value = extrapolated;
    if (!std::isnan(previous)) {
      d.error = std::abs(extrapolated - previous);
      if (d.error < 1e-7) {
        d.converged = true;
        return d;
      }
    }
    previous = extrapolated;
    coarse = fine;
  }
  return d;
}

Derivative kernel_derivative_min(const ParamFamily& family, double p, double h) {
  // Kernel tables at the stencil points, cached by parameter value.
  std::vector<std::pair<double, std::vector<std::vector<double>>>> cache;
  auto tables_at = [&](double q) -> const std::vector<std::vector<double>>& {
    for (const auto& [key, t] : cache) {
      if (key == q) return t;
    }
    cache.emplace_back(q, family.at(q).kernels().tables());
    return cache.back().second;
  };
  const Model m = family.at(p);
  const std::size_t q = m.alphabet().size();
  Derivative d;
  d.value = kInf;
  d.converged = true;
  d.halvings = 1;
  for (std::size_t x = 0; x < m.n_sites(); ++x) {
    for (std::size_t s = 0; s < m.n_states(); ++s) {
      auto k = [&](double r) { return tables_at(r)[x][s * q + 1]; };
      const double coarse = difference(k, p, h, family.a(), family.b());
      const double fine = difference(k, p, h / 2.0, family.a(), family.b());
      const double extrapolated = (4.0 * fine - coarse) / 3.0;
      d.value = std::min(d.value, extrapolated);
      d.error = std::max(d.error, std::abs(extrapolated - fine));
    }
  }
  return d;
}

RussoReport russo_check(const ParamFamily& family, const Event& event, double p, double h, double slack) {
  if (!(p - h >= family.a() && p + h <= family.b())) {
    throw Error(ErrorCode::BadArgs, "p +- h must stay inside the family interval");
  }
  const Model model = family.at(p);
  require_binary(model);
  if (!event.certified_increasing() && !is_increasing(model, event)) {
    throw Error(ErrorCode::NotIncreasing, "event '" + event.name() + "' is not increasing");
  }
  require_heat_bath(model);

  RussoReport r;
  r.p = p;
  r.derivative = event_probability_derivative(family, event, p, h);
  r.beta = kernel_derivative_min(family, p);
  double weighted = 0.0;
  double plain = 0.0;
  for (std::size_t x = 0; x < model.n_sites(); ++x) {
    const double piv = pivotal_measure(model, event, x);
    double sup = 0.0;
    for (std::size_t s = 0; s < model.n_states(); ++s) sup = std::max(sup, model.kernels().prob(x, s, 1));
    r.pivotal.push_back(piv);
    r.sup_kernel.push_back(sup);
    weighted += piv / sup;
    plain += piv;
  }
  r.middle = r.beta.value * weighted;
  r.lower = r.beta.value * plain;
  r.pass = r.derivative.converged && within_slack(r.middle, r.derivative.value, slack) &&
           within_slack(r.lower, r.middle, slack);
  return r;
}

ThresholdReport sharp_threshold_check(const ParamFamily& family, const Event& event, double p1, double p2,
                                      std::size_t grid_points, const RhoAuditSettings& rho_settings, double slack) {
  if (!(p1 < p2) || grid_points < 2) throw Error(ErrorCode::BadArgs, "threshold check needs p1 < p2 and two grid points");
  const LogConstant c_orlicz = LogConstant::from_value(kCalibratedOrliczL2Constant);
  ThresholdReport report;
  report.orlicz_constant = kCalibratedOrliczL2Constant;
  report.alpha = kInf;
  report.beta = kInf;
  report.rho = kInf;
  std::size_t n_nbhd = 1;
  bool any_applicable = false;

  for (std::size_t i = 0; i < grid_points; ++i) {
    ThresholdPoint pt;
    pt.p = p1 + (p2 - p1) * static_cast<double>(i) / static_cast<double>(grid_points - 1);
    const Model model = family.at(pt.p);
    require_binary(model);
    if (!event.certified_increasing() && !is_increasing(model, event)) {
      throw Error(ErrorCode::NotIncreasing, "event '" + event.name() + "' is not increasing");
    }
    require_heat_bath(model);
    n_nbhd = std::max(n_nbhd, model.neighborhood_size());
    pt.mu_a = event_probability(model, event);
    for (std::size_t x = 0; x < model.n_sites(); ++x) pt.delta = std::max(pt.delta, pivotal_measure(model, event, x));
    pt.alpha = model.alpha();
    pt.beta = kernel_derivative_min(family, pt.p).value;

    const Generator gen(model);
    const ConstantsReport cr = log_sobolev_upper(gen, rho_settings.restarts, rho_settings.seed);
    const LogSobolevAudit audit =
        audit_log_sobolev(gen, cr.rho_upper, rho_settings.audit_functions, rho_settings.seed, slack);
    pt.rho = audit.rho;
    pt.constant = talagrand_constant(std::pow(pt.alpha, -3.0), model.neighborhood_size(), pt.rho);

    pt.applicable = pt.delta < kE2 * pt.alpha * pt.alpha;
    if (pt.applicable) {
      any_applicable = true;
      const Derivative d = event_probability_derivative(family, event, pt.p, 1e-3);
      pt.derivative = d.value;
      const double var = pt.mu_a * (1.0 - pt.mu_a);
      if (pt.beta > 0.0 && var > 0.0) {
        pt.log_rhs = std::log(pt.beta) + std::log(std::log(kE2 * pt.alpha * pt.alpha / pt.delta)) -
                     std::log(4.0) - c_orlicz.log_value - pt.constant.log_value + std::log(var);
        pt.pass = pt.derivative > 0.0 && std::log(pt.derivative) + std::log1p(slack) >= pt.log_rhs;
      } else {
        pt.log_rhs = -kInf;
        pt.pass = pt.derivative >= -(d.error + 1e-12);
      }
      pt.pass = pt.pass && audit.passed;
      report.differential_pass = report.differential_pass && pt.pass;
    }

    report.delta = std::max(report.delta, pt.delta);
    report.alpha = std::min(report.alpha, pt.alpha);
    report.beta = std::min(report.beta, pt.beta);
    report.rho = std::min(report.rho, pt.rho);
    report.points.push_back(pt);
  }
  if (!any_applicable) {
    throw Error(ErrorCode::ThresholdHypothesisFailed, "delta_p >= e^2 alpha_p^2 at every grid point");
  }
  if (!(report.beta > 0.0)) throw Error(ErrorCode::BadArgs, "the family kernels are not strictly increasing in p");

  const LogConstant c = talagrand_constant(std::pow(report.alpha, -3.0), n_nbhd, report.rho);
  report.c_prime = {std::log(4.0) + c_orlicz.log_value + c.log_value - std::log(report.beta)};
  report.product_lhs = report.points.front().mu_a * (1.0 - report.points.back().mu_a);
  const double log_base = std::log(report.delta) - 2.0 - 2.0 * std::log(report.alpha);
  report.product_vacuous = log_base >= 0.0;
  report.product_log_rhs = (p2 - p1) * std::exp(-report.c_prime.log_value) * log_base;
  report.product_pass =
      report.product_lhs <= 0.0 || std::log(report.product_lhs) <= report.product_log_rhs + std::log1p(slack);
  report.pass = report.differential_pass && report.product_pass;
  return report;
}

KklReport kkl_check(const Model& model, const Event& event, LogConstant c, double slack) {
  require_binary(model);
  require_event_size(model, event);
  const double m = event_probability(model, event);
  const double var = m * (1.0 - m);
  if (!(var > 1e-15)) throw Error(ErrorCode::DegenerateEvent, "mu(A) is 0 or 1");

  KklReport r;
  const FunctionOnOmega ind = event.indicator();
  for (std::size_t x = 0; x < model.n_sites(); ++x) {
    r.lhs = std::max(r.lhs, pivotal_measure(model, event, x));
    if (variance(model.mu(), d_x(model, x, ind)) > 1e-14) ++r.support;
  }
  r.r = static_cast<double>(r.support) / var;
  const double alpha = model.alpha();
  r.second = kE2 * alpha * alpha / 2.0;
  const double inner = std::log(std::pow(alpha, 4.0) / 16.0 * r.r);
  if (inner > 0.0) {
    r.log_first = std::log(inner) - std::log(8.0 * r.r) - c.log_value;
    r.rhs = std::min(std::exp(r.log_first), r.second);
  } else {
    r.log_first = -kInf;
    r.rhs = std::min(0.0, r.second);
  }
  r.pass = within_slack(r.rhs, r.lhs, slack);
  return r;
}

}  // namespace ipslab
