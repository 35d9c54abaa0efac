#include "ipslab/constants.hpp"

#include <gsl/gsl_multimin.h>
#include <gsl/gsl_vector.h>

#include <algorithm>
#include <limits>
#include <memory>

#include "ipslab/functionals.hpp"
#include "ipslab/sampling.hpp"

namespace ipslab {

namespace {

constexpr double kNullEigenTol = 1e-9;
constexpr double kFlatEntropyTol = 1e-14;

Eigen::Index gap_index(const Generator& gen) {
  const auto& ev = gen.eigenvalues();
  const Eigen::Index n = ev.size();
  if (n < 2) throw Error(ErrorCode::NotErgodic, "a one-state space has no spectral gap");
  if (std::abs(ev[n - 2]) <= kNullEigenTol) {
    throw Error(ErrorCode::NotErgodic, "the eigenvalue 0 is not simple");
  }
  return n - 2;
}

struct Objective {
  const Model* model;
  std::size_t evaluations = 0;
};

double objective_fn(const gsl_vector* x, void* params) {
  auto* obj = static_cast<Objective*>(params);
  ++obj->evaluations;
  const Eigen::Map<const Eigen::VectorXd> f(x->data, static_cast<Eigen::Index>(x->size));
  const double r = log_sobolev_ratio(*obj->model, f);
  return std::isfinite(r) ? r : std::numeric_limits<double>::max();
}

struct MinimizerDeleter {
  void operator()(gsl_multimin_fminimizer* m) const { gsl_multimin_fminimizer_free(m); }
};
struct VectorDeleter {
  void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};

// One Nelder-Mead descent; the result overwrites `start`.
double nelder_mead(Objective& obj, FunctionOnOmega& start) {
  const auto n = static_cast<std::size_t>(start.size());
  std::unique_ptr<gsl_vector, VectorDeleter> x(gsl_vector_alloc(n));
  std::unique_ptr<gsl_vector, VectorDeleter> step(gsl_vector_alloc(n));
  std::unique_ptr<gsl_multimin_fminimizer, MinimizerDeleter> m(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n));

  gsl_multimin_function fn{&objective_fn, n, &obj};
  double best = std::numeric_limits<double>::infinity();
  // Relaunch from the current point with a fresh simplex until the value stalls.
  for (int launch = 0; launch < 6; ++launch) {
    const double scale = start.norm() / std::sqrt(static_cast<double>(n));
    start /= scale;
    for (std::size_t i = 0; i < n; ++i) gsl_vector_set(x.get(), i, start[static_cast<Eigen::Index>(i)]);
    gsl_vector_set_all(step.get(), 0.25);
    gsl_multimin_fminimizer_set(m.get(), &fn, x.get(), step.get());
    for (std::size_t iter = 0; iter < 400 * n; ++iter) {
      if (gsl_multimin_fminimizer_iterate(m.get()) != GSL_SUCCESS) break;
      if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(m.get()), 1e-10) == GSL_SUCCESS) break;
    }
    const double value = gsl_multimin_fminimizer_minimum(m.get());
    const gsl_vector* xm = gsl_multimin_fminimizer_x(m.get());
    for (std::size_t i = 0; i < n; ++i) start[static_cast<Eigen::Index>(i)] = gsl_vector_get(xm, i);
    const bool stalled = best - value <= 1e-13 * std::max(1.0, std::abs(value));
    best = std::min(best, value);
    if (stalled) break;
  }
  return best;
}

}  // namespace

double spectral_gap(const Generator& gen) { return -gen.eigenvalues()[gap_index(gen)]; }

FunctionOnOmega gap_eigenfunction(const Generator& gen) { return gen.eigenfunction(gap_index(gen)); }

double log_sobolev_ratio(const Model& model, const FunctionOnOmega& f) {
  const FunctionOnOmega f2 = f.array().square().matrix();
  const double norm2 = model.mu().expectation(f2);
  if (!(norm2 > 0.0) || !std::isfinite(norm2)) return std::numeric_limits<double>::infinity();
  const double ent = entropy(model.mu(), f2);
  if (!(ent > kFlatEntropyTol * norm2)) return std::numeric_limits<double>::infinity();
  const double r = 2.0 * dirichlet_energy(model, f) / ent;
  return std::isfinite(r) ? r : std::numeric_limits<double>::infinity();
}

ConstantsReport log_sobolev_upper(const Generator& gen, std::size_t restarts, std::uint64_t seed) {
  const Model& model = gen.model();
  ConstantsReport report;
  report.kappa = spectral_gap(gen);
  const FunctionOnOmega v = gap_eigenfunction(gen);
  const auto n = static_cast<Eigen::Index>(model.n_states());

  std::vector<FunctionOnOmega> starts = gaussian_functions(model.n_states(), restarts, seed);
  starts.push_back(v);
  starts.push_back(FunctionOnOmega::Ones(n) + 0.1 * v);

  Objective obj{&model};
  report.rho_upper = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < starts.size(); ++i) {
    FunctionOnOmega f = starts[i];
    const double value = nelder_mead(obj, f);
    report.trace.start_values.push_back(value);
    if (value < report.rho_upper) {
      report.rho_upper = value;
      report.rho_witness = f;
      report.trace.best_start = i;
    }
  }
  // Near-constant directions, where the ratio tends to kappa.
  for (double eps : {1e-3, -1e-3, 1e-4, -1e-4, 1e-5, -1e-5}) {
    const FunctionOnOmega f = FunctionOnOmega::Ones(n) + eps * v;
    const double value = log_sobolev_ratio(model, f);
    ++obj.evaluations;
    if (value < report.rho_upper) {
      report.rho_upper = value;
      report.rho_witness = f;
      report.trace.best_start = starts.size();
    }
  }
  report.trace.starts = starts.size();
  report.trace.evaluations = obj.evaluations;
  // The reported value is the witness's own ratio.
  report.rho_upper = log_sobolev_ratio(model, report.rho_witness);
  return report;
}

LogSobolevAudit audit_log_sobolev(const Generator& gen, double rho, std::size_t n_functions,
                                  std::uint64_t seed, double slack, std::size_t max_rounds) {
  const Model& model = gen.model();
  const auto family = audit_functions(model.n_states(), n_functions, seed);
  std::vector<double> ent(family.size());
  std::vector<double> energy(family.size());
  for (std::size_t i = 0; i < family.size(); ++i) {
    const FunctionOnOmega f = family[i] / lp_norm(model.mu(), family[i], 2.0);
    ent[i] = entropy(model.mu(), f.array().square().matrix());
    energy[i] = dirichlet_energy(model, f);
  }

  LogSobolevAudit audit;
  audit.functions = family.size();
  audit.rho = rho;
  for (;;) {
    audit.worst_excess = -std::numeric_limits<double>::infinity();
    bool ok = true;
    for (std::size_t i = 0; i < family.size(); ++i) {
      const double rhs = 2.0 / audit.rho * energy[i];
      audit.worst_excess = std::max(audit.worst_excess, ent[i] - rhs);
      ok = ok && within_slack(ent[i], rhs, slack);
    }
    if (ok) {
      audit.passed = true;
      return audit;
    }
    if (audit.rounds == max_rounds) return audit;
    audit.rho *= 0.99;
    ++audit.rounds;
  }
}

double hypercontract_exponent(double t, double q, double rho) {
  if (!(t >= 0.0) || !(q > 1.0) || !(rho >= 0.0)) {
    throw Error(ErrorCode::BadArgs, "hypercontract_exponent needs t >= 0, q > 1, rho >= 0");
  }
  return 1.0 + (q - 1.0) * std::exp(-2.0 * rho * t);
}

InequalityCheck poincare_check(const Model& model, const FunctionOnOmega& f, double kappa, double slack) {
  if (!(kappa > 0.0)) throw Error(ErrorCode::BadArgs, "poincare_check needs kappa > 0");
  InequalityCheck c;
  c.lhs = variance(model.mu(), f);
  c.rhs = dirichlet_energy(model, f) / kappa;
  c.pass = within_slack(c.lhs, c.rhs, slack);
  return c;
}

InequalityCheck log_sobolev_check(const Model& model, const FunctionOnOmega& f, double rho, double slack) {
  if (!(rho > 0.0)) throw Error(ErrorCode::BadArgs, "log_sobolev_check needs rho > 0");
  InequalityCheck c;
  c.lhs = entropy(model.mu(), f.array().square().matrix());
  c.rhs = 2.0 / rho * dirichlet_energy(model, f);
  c.pass = within_slack(c.lhs, c.rhs, slack);
  return c;
}

InequalityCheck hypercontractivity_check(const Generator& gen, const FunctionOnOmega& f, double rho, double t,
                                         double slack) {
  const double p = hypercontract_exponent(t, 2.0, rho);
  InequalityCheck c;
  c.lhs = lp_norm(gen.model().mu(), gen.semigroup(t, f), 2.0);
  c.rhs = lp_norm(gen.model().mu(), f, p);
  c.pass = within_slack(c.lhs, c.rhs, slack);
  return c;
}

GoodConstantReport good_constant_check(const Generator& gen, const FunctionOnOmega& f, double K,
                                       const std::vector<double>& t_grid, double slack) {
  if (!(K > 0.0)) throw Error(ErrorCode::BadArgs, "good_constant_check needs K > 0");
  const Model& model = gen.model();
  GoodConstantReport report;
  for (double t : t_grid) {
    const FunctionOnOmega pf = gen.semigroup(t, f);
    const double lhs = dirichlet_energy(model, pf);
    const double rhs = derivative_energy(model, pf);
    if (rhs > 0.0 && lhs / rhs > report.worst_ratio) {
      report.worst_ratio = lhs / rhs;
      report.worst_t = t;
    }
    if (!within_slack(lhs, K * rhs, slack)) {
      report.pass = false;
      ++report.violations;
    }
  }
  return report;
}

}  // namespace ipslab
