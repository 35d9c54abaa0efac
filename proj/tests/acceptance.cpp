// Acceptance gate: one PASS/FAIL line per criterion, exit 0 iff all pass.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "ipslab/cli.hpp"
#include "ipslab/constants.hpp"
#include "ipslab/functionals.hpp"
#include "ipslab/graphical.hpp"
#include "ipslab/influence.hpp"
#include "ipslab/reference_models.hpp"
#include "ipslab/talagrand.hpp"
#include "ipslab/trees.hpp"

using namespace ipslab;

namespace {

constexpr double kStructuralTol = 1e-9;
constexpr double kSlack = 1e-6;
constexpr double kQuadratureBudget = 1e-6;
constexpr double kRussoEqualityTol = 1e-6;
constexpr double kMcSigmas = 4.0;
constexpr double kMcFraction = 0.99;
constexpr double kFactorizationTol = 1e-12;

struct Verdict {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Audited {
  double kappa;
  double rho_upper;
  LogSobolevAudit audit;
};

Audited audit(const Generator& g) {
  const double kappa = spectral_gap(g);
  const auto upper = log_sobolev_upper(g, 8, 1);
  return {kappa, upper.rho_upper, audit_log_sobolev(g, upper.rho_upper, 500, 2, kSlack)};
}

double inner(const Model& m, const FunctionOnOmega& f, const FunctionOnOmega& g) {
  return m.mu().weights().dot(f.cwiseProduct(g));
}

Verdict structural() {
  double worst = 0.0;
  for (const auto& [name, m] : reference::acceptance_models()) {
    const Generator g(m);
    worst = std::max(worst, check_detailed_balance(m.space(), m.kernels(), m.mu()).worst_violation);
    const auto fs = gaussian_functions(m.n_states(), 100, 101);
    const auto gs = gaussian_functions(m.n_states(), 100, 102);
    for (std::size_t i = 0; i < fs.size(); ++i) {
      const auto& f = fs[i];
      for (std::size_t x = 0; x < m.n_sites(); ++x) {
        worst = std::max(worst, std::abs(m.mu().expectation(psi_x(m, x, f)) - m.mu().expectation(f)));
      }
      worst = std::max(worst, std::abs(dirichlet_form(m, f, f) - dirichlet_energy(m, f)));
      const FunctionOnOmega composed = g.semigroup(0.3, g.semigroup(0.7, f));
      worst = std::max(worst, (g.semigroup(1.0, f) - composed).cwiseAbs().maxCoeff());
      worst = std::max(worst, std::abs(inner(m, g.semigroup(0.8, f), gs[i]) - inner(m, f, g.semigroup(0.8, gs[i]))));
    }
  }
  return {worst <= kStructuralTol, "max deviation " + fmt("%.2e", worst) + " (tol 1e-9)"};
}

Verdict inequality_chain() {
  std::size_t violations = 0;
  std::string rhos;
  for (const auto& [name, m] : reference::acceptance_models()) {
    const Generator g(m);
    const Audited a = audit(g);
    if (!a.audit.passed || a.rho_upper > a.kappa + 1e-8) ++violations;
    for (const auto& f : gaussian_functions(m.n_states(), 100, 201)) {
      if (!poincare_check(m, f, a.kappa, kSlack).pass) ++violations;
      for (double t : {0.1, 0.5, 1.0}) {
        if (!hypercontractivity_check(g, f, a.audit.rho, t, kSlack).pass) ++violations;
      }
    }
    for (const auto& f : audit_functions(m.n_states(), 500, 202)) {
      if (!log_sobolev_check(m, f, a.audit.rho, kSlack).pass) ++violations;
    }
    rhos += " " + name + " kappa=" + fmt("%.4f", a.kappa) + " rho=" + fmt("%.4f", a.audit.rho);
  }
  return {violations == 0, std::to_string(violations) + " violations;" + rhos};
}

Verdict good_constant() {
  std::size_t violations = 0;
  double worst = 0.0;
  for (const auto& [name, m] : reference::acceptance_models()) {
    const Generator g(m);
    const double k = std::pow(m.alpha(), -3.0);
    for (const auto& f : gaussian_functions(m.n_states(), 100, 301)) {
      const auto r = good_constant_check(g, f, k, {0.0, 0.1, 1.0, 10.0}, kSlack);
      violations += r.violations;
      worst = std::max(worst, r.worst_ratio / k);
    }
  }
  return {violations == 0, std::to_string(violations) + " violations; worst ratio / K " + fmt("%.3e", worst)};
}

Verdict talagrand() {
  std::size_t violations = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& [name, m] : reference::acceptance_models()) {
    const Generator g(m);
    const LogConstant c =
        talagrand_constant(std::pow(m.alpha(), -3.0), m.neighborhood_size(), audit(g).audit.rho);
    const LogConstant c1c = LogConstant::from_value(kCalibratedOrliczL2Constant) * c;
    for (const auto& f : gaussian_functions(m.n_states(), 500, 401)) {
      const auto r = verify_talagrand(m, f, c, kSlack);
      if (!r.pass) ++violations;
      worst = std::max(worst, r.log_ratio);
      if (!verify_corollary(m, f, c1c, kSlack).pass) ++violations;
    }
  }
  return {violations == 0, std::to_string(violations) + " violations; worst log ratio " + fmt("%.1f", worst)};
}

Verdict commutation() {
  std::size_t violations = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& [name, m] : reference::acceptance_models()) {
    const Generator g(m);
    const double rho = audit(g).audit.rho;
    for (const auto& f : gaussian_functions(m.n_states(), 100, 501)) {
      for (double t : {0.1, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0}) {
        const auto r = verify_commutation(g, f, t, rho, kSlack);
        if (!r.pass) ++violations;
        worst = std::max(worst, r.log_ratio);
      }
    }
  }
  return {violations == 0, std::to_string(violations) + " violations; worst log ratio " + fmt("%.1f", worst)};
}

Verdict reverse() {
  std::size_t violations = 0;
  double worst = 0.0;
  for (const auto& [name, m] : reference::acceptance_models()) {
    const auto r = reverse_talagrand_check(m, gaussian_functions(m.n_states(), 500, 401), kSlack);
    violations += r.violations;
    if (r.constant < 1.0) ++violations;
    worst = std::max(worst, r.worst_ratio);
  }
  return {violations == 0, std::to_string(violations) + " violations; worst Ent(f^2)/bound " + fmt("%.2e", worst)};
}

Verdict orlicz() {
  std::size_t violations = 0;
  for (const auto& [name, m] : reference::acceptance_models()) {
    const auto& mu = m.mu();
    const auto fs = gaussian_functions(m.n_states(), 200, 701);
    const auto gs = gaussian_functions(m.n_states(), 200, 702);
    for (std::size_t i = 0; i < fs.size(); ++i) {
      const auto& f = fs[i];
      const double phi = orlicz_norm(mu, f, kPhi);
      if (!within_slack(phi, 2.0 * lp_norm(mu, f, 2.0), kSlack)) ++violations;
      if (lp_norm_square_integral(mu, f) > 2.0 * std::exp(4.0) * phi * phi + kQuadratureBudget) ++violations;
      if (!within_slack(orlicz_norm(mu, f.cwiseProduct(gs[i]), kPhi),
                        24.0 * orlicz_norm(mu, f, kExpSq) * lp_norm(mu, gs[i], 2.0), kSlack)) {
        ++violations;
      }
      for (const YoungFunction y : {kPhi, kXSqLog, kExpSq}) {
        if (!within_slack(orlicz_norm(mu, f, y), std::max(1.0, young_integral(mu, f, y)), kSlack)) ++violations;
      }
    }
  }
  return {violations == 0, std::to_string(violations) + " violations over 4 lemmas x 200 pairs x 3 models"};
}

Verdict russo() {
  const auto product = ParamFamily::bernoulli({"a", "b", "c"}, 0.05, 0.95);
  const Model mid = product.at(0.5);
  double worst_gap = 0.0;
  std::size_t failures = 0;
  for (int i = 1; i <= 9; ++i) {
    const double p = i / 10.0;
    const auto r = russo_check(product, dictator_event(mid, 0), p, 1e-3, kSlack);
    double pivotal = 0.0;
    for (double v : r.pivotal) pivotal += v;
    worst_gap = std::max(worst_gap, std::abs(r.derivative.value - pivotal / p));
    if (!r.pass) ++failures;
  }

  Hamiltonian h;
  h.beta = 0.5;
  h.couplings = {{0, 1, 1.0}};
  h.spin_values = {-1.0, 1.0};
  const auto family = ParamFamily::gibbs_field(Alphabet({0.0, 1.0}), SiteSet::complete({"s0", "s1"}), h, 2.0, -1.0,
                                               0.0, 1.0);
  const Model m = family.at(0.5);
  const std::vector<Event> events{
      dictator_event(m, 0), compile_formula(m, Formula::all_of({Formula::atom(0), Formula::atom(1)}), "and"),
      compile_formula(m, Formula::any_of({Formula::atom(0), Formula::atom(1)}), "or")};
  for (const Event& e : events) {
    for (int i = 1; i <= 9; ++i) {
      const auto r = russo_check(family, e, i / 10.0, 1e-3, kSlack);
      if (!r.pass) ++failures;
    }
  }
  return {worst_gap <= kRussoEqualityTol && failures == 0,
          "dictator equality gap " + fmt("%.2e", worst_gap) + " (tol 1e-6); " + std::to_string(failures) +
              " lower-bound failures over 27 dependent-family points"};
}

Verdict sandwich_and_kkl() {
  std::size_t violations = 0;
  std::size_t kkl_checked = 0;
  for (const auto& [name, m] : reference::acceptance_models()) {
    const Generator g(m);
    const LogConstant c =
        talagrand_constant(std::pow(m.alpha(), -3.0), m.neighborhood_size(), audit(g).audit.rho);
    std::vector<Event> events;
    for (const auto& mask : random_events(m.n_states(), 50, 901)) events.emplace_back(mask);
    events.push_back(dictator_event(m, 0));
    events.push_back(majority_event(m));
    for (const Event& e : events) {
      for (std::size_t x = 0; x < m.n_sites(); ++x) {
        for (double q : {1.0, 2.0}) {
          if (!dx_indicator_bounds(m, e, x, q, kSlack).pass) ++violations;
        }
      }
      const double pa = m.mu().expectation(e.indicator());
      if (pa * (1.0 - pa) <= 1e-15) continue;
      ++kkl_checked;
      if (!kkl_check(m, e, c, kSlack).pass) ++violations;
    }
  }
  return {violations == 0,
          std::to_string(violations) + " violations; KKL on " + std::to_string(kkl_checked) + " nondegenerate events"};
}

Verdict graphical() {
  const Model ring = reference::ising_ring3();
  const Generator g(ring);
  std::size_t within = 0;
  std::size_t total = 0;
  for (const auto& f : gaussian_functions(ring.n_states(), 5, 1001)) {
    const auto est = mc_semigroup(ring, 1.0, f, 10000, 1002, 2);
    const FunctionOnOmega exact = g.semigroup(1.0, f);
    for (Eigen::Index i = 0; i < f.size(); ++i, ++total) {
      if (std::abs(est.estimate[i] - exact[i]) <= kMcSigmas * est.std_err[i] + 1e-12) ++within;
    }
  }
  const double fraction = static_cast<double>(within) / static_cast<double>(total);

  RngStream rng(1003, 0);
  double worst = 0.0;
  std::size_t order_ok = 0;
  const auto fs = gaussian_functions(ring.n_states(), 100, 1004);
  for (const auto& f : fs) {
    const auto whole = sample_ppp(ring, 4.0, rng);
    const double split = 4.0 * rng.uniform();
    std::vector<PoissonPoint> a;
    std::vector<PoissonPoint> b;
    for (const auto& pt : whole.points()) (pt.time < split ? a : b).push_back(pt);
    const auto r = check_factorization(ring, PoissonRealization(a, 4.0, 3), PoissonRealization(b, 4.0, 3), f);
    worst = std::max(worst, r.max_deviation);
    if (r.ok) ++order_ok;
  }
  return {fraction >= kMcFraction && worst <= kFactorizationTol && order_ok == fs.size(),
          "MC within 4 sigma on " + fmt("%.3f", fraction) + " of entries; factorization deviation " +
              fmt("%.2e", worst)};
}

Verdict trees() {
  bool ok = true;
  std::size_t combs = 0;
  for (std::size_t n = 1; n <= 8; ++n) {
    const auto all = enumerate_trees(n);
    ok = ok && BigInt(all.size()) == catalan(n - 1);
    const Rational bound = mass_bound_coefficient(n);
    for (const auto& t : all) {
      const auto poly = tree_mass_polynomial(t);
      ok = ok && poly.degree() == 2 * n - 2 && poly.coefficients().back() <= bound;
    }
    FullBinaryTree left;
    FullBinaryTree right;
    for (std::size_t k = 1; k < n; ++k) {
      left = FullBinaryTree::join(left, FullBinaryTree());
      right = FullBinaryTree::join(FullBinaryTree(), right);
    }
    const bool attained = tree_mass_polynomial(left).coefficients().back() == bound &&
                          tree_mass_polynomial(right).coefficients().back() == bound;
    ok = ok && attained;
    combs += attained ? 1 : 0;
    const auto d = check_decomposition(n);
    ok = ok && d.ok && d.min_multiplicity == 1 && d.max_multiplicity == 1;
    const auto [lhs, rhs] = catalan_identity_sides(n);
    ok = ok && lhs == rhs;
  }
  return {ok, "counts, mass bound, comb equality (" + std::to_string(combs) +
                  "/8), decomposition multiplicity 1, exact Catalan identity for n <= 8"};
}

Verdict reproducibility() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "ipslab_acceptance";
  fs::remove_all(root);
  const fs::path cfg = root / "model.json";
  fs::create_directories(root);
  std::ofstream(cfg) << R"({"version": 1, "alphabet": [0, 1], "sites": ["r0", "r1", "r2"],
    "kernel": {"type": "heat_bath", "hamiltonian": {"beta": 0.5, "spins": [-1, 1],
      "couplings": [["r0", "r1", 1.0], ["r1", "r2", 1.0], ["r2", "r0", 1.0]]}}})";

  std::ostringstream log;
  bool ok = true;
  for (const std::string sub : {"simulate", "all"}) {
    cli::RunFlags flags;
    flags.config = cfg.string();
    flags.seed = 12;
    flags.workers = 3;
    flags.out = (root / (sub + "_first")).string();
    const auto first = cli::run(sub, flags, log);
    const auto again = cli::replay((root / (sub + "_first") / "report.json").string(),
                                   (root / (sub + "_replay")).string(), log);
    ok = ok && first.exit_code == cli::kExitPass && again.exit_code == cli::kExitPass &&
         first.report["results"]["simulate"]["estimate"] == again.report["results"]["simulate"]["estimate"] &&
         cli::report_bytes(first.report) == cli::report_bytes(again.report);
  }
  return {ok, "simulate and all replayed from their manifests byte for byte"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"structural identities", structural},
      {"Poincare, log-Sobolev and hypercontractivity chain", inequality_chain},
      {"good-function constant K = alpha^-3", good_constant},
      {"Talagrand inequality and its L2 corollary", talagrand},
      {"gradient commutation bound", commutation},
      {"reverse Talagrand bound on Ent(f^2)", reverse},
      {"Orlicz norm lemmas", orlicz},
      {"Russo formula", russo},
      {"indicator sandwich and KKL bound", sandwich_and_kkl},
      {"graphical construction", graphical},
      {"tree combinatorics", trees},
      {"manifest reproducibility", reproducibility},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    std::printf("criterion %2zu %s  %s: %s\n", i + 1, v.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                v.detail.c_str());
    std::fflush(stdout);
    if (!v.pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
