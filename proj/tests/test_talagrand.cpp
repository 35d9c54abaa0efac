#include <numbers>

#include "helpers.hpp"
#include "ipslab/constants.hpp"
#include "ipslab/functionals.hpp"
#include "ipslab/influence.hpp"
#include "ipslab/reference_models.hpp"
#include "ipslab/talagrand.hpp"
#include "oracles.hpp"

using namespace ipslab;

TEST_CASE("Talagrand constant") {
  // n = 1, K = 1, rho = 1: 4 e^{288} sqrt(2) / (1 - e^{-1}) * (e / 2) * 2 e^4.
  const double expected = std::log(4.0) + 288.0 + 0.5 * std::log(2.0) - std::log(1.0 - std::exp(-1.0)) +
                          1.0 - std::log(2.0) + std::log(2.0) + 4.0;
  CHECK(talagrand_constant(1.0, 1, 1.0).log_value == doctest::Approx(expected).epsilon(1e-14));
  CHECK(talagrand_constant(1.0, 1, 2.0).log_value < talagrand_constant(1.0, 1, 1.0).log_value);
  CHECK(talagrand_constant(3.0, 2, 0.4).log_value ==
        doctest::Approx(talagrand_constant(1.0, 2, 0.4).log_value + std::log(3.0)));
  CHECK_CODE(talagrand_constant(0.0, 1, 1.0), ErrorCode::BadArgs);
  CHECK_CODE(talagrand_constant(1.0, 0, 1.0), ErrorCode::BadArgs);
  CHECK_CODE(talagrand_constant(1.0, 1, 0.0), ErrorCode::BadArgs);
  CHECK(commutation_constant(1).log_value == doctest::Approx(std::log(2.0) + 288.0));
  CHECK(std::isinf(talagrand_constant(1.0, 3, 1.0).value()));
}

TEST_CASE("log-space comparisons") {
  CHECK(log_leq(0.0, {1e4}, 0.0, 1e-6));
  CHECK_FALSE(log_leq(1.0, {0.0}, 0.0, 1e-6));
  CHECK(log_leq(2.0, {std::log(2.0)}, 1.0, 1e-6));
  CHECK_FALSE(log_leq(2.0 * (1 + 1e-5), {std::log(2.0)}, 1.0, 1e-6));
}

TEST_CASE("verify_talagrand") {
  const Model ring = reference::ising_ring3();
  const Generator g(ring);
  const double rho = audit_log_sobolev(g, log_sobolev_upper(g, 4, 2).rho_upper, 500, 2).rho;
  const LogConstant c = talagrand_constant(std::pow(ring.alpha(), -3.0), ring.neighborhood_size(), rho);
  const auto cst = verify_talagrand(ring, FunctionOnOmega::Constant(8, 3.0), c);
  CHECK(cst.pass);
  CHECK(cst.lhs == doctest::Approx(0.0));
  for (const auto& f : randoms(8, 500)) {
    const auto r = verify_talagrand(ring, f, c);
    CHECK(r.pass);
    for (double t : r.rhs_terms) CHECK(t >= 0.0);
  }

  // Dictator on a Bernoulli product: both sides by hand.
  const Model prod = ParamFamily::bernoulli({"a", "b"}, 0.1, 0.9).at(0.4);
  FunctionOnOmega dict(4);
  for (std::size_t s = 0; s < 4; ++s) dict[static_cast<Eigen::Index>(s)] = static_cast<double>(prod.space().digit(s, 0));
  const Generator gp(prod);
  const double rho_p = audit_log_sobolev(gp, log_sobolev_upper(gp, 2, 1).rho_upper, 200, 1).rho;
  const auto r = verify_talagrand(prod, dict, talagrand_constant(std::pow(prod.alpha(), -3.0), 1, rho_p));
  CHECK(r.pass);
  CHECK(r.lhs == doctest::Approx(0.24));
  CHECK(r.rhs_terms[1] == doctest::Approx(0.0));
  CHECK(r.log_ratio < -100.0);
}

TEST_CASE("Talagrand tensorizes over product models") {
  const Model m1 = reference::ising_pair(0.5, 1.0, 0.0, {"a0", "a1"});
  const Model m2 = reference::ising_pair(0.5, 1.0, 0.3, {"b0", "b1"});
  const Model p = product_model(m1, m2);
  auto audited = [](const Model& m) {
    const Generator g(m);
    return audit_log_sobolev(g, log_sobolev_upper(g, 3, 4).rho_upper, 300, 4).rho;
  };
  const double rho = std::min(audited(m1), audited(m2));
  const std::size_t n = std::max(m1.neighborhood_size(), m2.neighborhood_size());
  const LogConstant c = talagrand_constant(std::pow(p.alpha(), -3.0), n, rho);
  for (const auto& f : randoms(16, 100)) CHECK(verify_talagrand(p, f, c).pass);
}

TEST_CASE("verify_corollary") {
  const Model ring = reference::ising_ring3();
  const LogConstant c = LogConstant::from_value(kCalibratedOrliczL2Constant) *
                        talagrand_constant(std::pow(ring.alpha(), -3.0), ring.neighborhood_size(), 0.5);
  CHECK(verify_corollary(ring, FunctionOnOmega::Ones(8), c).pass);
  for (const auto& f : randoms(8, 100)) CHECK(verify_corollary(ring, f, c).pass);

  // A function of site a alone has D_b f = 0, so the b term is skipped.
  const Model prod = ParamFamily::bernoulli({"a", "b"}, 0.1, 0.9).at(0.3);
  FunctionOnOmega f(4);
  for (std::size_t s = 0; s < 4; ++s) f[static_cast<Eigen::Index>(s)] = 2.0 * prod.space().digit(s, 0);
  const auto r = verify_corollary(prod, f, c);
  CHECK(r.skipped[0] == 0);
  CHECK(r.skipped[1] == 1);
  CHECK(r.rhs_terms[1] == 0.0);
  CHECK(r.pass);
}

TEST_CASE("verify_commutation") {
  const Model ring = reference::ising_ring3();
  const Generator g(ring);
  const auto f0 = randoms(8, 1, 6).front();
  const auto at0 = verify_commutation(g, f0, 0.0, 0.3);
  CHECK(at0.pass);
  CHECK(at0.lhs == doctest::Approx(at0.rhs_sum));
  CHECK(at0.exponent == 2.0);
  for (const auto& f : randoms(8, 100)) {
    for (double t : {0.1, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0}) {
      CHECK(verify_commutation(g, f, t, 0.3).pass);
      CHECK(verify_commutation(g, f, t, 0.0).pass);
    }
  }
  CHECK_CODE(verify_commutation(g, f0, -1.0, 0.3), ErrorCode::NegativeTime);
  CHECK_CODE(verify_commutation(g, f0, 1.0, -0.1), ErrorCode::BadArgs);
}

TEST_CASE("reverse Talagrand") {
  const Model pair = reference::ising_pair();
  const auto family = randoms(4, 500);
  const auto r = reverse_talagrand_check(pair, family);
  CHECK(r.pass);
  CHECK(r.constant >= 1.0);
  CHECK(r.entropy_form == "Ent(f^2)");
  // The fitted constant is the largest Var / sum ||D_x f||_Phi^2, floored at 1.
  double fit = 1.0;
  for (const auto& f : family) {
    double s = 0.0;
    for (std::size_t x = 0; x < 2; ++x) s += std::pow(orlicz_norm(pair.mu(), d_x(pair, x, f), kPhi), 2);
    fit = std::max(fit, oracle::variance(pair, f) / s);
  }
  CHECK(r.constant == doctest::Approx(fit));

  std::vector<FunctionOnOmega> spikes;
  for (Eigen::Index i = 0; i < 4; ++i) spikes.push_back(FunctionOnOmega::Ones(4) + 0.5 * FunctionOnOmega::Unit(4, i));
  const auto rs = reverse_talagrand_check(pair, spikes);
  CHECK(rs.pass);
  CHECK(rs.worst_ratio < 1e-6);
  CHECK_CODE(reverse_talagrand_check(pair, {}), ErrorCode::BadArgs);
  // Parallel evaluation gives the same report.
  const auto r4 = reverse_talagrand_check(pair, family, 1e-6, 4);
  CHECK(r4.constant == r.constant);
  CHECK(r4.worst_ratio == r.worst_ratio);
}
