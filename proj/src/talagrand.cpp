#include "ipslab/talagrand.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "ipslab/constants.hpp"
#include "ipslab/functionals.hpp"
#include "ipslab/parallel.hpp"

namespace ipslab {

namespace {

constexpr double kFlatTol = 1e-14;
constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

LogConstant LogConstant::from_value(double v) {
  if (!(v > 0.0)) throw Error(ErrorCode::BadArgs, "log constants must be positive");
  return {std::log(v)};
}

double log_ratio(double lhs, LogConstant c, double rhs) {
  if (lhs <= 0.0) return -kInf;
  if (rhs <= 0.0) return kInf;
  return std::log(lhs) - c.log_value - std::log(rhs);
}

bool log_leq(double lhs, LogConstant c, double rhs, double slack) {
  if (lhs <= 1e-14) return true;
  return log_ratio(lhs, c, rhs) <= std::log1p(slack);
}

double neighborhood_exponent(std::size_t n) {
  const double m = static_cast<double>(n);
  return 72.0 * m * m * (1.0 + m) * (1.0 + m);
}

LogConstant talagrand_constant(double K, std::size_t n, double rho) {
  if (!(K > 0.0) || n == 0 || !(rho > 0.0)) {
    throw Error(ErrorCode::BadArgs, "talagrand_constant needs K > 0, n >= 1, rho > 0");
  }
  using std::log;
  const double ln2 = std::numbers::ln2;
  // Decay step: 4K e^{72n^2(1+n)^2} 2^{T} / (1 - e^{-1}) with T = 1/(2 rho).
  const double decay = log(4.0) + log(K) + neighborhood_exponent(n) + ln2 / (2.0 * rho) - log(-std::expm1(-1.0));
  // Time integral up to T: e / (2 rho).
  const double horizon = 1.0 - log(2.0 * rho);
  // Orlicz integral bound: 2 e^4.
  const double orlicz = ln2 + 4.0;
  return {decay + horizon + orlicz};
}

LogConstant commutation_constant(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::BadArgs, "commutation_constant needs n >= 1");
  return {std::numbers::ln2 + neighborhood_exponent(n)};
}

TalagrandReport verify_talagrand(const Model& model, const FunctionOnOmega& f, LogConstant c, double slack) {
  TalagrandReport r;
  r.constant = c;
  r.lhs = variance(model.mu(), f);
  double sum = 0.0;
  for (std::size_t x = 0; x < model.n_sites(); ++x) {
    const double phi = orlicz_norm(model.mu(), d_x(model, x, f), kPhi);
    r.rhs_terms.push_back(phi * phi);
    sum += phi * phi;
  }
  r.log_ratio = log_ratio(r.lhs, c, sum);
  r.pass = log_leq(r.lhs, c, sum, slack);
  return r;
}

CorollaryReport verify_corollary(const Model& model, const FunctionOnOmega& f, LogConstant c1C, double slack) {
  CorollaryReport r;
  r.constant = c1C;
  r.lhs = variance(model.mu(), f);
  double sum = 0.0;
  for (std::size_t x = 0; x < model.n_sites(); ++x) {
    const FunctionOnOmega dx = d_x(model, x, f);
    const bool flat = variance(model.mu(), dx) <= kFlatTol;
    r.skipped.push_back(flat ? 1 : 0);
    const double term = flat ? 0.0 : talagrand_l2_term(model.mu(), dx);
    r.rhs_terms.push_back(term);
    sum += term;
  }
  r.log_ratio = log_ratio(r.lhs, c1C, sum);
  r.pass = log_leq(r.lhs, c1C, sum, slack);
  return r;
}

CommutationReport verify_commutation(const Generator& gen, const FunctionOnOmega& f, double t, double rho,
                                     double slack) {
  if (!(t >= 0.0)) throw Error(ErrorCode::NegativeTime, "commutation time must be nonnegative");
  if (!(rho >= 0.0)) throw Error(ErrorCode::BadArgs, "commutation needs rho >= 0");
  const Model& model = gen.model();
  CommutationReport r;
  r.t = t;
  r.exponent = hypercontract_exponent(t, 2.0, rho);
  r.lhs = derivative_energy(model, gen.semigroup(t, f));
  for (std::size_t x = 0; x < model.n_sites(); ++x) {
    const double norm = lp_norm(model.mu(), d_x(model, x, f), r.exponent);
    r.rhs_sum += norm * norm;
  }
  r.constant = {commutation_constant(model.neighborhood_size()).log_value + t * std::numbers::ln2};
  r.log_ratio = log_ratio(r.lhs, r.constant, r.rhs_sum);
  r.pass = log_leq(r.lhs, r.constant, r.rhs_sum, slack);
  return r;
}

ReverseTalagrandReport reverse_talagrand_check(const Model& model, const std::vector<FunctionOnOmega>& family,
                                               double slack, std::size_t workers) {
  if (family.empty()) throw Error(ErrorCode::BadArgs, "reverse_talagrand_check needs a nonempty family");
  const std::size_t m = family.size();
  std::vector<double> fit(m, 0.0);
  std::vector<double> energy(m, 0.0);
  ReverseTalagrandReport r;
  r.entropy.assign(m, 0.0);
  parallel_for(m, workers, [&](std::size_t i) {
    const FunctionOnOmega& f = family[i];
    const double var = variance(model.mu(), f);
    double sum = 0.0;
    for (std::size_t x = 0; x < model.n_sites(); ++x) {
      const double phi = orlicz_norm(model.mu(), d_x(model, x, f), kPhi);
      sum += phi * phi;
    }
    fit[i] = sum > 0.0 ? var / sum : 0.0;
    energy[i] = dirichlet_energy(model, f);
    r.entropy[i] = entropy(model.mu(), f.array().square().matrix());
  });

  for (std::size_t i = 0; i < m; ++i) {
    if (fit[i] > r.constant) {
      r.constant = fit[i];
      r.constant_witness = i;
    }
  }
  r.bound.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    r.bound[i] = kReverseTalagrandFactor * r.constant * energy[i];
    const double ratio = r.bound[i] > 0.0 ? r.entropy[i] / r.bound[i] : (r.entropy[i] > 0.0 ? kInf : 0.0);
    if (ratio > r.worst_ratio) {
      r.worst_ratio = ratio;
      r.worst_index = i;
    }
    if (!within_slack(r.entropy[i], r.bound[i], slack)) ++r.violations;
  }
  r.pass = r.violations == 0;
  return r;
}

}  // namespace ipslab
