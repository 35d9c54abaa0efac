#pragma once

// Spectral gap, log-Sobolev estimates, hypercontractive exponents and the
// good-function constant.

#include <cmath>
#include <cstdint>
#include <vector>

#include "ipslab/operators.hpp"

namespace ipslab {

/// -lambda_2 of the symmetrized generator. Throws NotErgodic when 0 is a
/// repeated eigenvalue (tolerance 1e-9).
double spectral_gap(const Generator& gen);

/// Eigenfunction for the gap eigenvalue, normalized in L^2(mu).
FunctionOnOmega gap_eigenfunction(const Generator& gen);

/// 2 E(f,f) / Ent(f^2); +inf when Ent(f^2) <= 1e-14 ||f||_2^2.
double log_sobolev_ratio(const Model& model, const FunctionOnOmega& f);

struct OptimizerTrace {
  std::size_t starts = 0;
  std::size_t evaluations = 0;
  std::vector<double> start_values;  // best ratio reached from each start
  std::size_t best_start = 0;
};

struct ConstantsReport {
  double kappa = 0.0;
  double rho_upper = 0.0;  // best ratio found; an upper bound on rho
  FunctionOnOmega rho_witness;
  OptimizerTrace trace;
};

/// Multi-start Nelder-Mead minimization of the log-Sobolev ratio. Starts:
/// `restarts` seeded Gaussian vectors, the gap eigenfunction and 1 + 0.1 v;
/// the perturbations 1 + eps v are also evaluated, which pins
/// rho_upper <= kappa up to O(eps^2).
ConstantsReport log_sobolev_upper(const Generator& gen, std::size_t restarts, std::uint64_t seed);

struct LogSobolevAudit {
  double rho = 0.0;  // the audited constant
  std::size_t rounds = 0;  // number of 0.99 reductions applied
  bool passed = false;
  std::size_t functions = 0;
  double worst_excess = 0.0;  // max of Ent(f^2) - (2/rho) E(f,f) at the final rho
};

/// Accepts rho once Ent(f^2) <= (2/rho) E(f,f) holds with relative slack on
/// every audit function, otherwise multiplies rho by 0.99 (at most
/// `max_rounds` times).
LogSobolevAudit audit_log_sobolev(const Generator& gen, double rho, std::size_t n_functions,
                                  std::uint64_t seed, double slack = 1e-6, std::size_t max_rounds = 50);

/// p(t, q) = 1 + (q - 1) e^{-2 rho t}. Throws BadArgs unless t >= 0, q > 1, rho >= 0.
double hypercontract_exponent(double t, double q, double rho);

/// One inequality lhs <= rhs evaluated on one function.
struct InequalityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

/// Var(f) <= E(f,f) / kappa.
InequalityCheck poincare_check(const Model& model, const FunctionOnOmega& f, double kappa, double slack = 1e-6);
/// Ent(f^2) <= (2 / rho) E(f,f).
InequalityCheck log_sobolev_check(const Model& model, const FunctionOnOmega& f, double rho, double slack = 1e-6);
/// ||P_t f||_2 <= ||f||_{p(t, 2)} with p from hypercontract_exponent.
InequalityCheck hypercontractivity_check(const Generator& gen, const FunctionOnOmega& f, double rho, double t,
                                         double slack = 1e-6);

struct GoodConstantReport {
  bool pass = true;
  double worst_ratio = 0.0;  // max over t of E(P_t f) / sum_x ||D_x P_t f||^2
  double worst_t = 0.0;
  std::size_t violations = 0;
};

/// E(P_t f, P_t f) <= K sum_x ||D_x P_t f||_2^2 on every t of the grid.
GoodConstantReport good_constant_check(const Generator& gen, const FunctionOnOmega& f, double K,
                                       const std::vector<double>& t_grid, double slack = 1e-6);

/// lhs <= rhs up to a relative slack and an absolute rounding floor.
inline bool within_slack(double lhs, double rhs, double slack) {
  return lhs <= rhs + slack * std::abs(rhs) + 1e-14;
}

}  // namespace ipslab
