#pragma once

// Talagrand-type variance bounds, the semigroup/derivative commutation bound
// and the log-Sobolev estimate recovered from a Talagrand constant.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ipslab/operators.hpp"

namespace ipslab {

/// Positive constant held through its natural logarithm; the constants below
/// overflow a double already for one-site neighborhoods.
struct LogConstant {
  double log_value = 0.0;

  [[nodiscard]] double value() const { return std::exp(log_value); }  // may be +inf
  static LogConstant from_value(double v);
  friend LogConstant operator*(LogConstant a, LogConstant b) { return {a.log_value + b.log_value}; }
};

/// lhs <= c * rhs with relative slack, decided in log space. lhs <= 1e-14
/// always passes.
bool log_leq(double lhs, LogConstant c, double rhs, double slack);
/// log(lhs / (c * rhs)); -inf for lhs = 0, +inf for rhs = 0 < lhs.
double log_ratio(double lhs, LogConstant c, double rhs);

/// 72 n^2 (1 + n)^2, the exponent shared by both constants below.
double neighborhood_exponent(std::size_t n);

/// C = [4K e^{72n^2(1+n)^2} 2^{1/(2 rho)} / (1 - e^{-1})] (e / (2 rho)) 2e^4.
/// Throws BadArgs unless K > 0, n >= 1, rho > 0.
LogConstant talagrand_constant(double K, std::size_t n, double rho);

/// C~ = 2 e^{72 n^2 (1 + n)^2}. Throws BadArgs for n = 0.
LogConstant commutation_constant(std::size_t n);

struct TalagrandReport {
  double lhs = 0.0;               // Var(f)
  std::vector<double> rhs_terms;  // ||D_x f||_Phi^2 per site
  LogConstant constant;
  double log_ratio = 0.0;  // log(lhs / (C sum rhs_terms))
  bool pass = false;
};

/// Var(f) <= C sum_x ||D_x f||_Phi^2.
TalagrandReport verify_talagrand(const Model& model, const FunctionOnOmega& f, LogConstant c,
                                 double slack = 1e-6);

struct CorollaryReport {
  double lhs = 0.0;
  std::vector<double> rhs_terms;    // ||D_x f||_2^2 / (1 + log(||D_x f||_2 / ||D_x f||_1))
  std::vector<char> skipped;        // 1 where D_x f is a.s. constant
  LogConstant constant;
  double log_ratio = 0.0;
  bool pass = false;
};

/// Var(f) <= c1C sum_x ||D_x f||_2^2 / (1 + log(||D_x f||_2 / ||D_x f||_1)),
/// dropping sites where Var(D_x f) <= 1e-14.
CorollaryReport verify_corollary(const Model& model, const FunctionOnOmega& f, LogConstant c1C,
                                 double slack = 1e-6);

struct CommutationReport {
  double t = 0.0;
  double exponent = 0.0;  // p(t) = 1 + e^{-2 rho t}
  double lhs = 0.0;       // sum_x ||D_x P_t f||_2^2
  double rhs_sum = 0.0;   // sum_x ||D_x f||_{p(t)}^2
  LogConstant constant;   // C~ 2^t
  double log_ratio = 0.0;
  bool pass = false;
};

/// sum_x ||D_x P_t f||_2^2 <= C~ 2^t sum_x ||D_x f||_{p(t)}^2. Throws
/// NegativeTime, BadArgs for rho < 0.
CommutationReport verify_commutation(const Generator& gen, const FunctionOnOmega& f, double t, double rho,
                                     double slack = 1e-6);

inline constexpr double kReverseTalagrandFactor = 13.0 / 4.0 * 700.0 * 700.0 * 700.0 * 700.0;

struct ReverseTalagrandReport {
  double constant = 1.0;  // max(1, max_f Var(f) / sum_x ||D_x f||_Phi^2)
  std::size_t constant_witness = 0;
  std::vector<double> entropy;  // Ent(f^2)
  std::vector<double> bound;    // (13/4) 700^4 C E(f, f)
  double worst_ratio = 0.0;     // max Ent / bound
  std::size_t worst_index = 0;
  std::size_t violations = 0;
  bool pass = false;
  /// The checked form: the entropy of f^2, not of f.
  std::string entropy_form = "Ent(f^2)";
};

/// Fits the Talagrand constant on the family, then checks
/// Ent(f^2) <= (13/4) 700^4 C E(f, f) on every member. Throws BadArgs for an
/// empty family.
ReverseTalagrandReport reverse_talagrand_check(const Model& model, const std::vector<FunctionOnOmega>& family,
                                               double slack = 1e-6, std::size_t workers = 1);

}  // namespace ipslab
