#pragma once

// Events on {0,1}^G, pivotal sets, Russo's formula for heat-bath families,
// threshold bounds and the KKL-type influence bound.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ipslab/talagrand.hpp"

namespace ipslab {

class Event {
 public:
  Event(std::vector<char> mask, std::string name = {});

  [[nodiscard]] const std::vector<char>& mask() const noexcept { return mask_; }
  [[nodiscard]] bool contains(std::size_t state) const { return mask_.at(state) != 0; }
  [[nodiscard]] std::size_t size() const noexcept { return mask_.size(); }
  [[nodiscard]] const std::string& name() const noexcept { return name_; }
  [[nodiscard]] FunctionOnOmega indicator() const;
  /// Set by certify_increasing.
  [[nodiscard]] bool certified_increasing() const noexcept { return certified_; }

  friend Event certify_increasing(const Model& model, Event event);

 private:
  std::vector<char> mask_;
  std::string name_;
  bool certified_ = false;
};

/// Monotone boolean formula over sites: atoms eta(x) = 1, conjunctions,
/// disjunctions and "at least k of" thresholds.
struct Formula {
  enum class Kind { Site, And, Or, Threshold };
  Kind kind = Kind::Site;
  std::size_t site = 0;
  std::size_t k = 0;
  std::vector<Formula> children;

  static Formula atom(std::size_t site);
  static Formula all_of(std::vector<Formula> children);
  static Formula any_of(std::vector<Formula> children);
  static Formula at_least(std::size_t k, std::vector<Formula> children);

  [[nodiscard]] bool evaluate(const StateSpace& space, std::size_t state) const;
};

/// Throws BadAlphabet unless the model's alphabet is {0, 1}.
void require_binary(const Model& model);

Event compile_formula(const Model& model, const Formula& formula, std::string name = {});
/// Throws BadArgs when a configuration has the wrong length or symbols.
Event event_from_states(const Model& model, const std::vector<Configuration>& states, std::string name = {});

Event dictator_event(const Model& model, std::size_t x);
Event majority_event(const Model& model);
Event parity_event(const Model& model);

/// Exhaustive up-set test over covering pairs eta < eta + e_x.
bool is_increasing(const Model& model, const Event& event);
/// Returns the event flagged increasing. Throws NotIncreasing.
Event certify_increasing(const Model& model, Event event);

/// mu(A_x), A_x = {eta in A : eta^x not in A}.
double pivotal_measure(const Model& model, const Event& event, std::size_t x);

struct IndicatorBoundsReport {
  double pivotal = 0.0;       // mu(A_x)
  double norm_q = 0.0;        // ||D_x 1_A||_q^q
  double lower = 0.0;         // (inf_eta mu_{x,eta}(0))^q mu(A_x); valid for increasing A
  double lower_general = 0.0; // (inf_{eta,e} mu_{x,eta}(e))^q mu(A_x); valid for every A
  double upper = 0.0;         // 2 mu(A_x)
  bool increasing = false;
  bool pass = false;  // lower (increasing A) or lower_general, and upper hold
};

/// Throws BadArgs for q < 1.
IndicatorBoundsReport dx_indicator_bounds(const Model& model, const Event& event, std::size_t x, double q,
                                          double slack = 1e-6);

/// One-parameter family p -> model on [a, b].
class ParamFamily {
 public:
  using Builder = std::function<Model(double)>;
  ParamFamily(double a, double b, Builder builder, std::string description = {});

  /// Independent Bernoulli(p) spins.
  static ParamFamily bernoulli(std::vector<std::string> sites, double a, double b);
  /// Heat-bath dynamics of the Gibbs measure of `base` with every field
  /// entry replaced by offset + slope * p.
  static ParamFamily gibbs_field(Alphabet alphabet, SiteSet sites, Hamiltonian base, double slope,
                                 double offset, double a, double b);

  [[nodiscard]] double a() const noexcept { return a_; }
  [[nodiscard]] double b() const noexcept { return b_; }
  [[nodiscard]] const std::string& description() const noexcept { return description_; }
  /// Throws BadArgs outside [a, b].
  [[nodiscard]] Model at(double p) const;

 private:
  double a_;
  double b_;
  Builder builder_;
  std::string description_;
};

struct MonotoneCertificate {
  bool ok = false;
  double worst_decrease = 0.0;  // most negative step of p -> mu^p_{x,eta}(1)
};

/// p -> mu^p_{x,eta}(1) nondecreasing over `points` equally spaced grid points.
MonotoneCertificate certify_monotone(const ParamFamily& family, std::size_t points);

/// Throws NotHeatBath unless the kernels are the conditionals of mu (1e-10).
void require_heat_bath(const Model& model);

struct Derivative {
  double value = 0.0;
  double error = 0.0;  // last Richardson correction
  std::size_t halvings = 0;
  bool converged = false;
};

/// d/dp mu_p(A) by central differences, Richardson-extrapolated and halved
/// until successive estimates differ by < 1e-7.
Derivative event_probability_derivative(const ParamFamily& family, const Event& event, double p, double h);

/// beta_p = min_{x, eta} d/dp mu^p_{x,eta}(1), step 1e-4 with one Richardson
/// step; the error bar is the largest correction.
Derivative kernel_derivative_min(const ParamFamily& family, double p, double h = 1e-4);

struct RussoReport {
  double p = 0.0;
  Derivative derivative;
  Derivative beta;
  std::vector<double> pivotal;    // mu_p(A_x)
  std::vector<double> sup_kernel; // sup_zeta mu^p_{x,zeta}(1)
  double middle = 0.0;  // beta sum_x mu(A_x) / sup_kernel_x
  double lower = 0.0;   // beta sum_x mu(A_x)
  bool pass = false;
};

/// Throws NotIncreasing, NotHeatBath, BadAlphabet and BadArgs when p +- h
/// leaves [a, b].
RussoReport russo_check(const ParamFamily& family, const Event& event, double p, double h = 1e-3,
                        double slack = 1e-6);

/// Knobs for the per-point log-Sobolev audit inside the threshold check.
struct RhoAuditSettings {
  std::size_t restarts = 4;
  std::size_t audit_functions = 500;
  std::uint64_t seed = 1;
};

struct ThresholdPoint {
  double p = 0.0;
  double mu_a = 0.0;
  double delta = 0.0;  // max_x mu_p(A_x)
  double alpha = 0.0;
  double beta = 0.0;
  double rho = 0.0;    // audited
  LogConstant constant;  // C(alpha^-3, |N|, rho)
  bool applicable = false;  // delta < e^2 alpha^2
  double derivative = 0.0;
  double log_rhs = 0.0;     // log of the differential lower bound; -inf if <= 0
  bool pass = true;
};

struct ThresholdReport {
  std::vector<ThresholdPoint> points;
  double delta = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double rho = 0.0;
  LogConstant c_prime;   // 4 c' C(alpha^-3, |N|, rho) / beta
  double product_lhs = 0.0;  // mu_{p1}(A) (1 - mu_{p2}(A))
  double product_log_rhs = 0.0;
  bool product_vacuous = false;  // delta >= e^2 alpha^2, so the bound exceeds 1
  bool differential_pass = true;
  bool product_pass = true;
  bool pass = true;
  double orlicz_constant = 0.0;  // the calibrated c' used
};

/// Checks the differential inequality at grid points where
/// delta_p < e^2 alpha_p^2 and the endpoint product bound. Throws
/// ThresholdHypothesisFailed when no grid point satisfies the hypothesis.
ThresholdReport sharp_threshold_check(const ParamFamily& family, const Event& event, double p1, double p2,
                                      std::size_t grid_points, const RhoAuditSettings& rho_settings = {},
                                      double slack = 1e-6);

struct KklReport {
  double lhs = 0.0;  // max_x mu(A_x)
  std::size_t support = 0;
  double r = 0.0;
  double log_first = 0.0;  // log of log(alpha^4 R / 16) / (8 C R); -inf if that is <= 0
  double second = 0.0;     // e^2 alpha^2 / 2
  double rhs = 0.0;        // min of the two
  bool pass = false;
};

/// Throws DegenerateEvent when mu(A) is 0 or 1.
KklReport kkl_check(const Model& model, const Event& event, LogConstant c, double slack = 1e-6);

}  // namespace ipslab
