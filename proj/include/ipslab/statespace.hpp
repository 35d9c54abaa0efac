#pragma once

// Finite configuration spaces Omega = E^G, resampling kernel families and
// their reference measures.

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ipslab/error.hpp"

namespace ipslab {

/// Real-valued function on the enumerated configuration space.
using FunctionOnOmega = Eigen::VectorXd;

inline constexpr std::size_t kDefaultStateCap = std::size_t{1} << 20;
inline constexpr double kNormalizationTol = 1e-12;
inline constexpr double kStructuralTol = 1e-10;

class Alphabet {
 public:
  explicit Alphabet(std::vector<double> symbols);

  [[nodiscard]] std::size_t size() const noexcept { return symbols_.size(); }
  [[nodiscard]] double value(std::size_t index) const { return symbols_.at(index); }
  [[nodiscard]] std::optional<std::size_t> index_of(double value) const;
  [[nodiscard]] const std::vector<double>& symbols() const noexcept { return symbols_; }
  /// True for E = {0, 1} in that order; the influence module requires it.
  [[nodiscard]] bool is_binary01() const noexcept;

  friend bool operator==(const Alphabet&, const Alphabet&) = default;

 private:
  std::vector<double> symbols_;
};

/// Finite ordered list of sites with a declared dependency neighborhood per
/// site. `includes_self` records whether each list contains its own site.
class SiteSet {
 public:
  SiteSet(std::vector<std::string> ids, std::vector<std::vector<std::size_t>> neighborhoods,
          bool includes_self = false);

  /// Sites with neighborhoods {x} only (independent spins).
  static SiteSet isolated(std::vector<std::string> ids);
  /// Every site declares every other site as a neighbor.
  static SiteSet complete(std::vector<std::string> ids);

  [[nodiscard]] std::size_t size() const noexcept { return ids_.size(); }
  [[nodiscard]] const std::string& id(std::size_t x) const { return ids_.at(x); }
  [[nodiscard]] const std::vector<std::string>& ids() const noexcept { return ids_; }
  /// Throws UnknownSite.
  [[nodiscard]] std::size_t index_of(std::string_view id) const;
  [[nodiscard]] const std::vector<std::size_t>& neighborhood(std::size_t x) const {
    return neighborhoods_.at(x);
  }
  [[nodiscard]] bool includes_self() const noexcept { return includes_self_; }
  /// Declared neighborhood of x with x itself added, sorted.
  [[nodiscard]] std::vector<std::size_t> closed_neighborhood(std::size_t x) const;
  /// max_x |N(x) u {x}|, the |N| entering the Talagrand and commutation constants.
  [[nodiscard]] std::size_t neighborhood_size() const;

 private:
  std::vector<std::string> ids_;
  std::vector<std::vector<std::size_t>> neighborhoods_;
  bool includes_self_;
};

/// A configuration as symbol indices in site order.
using Configuration = std::vector<std::size_t>;

/// Index arithmetic for the lexicographic enumeration: the first site is the
/// most significant digit, symbols are ordered as in the alphabet.
class StateSpace {
 public:
  StateSpace(std::size_t alphabet_size, std::size_t n_sites, std::size_t cap = kDefaultStateCap);

  [[nodiscard]] std::size_t size() const noexcept { return size_; }
  [[nodiscard]] std::size_t n_sites() const noexcept { return strides_.size(); }
  [[nodiscard]] std::size_t alphabet_size() const noexcept { return q_; }

  [[nodiscard]] std::size_t digit(std::size_t state, std::size_t site) const noexcept {
    return (state / strides_[site]) % q_;
  }
  [[nodiscard]] std::size_t with_digit(std::size_t state, std::size_t site,
                                       std::size_t symbol) const noexcept {
    return state - digit(state, site) * strides_[site] + symbol * strides_[site];
  }
  [[nodiscard]] Configuration configuration(std::size_t state) const;
  [[nodiscard]] std::size_t index(const Configuration& config) const;

  friend bool operator==(const StateSpace&, const StateSpace&) = default;

 private:
  std::size_t q_;
  std::size_t size_;
  std::vector<std::size_t> strides_;
};

/// All configurations in lexicographic order. Throws CapExceeded when
/// |E|^|G| exceeds `cap`.
std::vector<Configuration> enumerate_states(const Alphabet& alphabet, const SiteSet& sites,
                                            std::size_t cap = kDefaultStateCap);

/// Probability vector over Omega.
class Measure {
 public:
  /// Validates nonnegativity and normalization within 1e-12.
  explicit Measure(Eigen::VectorXd weights);

  [[nodiscard]] const Eigen::VectorXd& weights() const noexcept { return weights_; }
  [[nodiscard]] double operator[](std::size_t i) const { return weights_[static_cast<Eigen::Index>(i)]; }
  [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(weights_.size()); }
  [[nodiscard]] bool strictly_positive() const noexcept { return strictly_positive_; }
  [[nodiscard]] double expectation(const FunctionOnOmega& f) const { return weights_.dot(f); }

 private:
  Eigen::VectorXd weights_;
  bool strictly_positive_;
};

Measure uniform_measure(std::size_t n_states);
/// Product of independent Bernoulli(p_x) spins on E = {0, 1}.
Measure bernoulli_product(const StateSpace& space, std::span<const double> p);

struct Coupling {
  std::size_t a;
  std::size_t b;
  double strength;
};

/// mu(eta) proportional to exp(beta * (sum_J J s(a) s(b) + sum_x h_x s(x))), where
/// s maps symbol indices to `spin_values` (the alphabet values by default).
struct Hamiltonian {
  double beta = 1.0;
  std::vector<double> field;       // one per site; empty means zero field
  std::vector<Coupling> couplings;
  std::vector<double> spin_values;  // one per symbol; empty means alphabet values
};

Measure gibbs_measure(const StateSpace& space, const Alphabet& alphabet, const Hamiltonian& h);

/// Resampling kernels mu_{x,eta} stored densely: for every site a row-major
/// |Omega| x |E| table. Rows are normalized and the family is finite range with
/// respect to its certificate neighborhoods.
class KernelFamily {
 public:
  /// Validates normalization, derives the minimal dependency sets by exhaustive
  /// agreement testing (tolerance 1e-12), canonicalizes rows so the finite-range
  /// property holds exactly, and checks the dependency sets against the
  /// declared neighborhoods. Throws FiniteRangeViolation or InvalidModel.
  static KernelFamily from_table(const StateSpace& space, const SiteSet& declared,
                                 std::vector<std::vector<double>> tables);

  [[nodiscard]] double prob(std::size_t x, std::size_t state, std::size_t symbol) const {
    return tables_[x][state * q_ + symbol];
  }
  [[nodiscard]] std::span<const double> row(std::size_t x, std::size_t state) const {
    return {tables_[x].data() + state * q_, q_};
  }
  [[nodiscard]] std::size_t n_sites() const noexcept { return tables_.size(); }
  [[nodiscard]] std::size_t alphabet_size() const noexcept { return q_; }
  /// Sites (possibly including x) the kernel at x actually depends on.
  [[nodiscard]] const std::vector<std::size_t>& dependencies(std::size_t x) const {
    return dependencies_.at(x);
  }
  [[nodiscard]] const std::vector<std::vector<double>>& tables() const noexcept { return tables_; }
  [[nodiscard]] double min_prob() const noexcept;

 private:
  KernelFamily() = default;
  std::size_t q_ = 0;
  std::vector<std::vector<double>> tables_;
  std::vector<std::vector<std::size_t>> dependencies_;
};

/// Heat-bath kernels mu_{x,xi}(a) = mu(eta(x) = a | eta = xi off x). Throws
/// ZeroMass when a conditioning event has no mass.
KernelFamily build_heat_bath_kernels(const StateSpace& space, const Measure& mu,
                                     const SiteSet& sites);

struct DetailedBalanceReport {
  bool ok = false;
  double worst_violation = 0.0;
  std::size_t worst_site = 0;
  std::size_t worst_state = 0;
  std::size_t worst_symbol = 0;
};

DetailedBalanceReport check_detailed_balance(const StateSpace& space, const KernelFamily& kernels,
                                             const Measure& mu);

/// The unique invariant probability of the generator built from `kernels`.
/// Throws NotErgodic when the null space of L^T has dimension > 1 (1e-9).
Measure stationary_measure(const StateSpace& space, const KernelFamily& kernels);

/// Finite interacting particle system: the pair (L, mu) with L built from the
/// kernel family. Construction verifies detailed balance.
class Model {
 public:
  Model(Alphabet alphabet, SiteSet sites, KernelFamily kernels, Measure mu);

  [[nodiscard]] const Alphabet& alphabet() const noexcept { return alphabet_; }
  [[nodiscard]] const SiteSet& sites() const noexcept { return sites_; }
  [[nodiscard]] const StateSpace& space() const noexcept { return space_; }
  [[nodiscard]] const KernelFamily& kernels() const noexcept { return kernels_; }
  [[nodiscard]] const Measure& mu() const noexcept { return mu_; }
  [[nodiscard]] std::size_t n_states() const noexcept { return space_.size(); }
  [[nodiscard]] std::size_t n_sites() const noexcept { return sites_.size(); }
  /// min over x, eta, e of mu_{x,eta}(e).
  [[nodiscard]] double alpha() const noexcept { return alpha_; }
  [[nodiscard]] std::size_t neighborhood_size() const { return sites_.neighborhood_size(); }

 private:
  Alphabet alphabet_;
  SiteSet sites_;
  StateSpace space_;
  KernelFamily kernels_;
  Measure mu_;
  double alpha_;
};

/// Heat-bath model of a strictly positive measure, checked against the
/// declared neighborhoods of `sites`.
Model heat_bath_model(Alphabet alphabet, SiteSet sites, const Measure& mu);
/// Heat-bath model whose neighborhoods are the derived dependency sets.
Model heat_bath_model(Alphabet alphabet, std::vector<std::string> ids, const Measure& mu);

/// Disjoint union of the site sets; mu is the product and each kernel acts on
/// its own component. Throws SiteClash on identifier collisions and
/// BadAlphabet when the alphabets differ.
Model product_model(const Model& first, const Model& second);

}  // namespace ipslab
