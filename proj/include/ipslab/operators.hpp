#pragma once

#include <Eigen/Dense>

#include <memory>
#include <string_view>

#include "ipslab/statespace.hpp"

namespace ipslab {

/// (Psi_x f)(eta) = sum_a mu_{x,eta}(a) f(eta_{x->a}). Throws UnknownSite.
FunctionOnOmega psi_x(const Model& model, std::size_t x, const FunctionOnOmega& f);
FunctionOnOmega psi_x(const Model& model, std::string_view site, const FunctionOnOmega& f);

/// D_x f = Psi_x f - f.
FunctionOnOmega d_x(const Model& model, std::size_t x, const FunctionOnOmega& f);
FunctionOnOmega d_x(const Model& model, std::string_view site, const FunctionOnOmega& f);

/// L f = sum_x D_x f, without forming the matrix.
FunctionOnOmega apply_generator(const Model& model, const FunctionOnOmega& f);

/// E(f, g) = -int f L g dmu.
double dirichlet_form(const Model& model, const FunctionOnOmega& f, const FunctionOnOmega& g);

/// E(f, f) through the resampling representation
/// 1/2 sum_x int [Psi_x (f - f(eta))^2](eta) mu(d eta), which is free of the
/// cancellation in -int f L f for nearly constant f.
double dirichlet_energy(const Model& model, const FunctionOnOmega& f);

/// sum_x ||D_x f||_2^2.
double derivative_energy(const Model& model, const FunctionOnOmega& f);

/// Dense generator L = sum_x (Psi_x - I) together with the orthogonal
/// eigendecomposition of the symmetrization D^{1/2} L D^{-1/2}, D = diag(mu).
/// Immutable after construction.
class Generator {
 public:
  /// Throws SpectrumFailure when the eigensolver fails or the spectrum is not
  /// that of a reversible Markov generator, InvalidModel when mu has zeros.
  explicit Generator(Model model);

  [[nodiscard]] const Model& model() const noexcept { return *model_; }
  [[nodiscard]] const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
  /// Ascending eigenvalues; the last one is 0.
  [[nodiscard]] const Eigen::VectorXd& eigenvalues() const noexcept { return eigenvalues_; }
  /// Orthonormal eigenvectors of the symmetrized generator, one per column.
  [[nodiscard]] const Eigen::MatrixXd& symmetrized_eigenvectors() const noexcept { return eigenvectors_; }
  /// Right eigenvector of L for eigenvalue index i, normalized in L^2(mu).
  [[nodiscard]] FunctionOnOmega eigenfunction(Eigen::Index i) const;

  /// P_t f via the eigendecomposition. Throws NegativeTime.
  [[nodiscard]] FunctionOnOmega semigroup(double t, const FunctionOnOmega& f) const;

 private:
  std::shared_ptr<const Model> model_;
  Eigen::MatrixXd matrix_;
  Eigen::VectorXd sqrt_mu_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd eigenvectors_;
};

Generator generator_matrix(const Model& model);

inline FunctionOnOmega semigroup_apply(const Generator& gen, double t, const FunctionOnOmega& f) {
  return gen.semigroup(t, f);
}

}  // namespace ipslab
