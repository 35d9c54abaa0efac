#include "ipslab/operators.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace ipslab {

namespace {

void require_site(const Model& model, std::size_t x) {
  if (x >= model.n_sites()) {
    throw Error(ErrorCode::UnknownSite, "site index " + std::to_string(x) + " is out of range");
  }
}

void require_length(const Model& model, const FunctionOnOmega& f) {
  if (static_cast<std::size_t>(f.size()) != model.n_states()) {
    throw Error(ErrorCode::BadArgs, "function length does not match |Omega|");
  }
}

}  // namespace

FunctionOnOmega psi_x(const Model& model, std::size_t x, const FunctionOnOmega& f) {
  require_site(model, x);
  require_length(model, f);
  const auto& space = model.space();
  const auto& k = model.kernels();
  FunctionOnOmega out(f.size());
  for (std::size_t s = 0; s < space.size(); ++s) {
    double acc = 0.0;
    for (std::size_t a = 0; a < space.alphabet_size(); ++a) {
      acc += k.prob(x, s, a) * f[static_cast<Eigen::Index>(space.with_digit(s, x, a))];
    }
    out[static_cast<Eigen::Index>(s)] = acc;
  }
  return out;
}

FunctionOnOmega psi_x(const Model& model, std::string_view site, const FunctionOnOmega& f) {
  return psi_x(model, model.sites().index_of(site), f);
}

FunctionOnOmega d_x(const Model& model, std::size_t x, const FunctionOnOmega& f) {
  return psi_x(model, x, f) - f;
}

FunctionOnOmega d_x(const Model& model, std::string_view site, const FunctionOnOmega& f) {
  return d_x(model, model.sites().index_of(site), f);
}

FunctionOnOmega apply_generator(const Model& model, const FunctionOnOmega& f) {
  FunctionOnOmega out = FunctionOnOmega::Zero(f.size());
  for (std::size_t x = 0; x < model.n_sites(); ++x) out += d_x(model, x, f);
  return out;
}

double dirichlet_form(const Model& model, const FunctionOnOmega& f, const FunctionOnOmega& g) {
  require_length(model, f);
  return -model.mu().weights().dot(f.cwiseProduct(apply_generator(model, g)));
}

double dirichlet_energy(const Model& model, const FunctionOnOmega& f) {
  require_length(model, f);
  const auto& space = model.space();
  const auto& k = model.kernels();
  double total = 0.0;
  for (std::size_t x = 0; x < model.n_sites(); ++x) {
    for (std::size_t s = 0; s < space.size(); ++s) {
      const double fs = f[static_cast<Eigen::Index>(s)];
      double local = 0.0;
      for (std::size_t a = 0; a < space.alphabet_size(); ++a) {
        const double diff = f[static_cast<Eigen::Index>(space.with_digit(s, x, a))] - fs;
        local += k.prob(x, s, a) * diff * diff;
      }
      total += model.mu()[s] * local;
    }
  }
  return 0.5 * total;
}

double derivative_energy(const Model& model, const FunctionOnOmega& f) {
  const auto& w = model.mu().weights();
  double total = 0.0;
  for (std::size_t x = 0; x < model.n_sites(); ++x) {
    total += w.dot(d_x(model, x, f).array().square().matrix());
  }
  return total;
}

Generator::Generator(Model model) : model_(std::make_shared<const Model>(std::move(model))) {
  const auto& m = *model_;
  if (!m.mu().strictly_positive()) {
    throw Error(ErrorCode::InvalidModel, "the symmetrized generator needs a strictly positive measure");
  }
  const auto& space = m.space();
  const auto n = static_cast<Eigen::Index>(space.size());
  matrix_ = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t x = 0; x < m.n_sites(); ++x) {
    for (std::size_t s = 0; s < space.size(); ++s) {
      const auto i = static_cast<Eigen::Index>(s);
      for (std::size_t a = 0; a < space.alphabet_size(); ++a) {
        matrix_(i, static_cast<Eigen::Index>(space.with_digit(s, x, a))) += m.kernels().prob(x, s, a);
      }
      matrix_(i, i) -= 1.0;
    }
  }

  sqrt_mu_ = m.mu().weights().array().sqrt();
  const Eigen::VectorXd inv_sqrt = sqrt_mu_.cwiseInverse();
  Eigen::MatrixXd sym = sqrt_mu_.asDiagonal() * matrix_ * inv_sqrt.asDiagonal();
  const double asym = (sym - sym.transpose()).cwiseAbs().maxCoeff();
  if (asym > kStructuralTol) {
    std::ostringstream msg;
    msg << "symmetrized generator is not symmetric (deviation " << asym << ")";
    throw Error(ErrorCode::SpectrumFailure, msg.str());
  }
  sym = 0.5 * (sym + sym.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::SpectrumFailure, "eigendecomposition did not converge");
  }
  eigenvalues_ = solver.eigenvalues();
  eigenvectors_ = solver.eigenvectors();
  const double top = eigenvalues_[n - 1];
  if (std::abs(top) > kStructuralTol) {
    std::ostringstream msg;
    msg << "largest eigenvalue " << top << " is not 0";
    throw Error(ErrorCode::SpectrumFailure, msg.str());
  }
}

FunctionOnOmega Generator::eigenfunction(Eigen::Index i) const {
  return eigenvectors_.col(i).cwiseQuotient(sqrt_mu_);
}

FunctionOnOmega Generator::semigroup(double t, const FunctionOnOmega& f) const {
  if (!(t >= 0.0)) throw Error(ErrorCode::NegativeTime, "semigroup time must be nonnegative");
  if (f.size() != sqrt_mu_.size()) throw Error(ErrorCode::BadArgs, "function length does not match |Omega|");
  if (t == 0.0) return f;
  const Eigen::VectorXd coeff = eigenvectors_.transpose() * sqrt_mu_.cwiseProduct(f);
  const Eigen::VectorXd scaled = coeff.cwiseProduct((eigenvalues_ * t).array().exp().matrix());
  return (eigenvectors_ * scaled).cwiseQuotient(sqrt_mu_);
}

Generator generator_matrix(const Model& model) { return Generator(model); }

}  // namespace ipslab
