#include "ipslab/reference_models.hpp"

#include "ipslab/operators.hpp"
#include "ipslab/sampling.hpp"

namespace ipslab::reference {

Model single_bernoulli(double p) {
  const StateSpace space(2, 1);
  const std::vector<double> ps{p};
  return heat_bath_model(Alphabet({0.0, 1.0}), SiteSet::isolated({"x"}), bernoulli_product(space, ps));
}

Model ising_ring3(double beta, double coupling) {
  const Alphabet alphabet({0.0, 1.0});
  const StateSpace space(2, 3);
  Hamiltonian h;
  h.beta = beta;
  h.couplings = {{0, 1, coupling}, {1, 2, coupling}, {2, 0, coupling}};
  h.spin_values = {-1.0, 1.0};
  SiteSet sites({"r0", "r1", "r2"}, {{1, 2}, {0, 2}, {0, 1}});
  return heat_bath_model(alphabet, std::move(sites), gibbs_measure(space, alphabet, h));
}

Model ising_pair(double beta, double coupling, double field, std::vector<std::string> ids) {
  const Alphabet alphabet({0.0, 1.0});
  const StateSpace space(2, 2);
  Hamiltonian h;
  h.beta = beta;
  h.field = {field, field};
  h.couplings = {{0, 1, coupling}};
  h.spin_values = {-1.0, 1.0};
  SiteSet sites(std::move(ids), {{1}, {0}});
  return heat_bath_model(alphabet, std::move(sites), gibbs_measure(space, alphabet, h));
}

Model product_of_pairs() {
  return product_model(ising_pair(0.5, 1.0, 0.0, {"a0", "a1"}), ising_pair(0.5, 1.0, 0.3, {"b0", "b1"}));
}

std::vector<std::pair<std::string, Model>> acceptance_models() {
  std::vector<std::pair<std::string, Model>> out;
  out.emplace_back("single_bernoulli", single_bernoulli());
  out.emplace_back("ising_ring3", ising_ring3());
  out.emplace_back("product_of_pairs", product_of_pairs());
  return out;
}

std::vector<FunctionOnOmega> orlicz_reference_family(const Model& model, std::size_t count, std::uint64_t seed) {
  const std::size_t n = model.n_states();
  const auto ni = static_cast<Eigen::Index>(n);
  RngStream rng(seed, 7);
  std::vector<FunctionOnOmega> out;
  for (std::size_t s = 0; s < n; ++s) out.push_back(FunctionOnOmega::Unit(ni, static_cast<Eigen::Index>(s)));
  for (std::size_t i = 0; out.size() < count; ++i) {
    FunctionOnOmega f(ni);
    switch (i % 5) {
      case 0:
        for (Eigen::Index j = 0; j < ni; ++j) f[j] = rng.normal();
        break;
      case 1:
        for (Eigen::Index j = 0; j < ni; ++j) f[j] = std::exp(3.0 * rng.normal());
        break;
      case 2:
        for (Eigen::Index j = 0; j < ni; ++j) f[j] = rng.uniform() < 0.3 ? 1.0 : 0.0;
        if (f.sum() == 0.0) f[0] = 1.0;
        break;
      case 3:
        for (Eigen::Index j = 0; j < ni; ++j) f[j] = 1.0 + 0.01 * rng.normal();
        break;
      default: {
        FunctionOnOmega g(ni);
        for (Eigen::Index j = 0; j < ni; ++j) g[j] = rng.normal();
        const auto x = static_cast<std::size_t>(i / 5) % model.n_sites();
        f = d_x(model, x, g);
        break;
      }
    }
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace ipslab::reference
