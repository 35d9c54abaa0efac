#include <unsupported/Eigen/KroneckerProduct>

#include "helpers.hpp"
#include "ipslab/operators.hpp"
#include "ipslab/reference_models.hpp"
#include "ipslab/statespace.hpp"
#include "oracles.hpp"

using namespace ipslab;

TEST_CASE("enumeration is lexicographic with the first site most significant") {
  const Alphabet bin({0.0, 1.0});
  const auto states = enumerate_states(bin, SiteSet::isolated({"a", "b"}));
  REQUIRE(states.size() == 4);
  CHECK(states[0] == Configuration{0, 0});
  CHECK(states[1] == Configuration{0, 1});
  CHECK(states[2] == Configuration{1, 0});
  CHECK(states[3] == Configuration{1, 1});

  CHECK(enumerate_states(Alphabet({0.0, 1.0, 2.0}), SiteSet::isolated({"a"})).size() == 3);

  std::vector<std::string> ids;
  for (int i = 0; i < 21; ++i) ids.push_back("s" + std::to_string(i));
  CHECK_CODE(enumerate_states(bin, SiteSet::isolated(ids)), ErrorCode::CapExceeded);

  const StateSpace sp(3, 4);
  for (std::size_t s = 0; s < sp.size(); ++s) CHECK(sp.index(sp.configuration(s)) == s);
}

TEST_CASE("alphabet and site set invariants") {
  CHECK_CODE(Alphabet({1.0}), ErrorCode::BadAlphabet);
  CHECK_CODE(Alphabet({1.0, 1.0}), ErrorCode::BadAlphabet);
  CHECK_CODE(SiteSet({"a", "a"}, {{}, {}}), ErrorCode::SiteClash);
  CHECK_CODE(SiteSet({"a", "b"}, {{5}, {}}), ErrorCode::UnknownSite);
  CHECK_CODE(SiteSet({"a", "b"}, {{0}, {}}), ErrorCode::InvalidModel);
  const SiteSet with_self({"a", "b"}, {{0, 1}, {1}}, true);
  CHECK(with_self.neighborhood_size() == 2);
  CHECK_CODE(with_self.index_of("zz"), ErrorCode::UnknownSite);
}

TEST_CASE("measure validation") {
  CHECK_CODE(Measure(Eigen::Vector2d(0.5, 0.6)), ErrorCode::InvalidModel);
  CHECK_CODE(Measure(Eigen::Vector2d(-0.1, 1.1)), ErrorCode::InvalidModel);
  const Measure m(Eigen::Vector2d(0.0, 1.0));
  CHECK_FALSE(m.strictly_positive());
}

TEST_CASE("heat-bath kernels") {
  SUBCASE("single Bernoulli site returns the marginal") {
    const Model m = reference::single_bernoulli(0.3);
    CHECK(m.kernels().prob(0, 0, 1) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(m.kernels().prob(0, 1, 1) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(m.kernels().dependencies(0).empty());
  }
  SUBCASE("product measure: kernel is the marginal, neighborhood {x}") {
    const StateSpace sp(2, 2);
    const std::vector<double> p{0.2, 0.7};
    const Model m = heat_bath_model(Alphabet({0.0, 1.0}), SiteSet::isolated({"a", "b"}), bernoulli_product(sp, p));
    for (std::size_t s = 0; s < 4; ++s) {
      CHECK(m.kernels().prob(0, s, 1) == doctest::Approx(0.2));
      CHECK(m.kernels().prob(1, s, 1) == doctest::Approx(0.7));
    }
    CHECK(m.neighborhood_size() == 1);
  }
  SUBCASE("coupled pair: kernel at site 1 depends on site 2") {
    const Model m = reference::ising_pair(0.5, 1.0, 0.2);
    REQUIRE(m.kernels().dependencies(0) == std::vector<std::size_t>{1});
    for (std::size_t x = 0; x < 2; ++x) {
      for (std::size_t s = 0; s < 4; ++s) {
        for (std::size_t a = 0; a < 2; ++a) {
          CHECK(m.kernels().prob(x, s, a) == doctest::Approx(oracle::conditional(m, x, s, a)).epsilon(1e-13));
        }
      }
    }
    CHECK(m.kernels().prob(0, 0, 1) != doctest::Approx(m.kernels().prob(0, 1, 1)));
  }
}

TEST_CASE("zero-mass conditioning event") {
  const StateSpace sp(2, 2);
  Eigen::Vector4d w(0.5, 0.5, 0.0, 0.0);
  CHECK_CODE(build_heat_bath_kernels(sp, Measure(w), SiteSet::isolated({"a", "b"})), ErrorCode::ZeroMass);
}

TEST_CASE("finite range is checked against the declared neighborhoods") {
  const StateSpace sp(2, 2);
  Hamiltonian h;
  h.couplings = {{0, 1, 1.0}};
  const Measure mu = gibbs_measure(sp, Alphabet({0.0, 1.0}), h);
  CHECK_CODE(build_heat_bath_kernels(sp, mu, SiteSet::isolated({"a", "b"})), ErrorCode::FiniteRangeViolation);
}

TEST_CASE("finite-range certificate holds exactly") {
  for (const auto& [name, m] : reference::acceptance_models()) {
    const auto& sp = m.space();
    for (std::size_t x = 0; x < m.n_sites(); ++x) {
      const auto nb = m.sites().closed_neighborhood(x);
      for (std::size_t s = 0; s < sp.size(); ++s) {
        for (std::size_t t = 0; t < sp.size(); ++t) {
          bool agree = true;
          for (auto y : nb) agree = agree && sp.digit(s, y) == sp.digit(t, y);
          if (!agree) continue;
          for (std::size_t a = 0; a < sp.alphabet_size(); ++a) {
            CHECK(m.kernels().prob(x, s, a) == m.kernels().prob(x, t, a));
          }
        }
      }
    }
  }
}

TEST_CASE("detailed balance") {
  SUBCASE("heat-bath kernels pass") {
    for (const auto& [name, m] : reference::acceptance_models()) {
      CHECK(check_detailed_balance(m.space(), m.kernels(), m.mu()).ok);
    }
  }
  SUBCASE("table kernels with the wrong conditionals fail") {
    const StateSpace sp(2, 1);
    const auto k = KernelFamily::from_table(sp, SiteSet::isolated({"a"}), {{0.5, 0.5, 0.5, 0.5}});
    const Measure mu(Eigen::Vector2d(0.3, 0.7));
    const auto rep = check_detailed_balance(sp, k, mu);
    CHECK_FALSE(rep.ok);
    CHECK(rep.worst_violation == doctest::Approx(0.2));
    CHECK_CODE(Model(Alphabet({0.0, 1.0}), SiteSet::isolated({"a"}), k, mu), ErrorCode::InvalidModel);
  }
  SUBCASE("symmetric flip on uniform measure") {
    const StateSpace sp(2, 1);
    const auto k = KernelFamily::from_table(sp, SiteSet({"a"}, {{0}}, true), {{0.0, 1.0, 1.0, 0.0}});
    CHECK(check_detailed_balance(sp, k, uniform_measure(2)).ok);
  }
}

TEST_CASE("stationary measure") {
  SUBCASE("recovers mu from its heat-bath kernels") {
    for (const auto& [name, m] : reference::acceptance_models()) {
      const Measure st = stationary_measure(m.space(), m.kernels());
      CHECK((st.weights() - m.mu().weights()).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
  SUBCASE("random strictly positive measures up to 2^8 states") {
    for (std::size_t n : {3u, 5u, 8u}) {
      const StateSpace sp(2, n);
      RngStream rng(5, n);
      Eigen::VectorXd w(static_cast<Eigen::Index>(sp.size()));
      for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = 0.05 + rng.uniform();
      w /= w.sum();
      const Measure mu(w);
      std::vector<std::string> ids;
      for (std::size_t i = 0; i < n; ++i) ids.push_back("s" + std::to_string(i));
      const Model m = heat_bath_model(Alphabet({0.0, 1.0}), ids, mu);
      const Measure st = stationary_measure(m.space(), m.kernels());
      CHECK((st.weights() - mu.weights()).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
  SUBCASE("single-site uniform resampling gives the uniform measure") {
    const StateSpace sp(3, 1);
    std::vector<double> row(9, 1.0 / 3.0);
    const auto k = KernelFamily::from_table(sp, SiteSet::isolated({"a"}), {row});
    const Measure st = stationary_measure(sp, k);
    for (std::size_t i = 0; i < 3; ++i) CHECK(st[i] == doctest::Approx(1.0 / 3.0));
  }
  SUBCASE("two absorbing classes are not ergodic") {
    const StateSpace sp(2, 2);
    // Site a never moves; site b resamples uniformly.
    const std::vector<double> stay{1, 0, 1, 0, 0, 1, 0, 1};
    const std::vector<double> uni(8, 0.5);
    const auto k = KernelFamily::from_table(sp, SiteSet({"a", "b"}, {{0}, {1}}, true), {stay, uni});
    CHECK_CODE(stationary_measure(sp, k), ErrorCode::NotErgodic);
  }
}

TEST_CASE("product model") {
  const Model a = reference::single_bernoulli(0.3);
  const Model b = heat_bath_model(Alphabet({0.0, 1.0}), SiteSet::isolated({"y"}),
                                  bernoulli_product(StateSpace(2, 1), std::vector<double>{0.6}));
  const Model p = product_model(a, b);
  CHECK(p.n_sites() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) CHECK(p.mu()[i * 2 + j] == doctest::Approx(a.mu()[i] * b.mu()[j]));
  }
  for (std::size_t s = 0; s < 4; ++s) {
    CHECK(p.kernels().prob(0, s, 1) == doctest::Approx(0.3));
    CHECK(p.kernels().prob(1, s, 1) == doctest::Approx(0.6));
  }
  CHECK_CODE(product_model(a, a), ErrorCode::SiteClash);
  const Model tri = heat_bath_model(Alphabet({0.0, 1.0, 2.0}), SiteSet::isolated({"z"}), uniform_measure(3));
  CHECK_CODE(product_model(a, tri), ErrorCode::BadAlphabet);

  // Generator of the product is L1 + L2 on the tensor space.
  const Eigen::MatrixXd l1 = oracle::generator(a);
  const Eigen::MatrixXd l2 = oracle::generator(b);
  const Eigen::MatrixXd sum = Eigen::kroneckerProduct(l1, Eigen::MatrixXd::Identity(2, 2)) +
                              Eigen::kroneckerProduct(Eigen::MatrixXd::Identity(2, 2), l2);
  CHECK((Generator(p).matrix() - sum).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("alpha is the exhaustive kernel minimum") {
  for (const auto& [name, m] : reference::acceptance_models()) {
    double lo = 1.0;
    for (std::size_t x = 0; x < m.n_sites(); ++x) {
      for (std::size_t s = 0; s < m.n_states(); ++s) {
        for (std::size_t a = 0; a < m.alphabet().size(); ++a) lo = std::min(lo, oracle::conditional(m, x, s, a));
      }
    }
    CHECK(m.alpha() == doctest::Approx(lo).epsilon(1e-13));
    CHECK(m.alpha() <= 1.0 / static_cast<double>(m.alphabet().size()) + 1e-15);
  }
}
