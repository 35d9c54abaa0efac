#pragma once

// Small named models used by the test suites, the acceptance gate and the
// Orlicz-constant calibration.

#include <cstdint>
#include <string>
#include <vector>

#include "ipslab/statespace.hpp"

namespace ipslab::reference {

/// One site, E = {0, 1}, mu = Bernoulli(p).
Model single_bernoulli(double p = 0.3);

/// Three sites on a ring, E = {0, 1} read as spins -1/+1, nearest-neighbour
/// coupling J, zero field, heat-bath dynamics.
Model ising_ring3(double beta = 0.5, double coupling = 1.0);

/// Two coupled sites, E = {0, 1} read as spins -1/+1, heat-bath dynamics.
Model ising_pair(double beta = 0.5, double coupling = 1.0, double field = 0.0,
                 std::vector<std::string> ids = {"s0", "s1"});

/// Product of two coupled pairs (16 states); the second pair carries a field.
Model product_of_pairs();

/// The three models of the acceptance gate, with display names.
std::vector<std::pair<std::string, Model>> acceptance_models();

/// Functions for calibrating the Orlicz/L2 constant: Gaussian vectors,
/// lognormal spikes, point masses, indicators, nearly constant vectors and
/// the derivatives D_x of Gaussian vectors.
std::vector<FunctionOnOmega> orlicz_reference_family(const Model& model, std::size_t count, std::uint64_t seed);

}  // namespace ipslab::reference
