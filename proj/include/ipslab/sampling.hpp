#pragma once

// Seeded random streams and the random test families shared by the verifiers.

#include <cstdint>
#include <random>
#include <vector>

#include "ipslab/statespace.hpp"

namespace ipslab {

/// A reproducible random stream: identical (seed, stream id) pairs yield
/// identical draws.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] std::uint64_t stream_id() const noexcept { return stream_id_; }
  std::mt19937_64& engine() noexcept { return engine_; }

  double uniform();
  double normal();
  double exponential();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

/// Standard Gaussian vectors.
std::vector<FunctionOnOmega> gaussian_functions(std::size_t n_states, std::size_t count, std::uint64_t seed);

/// Mixed audit family: Gaussian vectors, indicators of random nonempty
/// proper subsets, and nearly constant functions 1 + 0.1 g, in rotation.
std::vector<FunctionOnOmega> audit_functions(std::size_t n_states, std::size_t count, std::uint64_t seed);

/// Increasing events on {0,1}^n: up-closures of a few random configurations.
std::vector<std::vector<char>> random_increasing_events(const StateSpace& space, std::size_t count,
                                                        std::uint64_t seed);

/// Arbitrary events: each configuration included with probability 1/2.
std::vector<std::vector<char>> random_events(std::size_t n_states, std::size_t count, std::uint64_t seed);

}  // namespace ipslab
