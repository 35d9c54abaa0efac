#include "ipslab/sampling.hpp"

#include <algorithm>

namespace ipslab {

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_([&] {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32)};
        return std::mt19937_64(seq);
      }()) {}

double RngStream::uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
double RngStream::normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
double RngStream::exponential() { return std::exponential_distribution<double>(1.0)(engine_); }

std::vector<FunctionOnOmega> gaussian_functions(std::size_t n_states, std::size_t count, std::uint64_t seed) {
  RngStream rng(seed, 0);
  std::vector<FunctionOnOmega> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    FunctionOnOmega f(static_cast<Eigen::Index>(n_states));
    for (Eigen::Index j = 0; j < f.size(); ++j) f[j] = rng.normal();
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<FunctionOnOmega> audit_functions(std::size_t n_states, std::size_t count, std::uint64_t seed) {
  RngStream rng(seed, 1);
  const auto n = static_cast<Eigen::Index>(n_states);
  std::vector<FunctionOnOmega> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    FunctionOnOmega f(n);
    switch (i % 3) {
      case 0:
        for (Eigen::Index j = 0; j < n; ++j) f[j] = rng.normal();
        break;
      case 1: {
        // Indicator of a random nonempty proper subset.
        do {
          for (Eigen::Index j = 0; j < n; ++j) f[j] = rng.uniform() < 0.5 ? 1.0 : 0.0;
        } while (n > 1 && (f.sum() == 0.0 || f.sum() == static_cast<double>(n)));
        break;
      }
      default:
        for (Eigen::Index j = 0; j < n; ++j) f[j] = 1.0 + 0.1 * rng.normal();
        break;
    }
    out.push_back(std::move(f));
  }
  return out;
}

std::vector<std::vector<char>> random_increasing_events(const StateSpace& space, std::size_t count,
                                                        std::uint64_t seed) {
  RngStream rng(seed, 2);
  std::vector<std::vector<char>> out;
  out.reserve(count);
  std::uniform_int_distribution<std::size_t> pick_state(0, space.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_count(1, 3);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t generators = pick_count(rng.engine());
    std::vector<std::size_t> gens;
    for (std::size_t g = 0; g < generators; ++g) gens.push_back(pick_state(rng.engine()));
    std::vector<char> mask(space.size(), 0);
    for (std::size_t s = 0; s < space.size(); ++s) {
      for (auto g : gens) {
        bool above = true;
        for (std::size_t x = 0; x < space.n_sites() && above; ++x) above = space.digit(s, x) >= space.digit(g, x);
        if (above) {
          mask[s] = 1;
          break;
        }
      }
    }
    out.push_back(std::move(mask));
  }
  return out;
}

std::vector<std::vector<char>> random_events(std::size_t n_states, std::size_t count, std::uint64_t seed) {
  RngStream rng(seed, 3);
  std::vector<std::vector<char>> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<char> mask(n_states);
    for (auto& m : mask) m = rng.uniform() < 0.5 ? 1 : 0;
    out.push_back(std::move(mask));
  }
  return out;
}

}  // namespace ipslab
