#pragma once

// Poisson graphical construction: resampling events on sites x [0, t]
// composed into exact averaging operators.

#include <cstdint>
#include <vector>

#include "ipslab/operators.hpp"
#include "ipslab/sampling.hpp"

namespace ipslab {

struct PoissonPoint {
  std::size_t site;
  double time;
};

/// Finite point set in sites x [0, horizon] with strictly increasing times.
class PoissonRealization {
 public:
  PoissonRealization() = default;
  /// Throws BadArgs unless times are strictly increasing inside [0, horizon]
  /// and every site is below `n_sites`.
  PoissonRealization(std::vector<PoissonPoint> points, double horizon, std::size_t n_sites);

  [[nodiscard]] const std::vector<PoissonPoint>& points() const noexcept { return points_; }
  [[nodiscard]] double horizon() const noexcept { return horizon_; }
  [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
  [[nodiscard]] bool empty() const noexcept { return points_.empty(); }

 private:
  std::vector<PoissonPoint> points_;
  double horizon_ = 0.0;
};

/// Unit-intensity Poisson process on every site over [0, t]: exponential
/// interarrivals per site, merged by time. A realization with tied times is
/// discarded and redrawn. Throws NegativeTime.
PoissonRealization sample_ppp(const Model& model, double t, RngStream& rng);

/// Psi_A f = Psi_{x_1} Psi_{x_2} ... Psi_{x_n} f for t_1 < ... < t_n: the
/// latest point acts on f first, so Psi_A is the transition operator of the
/// jump process started at time 0.
FunctionOnOmega apply_psi_set(const Model& model, const PoissonRealization& realization,
                              const FunctionOnOmega& f);

struct FactorizationReport {
  bool ok = false;
  double max_deviation = 0.0;
};

/// Checks Psi_{A u B} f = Psi_A Psi_B f to 1e-12. Throws OrderViolated unless
/// every time of A precedes every time of B.
FactorizationReport check_factorization(const Model& model, const PoissonRealization& a,
                                        const PoissonRealization& b, const FunctionOnOmega& f);

struct McSemigroupEstimate {
  FunctionOnOmega estimate;
  FunctionOnOmega std_err;
  std::size_t samples = 0;
};

/// Samples per random stream in mc_semigroup; block b draws from stream b.
inline constexpr std::size_t kMcBlockSize = 64;

/// Averages apply_psi_set over independent realizations. Samples are split
/// into fixed blocks, each with its own stream, and block statistics are
/// merged in block order, so the result is bitwise independent of `workers`.
/// Throws BadArgs when n_samples < 100.
McSemigroupEstimate mc_semigroup(const Model& model, double t, const FunctionOnOmega& f,
                                 std::size_t n_samples, std::uint64_t seed, std::size_t workers = 1);

}  // namespace ipslab
