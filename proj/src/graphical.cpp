#include "ipslab/graphical.hpp"

#include <algorithm>
#include <cmath>

#include "ipslab/parallel.hpp"

namespace ipslab {

PoissonRealization::PoissonRealization(std::vector<PoissonPoint> points, double horizon, std::size_t n_sites)
    : points_(std::move(points)), horizon_(horizon) {
  if (!(horizon >= 0.0)) throw Error(ErrorCode::BadArgs, "realization horizon must be nonnegative");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& p = points_[i];
    if (p.site >= n_sites) throw Error(ErrorCode::BadArgs, "realization point has an unknown site");
    if (!(p.time >= 0.0 && p.time <= horizon)) throw Error(ErrorCode::BadArgs, "realization time outside [0, t]");
    if (i > 0 && !(points_[i - 1].time < p.time)) {
      throw Error(ErrorCode::BadArgs, "realization times must be strictly increasing");
    }
  }
}

PoissonRealization sample_ppp(const Model& model, double t, RngStream& rng) {
  if (!(t >= 0.0)) throw Error(ErrorCode::NegativeTime, "Poisson horizon must be nonnegative");
  std::vector<PoissonPoint> points;
  for (;;) {
    points.clear();
    for (std::size_t x = 0; x < model.n_sites(); ++x) {
      double time = rng.exponential();
      while (time <= t) {
        points.push_back({x, time});
        time += rng.exponential();
      }
    }
    std::sort(points.begin(), points.end(), [](const PoissonPoint& a, const PoissonPoint& b) {
      return a.time < b.time || (a.time == b.time && a.site < b.site);
    });
    const bool tied = std::adjacent_find(points.begin(), points.end(), [](const auto& a, const auto& b) {
                        return a.time == b.time;
                      }) != points.end();
    if (!tied) break;
  }
  return PoissonRealization(std::move(points), t, model.n_sites());
}

FunctionOnOmega apply_psi_set(const Model& model, const PoissonRealization& realization,
                              const FunctionOnOmega& f) {
  FunctionOnOmega g = f;
  const auto& pts = realization.points();
  for (auto it = pts.rbegin(); it != pts.rend(); ++it) g = psi_x(model, it->site, g);
  return g;
}

FactorizationReport check_factorization(const Model& model, const PoissonRealization& a,
                                        const PoissonRealization& b, const FunctionOnOmega& f) {
  if (!a.empty() && !b.empty() && !(a.points().back().time < b.points().front().time)) {
    throw Error(ErrorCode::OrderViolated, "every point of A must precede every point of B");
  }
  std::vector<PoissonPoint> merged = a.points();
  merged.insert(merged.end(), b.points().begin(), b.points().end());
  const PoissonRealization both(std::move(merged), std::max(a.horizon(), b.horizon()), model.n_sites());

  const FunctionOnOmega joint = apply_psi_set(model, both, f);
  const FunctionOnOmega split = apply_psi_set(model, a, apply_psi_set(model, b, f));
  FactorizationReport report;
  report.max_deviation = joint.size() == 0 ? 0.0 : (joint - split).cwiseAbs().maxCoeff();
  report.ok = report.max_deviation <= 1e-12;
  return report;
}

namespace {

struct BlockStats {
  std::size_t count = 0;
  FunctionOnOmega mean;
  FunctionOnOmega m2;  // sum of squared deviations from the mean
};

}  // namespace

McSemigroupEstimate mc_semigroup(const Model& model, double t, const FunctionOnOmega& f,
                                 std::size_t n_samples, std::uint64_t seed, std::size_t workers) {
  if (n_samples < 100) throw Error(ErrorCode::BadArgs, "mc_semigroup needs at least 100 samples");
  if (!(t >= 0.0)) throw Error(ErrorCode::NegativeTime, "semigroup time must be nonnegative");
  const std::size_t n_blocks = (n_samples + kMcBlockSize - 1) / kMcBlockSize;
  std::vector<BlockStats> blocks(n_blocks);

  parallel_for(n_blocks, workers, [&](std::size_t b) {
    RngStream rng(seed, b);
    const std::size_t count = std::min(kMcBlockSize, n_samples - b * kMcBlockSize);
    BlockStats s;
    s.mean = FunctionOnOmega::Zero(f.size());
    s.m2 = FunctionOnOmega::Zero(f.size());
    for (std::size_t i = 0; i < count; ++i) {
      const FunctionOnOmega g = apply_psi_set(model, sample_ppp(model, t, rng), f);
      ++s.count;
      const FunctionOnOmega delta = g - s.mean;
      s.mean += delta / static_cast<double>(s.count);
      s.m2 += delta.cwiseProduct(g - s.mean);
    }
    blocks[b] = std::move(s);
  });

  // Pairwise merge in block order.
  BlockStats total = std::move(blocks.front());
  for (std::size_t b = 1; b < n_blocks; ++b) {
    const BlockStats& s = blocks[b];
    const double na = static_cast<double>(total.count);
    const double nb = static_cast<double>(s.count);
    const FunctionOnOmega delta = s.mean - total.mean;
    total.mean += delta * (nb / (na + nb));
    total.m2 += s.m2 + delta.cwiseProduct(delta) * (na * nb / (na + nb));
    total.count += s.count;
  }

  McSemigroupEstimate out;
  out.samples = total.count;
  out.estimate = std::move(total.mean);
  const double n = static_cast<double>(total.count);
  out.std_err = (total.m2.cwiseMax(0.0) / ((n - 1.0) * n)).cwiseSqrt();
  return out;
}

}  // namespace ipslab
