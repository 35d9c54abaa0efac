#include "ipslab/functionals.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <vector>

namespace ipslab {

double YoungFunction::operator()(double x) const {
  const double ax = std::abs(x);
  switch (kind) {
    case YoungKind::Phi: return ax * ax / std::log(std::numbers::e + ax);
    case YoungKind::XSqLog: return ax * ax * std::log1p(ax * ax);
    case YoungKind::ExpSq: return std::expm1(ax * ax);
  }
  return 0.0;
}

std::string_view YoungFunction::name() const {
  switch (kind) {
    case YoungKind::Phi: return "phi";
    case YoungKind::XSqLog: return "xsqlog";
    case YoungKind::ExpSq: return "expsq";
  }
  return "unknown";
}

double lp_norm(const Measure& mu, const FunctionOnOmega& f, double p) {
  if (!(p >= 1.0) || !std::isfinite(p)) throw Error(ErrorCode::BadExponent, "lp_norm needs 1 <= p < inf");
  const double scale = f.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  // Scale out the maximum so |f|^p cannot overflow.
  const double integral = mu.weights().dot((f.cwiseAbs() / scale).array().pow(p).matrix());
  return scale * std::pow(integral, 1.0 / p);
}

double young_integral(const Measure& mu, const FunctionOnOmega& f, YoungFunction young) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    const double w = mu.weights()[i];
    if (w > 0.0) total += w * young(f[i]);
  }
  return total;
}

double orlicz_norm(const Measure& mu, const FunctionOnOmega& f, YoungFunction young) {
  const double l2 = lp_norm(mu, f, 2.0);
  if (l2 == 0.0) return 0.0;
  auto integral = [&](double a) { return young_integral(mu, f / a, young); };

  double lo = l2 / 10.0;
  double hi = 10.0 * std::max(1.0, 2.0 * l2);
  while (integral(lo) <= 1.0) lo /= 2.0;
  while (integral(hi) > 1.0) hi *= 2.0;
  while (hi - lo > 1e-12 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (integral(mid) <= 1.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double mean(const Measure& mu, const FunctionOnOmega& f) { return mu.expectation(f); }

double variance(const Measure& mu, const FunctionOnOmega& f) {
  const double m = mean(mu, f);
  return mu.weights().dot((f.array() - m).square().matrix());
}

namespace {

// (1 + u) log1p(u) - u, with a series near 0.
double entropy_kernel(double u) {
  if (u <= -1.0) return 1.0;
  if (std::abs(u) < 1e-2) {
    double term = u * u;
    double sum = 0.0;
    for (int k = 2; k <= 9; ++k) {
      sum += (k % 2 == 0 ? 1.0 : -1.0) * term / (static_cast<double>(k) * (k - 1));
      term *= u;
    }
    return sum;
  }
  return (1.0 + u) * std::log1p(u) - u;
}

}  // namespace

double entropy(const Measure& mu, const FunctionOnOmega& g) {
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if (g[i] < 0.0 || !std::isfinite(g[i])) throw Error(ErrorCode::NegativeInput, "entropy needs g >= 0");
  }
  const double m = mu.expectation(g);
  if (m <= 0.0) return 0.0;
  double total = 0.0;
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    const double w = mu.weights()[i];
    if (w > 0.0) total += w * entropy_kernel(g[i] / m - 1.0);
  }
  return m * std::max(total, 0.0);
}

double lp_norm_square_integral(const Measure& mu, const FunctionOnOmega& f) {
  struct TableDeleter {
    void operator()(gsl_integration_glfixed_table* t) const { gsl_integration_glfixed_table_free(t); }
  };
  static const std::unique_ptr<gsl_integration_glfixed_table, TableDeleter> table(
      gsl_integration_glfixed_table_alloc(64));
  double total = 0.0;
  for (std::size_t i = 0; i < 64; ++i) {
    double node = 0.0;
    double weight = 0.0;
    gsl_integration_glfixed_point(1.0, 2.0, i, &node, &weight, table.get());
    const double norm = lp_norm(mu, f, node);
    total += weight * norm * norm;
  }
  return total;
}

double talagrand_l2_term(const Measure& mu, const FunctionOnOmega& f) {
  const double l2 = lp_norm(mu, f, 2.0);
  if (l2 == 0.0) return 0.0;
  const double l1 = lp_norm(mu, f, 1.0);
  return l2 * l2 / (1.0 + std::log(l2 / l1));
}

double orlicz_l2_ratio(const Measure& mu, const FunctionOnOmega& f) {
  const double l2 = lp_norm(mu, f, 2.0);
  if (l2 == 0.0) return 0.0;
  const double phi = orlicz_norm(mu, f, kPhi);
  return phi * phi / talagrand_l2_term(mu, f);
}

double calibrate_orlicz_l2_constant(const Measure& mu, const std::vector<FunctionOnOmega>& family) {
  double worst = 0.0;
  for (const auto& f : family) worst = std::max(worst, orlicz_l2_ratio(mu, f));
  return worst;
}

}  // namespace ipslab
