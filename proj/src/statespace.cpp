#include "ipslab/statespace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

namespace ipslab {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::ZeroMass: return "ZeroMass";
    case ErrorCode::NotErgodic: return "NotErgodic";
    case ErrorCode::SiteClash: return "SiteClash";
    case ErrorCode::UnknownSite: return "UnknownSite";
    case ErrorCode::SpectrumFailure: return "SpectrumFailure";
    case ErrorCode::NegativeTime: return "NegativeTime";
    case ErrorCode::BadExponent: return "BadExponent";
    case ErrorCode::NegativeInput: return "NegativeInput";
    case ErrorCode::BadArgs: return "BadArgs";
    case ErrorCode::NotALeaf: return "NotALeaf";
    case ErrorCode::OrderViolated: return "OrderViolated";
    case ErrorCode::BadAlphabet: return "BadAlphabet";
    case ErrorCode::NotIncreasing: return "NotIncreasing";
    case ErrorCode::NotHeatBath: return "NotHeatBath";
    case ErrorCode::ThresholdHypothesisFailed: return "ThresholdHypothesisFailed";
    case ErrorCode::DegenerateEvent: return "DegenerateEvent";
    case ErrorCode::FiniteRangeViolation: return "FiniteRangeViolation";
    case ErrorCode::InvalidModel: return "InvalidModel";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

// ---------------------------------------------------------------------------
// Alphabet, SiteSet, StateSpace

Alphabet::Alphabet(std::vector<double> symbols) : symbols_(std::move(symbols)) {
  if (symbols_.size() < 2) {
    throw Error(ErrorCode::BadAlphabet, "alphabet needs at least two symbols");
  }
  std::set<double> seen(symbols_.begin(), symbols_.end());
  if (seen.size() != symbols_.size()) {
    throw Error(ErrorCode::BadAlphabet, "alphabet symbols must be distinct");
  }
}

std::optional<std::size_t> Alphabet::index_of(double value) const {
  auto it = std::find(symbols_.begin(), symbols_.end(), value);
  if (it == symbols_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - symbols_.begin());
}

bool Alphabet::is_binary01() const noexcept {
  return symbols_.size() == 2 && symbols_[0] == 0.0 && symbols_[1] == 1.0;
}

SiteSet::SiteSet(std::vector<std::string> ids, std::vector<std::vector<std::size_t>> neighborhoods,
                 bool includes_self)
    : ids_(std::move(ids)), neighborhoods_(std::move(neighborhoods)), includes_self_(includes_self) {
  if (ids_.empty()) throw Error(ErrorCode::InvalidModel, "site set is empty");
  std::set<std::string> seen(ids_.begin(), ids_.end());
  if (seen.size() != ids_.size()) throw Error(ErrorCode::SiteClash, "duplicate site identifier");
  if (neighborhoods_.size() != ids_.size()) {
    throw Error(ErrorCode::InvalidModel, "one neighborhood list per site is required");
  }
  for (std::size_t x = 0; x < ids_.size(); ++x) {
    auto& nb = neighborhoods_[x];
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    for (auto y : nb) {
      if (y >= ids_.size()) {
        throw Error(ErrorCode::UnknownSite, "neighborhood of '" + ids_[x] + "' names a missing site");
      }
    }
    const bool has_self = std::binary_search(nb.begin(), nb.end(), x);
    if (has_self != includes_self_) {
      throw Error(ErrorCode::InvalidModel,
                  "neighborhood of '" + ids_[x] +
                      (includes_self_ ? "' must contain the site itself" : "' must not contain the site itself"));
    }
  }
}

SiteSet SiteSet::isolated(std::vector<std::string> ids) {
  std::vector<std::vector<std::size_t>> nb(ids.size());
  return SiteSet(std::move(ids), std::move(nb), false);
}

SiteSet SiteSet::complete(std::vector<std::string> ids) {
  std::vector<std::vector<std::size_t>> nb(ids.size());
  for (std::size_t x = 0; x < ids.size(); ++x) {
    for (std::size_t y = 0; y < ids.size(); ++y) {
      if (y != x) nb[x].push_back(y);
    }
  }
  return SiteSet(std::move(ids), std::move(nb), false);
}

std::size_t SiteSet::index_of(std::string_view id) const {
  auto it = std::find(ids_.begin(), ids_.end(), id);
  if (it == ids_.end()) throw Error(ErrorCode::UnknownSite, "no site named '" + std::string(id) + "'");
  return static_cast<std::size_t>(it - ids_.begin());
}

std::vector<std::size_t> SiteSet::closed_neighborhood(std::size_t x) const {
  auto nb = neighborhoods_.at(x);
  if (!std::binary_search(nb.begin(), nb.end(), x)) {
    nb.insert(std::upper_bound(nb.begin(), nb.end(), x), x);
  }
  return nb;
}

std::size_t SiteSet::neighborhood_size() const {
  std::size_t n = 1;
  for (std::size_t x = 0; x < size(); ++x) n = std::max(n, closed_neighborhood(x).size());
  return n;
}

StateSpace::StateSpace(std::size_t alphabet_size, std::size_t n_sites, std::size_t cap)
    : q_(alphabet_size), size_(1), strides_(n_sites) {
  if (q_ < 2) throw Error(ErrorCode::BadAlphabet, "alphabet needs at least two symbols");
  for (std::size_t i = 0; i < n_sites; ++i) {
    if (size_ > cap / q_) {
      std::ostringstream msg;
      msg << q_ << "^" << n_sites << " states exceed the cap of " << cap;
      throw Error(ErrorCode::CapExceeded, msg.str());
    }
    size_ *= q_;
  }
  std::size_t stride = 1;
  for (std::size_t i = n_sites; i-- > 0;) {
    strides_[i] = stride;
    stride *= q_;
  }
}

Configuration StateSpace::configuration(std::size_t state) const {
  Configuration c(n_sites());
  for (std::size_t x = 0; x < n_sites(); ++x) c[x] = digit(state, x);
  return c;
}

std::size_t StateSpace::index(const Configuration& config) const {
  if (config.size() != n_sites()) throw Error(ErrorCode::BadArgs, "configuration has wrong length");
  std::size_t s = 0;
  for (std::size_t x = 0; x < n_sites(); ++x) {
    if (config[x] >= q_) throw Error(ErrorCode::BadArgs, "symbol index out of range");
    s += config[x] * strides_[x];
  }
  return s;
}

std::vector<Configuration> enumerate_states(const Alphabet& alphabet, const SiteSet& sites,
                                            std::size_t cap) {
  const StateSpace space(alphabet.size(), sites.size(), cap);
  std::vector<Configuration> out;
  out.reserve(space.size());
  for (std::size_t s = 0; s < space.size(); ++s) out.push_back(space.configuration(s));
  return out;
}

// ---------------------------------------------------------------------------
// Measures

Measure::Measure(Eigen::VectorXd weights) : weights_(std::move(weights)), strictly_positive_(true) {
  if (weights_.size() == 0) throw Error(ErrorCode::InvalidModel, "measure has no weights");
  for (Eigen::Index i = 0; i < weights_.size(); ++i) {
    if (!std::isfinite(weights_[i]) || weights_[i] < 0.0) {
      throw Error(ErrorCode::InvalidModel, "measure weights must be finite and nonnegative");
    }
    if (weights_[i] == 0.0) strictly_positive_ = false;
  }
  const double total = weights_.sum();
  if (std::abs(total - 1.0) > kNormalizationTol) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "measure weights sum to " << total;
    throw Error(ErrorCode::InvalidModel, msg.str());
  }
}

Measure uniform_measure(std::size_t n_states) {
  return Measure(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n_states), 1.0 / static_cast<double>(n_states)));
}

Measure bernoulli_product(const StateSpace& space, std::span<const double> p) {
  if (space.alphabet_size() != 2 || p.size() != space.n_sites()) {
    throw Error(ErrorCode::BadArgs, "bernoulli_product needs a binary space and one p per site");
  }
  Eigen::VectorXd w(static_cast<Eigen::Index>(space.size()));
  for (std::size_t s = 0; s < space.size(); ++s) {
    double prob = 1.0;
    for (std::size_t x = 0; x < space.n_sites(); ++x) prob *= space.digit(s, x) == 1 ? p[x] : 1.0 - p[x];
    w[static_cast<Eigen::Index>(s)] = prob;
  }
  w /= w.sum();
  return Measure(std::move(w));
}

Measure gibbs_measure(const StateSpace& space, const Alphabet& alphabet, const Hamiltonian& h) {
  const std::size_t n = space.n_sites();
  std::vector<double> spins = h.spin_values.empty() ? alphabet.symbols() : h.spin_values;
  if (spins.size() != alphabet.size()) throw Error(ErrorCode::BadArgs, "one spin value per symbol required");
  if (!h.field.empty() && h.field.size() != n) throw Error(ErrorCode::BadArgs, "one field value per site required");
  for (const auto& c : h.couplings) {
    if (c.a >= n || c.b >= n) throw Error(ErrorCode::UnknownSite, "coupling names a missing site");
  }
  Eigen::VectorXd logw(static_cast<Eigen::Index>(space.size()));
  for (std::size_t s = 0; s < space.size(); ++s) {
    double energy = 0.0;
    for (const auto& c : h.couplings) {
      energy += c.strength * spins[space.digit(s, c.a)] * spins[space.digit(s, c.b)];
    }
    if (!h.field.empty()) {
      for (std::size_t x = 0; x < n; ++x) energy += h.field[x] * spins[space.digit(s, x)];
    }
    logw[static_cast<Eigen::Index>(s)] = h.beta * energy;
  }
  Eigen::VectorXd w = (logw.array() - logw.maxCoeff()).exp();
  w /= w.sum();
  return Measure(std::move(w));
}

// ---------------------------------------------------------------------------
// Kernels

namespace {

constexpr double kAgreementTol = 1e-12;

double row_distance(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

KernelFamily KernelFamily::from_table(const StateSpace& space, const SiteSet& declared,
                                      std::vector<std::vector<double>> tables) {
  const std::size_t n = space.n_sites();
  const std::size_t q = space.alphabet_size();
  if (declared.size() != n || tables.size() != n) {
    throw Error(ErrorCode::InvalidModel, "kernel table must have one entry per site");
  }
  KernelFamily k;
  k.q_ = q;
  k.tables_ = std::move(tables);
  for (std::size_t x = 0; x < n; ++x) {
    if (k.tables_[x].size() != space.size() * q) {
      throw Error(ErrorCode::InvalidModel, "kernel table for site '" + declared.id(x) + "' has wrong size");
    }
    for (std::size_t s = 0; s < space.size(); ++s) {
      double total = 0.0;
      for (std::size_t a = 0; a < q; ++a) {
        const double v = k.prob(x, s, a);
        if (!std::isfinite(v) || v < 0.0) {
          throw Error(ErrorCode::InvalidModel, "negative or non-finite kernel entry at site '" + declared.id(x) + "'");
        }
        total += v;
      }
      if (std::abs(total - 1.0) > kNormalizationTol) {
        std::ostringstream msg;
        msg << "kernel row at site '" << declared.id(x) << "', state " << s << " sums to " << total;
        throw Error(ErrorCode::InvalidModel, msg.str());
      }
    }
  }

  // Minimal dependency sets: y matters iff changing only eta(y) changes the row.
  k.dependencies_.assign(n, {});
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = 0; y < n; ++y) {
      bool depends = false;
      for (std::size_t s = 0; s < space.size() && !depends; ++s) {
        if (space.digit(s, y) != 0) continue;
        for (std::size_t b = 1; b < q && !depends; ++b) {
          depends = row_distance(k.row(x, s), k.row(x, space.with_digit(s, y, b))) > kAgreementTol;
        }
      }
      if (depends) k.dependencies_[x].push_back(y);
    }
  }

  // Canonicalize: every row equals the row of its representative, whose
  // symbols off the dependency set are 0. The finite-range property then holds
  // exactly rather than up to rounding.
  for (std::size_t x = 0; x < n; ++x) {
    const auto& deps = k.dependencies_[x];
    std::vector<double> canon(k.tables_[x].size());
    for (std::size_t s = 0; s < space.size(); ++s) {
      std::size_t rep = 0;
      for (auto y : deps) rep = space.with_digit(rep, y, space.digit(s, y));
      std::copy_n(k.tables_[x].begin() + static_cast<std::ptrdiff_t>(rep * q), q,
                  canon.begin() + static_cast<std::ptrdiff_t>(s * q));
    }
    k.tables_[x] = std::move(canon);
  }

  std::ostringstream violations;
  bool bad = false;
  for (std::size_t x = 0; x < n; ++x) {
    const auto allowed = declared.closed_neighborhood(x);
    for (auto y : k.dependencies_[x]) {
      if (!std::binary_search(allowed.begin(), allowed.end(), y)) {
        violations << (bad ? "; " : "") << "kernel at '" << declared.id(x) << "' depends on '"
                   << declared.id(y) << "' outside its neighborhood";
        bad = true;
      }
    }
  }
  if (bad) throw Error(ErrorCode::FiniteRangeViolation, violations.str());
  return k;
}

double KernelFamily::min_prob() const noexcept {
  double m = 1.0;
  for (const auto& t : tables_) {
    for (double v : t) m = std::min(m, v);
  }
  return m;
}

KernelFamily build_heat_bath_kernels(const StateSpace& space, const Measure& mu, const SiteSet& sites) {
  if (mu.size() != space.size()) throw Error(ErrorCode::InvalidModel, "measure size does not match the space");
  const std::size_t q = space.alphabet_size();
  std::vector<std::vector<double>> tables(space.n_sites(), std::vector<double>(space.size() * q));
  for (std::size_t x = 0; x < space.n_sites(); ++x) {
    for (std::size_t s = 0; s < space.size(); ++s) {
      double mass = 0.0;
      for (std::size_t a = 0; a < q; ++a) mass += mu[space.with_digit(s, x, a)];
      if (mass <= 0.0) {
        throw Error(ErrorCode::ZeroMass, "conditioning event at site '" + sites.id(x) + "' has zero mass");
      }
      for (std::size_t a = 0; a < q; ++a) tables[x][s * q + a] = mu[space.with_digit(s, x, a)] / mass;
    }
  }
  return KernelFamily::from_table(space, sites, std::move(tables));
}

DetailedBalanceReport check_detailed_balance(const StateSpace& space, const KernelFamily& kernels,
                                             const Measure& mu) {
  DetailedBalanceReport rep;
  for (std::size_t x = 0; x < kernels.n_sites(); ++x) {
    for (std::size_t s = 0; s < space.size(); ++s) {
      const std::size_t own = space.digit(s, x);
      for (std::size_t a = 0; a < space.alphabet_size(); ++a) {
        const std::size_t t = space.with_digit(s, x, a);
        const double v = std::abs(mu[s] * kernels.prob(x, s, a) - mu[t] * kernels.prob(x, t, own));
        if (v > rep.worst_violation) {
          rep.worst_violation = v;
          rep.worst_site = x;
          rep.worst_state = s;
          rep.worst_symbol = a;
        }
      }
    }
  }
  rep.ok = rep.worst_violation <= kStructuralTol;
  return rep;
}

namespace {

Eigen::MatrixXd dense_generator(const StateSpace& space, const KernelFamily& kernels) {
  const auto n = static_cast<Eigen::Index>(space.size());
  Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t x = 0; x < kernels.n_sites(); ++x) {
    for (std::size_t s = 0; s < space.size(); ++s) {
      for (std::size_t a = 0; a < space.alphabet_size(); ++a) {
        gen(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(space.with_digit(s, x, a))) +=
            kernels.prob(x, s, a);
      }
      gen(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)) -= 1.0;
    }
  }
  return gen;
}

}  // namespace

Measure stationary_measure(const StateSpace& space, const KernelFamily& kernels) {
  const Eigen::MatrixXd gen_t = dense_generator(space, kernels).transpose();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(gen_t, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const Eigen::Index n = sv.size();
  const double scale = std::max(1.0, sv[0]);
  Eigen::Index null_dim = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (sv[i] <= 1e-9 * scale) ++null_dim;
  }
  if (null_dim != 1) {
    throw Error(ErrorCode::NotErgodic, "generator null space has dimension " + std::to_string(null_dim));
  }
  Eigen::VectorXd v = svd.matrixV().col(n - 1);
  if (v.sum() < 0.0) v = -v;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v[i] < 0.0) {
      if (v[i] < -1e-12 * v.cwiseAbs().maxCoeff()) {
        throw Error(ErrorCode::NotErgodic, "stationary vector is not one-signed");
      }
      v[i] = 0.0;
    }
  }
  v /= v.sum();
  return Measure(std::move(v));
}

// ---------------------------------------------------------------------------
// Models

Model::Model(Alphabet alphabet, SiteSet sites, KernelFamily kernels, Measure mu)
    : alphabet_(std::move(alphabet)),
      sites_(std::move(sites)),
      space_(alphabet_.size(), sites_.size()),
      kernels_(std::move(kernels)),
      mu_(std::move(mu)),
      alpha_(0.0) {
  if (kernels_.n_sites() != sites_.size() || kernels_.alphabet_size() != alphabet_.size()) {
    throw Error(ErrorCode::InvalidModel, "kernel family does not match the site set or alphabet");
  }
  if (mu_.size() != space_.size()) throw Error(ErrorCode::InvalidModel, "measure size does not match the space");
  const auto db = check_detailed_balance(space_, kernels_, mu_);
  if (!db.ok) {
    std::ostringstream msg;
    msg << "detailed balance fails at site '" << sites_.id(db.worst_site) << "', state " << db.worst_state
        << ", symbol " << db.worst_symbol << " (violation " << db.worst_violation << ")";
    throw Error(ErrorCode::InvalidModel, msg.str());
  }
  alpha_ = kernels_.min_prob();
}

Model heat_bath_model(Alphabet alphabet, SiteSet sites, const Measure& mu) {
  const StateSpace space(alphabet.size(), sites.size());
  auto kernels = build_heat_bath_kernels(space, mu, sites);
  return Model(std::move(alphabet), std::move(sites), std::move(kernels), mu);
}

Model heat_bath_model(Alphabet alphabet, std::vector<std::string> ids, const Measure& mu) {
  const StateSpace space(alphabet.size(), ids.size());
  const auto full = build_heat_bath_kernels(space, mu, SiteSet::complete(ids));
  std::vector<std::vector<std::size_t>> nb(ids.size());
  for (std::size_t x = 0; x < ids.size(); ++x) {
    for (auto y : full.dependencies(x)) {
      if (y != x) nb[x].push_back(y);
    }
  }
  SiteSet sites(std::move(ids), std::move(nb), false);
  auto kernels = KernelFamily::from_table(space, sites, full.tables());
  return Model(std::move(alphabet), std::move(sites), std::move(kernels), mu);
}

Model product_model(const Model& first, const Model& second) {
  if (!(first.alphabet() == second.alphabet())) {
    throw Error(ErrorCode::BadAlphabet, "product components must share an alphabet");
  }
  std::vector<std::string> ids = first.sites().ids();
  for (const auto& id : second.sites().ids()) {
    if (std::find(ids.begin(), ids.end(), id) != ids.end()) {
      throw Error(ErrorCode::SiteClash, "site '" + id + "' exists in both components");
    }
    ids.push_back(id);
  }
  const std::size_t n1 = first.n_sites();
  const bool self = first.sites().includes_self() && second.sites().includes_self();
  std::vector<std::vector<std::size_t>> nbhd;
  auto add = [&](const SiteSet& s, std::size_t offset) {
    for (std::size_t x = 0; x < s.size(); ++x) {
      std::vector<std::size_t> nb;
      for (auto y : s.neighborhood(x)) {
        if (y != x || self) nb.push_back(y + offset);
      }
      if (self && !std::count(nb.begin(), nb.end(), x + offset)) nb.push_back(x + offset);
      nbhd.push_back(std::move(nb));
    }
  };
  add(first.sites(), 0);
  add(second.sites(), n1);
  SiteSet sites(std::move(ids), std::move(nbhd), self);

  const std::size_t q = first.alphabet().size();
  const std::size_t size1 = first.n_states();
  const std::size_t size2 = second.n_states();
  const StateSpace space(q, sites.size());
  std::vector<std::vector<double>> tables(sites.size(), std::vector<double>(space.size() * q));
  Eigen::VectorXd w(static_cast<Eigen::Index>(space.size()));
  for (std::size_t i1 = 0; i1 < size1; ++i1) {
    for (std::size_t i2 = 0; i2 < size2; ++i2) {
      const std::size_t s = i1 * size2 + i2;
      w[static_cast<Eigen::Index>(s)] = first.mu()[i1] * second.mu()[i2];
      for (std::size_t x = 0; x < sites.size(); ++x) {
        const auto row = x < n1 ? first.kernels().row(x, i1) : second.kernels().row(x - n1, i2);
        std::copy(row.begin(), row.end(), tables[x].begin() + static_cast<std::ptrdiff_t>(s * q));
      }
    }
  }
  w /= w.sum();
  auto kernels = KernelFamily::from_table(space, sites, std::move(tables));
  return Model(first.alphabet(), std::move(sites), std::move(kernels), Measure(std::move(w)));
}

}  // namespace ipslab
