#include "ipslab/trees.hpp"

#include <climits>
#include <cmath>

#include "ipslab/error.hpp"

namespace ipslab {

FullBinaryTree::FullBinaryTree() : nodes_(1), root_(0) {}

FullBinaryTree FullBinaryTree::join(const FullBinaryTree& left, const FullBinaryTree& right) {
  FullBinaryTree t;
  const int nl = static_cast<int>(left.nodes_.size());
  const int offset = nl + 1;
  t.nodes_.clear();
  t.nodes_.reserve(left.nodes_.size() + right.nodes_.size() + 1);
  t.nodes_ = left.nodes_;
  t.nodes_.push_back(Node{left.root_, offset + right.root_, -1});
  for (Node n : right.nodes_) {
    if (n.left >= 0) n.left += offset;
    if (n.right >= 0) n.right += offset;
    n.parent = n.parent >= 0 ? n.parent + offset : nl;
    t.nodes_.push_back(n);
  }
  t.nodes_[static_cast<std::size_t>(left.root_)].parent = nl;
  t.root_ = nl;
  return t;
}

int FullBinaryTree::pos(int v) const {
  if (!contains(v)) throw Error(ErrorCode::BadArgs, "vertex " + std::to_string(v) + " is not in the tree");
  return v + root_;
}

bool FullBinaryTree::is_leaf(int v) const { return nodes_[static_cast<std::size_t>(pos(v))].left < 0; }

std::optional<int> FullBinaryTree::left(int v) const {
  const int c = nodes_[static_cast<std::size_t>(pos(v))].left;
  return c < 0 ? std::nullopt : std::optional<int>(c - root_);
}

std::optional<int> FullBinaryTree::right(int v) const {
  const int c = nodes_[static_cast<std::size_t>(pos(v))].right;
  return c < 0 ? std::nullopt : std::optional<int>(c - root_);
}

std::optional<int> FullBinaryTree::parent(int v) const {
  const int c = nodes_[static_cast<std::size_t>(pos(v))].parent;
  return c < 0 ? std::nullopt : std::optional<int>(c - root_);
}

std::vector<int> FullBinaryTree::vertices() const {
  std::vector<int> out;
  for (int v = min_vertex(); v <= max_vertex(); ++v) out.push_back(v);
  return out;
}

std::vector<int> FullBinaryTree::leaves() const {
  std::vector<int> out;
  for (int v = min_vertex(); v <= max_vertex(); ++v) {
    if (is_leaf(v)) out.push_back(v);
  }
  return out;
}

FullBinaryTree FullBinaryTree::subtree(int v) const {
  if (is_leaf(v)) return FullBinaryTree();
  return join(subtree(*left(v)), subtree(*right(v)));
}

FullBinaryTree FullBinaryTree::left_subtree() const {
  if (is_leaf(0)) throw Error(ErrorCode::BadArgs, "the single-vertex tree has no subtrees");
  return subtree(*left(0));
}

FullBinaryTree FullBinaryTree::right_subtree() const {
  if (is_leaf(0)) throw Error(ErrorCode::BadArgs, "the single-vertex tree has no subtrees");
  return subtree(*right(0));
}

void FullBinaryTree::append_code(int p, std::string& out) const {
  const Node& n = nodes_[static_cast<std::size_t>(p)];
  if (n.left < 0) {
    out += '.';
    return;
  }
  out += '(';
  append_code(n.left, out);
  append_code(n.right, out);
  out += ')';
}

std::string FullBinaryTree::code() const {
  std::string out;
  append_code(root_, out);
  return out;
}

bool canonical_less(const FullBinaryTree& a, const FullBinaryTree& b) {
  if (a.leaf_count() != b.leaf_count()) return a.leaf_count() < b.leaf_count();
  if (a.leaf_count() == 1) return false;
  const FullBinaryTree al = a.left_subtree();
  const FullBinaryTree bl = b.left_subtree();
  if (al.leaf_count() != bl.leaf_count()) return al.leaf_count() < bl.leaf_count();
  if (canonical_less(al, bl)) return true;
  if (canonical_less(bl, al)) return false;
  return canonical_less(a.right_subtree(), b.right_subtree());
}

std::vector<FullBinaryTree> enumerate_trees(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::BadArgs, "trees need at least one leaf");
  if (n > kMaxEnumeratedLeaves) {
    throw Error(ErrorCode::CapExceeded, "tree enumeration is capped at " + std::to_string(kMaxEnumeratedLeaves) + " leaves");
  }
  std::vector<std::vector<FullBinaryTree>> by_leaves(n + 1);
  by_leaves[1].emplace_back();
  for (std::size_t m = 2; m <= n; ++m) {
    for (std::size_t k = 1; k < m; ++k) {
      for (const auto& l : by_leaves[k]) {
        for (const auto& r : by_leaves[m - k]) by_leaves[m].push_back(FullBinaryTree::join(l, r));
      }
    }
  }
  return by_leaves[n];
}

namespace {

FullBinaryTree rebuild(const FullBinaryTree& t, int v, int target, bool grow) {
  if (v == target) {
    return grow ? FullBinaryTree::join(FullBinaryTree(), FullBinaryTree()) : FullBinaryTree();
  }
  if (t.is_leaf(v)) return FullBinaryTree();
  return FullBinaryTree::join(rebuild(t, *t.left(v), target, grow), rebuild(t, *t.right(v), target, grow));
}

}  // namespace

FullBinaryTree expand_tree(const FullBinaryTree& tree, int v) {
  if (!tree.contains(v) || !tree.is_leaf(v)) {
    throw Error(ErrorCode::NotALeaf, "vertex " + std::to_string(v) + " is not a leaf");
  }
  return rebuild(tree, 0, v, true);
}

std::optional<int> last_simple_branch(const FullBinaryTree& tree) {
  std::optional<int> best;
  for (int v = tree.min_vertex(); v <= tree.max_vertex(); ++v) {
    if (tree.is_leaf(v)) continue;
    if (tree.is_leaf(*tree.left(v)) && tree.is_leaf(*tree.right(v))) best = v;
  }
  return best;
}

std::size_t leaves_before(const FullBinaryTree& tree, int v) {
  std::size_t count = 0;
  for (int w = tree.min_vertex(); w < v && w <= tree.max_vertex(); ++w) {
    if (tree.is_leaf(w)) ++count;
  }
  return count;
}

FullBinaryTree contract_tree(const FullBinaryTree& tree) {
  const auto b = last_simple_branch(tree);
  if (!b) throw Error(ErrorCode::BadArgs, "the single-vertex tree cannot be contracted");
  return rebuild(tree, 0, *b, false);
}

TPartition::TPartition(FullBinaryTree tree, std::vector<double> durations, double horizon)
    : tree_(std::move(tree)), durations_(std::move(durations)), horizon_(horizon) {
  if (durations_.size() != tree_.vertex_count()) throw Error(ErrorCode::BadArgs, "one duration per vertex");
  const double tol = 1e-12 * std::max(1.0, horizon);
  for (double s : durations_) {
    if (!(s >= 0.0)) throw Error(ErrorCode::BadArgs, "durations must be nonnegative");
  }
  if (std::abs(duration(0) - horizon) > tol) throw Error(ErrorCode::BadArgs, "the root duration must equal t");
  for (int v : tree_.vertices()) {
    if (tree_.is_leaf(v)) continue;
    if (std::abs(duration(*tree_.left(v)) + duration(*tree_.right(v)) - duration(v)) > tol) {
      throw Error(ErrorCode::BadArgs, "children durations must add up at vertex " + std::to_string(v));
    }
  }
}

double TPartition::duration(int v) const {
  if (!tree_.contains(v)) throw Error(ErrorCode::BadArgs, "vertex is not in the tree");
  return durations_[static_cast<std::size_t>(v - tree_.min_vertex())];
}

RationalPolynomial::RationalPolynomial(std::vector<Rational> coefficients) : coeffs_(std::move(coefficients)) {
  trim();
}

RationalPolynomial RationalPolynomial::monomial(Rational c, std::size_t degree) {
  std::vector<Rational> coeffs(degree + 1);
  coeffs[degree] = std::move(c);
  return RationalPolynomial(std::move(coeffs));
}

void RationalPolynomial::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

double RationalPolynomial::operator()(double t) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * t + it->convert_to<double>();
  return acc;
}

namespace {

BigInt factorial(std::size_t k) {
  BigInt out = 1;
  for (std::size_t i = 2; i <= k; ++i) out *= i;
  return out;
}

}  // namespace

RationalPolynomial RationalPolynomial::convolve(const RationalPolynomial& p, const RationalPolynomial& q) {
  if (p.coeffs_.empty() || q.coeffs_.empty()) return RationalPolynomial();
  std::vector<Rational> out(p.coeffs_.size() + q.coeffs_.size());
  // int_0^t s^a (t-s)^b ds = a! b! / (a+b+1)! t^{a+b+1}
  for (std::size_t a = 0; a < p.coeffs_.size(); ++a) {
    if (p.coeffs_[a] == 0) continue;
    for (std::size_t b = 0; b < q.coeffs_.size(); ++b) {
      if (q.coeffs_[b] == 0) continue;
      const Rational beta(factorial(a) * factorial(b), factorial(a + b + 1));
      out[a + b + 1] += p.coeffs_[a] * q.coeffs_[b] * beta;
    }
  }
  return RationalPolynomial(std::move(out));
}

RationalPolynomial RationalPolynomial::times_t() const {
  if (coeffs_.empty()) return *this;
  std::vector<Rational> out(coeffs_.size() + 1);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) out[i + 1] = coeffs_[i];
  return RationalPolynomial(std::move(out));
}

RationalPolynomial tree_mass_polynomial(const FullBinaryTree& tree) {
  if (tree.vertex_count() == 1) return RationalPolynomial::monomial(1, 0);
  return RationalPolynomial::convolve(tree_mass_polynomial(tree.left_subtree()),
                                      tree_mass_polynomial(tree.right_subtree()))
      .times_t();
}

double tree_mass(const FullBinaryTree& tree, double t) {
  if (!(t >= 0.0)) throw Error(ErrorCode::NegativeTime, "tree mass needs t >= 0");
  return tree_mass_polynomial(tree)(t);
}

BigInt double_factorial_odd(int k) {
  if (k < 0) throw Error(ErrorCode::BadArgs, "(2k-1)!! needs k >= 0");
  BigInt out = 1;
  for (int i = 1; i <= k; ++i) out *= 2 * i - 1;
  return out;
}

Rational mass_bound_coefficient(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::BadArgs, "trees need at least one leaf");
  // (2n-3)!! = (2(n-1) - 1)!!
  return Rational(BigInt(1), double_factorial_odd(static_cast<int>(n) - 1));
}

DecompositionReport check_decomposition(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::BadArgs, "trees need at least one leaf");
  if (n > 8) throw Error(ErrorCode::CapExceeded, "the decomposition check is capped at n = 8");
  DecompositionReport report;
  report.n = n;
  std::map<std::string, std::size_t> multiplicity;
  for (const auto& t : enumerate_trees(n + 1)) multiplicity[t.code()] = 0;
  report.target_count = multiplicity.size();

  bool stray = false;
  for (const auto& t : enumerate_trees(n)) {
    const auto b = last_simple_branch(t);
    const int threshold = b ? *b - 1 : INT_MIN;
    for (int v : t.leaves()) {
      if (v < threshold) continue;
      ++report.produced;
      auto it = multiplicity.find(expand_tree(t, v).code());
      if (it == multiplicity.end()) {
        stray = true;
      } else {
        ++it->second;
      }
    }
  }
  report.min_multiplicity = SIZE_MAX;
  for (const auto& [code, m] : multiplicity) {
    report.max_multiplicity = std::max(report.max_multiplicity, m);
    report.min_multiplicity = std::min(report.min_multiplicity, m);
  }
  report.ok = !stray && report.min_multiplicity == 1 && report.max_multiplicity == 1;
  return report;
}

BigInt catalan(std::size_t n) { return factorial(2 * n) / (factorial(n) * factorial(n + 1)); }

std::pair<Rational, Rational> catalan_identity_sides(std::size_t n) {
  const BigInt count = enumerate_trees(n + 1).size();
  const Rational lhs(count, double_factorial_odd(static_cast<int>(n)));
  const Rational rhs(BigInt(1) << n, factorial(n + 1));
  return {lhs, rhs};
}

double series_partial_sum(double x, std::size_t N) {
  double term = 1.0;  // x^k / (k+1)!
  double sum = 0.0;
  for (std::size_t k = 0; k <= N; ++k) {
    sum += term;
    term *= x / static_cast<double>(k + 2);
  }
  return 2.0 * sum;
}

}  // namespace ipslab
