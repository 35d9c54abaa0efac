#pragma once

// Full binary trees in their in-order embedding, T-partitions and the exact
// masses of the recursively defined partition measures.

#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ipslab {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline constexpr std::size_t kMaxEnumeratedLeaves = 10;

/// Full binary tree. Vertices are named by their in-order embedding into the
/// integers with the root at 0; leaves and interior vertices alternate, and
/// leaves sit on odd integers unless the tree is a single vertex.
class FullBinaryTree {
 public:
  /// The single-vertex tree {0}.
  FullBinaryTree();
  /// The tree whose root has subtrees `left` and `right`.
  static FullBinaryTree join(const FullBinaryTree& left, const FullBinaryTree& right);

  [[nodiscard]] std::size_t vertex_count() const noexcept { return nodes_.size(); }
  [[nodiscard]] std::size_t leaf_count() const noexcept { return (nodes_.size() + 1) / 2; }
  [[nodiscard]] int min_vertex() const noexcept { return -root_; }
  [[nodiscard]] int max_vertex() const noexcept { return static_cast<int>(nodes_.size()) - 1 - root_; }
  [[nodiscard]] bool contains(int v) const noexcept { return v >= min_vertex() && v <= max_vertex(); }
  [[nodiscard]] bool is_leaf(int v) const;
  /// Children and parent; nullopt where absent. Throw BadArgs for unknown v.
  [[nodiscard]] std::optional<int> left(int v) const;
  [[nodiscard]] std::optional<int> right(int v) const;
  [[nodiscard]] std::optional<int> parent(int v) const;
  [[nodiscard]] std::vector<int> vertices() const;
  [[nodiscard]] std::vector<int> leaves() const;

  /// Subtrees T_L, T_R of the root. Throw BadArgs on the single-vertex tree.
  [[nodiscard]] FullBinaryTree left_subtree() const;
  [[nodiscard]] FullBinaryTree right_subtree() const;
  /// Subtree rooted at v, re-embedded with v at 0.
  [[nodiscard]] FullBinaryTree subtree(int v) const;

  /// "." for a leaf, "(LR)" for an interior vertex.
  [[nodiscard]] std::string code() const;

  friend bool operator==(const FullBinaryTree& a, const FullBinaryTree& b) { return a.code() == b.code(); }

 private:
  struct Node {
    int left = -1;  // positions in nodes_, -1 if absent
    int right = -1;
    int parent = -1;
  };
  [[nodiscard]] int pos(int v) const;
  void append_code(int p, std::string& out) const;

  std::vector<Node> nodes_;  // indexed by in-order position
  int root_ = 0;
};

/// Canonical order: leaf count, then left-subtree leaf count, then left and
/// right subtrees recursively.
bool canonical_less(const FullBinaryTree& a, const FullBinaryTree& b);

/// All full binary trees with n leaves in canonical order. Throws BadArgs for
/// n = 0 and CapExceeded for n > 10.
std::vector<FullBinaryTree> enumerate_trees(std::size_t n);

/// T'_v: the leaf v receives two leaf children. Throws NotALeaf.
FullBinaryTree expand_tree(const FullBinaryTree& tree, int v);

/// B(T): the largest interior vertex whose two children are leaves; nullopt
/// stands for -inf (single-vertex tree).
std::optional<int> last_simple_branch(const FullBinaryTree& tree);

/// #v_-: number of leaves w < v.
std::size_t leaves_before(const FullBinaryTree& tree, int v);

/// T*: removes the two leaf children of B(T). Throws BadArgs on {0}.
FullBinaryTree contract_tree(const FullBinaryTree& tree);

/// Durations S on the vertices of a tree with S(root) = t and
/// S(l(v)) + S(r(v)) = S(v) within 1e-12 (t).
class TPartition {
 public:
  /// `durations` is indexed by vertex - min_vertex(). Throws BadArgs.
  TPartition(FullBinaryTree tree, std::vector<double> durations, double horizon);

  [[nodiscard]] const FullBinaryTree& tree() const noexcept { return tree_; }
  [[nodiscard]] double horizon() const noexcept { return horizon_; }
  [[nodiscard]] double duration(int v) const;

 private:
  FullBinaryTree tree_;
  std::vector<double> durations_;
  double horizon_;
};

/// Polynomial in t with exact rational coefficients; coefficient i multiplies t^i.
class RationalPolynomial {
 public:
  RationalPolynomial() = default;
  explicit RationalPolynomial(std::vector<Rational> coefficients);
  static RationalPolynomial monomial(Rational c, std::size_t degree);

  [[nodiscard]] const std::vector<Rational>& coefficients() const noexcept { return coeffs_; }
  [[nodiscard]] std::size_t degree() const noexcept { return coeffs_.empty() ? 0 : coeffs_.size() - 1; }
  [[nodiscard]] double operator()(double t) const;

  /// t -> int_0^t p(s) q(t - s) ds.
  static RationalPolynomial convolve(const RationalPolynomial& p, const RationalPolynomial& q);
  /// t -> t p(t).
  [[nodiscard]] RationalPolynomial times_t() const;

  friend bool operator==(const RationalPolynomial&, const RationalPolynomial&) = default;

 private:
  void trim();
  std::vector<Rational> coeffs_;
};

/// Total mass of m_{T,t} as a polynomial in t: 1 for {0}, otherwise
/// t int_0^t mass(T_L, s) mass(T_R, t - s) ds.
RationalPolynomial tree_mass_polynomial(const FullBinaryTree& tree);
/// tree_mass_polynomial evaluated at t. Throws NegativeTime.
double tree_mass(const FullBinaryTree& tree, double t);

/// (2k - 1)!! with (-1)!! = 1. Throws BadArgs for k < 0.
BigInt double_factorial_odd(int k);
/// 1 / (2n - 3)!!, the coefficient of t^{2n-2} in the mass bound.
Rational mass_bound_coefficient(std::size_t n);

struct DecompositionReport {
  std::size_t n = 0;
  std::size_t target_count = 0;    // |T_{n+1}|
  std::size_t produced = 0;        // expansions generated
  std::size_t max_multiplicity = 0;
  std::size_t min_multiplicity = 0;  // over T_{n+1}; 0 means some tree was missed
  bool ok = false;
};

/// Expands every T in T_n at the leaves v >= B(T) - 1 and checks that each
/// tree of T_{n+1} arises exactly once. Throws BadArgs for n = 0 and
/// CapExceeded for n > 8.
DecompositionReport check_decomposition(std::size_t n);

/// C_n = (2n)! / (n! (n+1)!).
BigInt catalan(std::size_t n);

/// |T_{n+1}| / (2n-1)!! with |T_{n+1}| counted by enumeration, and
/// 2^n / (n+1)!, both exact. Throws CapExceeded for n > 9.
std::pair<Rational, Rational> catalan_identity_sides(std::size_t n);

/// 2 sum_{k=0}^{N} x^k / (k+1)!.
double series_partial_sum(double x, std::size_t N);

}  // namespace ipslab
