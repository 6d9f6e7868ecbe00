#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

namespace betasplit {

using NodeId = std::int32_t;
inline constexpr NodeId kNoChild = -1;

// One node of a rooted binary tree stored in an arena. Leaves have no
// children. rank is 0 for unranked resolutions; interval and frozen only
// mean something on leaves of a RankedPlanarTree.
struct TreeNode {
  NodeId left = kNoChild;
  NodeId right = kNoChild;
  std::int32_t rank = 0;
  double lo = 0.0;
  double hi = 0.0;
  bool has_interval = false;
  bool frozen = false;

  bool is_leaf() const { return left == kNoChild; }
};

// Internal node counts below a node: (left subtree, right subtree).
struct SplitSizes {
  int left = 0;
  int right = 0;
  friend bool operator==(SplitSizes, SplitSizes) = default;
};

// Arena-backed rooted binary tree; node 0 is the root. The four resolution
// types below derive from it and differ in what they keep and in how child
// order is normalized.
class BinaryTree {
 public:
  std::span<const TreeNode> nodes() const { return nodes_; }
  const TreeNode& node(NodeId id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  static constexpr NodeId root() { return 0; }

  int leaf_count() const { return (static_cast<int>(nodes_.size()) + 1) / 2; }
  int internal_count() const { return leaf_count() - 1; }

  // Internal nodes in preorder.
  std::vector<NodeId> internal_nodes() const;
  // Number of internal nodes in the subtree rooted at each node (0 for leaves).
  std::vector<int> subtree_internal_counts() const;
  // Throws DomainError on a leaf.
  SplitSizes split_sizes(NodeId id) const;
  // (left, right) for every internal node, preorder.
  std::vector<SplitSizes> split_profile() const;

 protected:
  BinaryTree();
  explicit BinaryTree(std::vector<TreeNode> nodes);

  // Structural equality from the root; ranks and frozen marks compared on
  // request. Intervals never take part.
  bool same_structure(const BinaryTree& other, bool ranks, bool frozen) const;
  std::string newick_body(bool ranks, bool frozen) const;

  std::vector<TreeNode> nodes_;
};

class PlanarShape;
class RankedShape;
class TreeShape;

// Planar tree whose internal nodes carry the split order 1..n-1 (increasing
// away from the root). Leaves may carry interval labels and frozen marks.
class RankedPlanarTree : public BinaryTree {
 public:
  // The single-leaf tree.
  RankedPlanarTree() = default;
  // Validates ranks and, if present, leaf intervals.
  explicit RankedPlanarTree(std::vector<TreeNode> nodes);

  static RankedPlanarTree from_newick(std::string_view text);
  std::string to_newick() const;

  RankedPlanarTree mirror() const;
  // Same tree with interval labels and frozen marks erased.
  RankedPlanarTree without_leaf_labels() const;
  int frozen_count() const;

  friend bool operator==(const RankedPlanarTree& a, const RankedPlanarTree& b) {
    return a.same_structure(b, true, true);
  }
};

class PlanarShape : public BinaryTree {
 public:
  PlanarShape() = default;
  explicit PlanarShape(std::vector<TreeNode> nodes);

  static PlanarShape from_newick(std::string_view text);
  // "[., [[., .], .]]" notation.
  static PlanarShape from_brackets(std::string_view text);
  std::string to_newick() const;
  std::string to_brackets() const;

  PlanarShape mirror() const;

  friend bool operator==(const PlanarShape& a, const PlanarShape& b) { return a.same_structure(b, false, false); }
};

// Ranked, orientation-free. Children ordered canonically: the subtree with
// the smaller root rank first, a leaf child last.
class RankedShape : public BinaryTree {
 public:
  RankedShape() = default;
  // Canonicalizes child order.
  explicit RankedShape(std::vector<TreeNode> nodes);

  static RankedShape from_newick(std::string_view text);
  std::string to_newick() const;

  friend bool operator==(const RankedShape& a, const RankedShape& b) { return a.same_structure(b, true, false); }
};

// Unranked, orientation-free. Children ordered canonically: leaf before
// internal, internal subtrees by (leaf count, encoding).
class TreeShape : public BinaryTree {
 public:
  TreeShape() = default;
  explicit TreeShape(std::vector<TreeNode> nodes);

  static TreeShape from_newick(std::string_view text);
  std::string to_newick() const;

  friend bool operator==(const TreeShape& a, const TreeShape& b) { return a.same_structure(b, false, false); }
};

// Bijection between permutations of 1..n-1 and ranked planar trees on n
// leaves: the values are inserted into a binary search tree in sequence
// order and the node holding p[k] gets rank k + 1. The empty permutation
// maps to the single leaf.
using SplittingPermutation = std::vector<int>;
RankedPlanarTree perm_to_ranked_planar(std::span<const int> perm);
// Rank k node's in-order position among internal nodes, k = 1..n-1.
SplittingPermutation ranked_planar_to_perm(const RankedPlanarTree& tree);
bool is_permutation_of_1_to_n(std::span<const int> perm);

PlanarShape forget_ranks(const RankedPlanarTree& tree);
RankedShape forget_planarity(const RankedPlanarTree& tree);
TreeShape shape_of(const RankedPlanarTree& tree);
TreeShape shape_of(const PlanarShape& tree);
TreeShape shape_of(const RankedShape& tree);

// Product over internal nodes of C(nL + nR, nL): the number of rankings of
// a planar shape. Throws DomainError when it does not fit in 64 bits.
std::uint64_t catalan_coefficient(const PlanarShape& tree);
double log_catalan_coefficient(const PlanarShape& tree);

// Internal nodes with two leaf children.
int cherry_count(const BinaryTree& tree);
// Internal nodes whose two child subtrees are isomorphic shapes.
int iso_split_count(const TreeShape& tree);

std::int64_t colless(const TreeShape& tree);
std::int64_t sackin(const TreeShape& tree);

// Comb (caterpillar) and complete balanced shapes, used by tests and table1.
PlanarShape right_comb(int leaves);
// leaves must be a power of two.
PlanarShape balanced_planar(int leaves);

// JSON: {"rank": r, "left": ..., "right": ...} or "leaf" ("frozen" for a
// frozen leaf of a ranked planar tree). rank omitted when unranked.
nlohmann::json to_json(const BinaryTree& tree, bool ranks);
RankedPlanarTree ranked_planar_from_json(const nlohmann::json& j);
PlanarShape planar_from_json(const nlohmann::json& j);

}  // namespace betasplit
