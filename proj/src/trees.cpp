#include "betasplit/trees.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <limits>
#include <map>
#include <optional>

#include "betasplit/error.hpp"
#include "betasplit/numerics.hpp"

namespace betasplit {

__extension__ using u128 = unsigned __int128;

namespace {

std::vector<TreeNode> single_leaf() { return {TreeNode{}}; }

std::vector<NodeId> preorder(std::span<const TreeNode> nodes) {
  std::vector<NodeId> order;
  order.reserve(nodes.size());
  std::vector<NodeId> stack{0};
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    order.push_back(id);
    const TreeNode& n = nodes[static_cast<std::size_t>(id)];
    if (!n.is_leaf()) {
      stack.push_back(n.right);
      stack.push_back(n.left);
    }
  }
  return order;
}

void validate_arena(std::span<const TreeNode> nodes) {
  if (nodes.empty() || nodes.size() % 2 == 0) throw ValidationError("tree: node count must be odd and positive");
  std::vector<int> parents(nodes.size(), 0);
  for (const TreeNode& n : nodes) {
    if ((n.left == kNoChild) != (n.right == kNoChild)) throw ValidationError("tree: node with a single child");
    if (n.is_leaf()) continue;
    for (NodeId c : {n.left, n.right}) {
      if (c <= 0 || static_cast<std::size_t>(c) >= nodes.size()) throw ValidationError("tree: child index out of range");
      ++parents[static_cast<std::size_t>(c)];
    }
  }
  if (parents[0] != 0) throw ValidationError("tree: root has a parent");
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    if (parents[i] != 1) throw ValidationError("tree: node without exactly one parent");
  }
  if (preorder(nodes).size() != nodes.size()) throw ValidationError("tree: unreachable nodes");
}

// Rebuilds the subtree at `id` of `src` into `dst` in preorder, letting
// `swap_children` choose the child order at each internal node.
NodeId copy_subtree(std::span<const TreeNode> src, NodeId id, std::vector<TreeNode>& dst,
                    const std::function<bool(NodeId)>& swap_children, bool keep_ranks, bool keep_leaf_labels) {
  const TreeNode& s = src[static_cast<std::size_t>(id)];
  const auto out = static_cast<NodeId>(dst.size());
  TreeNode n;
  n.rank = keep_ranks ? s.rank : 0;
  if (s.is_leaf() && keep_leaf_labels) {
    n.lo = s.lo;
    n.hi = s.hi;
    n.has_interval = s.has_interval;
    n.frozen = s.frozen;
  }
  dst.push_back(n);
  if (!s.is_leaf()) {
    NodeId first = s.left;
    NodeId second = s.right;
    if (swap_children(id)) std::swap(first, second);
    const NodeId l = copy_subtree(src, first, dst, swap_children, keep_ranks, keep_leaf_labels);
    const NodeId r = copy_subtree(src, second, dst, swap_children, keep_ranks, keep_leaf_labels);
    dst[static_cast<std::size_t>(out)].left = l;
    dst[static_cast<std::size_t>(out)].right = r;
  }
  return out;
}

std::vector<TreeNode> rebuild(std::span<const TreeNode> src, const std::function<bool(NodeId)>& swap_children,
                              bool keep_ranks, bool keep_leaf_labels) {
  std::vector<TreeNode> dst;
  dst.reserve(src.size());
  copy_subtree(src, 0, dst, swap_children, keep_ranks, keep_leaf_labels);
  return dst;
}

const auto kNoSwap = [](NodeId) { return false; };
const auto kSwapAll = [](NodeId) { return true; };

std::vector<int> leaf_counts(std::span<const TreeNode> nodes) {
  std::vector<int> counts(nodes.size(), 1);
  const auto order = preorder(nodes);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const TreeNode& n = nodes[static_cast<std::size_t>(*it)];
    if (!n.is_leaf()) {
      counts[static_cast<std::size_t>(*it)] =
          counts[static_cast<std::size_t>(n.left)] + counts[static_cast<std::size_t>(n.right)];
    }
  }
  return counts;
}

// Canonical encodings of unranked, orientation-free subtrees. Every node's
// string is built with its children already in canonical order.
std::vector<std::string> shape_encodings(std::span<const TreeNode> nodes, const std::vector<int>& leaves) {
  std::vector<std::string> enc(nodes.size());
  const auto order = preorder(nodes);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const auto id = static_cast<std::size_t>(*it);
    const TreeNode& n = nodes[id];
    if (n.is_leaf()) continue;
    const auto l = static_cast<std::size_t>(n.left);
    const auto r = static_cast<std::size_t>(n.right);
    const bool swap = std::make_pair(leaves[r], std::cref(enc[r])) < std::make_pair(leaves[l], std::cref(enc[l]));
    enc[id] = "(" + enc[swap ? r : l] + "," + enc[swap ? l : r] + ")";
  }
  return enc;
}

// ---------------------------------------------------------------------------
// Newick and bracket parsing.

struct ParsedTree {
  std::vector<TreeNode> nodes;
  bool any_internal_label = false;
  bool all_internal_labels = true;
  bool any_frozen = false;
};

class NewickParser {
 public:
  explicit NewickParser(std::string_view text) : text_(text) {}

  ParsedTree parse() {
    skip_ws();
    subtree();
    skip_ws();
    if (!consume(';')) fail("expected ';'");
    skip_ws();
    if (pos_ != text_.size()) fail("trailing characters");
    return std::move(out_);
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError("newick: " + msg, pos_); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool consume(char c) {
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void branch_length() {
    skip_ws();
    if (!consume(':')) return;
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.' ||
                                   text_[pos_] == 'e' || text_[pos_] == 'E' || text_[pos_] == '-' ||
                                   text_[pos_] == '+')) {
      ++pos_;
    }
    if (start == pos_) fail("expected branch length");
  }

  NodeId subtree() {
    skip_ws();
    const auto id = static_cast<NodeId>(out_.nodes.size());
    out_.nodes.emplace_back();
    if (consume('(')) {
      const NodeId l = subtree();
      branch_length();
      skip_ws();
      if (!consume(',')) fail("expected ','");
      const NodeId r = subtree();
      branch_length();
      skip_ws();
      if (!consume(')')) fail("expected ')'");
      skip_ws();
      TreeNode& n = out_.nodes[static_cast<std::size_t>(id)];
      n.left = l;
      n.right = r;
      const std::size_t start = pos_;
      long long rank = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        rank = rank * 10 + (text_[pos_] - '0');
        if (rank > std::numeric_limits<std::int32_t>::max()) fail("rank too large");
        ++pos_;
      }
      if (pos_ > start) {
        out_.nodes[static_cast<std::size_t>(id)].rank = static_cast<std::int32_t>(rank);
        out_.any_internal_label = true;
      } else {
        out_.all_internal_labels = false;
      }
    } else if (consume('*')) {
      out_.nodes[static_cast<std::size_t>(id)].frozen = true;
      out_.any_frozen = true;
    } else if (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != ')' && text_[pos_] != ':' &&
               text_[pos_] != ';') {
      fail("unexpected character");
    }
    if (id == 0) branch_length();
    return id;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  ParsedTree out_;
};

ParsedTree parse_newick(std::string_view text, bool ranked, bool allow_frozen) {
  ParsedTree p = NewickParser(text).parse();
  const bool has_internal = p.nodes.size() > 1;
  if (ranked && has_internal && !p.all_internal_labels) throw ParseError("newick: missing rank label", 0);
  if (!ranked && p.any_internal_label) throw ParseError("newick: unexpected rank label", 0);
  if (!allow_frozen && p.any_frozen) throw ParseError("newick: frozen mark not allowed at this resolution", 0);
  return p;
}

class BracketParser {
 public:
  explicit BracketParser(std::string_view text) : text_(text) {}

  std::vector<TreeNode> parse() {
    node();
    skip_ws();
    if (pos_ != text_.size()) throw ParseError("brackets: trailing characters", pos_);
    return std::move(nodes_);
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  void expect(char c) {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != c) throw ParseError(std::string("brackets: expected '") + c + "'", pos_);
    ++pos_;
  }

  NodeId node() {
    skip_ws();
    const auto id = static_cast<NodeId>(nodes_.size());
    nodes_.emplace_back();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      return id;
    }
    expect('[');
    const NodeId l = node();
    expect(',');
    const NodeId r = node();
    expect(']');
    nodes_[static_cast<std::size_t>(id)].left = l;
    nodes_[static_cast<std::size_t>(id)].right = r;
    return id;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::vector<TreeNode> nodes_;
};

void validate_ranks(std::span<const TreeNode> nodes) {
  const auto internal = static_cast<std::size_t>((nodes.size() - 1) / 2);
  std::vector<bool> seen(internal + 1, false);
  for (const TreeNode& n : nodes) {
    if (n.is_leaf()) continue;
    if (n.rank < 1 || static_cast<std::size_t>(n.rank) > internal || seen[static_cast<std::size_t>(n.rank)]) {
      throw ValidationError("ranked tree: ranks must be a permutation of 1..n-1");
    }
    seen[static_cast<std::size_t>(n.rank)] = true;
    for (NodeId c : {n.left, n.right}) {
      const TreeNode& child = nodes[static_cast<std::size_t>(c)];
      if (!child.is_leaf() && child.rank <= n.rank) {
        throw ValidationError("ranked tree: ranks must increase away from the root");
      }
    }
  }
}

void validate_intervals(std::span<const TreeNode> nodes) {
  std::vector<const TreeNode*> leaves;
  bool any = false;
  bool all = true;
  for (NodeId id : preorder(nodes)) {
    const TreeNode& n = nodes[static_cast<std::size_t>(id)];
    if (!n.is_leaf()) continue;
    leaves.push_back(&n);
    any = any || n.has_interval;
    all = all && n.has_interval;
  }
  if (!any) return;
  if (!all) throw ValidationError("ranked tree: interval labels on some leaves only");
  // Preorder visits leaves left to right, which is the order of the cells.
  double expected_lo = 0.0;
  for (const TreeNode* leaf : leaves) {
    if (leaf->lo != expected_lo || leaf->hi < leaf->lo) {
      throw ValidationError("ranked tree: leaf intervals do not tile [0, 1] in order");
    }
    expected_lo = leaf->hi;
  }
  if (expected_lo != 1.0) throw ValidationError("ranked tree: leaf intervals do not reach 1");
}

std::vector<TreeNode> canonical_ranked(std::span<const TreeNode> nodes) {
  std::vector<std::int32_t> min_rank(nodes.size(), std::numeric_limits<std::int32_t>::max());
  const auto order = preorder(nodes);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const auto id = static_cast<std::size_t>(*it);
    const TreeNode& n = nodes[id];
    if (n.is_leaf()) continue;
    min_rank[id] = std::min({n.rank, min_rank[static_cast<std::size_t>(n.left)],
                             min_rank[static_cast<std::size_t>(n.right)]});
  }
  return rebuild(
      nodes,
      [&](NodeId id) {
        const TreeNode& n = nodes[static_cast<std::size_t>(id)];
        return min_rank[static_cast<std::size_t>(n.right)] < min_rank[static_cast<std::size_t>(n.left)];
      },
      true, false);
}

std::vector<TreeNode> canonical_shape(std::span<const TreeNode> nodes) {
  const auto leaves = leaf_counts(nodes);
  const auto enc = shape_encodings(nodes, leaves);
  return rebuild(
      nodes,
      [&](NodeId id) {
        const TreeNode& n = nodes[static_cast<std::size_t>(id)];
        const auto l = static_cast<std::size_t>(n.left);
        const auto r = static_cast<std::size_t>(n.right);
        return std::make_pair(leaves[r], std::cref(enc[r])) < std::make_pair(leaves[l], std::cref(enc[l]));
      },
      false, false);
}

std::uint64_t checked_binomial(std::uint64_t n, std::uint64_t k) {
  k = std::min(k, n - k);
  u128 result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;
    if (result > std::numeric_limits<std::uint64_t>::max()) throw DomainError("catalan_coefficient: overflow");
  }
  return static_cast<std::uint64_t>(result);
}

}  // namespace

// ---------------------------------------------------------------------------
// BinaryTree

BinaryTree::BinaryTree() : nodes_(single_leaf()) {}

BinaryTree::BinaryTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) { validate_arena(nodes_); }

std::vector<NodeId> BinaryTree::internal_nodes() const {
  std::vector<NodeId> out;
  out.reserve(static_cast<std::size_t>(internal_count()));
  for (NodeId id : preorder(nodes_)) {
    if (!node(id).is_leaf()) out.push_back(id);
  }
  return out;
}

std::vector<int> BinaryTree::subtree_internal_counts() const {
  std::vector<int> counts(nodes_.size(), 0);
  const auto order = preorder(nodes_);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const TreeNode& n = node(*it);
    if (!n.is_leaf()) {
      counts[static_cast<std::size_t>(*it)] =
          1 + counts[static_cast<std::size_t>(n.left)] + counts[static_cast<std::size_t>(n.right)];
    }
  }
  return counts;
}

SplitSizes BinaryTree::split_sizes(NodeId id) const {
  const TreeNode& n = node(id);
  if (n.is_leaf()) throw DomainError("split_sizes: node is a leaf");
  const auto counts = subtree_internal_counts();
  return {counts[static_cast<std::size_t>(n.left)], counts[static_cast<std::size_t>(n.right)]};
}

std::vector<SplitSizes> BinaryTree::split_profile() const {
  const auto counts = subtree_internal_counts();
  std::vector<SplitSizes> out;
  out.reserve(static_cast<std::size_t>(internal_count()));
  for (NodeId id : internal_nodes()) {
    const TreeNode& n = node(id);
    out.push_back({counts[static_cast<std::size_t>(n.left)], counts[static_cast<std::size_t>(n.right)]});
  }
  return out;
}

bool BinaryTree::same_structure(const BinaryTree& other, bool ranks, bool frozen) const {
  if (nodes_.size() != other.nodes_.size()) return false;
  std::vector<std::pair<NodeId, NodeId>> stack{{0, 0}};
  while (!stack.empty()) {
    const auto [a, b] = stack.back();
    stack.pop_back();
    const TreeNode& x = node(a);
    const TreeNode& y = other.node(b);
    if (x.is_leaf() != y.is_leaf()) return false;
    if (x.is_leaf()) {
      if (frozen && x.frozen != y.frozen) return false;
      continue;
    }
    if (ranks && x.rank != y.rank) return false;
    stack.emplace_back(x.left, y.left);
    stack.emplace_back(x.right, y.right);
  }
  return true;
}

std::string BinaryTree::newick_body(bool ranks, bool frozen) const {
  std::string out;
  std::function<void(NodeId)> write = [&](NodeId id) {
    const TreeNode& n = node(id);
    if (n.is_leaf()) {
      if (frozen && n.frozen) out += '*';
      return;
    }
    out += '(';
    write(n.left);
    out += ',';
    write(n.right);
    out += ')';
    if (ranks) out += std::to_string(n.rank);
  };
  write(0);
  return out;
}

// ---------------------------------------------------------------------------
// Resolutions

RankedPlanarTree::RankedPlanarTree(std::vector<TreeNode> nodes) : BinaryTree(std::move(nodes)) {
  validate_ranks(nodes_);
  validate_intervals(nodes_);
}

RankedPlanarTree RankedPlanarTree::from_newick(std::string_view text) {
  return RankedPlanarTree(parse_newick(text, true, true).nodes);
}

std::string RankedPlanarTree::to_newick() const { return newick_body(true, true) + ";"; }

RankedPlanarTree RankedPlanarTree::mirror() const {
  auto nodes = rebuild(nodes_, kSwapAll, true, true);
  // Mirroring reverses the cell order, so intervals are reflected. Both
  // neighbours of a breakpoint x get the same 1 - x, so the tiling stays exact.
  for (TreeNode& n : nodes) {
    if (n.has_interval) {
      const double lo = 1.0 - n.hi;
      const double hi = 1.0 - n.lo;
      n.lo = lo;
      n.hi = hi;
    }
  }
  return RankedPlanarTree(std::move(nodes));
}

RankedPlanarTree RankedPlanarTree::without_leaf_labels() const {
  return RankedPlanarTree(rebuild(nodes_, kNoSwap, true, false));
}

int RankedPlanarTree::frozen_count() const {
  int count = 0;
  for (const TreeNode& n : nodes_) count += (n.is_leaf() && n.frozen) ? 1 : 0;
  return count;
}

PlanarShape::PlanarShape(std::vector<TreeNode> nodes) : BinaryTree(std::move(nodes)) {
  for (TreeNode& n : nodes_) {
    n.rank = 0;
    n.frozen = false;
    n.has_interval = false;
  }
}

PlanarShape PlanarShape::from_newick(std::string_view text) {
  return PlanarShape(parse_newick(text, false, false).nodes);
}

PlanarShape PlanarShape::from_brackets(std::string_view text) { return PlanarShape(BracketParser(text).parse()); }

std::string PlanarShape::to_newick() const { return newick_body(false, false) + ";"; }

std::string PlanarShape::to_brackets() const {
  std::string out;
  std::function<void(NodeId)> write = [&](NodeId id) {
    const TreeNode& n = node(id);
    if (n.is_leaf()) {
      out += '.';
      return;
    }
    out += '[';
    write(n.left);
    out += ", ";
    write(n.right);
    out += ']';
  };
  write(0);
  return out;
}

PlanarShape PlanarShape::mirror() const { return PlanarShape(rebuild(nodes_, kSwapAll, false, false)); }

RankedShape::RankedShape(std::vector<TreeNode> nodes) : BinaryTree(std::move(nodes)) {
  validate_ranks(nodes_);
  nodes_ = canonical_ranked(nodes_);
}

RankedShape RankedShape::from_newick(std::string_view text) {
  return RankedShape(parse_newick(text, true, false).nodes);
}

std::string RankedShape::to_newick() const { return newick_body(true, false) + ";"; }

TreeShape::TreeShape(std::vector<TreeNode> nodes) : BinaryTree(std::move(nodes)) {
  nodes_ = canonical_shape(nodes_);
}

TreeShape TreeShape::from_newick(std::string_view text) { return TreeShape(parse_newick(text, false, false).nodes); }

std::string TreeShape::to_newick() const { return newick_body(false, false) + ";"; }

// ---------------------------------------------------------------------------
// Bijection and projections

bool is_permutation_of_1_to_n(std::span<const int> perm) {
  std::vector<bool> seen(perm.size() + 1, false);
  for (int v : perm) {
    if (v < 1 || static_cast<std::size_t>(v) > perm.size() || seen[static_cast<std::size_t>(v)]) return false;
    seen[static_cast<std::size_t>(v)] = true;
  }
  return true;
}

RankedPlanarTree perm_to_ranked_planar(std::span<const int> perm) {
  if (!is_permutation_of_1_to_n(perm)) throw ValidationError("perm_to_ranked_planar: not a permutation of 1..n-1");
  if (perm.empty()) return RankedPlanarTree();
  // Binary search tree skeleton over the values; slot k holds perm[k].
  const std::size_t m = perm.size();
  std::vector<int> left(m, -1);
  std::vector<int> right(m, -1);
  for (std::size_t k = 1; k < m; ++k) {
    std::size_t at = 0;
    for (;;) {
      int& next = perm[k] < perm[at] ? left[at] : right[at];
      if (next < 0) {
        next = static_cast<int>(k);
        break;
      }
      at = static_cast<std::size_t>(next);
    }
  }
  std::vector<TreeNode> nodes;
  nodes.reserve(2 * m + 1);
  std::function<NodeId(int)> emit = [&](int slot) -> NodeId {
    const auto id = static_cast<NodeId>(nodes.size());
    nodes.emplace_back();
    if (slot < 0) return id;
    nodes[static_cast<std::size_t>(id)].rank = slot + 1;
    const NodeId l = emit(left[static_cast<std::size_t>(slot)]);
    const NodeId r = emit(right[static_cast<std::size_t>(slot)]);
    nodes[static_cast<std::size_t>(id)].left = l;
    nodes[static_cast<std::size_t>(id)].right = r;
    return id;
  };
  emit(0);
  return RankedPlanarTree(std::move(nodes));
}

SplittingPermutation ranked_planar_to_perm(const RankedPlanarTree& tree) {
  SplittingPermutation perm(static_cast<std::size_t>(tree.internal_count()), 0);
  int position = 0;
  std::function<void(NodeId)> inorder = [&](NodeId id) {
    const TreeNode& n = tree.node(id);
    if (n.is_leaf()) return;
    inorder(n.left);
    perm[static_cast<std::size_t>(n.rank - 1)] = ++position;
    inorder(n.right);
  };
  inorder(BinaryTree::root());
  return perm;
}

PlanarShape forget_ranks(const RankedPlanarTree& tree) {
  return PlanarShape(std::vector<TreeNode>(tree.nodes().begin(), tree.nodes().end()));
}

RankedShape forget_planarity(const RankedPlanarTree& tree) {
  return RankedShape(rebuild(tree.nodes(), kNoSwap, true, false));
}

TreeShape shape_of(const RankedPlanarTree& tree) { return TreeShape(rebuild(tree.nodes(), kNoSwap, false, false)); }
TreeShape shape_of(const PlanarShape& tree) { return TreeShape(rebuild(tree.nodes(), kNoSwap, false, false)); }
TreeShape shape_of(const RankedShape& tree) { return TreeShape(rebuild(tree.nodes(), kNoSwap, false, false)); }

// ---------------------------------------------------------------------------
// Counts and indices

std::uint64_t catalan_coefficient(const PlanarShape& tree) {
  u128 product = 1;
  for (SplitSizes s : tree.split_profile()) {
    product *= checked_binomial(static_cast<std::uint64_t>(s.left + s.right), static_cast<std::uint64_t>(s.left));
    if (product > std::numeric_limits<std::uint64_t>::max()) throw DomainError("catalan_coefficient: overflow");
  }
  return static_cast<std::uint64_t>(product);
}

double log_catalan_coefficient(const PlanarShape& tree) {
  double sum = 0.0;
  for (SplitSizes s : tree.split_profile()) sum += log_binomial(s.left + s.right, s.left);
  return sum;
}

int cherry_count(const BinaryTree& tree) {
  int count = 0;
  for (const TreeNode& n : tree.nodes()) {
    if (!n.is_leaf() && tree.node(n.left).is_leaf() && tree.node(n.right).is_leaf()) ++count;
  }
  return count;
}

int iso_split_count(const TreeShape& tree) {
  const auto leaves = leaf_counts(tree.nodes());
  const auto enc = shape_encodings(tree.nodes(), leaves);
  int count = 0;
  for (const TreeNode& n : tree.nodes()) {
    if (!n.is_leaf() && enc[static_cast<std::size_t>(n.left)] == enc[static_cast<std::size_t>(n.right)]) ++count;
  }
  return count;
}

std::int64_t colless(const TreeShape& tree) {
  const auto leaves = leaf_counts(tree.nodes());
  std::int64_t sum = 0;
  for (const TreeNode& n : tree.nodes()) {
    if (!n.is_leaf()) sum += std::abs(leaves[static_cast<std::size_t>(n.left)] - leaves[static_cast<std::size_t>(n.right)]);
  }
  return sum;
}

std::int64_t sackin(const TreeShape& tree) {
  if (tree.leaf_count() == 1) return 0;
  std::int64_t sum = 0;
  std::vector<std::pair<NodeId, std::int64_t>> stack{{0, 0}};
  while (!stack.empty()) {
    const auto [id, depth] = stack.back();
    stack.pop_back();
    const TreeNode& n = tree.node(id);
    if (n.is_leaf()) {
      sum += depth;
    } else {
      stack.emplace_back(n.left, depth + 1);
      stack.emplace_back(n.right, depth + 1);
    }
  }
  return sum;
}

PlanarShape right_comb(int leaves) {
  if (leaves < 1) throw DomainError("right_comb: need at least one leaf");
  std::vector<TreeNode> nodes;
  nodes.reserve(static_cast<std::size_t>(2 * leaves - 1));
  // Preorder: internal, leaf, internal, leaf, ..., leaf, leaf.
  for (int i = 0; i < leaves - 1; ++i) {
    const auto id = static_cast<NodeId>(nodes.size());
    nodes.push_back({id + 1, id + 2});
    nodes.emplace_back();
  }
  nodes.emplace_back();
  return PlanarShape(std::move(nodes));
}

PlanarShape balanced_planar(int leaves) {
  if (leaves < 1 || (leaves & (leaves - 1)) != 0) throw DomainError("balanced_planar: leaf count must be a power of two");
  std::vector<TreeNode> nodes;
  std::function<NodeId(int)> emit = [&](int k) -> NodeId {
    const auto id = static_cast<NodeId>(nodes.size());
    nodes.emplace_back();
    if (k == 1) return id;
    const NodeId l = emit(k / 2);
    const NodeId r = emit(k / 2);
    nodes[static_cast<std::size_t>(id)].left = l;
    nodes[static_cast<std::size_t>(id)].right = r;
    return id;
  };
  emit(leaves);
  return PlanarShape(std::move(nodes));
}

// ---------------------------------------------------------------------------
// JSON

nlohmann::json to_json(const BinaryTree& tree, bool ranks) {
  std::function<nlohmann::json(NodeId)> emit = [&](NodeId id) -> nlohmann::json {
    const TreeNode& n = tree.node(id);
    if (n.is_leaf()) return n.frozen ? "frozen" : "leaf";
    nlohmann::json j;
    if (ranks) j["rank"] = n.rank;
    j["left"] = emit(n.left);
    j["right"] = emit(n.right);
    return j;
  };
  return emit(BinaryTree::root());
}

namespace {

std::vector<TreeNode> nodes_from_json(const nlohmann::json& root, bool ranked) {
  std::vector<TreeNode> nodes;
  std::function<NodeId(const nlohmann::json&)> read = [&](const nlohmann::json& j) -> NodeId {
    const auto id = static_cast<NodeId>(nodes.size());
    nodes.emplace_back();
    if (j.is_string()) {
      const auto s = j.get<std::string>();
      if (s == "frozen" && ranked) {
        nodes[static_cast<std::size_t>(id)].frozen = true;
      } else if (s != "leaf") {
        throw ParseError("json: unknown leaf tag '" + s + "'", 0);
      }
      return id;
    }
    if (!j.is_object() || !j.contains("left") || !j.contains("right")) throw ParseError("json: malformed node", 0);
    if (ranked) {
      if (!j.contains("rank") || !j["rank"].is_number_integer()) throw ParseError("json: missing rank", 0);
      nodes[static_cast<std::size_t>(id)].rank = j["rank"].get<std::int32_t>();
    } else if (j.contains("rank")) {
      throw ParseError("json: unexpected rank", 0);
    }
    const NodeId l = read(j["left"]);
    const NodeId r = read(j["right"]);
    nodes[static_cast<std::size_t>(id)].left = l;
    nodes[static_cast<std::size_t>(id)].right = r;
    return id;
  };
  read(root);
  return nodes;
}

}  // namespace

RankedPlanarTree ranked_planar_from_json(const nlohmann::json& j) { return RankedPlanarTree(nodes_from_json(j, true)); }

PlanarShape planar_from_json(const nlohmann::json& j) { return PlanarShape(nodes_from_json(j, false)); }

}  // namespace betasplit
