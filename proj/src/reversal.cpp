#include "betasplit/reversal.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "betasplit/error.hpp"
#include "betasplit/oracle.hpp"

namespace betasplit {

PlanarShape remove_cherry(const PlanarShape& tree, NodeId node) {
  const TreeNode& target = tree.node(node);
  if (target.is_leaf() || !tree.node(target.left).is_leaf() || !tree.node(target.right).is_leaf()) {
    throw DomainError("remove_cherry: node is not a cherry");
  }
  std::vector<TreeNode> nodes;
  const auto copy = [&](auto&& self, NodeId id) -> NodeId {
    const auto out = static_cast<NodeId>(nodes.size());
    nodes.push_back({});
    if (id == node) return out;
    const TreeNode& n = tree.node(id);
    if (n.is_leaf()) return out;
    const NodeId l = self(self, n.left);
    const NodeId r = self(self, n.right);
    nodes[static_cast<std::size_t>(out)].left = l;
    nodes[static_cast<std::size_t>(out)].right = r;
    return out;
  };
  copy(copy, BinaryTree::root());
  return PlanarShape(std::move(nodes));
}

std::vector<PlanarShape> predecessors(const PlanarShape& tree) {
  std::vector<PlanarShape> out;
  for (NodeId id : tree.internal_nodes()) {
    const TreeNode& n = tree.node(id);
    if (!tree.node(n.left).is_leaf() || !tree.node(n.right).is_leaf()) continue;
    PlanarShape p = remove_cherry(tree, id);
    if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(std::move(p));
  }
  return out;
}

bool compatible(const PlanarShape& t_n, const PlanarShape& t_n1) {
  if (t_n1.leaf_count() != t_n.leaf_count() + 1) {
    throw DomainError("compatible: leaf counts " + std::to_string(t_n.leaf_count()) + " and " +
                      std::to_string(t_n1.leaf_count()) + " do not differ by one");
  }
  const auto preds = predecessors(t_n1);
  return std::find(preds.begin(), preds.end(), t_n) != preds.end();
}

CherryRemoval cherry_removal(const PlanarShape& t_n1, const PlanarShape& t_n) {
  return {t_n1, t_n, compatible(t_n, t_n1)};
}

double reverse_kernel(const PlanarShape& t_n1, const PlanarShape& t_n) {
  if (t_n1.leaf_count() != t_n.leaf_count() + 1) return 0.0;
  if (!compatible(t_n, t_n1)) return 0.0;
  return std::exp(log_catalan_coefficient(t_n) - log_catalan_coefficient(t_n1));
}

double verify_reversal(int n, SplitParams p) {
  if (n < 1) throw DomainError("verify_reversal: n must be >= 1");
  if (n > kReversalCap) {
    throw CapExceededError("verify_reversal: n = " + std::to_string(n) + " exceeds the cap of " +
                           std::to_string(kReversalCap));
  }
  validate(p);
  std::map<std::string, double> pushed;
  for (const PlanarShape& t1 : enumerate_planar_shapes(n + 1)) {
    const double p1 = log_prob_planar(t1, p).value();
    for (const PlanarShape& t : predecessors(t1)) pushed[t.to_newick()] += p1 * reverse_kernel(t1, t);
  }
  double residual = 0.0;
  for (const PlanarShape& t : enumerate_planar_shapes(n)) {
    const auto it = pushed.find(t.to_newick());
    const double mass = it == pushed.end() ? 0.0 : it->second;
    residual = std::max(residual, std::abs(log_prob_planar(t, p).value() - mass));
  }
  return residual;
}

}  // namespace betasplit
