#include "betasplit/probability.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "betasplit/error.hpp"

namespace betasplit {

namespace {

// Terms are summed in sorted order so the result does not depend on node
// order (mirror images give bit-identical results when alpha == beta).
double stable_sum(std::vector<double> terms) {
  std::sort(terms.begin(), terms.end());
  double sum = 0.0;
  for (double t : terms) sum += t;
  return sum;
}

double log_split_factor(SplitSizes s, SplitParams p, double log_b0) {
  return log_beta(s.left + p.alpha + 1.0, s.right + p.beta + 1.0).log_value - log_b0;
}

// Sum over all 2^k orientation choices of the flippable nodes; flipping
// swaps that node's (nL, nR) and nothing else.
LogReal sum_over_orientations(const std::vector<SplitSizes>& fixed, const std::vector<SplitSizes>& flippable,
                              SplitParams p) {
  const double log_b0 = log_beta(p.alpha + 1.0, p.beta + 1.0).log_value;
  std::vector<double> fixed_terms;
  for (SplitSizes s : fixed) fixed_terms.push_back(log_split_factor(s, p, log_b0));
  const double base = stable_sum(fixed_terms);
  std::vector<double> as_is;
  std::vector<double> swapped;
  for (SplitSizes s : flippable) {
    as_is.push_back(log_split_factor(s, p, log_b0));
    swapped.push_back(log_split_factor({s.right, s.left}, p, log_b0));
  }
  const std::size_t k = flippable.size();
  LogReal total = LogReal::zero();
  std::vector<double> terms(k);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
    for (std::size_t i = 0; i < k; ++i) terms[i] = ((mask >> i) & 1U) ? swapped[i] : as_is[i];
    total += LogReal{base + stable_sum(terms)};
  }
  return total;
}

void check_cap(const BinaryTree& tree, int cap) {
  if (tree.leaf_count() > cap) {
    throw CapExceededError("embedding enumeration: " + std::to_string(tree.leaf_count()) +
                           " leaves exceeds the cap of " + std::to_string(cap) + " for alpha != beta");
  }
}

double log_factorial(int k) {
  double sum = 0.0;
  for (int j = 2; j <= k; ++j) sum += std::log(static_cast<double>(j));
  return sum;
}

bool is_power_of_two(int n) { return n >= 1 && (n & (n - 1)) == 0; }

// Orientation masks over the nodes selected by `flippable`.
template <class Tree, class Result>
std::vector<Result> enumerate_orientations(const Tree& tree, const std::function<bool(NodeId)>& flippable,
                                           const std::function<Result(std::vector<TreeNode>)>& make) {
  std::vector<NodeId> flip_nodes;
  for (NodeId id : tree.internal_nodes()) {
    if (flippable(id)) flip_nodes.push_back(id);
  }
  std::vector<Result> out;
  const std::size_t k = flip_nodes.size();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
    std::vector<TreeNode> nodes(tree.nodes().begin(), tree.nodes().end());
    for (std::size_t i = 0; i < k; ++i) {
      if ((mask >> i) & 1U) {
        TreeNode& n = nodes[static_cast<std::size_t>(flip_nodes[i])];
        std::swap(n.left, n.right);
      }
    }
    out.push_back(make(std::move(nodes)));
  }
  return out;
}

std::vector<bool> iso_nodes(const TreeShape& tree) {
  // Two subtrees of a canonical shape are isomorphic iff their Newick bodies match.
  std::vector<std::string> enc(tree.nodes().size());
  std::function<const std::string&(NodeId)> encode = [&](NodeId id) -> const std::string& {
    const TreeNode& n = tree.node(id);
    auto& e = enc[static_cast<std::size_t>(id)];
    if (!n.is_leaf()) e = "(" + encode(n.left) + "," + encode(n.right) + ")";
    return e;
  };
  encode(BinaryTree::root());
  std::vector<bool> iso(tree.nodes().size(), false);
  for (std::size_t i = 0; i < tree.nodes().size(); ++i) {
    const TreeNode& n = tree.nodes()[i];
    if (!n.is_leaf()) iso[i] = enc[static_cast<std::size_t>(n.left)] == enc[static_cast<std::size_t>(n.right)];
  }
  return iso;
}

}  // namespace

void validate(SplitParams p) {
  if (!(p.alpha > -1.0) || !(p.beta > -1.0) || !std::isfinite(p.alpha) || !std::isfinite(p.beta)) {
    throw DomainError("alpha and beta must be finite and > -1");
  }
}

LogReal log_prob_ranked_planar(const RankedPlanarTree& tree, SplitParams p) {
  validate(p);
  return sum_over_orientations(tree.split_profile(), {}, p);
}

LogReal log_prob_planar(const PlanarShape& tree, SplitParams p) {
  validate(p);
  return LogReal{log_catalan_coefficient(tree)} * sum_over_orientations(tree.split_profile(), {}, p);
}

LogReal log_prob_ranked_shape(const RankedShape& tree, SplitParams p, int embedding_cap) {
  validate(p);
  const int n = tree.leaf_count();
  if (p.alpha == p.beta) {
    const int free = n - 1 - cherry_count(tree);
    return LogReal{free * std::numbers::ln2} * sum_over_orientations(tree.split_profile(), {}, p);
  }
  check_cap(tree, embedding_cap);
  std::vector<SplitSizes> fixed;
  std::vector<SplitSizes> flippable;
  for (SplitSizes s : tree.split_profile()) (s.left == 0 && s.right == 0 ? fixed : flippable).push_back(s);
  return sum_over_orientations(fixed, flippable, p);
}

LogReal log_prob_shape(const TreeShape& tree, SplitParams p, int embedding_cap) {
  validate(p);
  const int n = tree.leaf_count();
  const PlanarShape planar(std::vector<TreeNode>(tree.nodes().begin(), tree.nodes().end()));
  if (p.alpha == p.beta) {
    const int free = n - 1 - iso_split_count(tree);
    return LogReal{free * std::numbers::ln2} * log_prob_planar(planar, p);
  }
  check_cap(tree, embedding_cap);
  const auto iso = iso_nodes(tree);
  const auto counts = tree.subtree_internal_counts();
  std::vector<SplitSizes> fixed;
  std::vector<SplitSizes> flippable;
  for (NodeId id : tree.internal_nodes()) {
    const TreeNode& nd = tree.node(id);
    const SplitSizes s{counts[static_cast<std::size_t>(nd.left)], counts[static_cast<std::size_t>(nd.right)]};
    (iso[static_cast<std::size_t>(id)] ? fixed : flippable).push_back(s);
  }
  return LogReal{log_catalan_coefficient(planar)} * sum_over_orientations(fixed, flippable, p);
}

std::vector<PlanarShape> planar_embeddings(const TreeShape& tree) {
  const auto iso = iso_nodes(tree);
  return enumerate_orientations<TreeShape, PlanarShape>(
      tree, [&](NodeId id) { return !iso[static_cast<std::size_t>(id)]; },
      [](std::vector<TreeNode> nodes) { return PlanarShape(std::move(nodes)); });
}

std::vector<RankedPlanarTree> ranked_planar_embeddings(const RankedShape& tree) {
  return enumerate_orientations<RankedShape, RankedPlanarTree>(
      tree,
      [&](NodeId id) {
        const TreeNode& n = tree.node(id);
        return !(tree.node(n.left).is_leaf() && tree.node(n.right).is_leaf());
      },
      [](std::vector<TreeNode> nodes) { return RankedPlanarTree(std::move(nodes)); });
}

LogReal log_prob_comb_shape(int leaves, BetaCase beta_case) {
  if (leaves < 2) throw DomainError("log_prob_comb_shape: need n >= 2");
  const double n = leaves;
  switch (beta_case) {
    case BetaCase::minus_one:
      return LogReal::one();
    case BetaCase::zero:
      return LogReal{(n - 2.0) * std::numbers::ln2 - log_factorial(leaves - 1)};
    case BetaCase::infinity:
      return LogReal{-(n - 2.0) * (n - 3.0) / 2.0 * std::numbers::ln2};
  }
  throw DomainError("log_prob_comb_shape: unknown case");
}

LogReal log_prob_balanced_shape(int leaves, BetaCase beta_case) {
  if (leaves < 2 || !is_power_of_two(leaves)) throw DomainError("log_prob_balanced_shape: n must be a power of two >= 2");
  int depth = 0;
  while ((1 << depth) < leaves) ++depth;
  // ln of prod_{k=0}^{N-1} (n / 2^k - 1)^(2^k): the subtree internal counts.
  double log_denominator = 0.0;
  for (int k = 0; k < depth; ++k) {
    log_denominator += static_cast<double>(1 << k) * std::log(static_cast<double>((leaves >> k) - 1));
  }
  const double log_rankings = log_factorial(leaves - 1) - log_denominator;
  const double n = leaves;
  switch (beta_case) {
    case BetaCase::minus_one:
      // Only the comb survives; on two leaves the balanced tree is the comb.
      return leaves == 2 ? LogReal::one() : LogReal::zero();
    case BetaCase::zero:
      return LogReal{-log_denominator};
    case BetaCase::infinity:
      return LogReal{log_rankings + (-n * (depth - 2.0) - 2.0) * std::numbers::ln2};
  }
  throw DomainError("log_prob_balanced_shape: unknown case");
}

LogReal log_prob_ranked_planar_limit_inf(const RankedPlanarTree& tree) {
  double exponent = 0.0;
  for (SplitSizes s : tree.split_profile()) exponent += s.left + s.right;
  return LogReal{-exponent * std::numbers::ln2};
}

LogReal log_prob_integer_beta(const RankedPlanarTree& tree, int b) {
  if (b < 0) throw DomainError("log_prob_integer_beta: b must be >= 0");
  std::vector<double> terms;
  for (SplitSizes s : tree.split_profile()) {
    terms.push_back(log_factorial(s.left + b) + log_factorial(s.right + b) + log_factorial(2 * b + 1) -
                    log_factorial(s.left + s.right + 2 * b + 1) - 2.0 * log_factorial(b));
  }
  return LogReal{stable_sum(std::move(terms))};
}

LogReal log_prob_half_integer(const RankedPlanarTree& tree, int b) {
  if (b < 0) throw DomainError("log_prob_half_integer: b must be >= 0");
  std::vector<double> terms;
  for (SplitSizes s : tree.split_profile()) {
    terms.push_back(log_factorial(2 * s.left + 2 * b) + log_factorial(2 * s.right + 2 * b) + 2.0 * log_factorial(b) -
                    (s.left + s.right) * 2.0 * std::numbers::ln2 - log_factorial(s.left + b) -
                    log_factorial(s.right + b) - log_factorial(s.left + s.right + 2 * b) - log_factorial(2 * b));
  }
  return LogReal{stable_sum(std::move(terms))};
}

std::vector<double> aldous_split_pmf(int n, double beta) {
  if (n < 2) throw DomainError("aldous_split_pmf: n must be >= 2");
  if (!(beta > -2.0) || !std::isfinite(beta)) throw DomainError("aldous_split_pmf: beta must be > -2");
  // q(i) is proportional to C(n, i) B(i + beta + 1, n - i + beta + 1); the
  // normalizer is the sum of those weights (the integral of
  // (1 - x^n - (1 - x)^n) x^beta (1 - x)^beta expanded binomially).
  std::vector<double> log_w(static_cast<std::size_t>(n - 1));
  LogReal total = LogReal::zero();
  for (int i = 1; i < n; ++i) {
    log_w[static_cast<std::size_t>(i - 1)] = log_binomial(n, i) + log_beta(i + beta + 1.0, n - i + beta + 1.0).log_value;
    total += LogReal{log_w[static_cast<std::size_t>(i - 1)]};
  }
  std::vector<double> q(log_w.size());
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = std::exp(log_w[i] - total.log_value);
  return q;
}

nlohmann::json probability_record(LogReal p) {
  const DecimalForm d = decimal(p);
  nlohmann::json j;
  j["log_e"] = p.is_zero() ? nlohmann::json(nullptr) : nlohmann::json(p.log_value);
  j["mantissa"] = d.mantissa;
  j["exponent10"] = d.exponent10;
  return j;
}

}  // namespace betasplit
