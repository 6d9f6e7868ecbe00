#pragma once

#include <vector>

#include "betasplit/probability.hpp"
#include "betasplit/trees.hpp"

namespace betasplit {

// Backward transition kernel on planar trees: from t_{n+1} to t_n by
// withdrawing a cherry.

struct CherryRemoval {
  PlanarShape parent;
  PlanarShape child;
  bool compatible = false;
};

// Replaces cherry `node` of `tree` by a leaf. Throws DomainError if the
// node is not a cherry.
PlanarShape remove_cherry(const PlanarShape& tree, NodeId node);

// Distinct planar trees obtained by withdrawing one cherry, in order of
// first appearance along a preorder walk.
std::vector<PlanarShape> predecessors(const PlanarShape& tree);

// True iff replacing some cherry of t_n1 by a leaf yields t_n. Throws
// DomainError unless t_n1 has exactly one more leaf than t_n.
bool compatible(const PlanarShape& t_n, const PlanarShape& t_n1);
CherryRemoval cherry_removal(const PlanarShape& t_n1, const PlanarShape& t_n);

// #t_n / #t_{n+1} when compatible, otherwise 0 (also for mismatched sizes).
double reverse_kernel(const PlanarShape& t_n1, const PlanarShape& t_n);

inline constexpr int kReversalCap = 7;

// max over planar t_n of |P(t_n) - sum over t_{n+1} of P(t_{n+1}) K(t_{n+1}, t_n)|.
// 1 <= n <= 7.
double verify_reversal(int n, SplitParams p);

}  // namespace betasplit
