#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "betasplit/error.hpp"
#include "betasplit/oracle.hpp"
#include "betasplit/trees.hpp"
#include "doctest.h"

using namespace betasplit;

namespace {

std::vector<std::vector<int>> all_perms(int m) {
  std::vector<int> p(static_cast<std::size_t>(m));
  std::iota(p.begin(), p.end(), 1);
  std::vector<std::vector<int>> out;
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

// Increasing-tree property checked from scratch.
bool ranks_increase(const BinaryTree& t) {
  for (NodeId id : t.internal_nodes()) {
    const TreeNode& n = t.node(id);
    for (NodeId c : {n.left, n.right}) {
      if (!t.node(c).is_leaf() && t.node(c).rank <= n.rank) return false;
    }
  }
  return true;
}

std::uint64_t binom(std::uint64_t n, std::uint64_t k) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST_CASE("perm_to_ranked_planar examples") {
  const std::vector<int> one{1};
  const auto cherry = perm_to_ranked_planar(one);
  CHECK(cherry.leaf_count() == 2);
  CHECK(cherry.to_newick() == "(,)1;");
  const std::vector<int> inc{1, 2, 3};
  const auto comb = perm_to_ranked_planar(inc);
  CHECK(comb.to_newick() == "(,(,(,)3)2)1;");
  CHECK(ranked_planar_to_perm(comb) == inc);
  CHECK(ranked_planar_to_perm(cherry) == one);
  const std::vector<int> empty;
  CHECK(perm_to_ranked_planar(empty).leaf_count() == 1);
  CHECK_THROWS_AS(perm_to_ranked_planar(std::vector<int>{1, 1}), ValidationError);
  CHECK_THROWS_AS(perm_to_ranked_planar(std::vector<int>{2, 3}), ValidationError);
}

TEST_CASE("bijection is injective with increasing images, n <= 7") {
  for (int n = 1; n <= 7; ++n) {
    std::set<std::string> images;
    for (const auto& p : all_perms(n - 1)) {
      const auto t = perm_to_ranked_planar(p);
      REQUIRE(t.leaf_count() == n);
      REQUIRE(ranks_increase(t));
      REQUIRE(ranked_planar_to_perm(t) == p);
      images.insert(t.to_newick());
    }
    CHECK(images.size() == all_perms(n - 1).size());
  }
}

TEST_CASE("six Yule trees on four leaves") {
  std::set<std::string> trees;
  for (const auto& p : all_perms(3)) trees.insert(perm_to_ranked_planar(p).to_newick());
  CHECK(trees.size() == 6);
  std::set<std::string> shapes;
  for (const auto& p : all_perms(3)) shapes.insert(shape_of(perm_to_ranked_planar(p)).to_newick());
  CHECK(shapes.size() == 2);
}

TEST_CASE("split_sizes") {
  const auto comb = perm_to_ranked_planar(std::vector<int>{1, 2, 3});
  CHECK(comb.split_sizes(BinaryTree::root()) == SplitSizes{0, 2});
  const PlanarShape bal = balanced_planar(4);
  CHECK(bal.split_sizes(BinaryTree::root()) == SplitSizes{1, 1});
  const auto cherry = perm_to_ranked_planar(std::vector<int>{1});
  CHECK(cherry.split_sizes(BinaryTree::root()) == SplitSizes{0, 0});
  CHECK_THROWS_AS(cherry.split_sizes(1), DomainError);
  for (const auto& t : enumerate_ranked_planar(6)) {
    const auto counts = t.subtree_internal_counts();
    for (NodeId id : t.internal_nodes()) {
      const SplitSizes s = t.split_sizes(id);
      REQUIRE(s.left + s.right + 1 == counts[static_cast<std::size_t>(id)]);
    }
  }
}

TEST_CASE("forget_ranks") {
  CHECK(forget_ranks(perm_to_ranked_planar(std::vector<int>{1, 2, 3})) == right_comb(4));
  CHECK(forget_ranks(perm_to_ranked_planar(std::vector<int>{1})).to_newick() == "(,);");
  // (2,1,3) and (2,3,1) share the skeleton with root 2 and children 1, 3.
  const auto a = forget_ranks(perm_to_ranked_planar(std::vector<int>{2, 1, 3}));
  const auto b = forget_ranks(perm_to_ranked_planar(std::vector<int>{2, 3, 1}));
  CHECK(a == b);
  CHECK(a == balanced_planar(4));
  std::map<std::string, int> fibers;
  for (const auto& t : enumerate_ranked_planar(4)) ++fibers[forget_ranks(t).to_newick()];
  CHECK(fibers.size() == 5);
}

TEST_CASE("non-planar projections are mirror invariant") {
  for (int n = 1; n <= 6; ++n) {
    for (const auto& t : enumerate_ranked_planar(n)) {
      REQUIRE(forget_planarity(t.mirror()) == forget_planarity(t));
      REQUIRE(shape_of(t.mirror()) == shape_of(t));
      REQUIRE(shape_of(forget_ranks(t).mirror()) == shape_of(forget_ranks(t)));
    }
  }
}

TEST_CASE("counts of the small examples") {
  CHECK(catalan_coefficient(right_comb(2)) == 1);
  CHECK(catalan_coefficient(balanced_planar(4)) == 2);
  for (int n = 1; n <= 12; ++n) CHECK(catalan_coefficient(right_comb(n)) == 1);
  CHECK(cherry_count(right_comb(2)) == 1);
  for (int n = 2; n <= 9; ++n) CHECK(cherry_count(shape_of(right_comb(n))) == 1);
  CHECK(cherry_count(shape_of(balanced_planar(4))) == 2);
  CHECK(iso_split_count(shape_of(right_comb(2))) == 1);
  CHECK(iso_split_count(shape_of(right_comb(4))) == 1);
  CHECK(iso_split_count(shape_of(balanced_planar(4))) == 3);
  for (int n = 3; n <= 9; ++n) CHECK(iso_split_count(shape_of(right_comb(n))) == 1);
  CHECK(colless(shape_of(right_comb(2))) == 0);
  CHECK(sackin(shape_of(right_comb(2))) == 2);
  CHECK(colless(shape_of(right_comb(4))) == 3);
  CHECK(sackin(shape_of(right_comb(4))) == 9);
  CHECK(colless(shape_of(balanced_planar(4))) == 0);
  CHECK(sackin(shape_of(balanced_planar(4))) == 8);
  CHECK(log_catalan_coefficient(balanced_planar(8)) == doctest::Approx(std::log(80.0)));
}

TEST_CASE("catalan_coefficient matches the direct binomial product") {
  for (const auto& t : enumerate_planar_shapes(9)) {
    const auto counts = t.subtree_internal_counts();
    std::uint64_t product = 1;
    for (NodeId id : t.internal_nodes()) {
      const TreeNode& n = t.node(id);
      const auto l = static_cast<std::uint64_t>(counts[static_cast<std::size_t>(n.left)]);
      const auto r = static_cast<std::uint64_t>(counts[static_cast<std::size_t>(n.right)]);
      product *= binom(l + r, l);
    }
    REQUIRE(catalan_coefficient(t) == product);
  }
}

TEST_CASE("fiber sizes, n <= 7") {
  for (int n = 1; n <= 7; ++n) {
    CAPTURE(n);
    std::map<std::string, std::pair<PlanarShape, int>> planar;
    std::map<std::string, std::pair<RankedShape, int>> ranked;
    for (const auto& t : enumerate_ranked_planar(n)) {
      auto p = forget_ranks(t);
      auto& pe = planar.try_emplace(p.to_newick(), p, 0).first->second;
      ++pe.second;
      auto r = forget_planarity(t);
      auto& re = ranked.try_emplace(r.to_newick(), r, 0).first->second;
      ++re.second;
    }
    for (const auto& [k, v] : planar) REQUIRE(static_cast<std::uint64_t>(v.second) == catalan_coefficient(v.first));
    for (const auto& [k, v] : ranked) REQUIRE(v.second == 1 << (n - 1 - cherry_count(v.first)));
    std::map<std::string, std::pair<TreeShape, int>> shapes;
    for (const auto& p : enumerate_planar_shapes(n)) {
      auto s = shape_of(p);
      auto& se = shapes.try_emplace(s.to_newick(), s, 0).first->second;
      ++se.second;
    }
    for (const auto& [k, v] : shapes) REQUIRE(v.second == 1 << (n - 1 - iso_split_count(v.first)));
  }
}

TEST_CASE("Newick round trips at every resolution, n <= 6") {
  for (int n = 1; n <= 6; ++n) {
    for (const auto& t : enumerate_ranked_planar(n)) {
      REQUIRE(RankedPlanarTree::from_newick(t.to_newick()) == t);
      const auto p = forget_ranks(t);
      REQUIRE(PlanarShape::from_newick(p.to_newick()) == p);
      REQUIRE(PlanarShape::from_brackets(p.to_brackets()) == p);
      const auto r = forget_planarity(t);
      REQUIRE(RankedShape::from_newick(r.to_newick()) == r);
      const auto s = shape_of(t);
      REQUIRE(TreeShape::from_newick(s.to_newick()) == s);
      REQUIRE(ranked_planar_from_json(to_json(t, true)) == t);
      REQUIRE(planar_from_json(to_json(p, false)) == p);
    }
  }
}

TEST_CASE("Newick dialect details") {
  CHECK(PlanarShape::from_brackets("[., [[., .], .]]").to_newick() == "(,((,),));");
  CHECK(RankedPlanarTree::from_newick("(:0.5,(:1,:2)2:0.25)1;").to_newick() == "(,(,)2)1;");
  CHECK(RankedPlanarTree::from_newick(" ( * , ) 1 ; ").frozen_count() == 1);
  CHECK(RankedPlanarTree().to_newick() == ";");
  CHECK_THROWS_AS(RankedPlanarTree::from_newick("(,);"), ParseError);
  CHECK_THROWS_AS(PlanarShape::from_newick("(,)1;"), ParseError);
  CHECK_THROWS_AS(PlanarShape::from_newick("(*,);"), ParseError);
  CHECK_THROWS_AS(RankedPlanarTree::from_newick("(,(,)1)2;"), ValidationError);
  CHECK_THROWS_AS(RankedPlanarTree::from_newick("(,(,)3)1;"), ValidationError);
  try {
    (void)PlanarShape::from_newick("(,,);");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.position() == 2);
  }
  CHECK_THROWS_AS(PlanarShape::from_newick("(,)"), ParseError);
  CHECK_THROWS_AS(PlanarShape::from_brackets("[., .]x"), ParseError);
  CHECK_THROWS_AS(ranked_planar_from_json(nlohmann::json("twig")), ParseError);
}

TEST_CASE("canonical forms") {
  // Children of a RankedShape: smaller root rank first, leaves last.
  const auto t = perm_to_ranked_planar(std::vector<int>{3, 1, 2});
  const auto r = forget_planarity(t);
  CHECK(r == forget_planarity(t.mirror()));
  CHECK(TreeShape::from_newick("((,),);") == TreeShape::from_newick("(,(,));"));
  CHECK(TreeShape::from_newick("((,),);").to_newick() == "(,(,));");
  CHECK(RankedShape::from_newick("((,)2,)1;").to_newick() == "((,)2,)1;");
  CHECK(RankedShape::from_newick("(,(,)2)1;").to_newick() == "((,)2,)1;");
  CHECK(RankedShape::from_newick("((,)3,(,)2)1;") == RankedShape::from_newick("((,)2,(,)3)1;"));
}

TEST_CASE("interval labels and mirror") {
  std::vector<TreeNode> nodes(3);
  nodes[0] = {1, 2};
  nodes[0].rank = 1;
  nodes[1].lo = 0.0;
  nodes[1].hi = 0.25;
  nodes[1].has_interval = true;
  nodes[2].lo = 0.25;
  nodes[2].hi = 1.0;
  nodes[2].has_interval = true;
  const RankedPlanarTree t(nodes);
  const auto m = t.mirror();
  CHECK(m.node(1).lo == doctest::Approx(0.0));
  CHECK(m.node(1).hi == doctest::Approx(0.75));
  CHECK(m.mirror() == t);
  nodes[2].lo = 0.3;
  CHECK_THROWS_AS(RankedPlanarTree{nodes}, ValidationError);
}

TEST_CASE("structural validation") {
  std::vector<TreeNode> bad(2);
  CHECK_THROWS_AS(PlanarShape{bad}, ValidationError);
  std::vector<TreeNode> cyc(3);
  cyc[0] = {1, 1};
  CHECK_THROWS_AS(PlanarShape{cyc}, ValidationError);
  CHECK_THROWS_AS(balanced_planar(6), DomainError);
  CHECK_THROWS_AS(right_comb(0), DomainError);
}
