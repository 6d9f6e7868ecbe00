#include <cmath>
#include <map>

#include "betasplit/error.hpp"
#include "betasplit/generate.hpp"
#include "betasplit/oracle.hpp"
#include "doctest.h"

using namespace betasplit;

namespace {

void check_partition(const GodState& s) {
  const auto bp = s.breakpoints();
  REQUIRE(bp.front() == 0.0);
  REQUIRE(bp.back() == 1.0);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
    REQUIRE(bp[i + 1] > bp[i]);
    total += bp[i + 1] - bp[i];
  }
  REQUIRE(std::abs(total - 1.0) < 1e-12);
  // Leaf intervals of the tree match the cells, left to right.
  const RankedPlanarTree t = s.tree();
  int active = 0;
  for (std::size_t c = 0; c < s.cell_count(); ++c) {
    const TreeNode& leaf = t.node(s.cell_node(c));
    REQUIRE(leaf.is_leaf());
    REQUIRE(leaf.lo == bp[c]);
    REQUIRE(leaf.hi == bp[c + 1]);
    active += leaf.frozen ? 0 : 1;
  }
  REQUIRE(active == s.active_count());
  REQUIRE(s.next_rank() == t.internal_count() + 1);
}

std::vector<std::pair<double, double>> leaf_intervals(const RankedPlanarTree& t) {
  std::vector<std::pair<double, double>> out;
  std::vector<NodeId> stack{BinaryTree::root()};
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    const TreeNode& n = t.node(id);
    if (n.is_leaf()) {
      out.emplace_back(n.lo, n.hi);
    } else {
      stack.push_back(n.right);
      stack.push_back(n.left);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("generating sequence") {
  Rng rng = make_stream(1, 0);
  CHECK(sample_generating_sequence({0, 0}, rng, 0).empty());
  const int m = 100000;
  for (auto [alpha, mean] : {std::pair{0.0, 0.5}, std::pair{1.0, 2.0 / 3.0}}) {
    const auto seq = sample_generating_sequence({alpha, 0.0}, rng, m);
    double sb = 0.0;
    double su = 0.0;
    for (const auto& q : seq) {
      REQUIRE(q.u >= 0.0);
      REQUIRE(q.u < 1.0);
      REQUIRE(q.b > 0.0);
      REQUIRE(q.b < 1.0);
      sb += q.b;
      su += q.u;
    }
    CHECK(std::abs(sb / m - mean) < 0.005);
    CHECK(std::abs(su / m - 0.5) < 0.005);
  }
  Rng a = make_stream(9, 3);
  Rng b = make_stream(9, 3);
  const auto s1 = sample_generating_sequence({0.3, -0.2, 0.1}, a, 50);
  const auto s2 = sample_generating_sequence({0.3, -0.2, 0.1}, b, 50);
  for (std::size_t i = 0; i < s1.size(); ++i) REQUIRE((s1[i].u == s2[i].u && s1[i].b == s2[i].b && s1[i].v == s2[i].v && s1[i].d == s2[i].d));
}

TEST_CASE("organize hand trace") {
  const std::vector<GeneratingQuadruple> seq{{0.77, 0.4}, {0.2, 0.5}, {0.9, 0.25}};
  const RankedPlanarTree t = organize(seq, 4);
  CHECK(t.to_newick() == "((,)2,(,)3)1;");
  const auto iv = leaf_intervals(t);
  REQUIRE(iv.size() == 4);
  CHECK(iv[0].first == 0.0);
  CHECK(iv[0].second == doctest::Approx(0.2));
  CHECK(iv[1].second == doctest::Approx(0.4));
  CHECK(iv[2].first == doctest::Approx(0.4));
  CHECK(iv[2].second == doctest::Approx(0.55));
  CHECK(iv[3].first == doctest::Approx(0.55));
  CHECK(iv[3].second == 1.0);
  // The first u is never consulted; replay is bit-identical.
  std::vector<GeneratingQuadruple> other = seq;
  other[0].u = 0.01;
  const RankedPlanarTree again = organize(other, 4);
  CHECK(again == t);
  const auto iv2 = leaf_intervals(again);
  for (std::size_t i = 0; i < iv.size(); ++i) CHECK((iv[i].first == iv2[i].first && iv[i].second == iv2[i].second));
  const RankedPlanarTree single = organize({}, 1);
  CHECK(single.leaf_count() == 1);
  CHECK(single.node(0).lo == 0.0);
  CHECK(single.node(0).hi == 1.0);
  CHECK_THROWS_AS(organize(seq, 5), ValidationError);
}

TEST_CASE("god_step rules") {
  // delta = 0 reproduces organize.
  const std::vector<GeneratingQuadruple> seq{{0.5, 0.4, 0.9}, {0.2, 0.5, 0.9}, {0.9, 0.25, 0.9}};
  GodState g;
  for (const auto& q : seq) g = god_step(g, q, 0.0);
  CHECK(g.tree() == organize(seq, 4));
  check_partition(g);

  GodState lone;
  const GodState frozen = god_step(lone, {0.5, 0.5, 0.1, 0.7}, 0.3);
  CHECK(frozen.active_count() == 0);
  CHECK(frozen.tree().frozen_count() == 1);
  CHECK(frozen.event_log().back().kind == EventKind::freeze);
  CHECK(lone.active_count() == 1);

  // Split landing in a frozen leaf is cancelled and changes nothing else.
  GodState two = god_step(GodState{}, {0.5, 0.5, 0.9}, 0.3);
  two = god_step(two, {0.0, 0.5, 0.1, 0.1}, 0.3);
  const RankedPlanarTree before = two.tree();
  const GodState after = god_step(two, {0.2, 0.5, 0.9}, 0.3);
  CHECK(after.event_log().back().kind == EventKind::cancelled);
  CHECK(after.tree() == before);
  CHECK(after.active_count() == 1);
  CHECK(after.effective_events() == two.effective_events());
  CHECK(after.steps() == two.steps() + 1);
  // A second freeze of the same leaf is cancelled too.
  const GodState refreeze = god_step(two, {0.9, 0.5, 0.1, 0.3}, 0.3);
  CHECK(refreeze.event_log().back().kind == EventKind::cancelled);
  CHECK(refreeze.freeze_events() == 1);

  const auto j = to_json(two.event_log().front());
  CHECK(j["step"] == 1);
  CHECK(j["kind"] == "split");
  CHECK(j["leaf_interval"][1] == 1.0);
  CHECK(j["b"] == 0.5);
  CHECK_FALSE(to_json(two.event_log().back()).contains("b"));
}

TEST_CASE("zero-width split raises a precision error") {
  GodState s;
  CHECK_THROWS_AS(s.split_cell(0, 0.0), PrecisionError);
  CHECK_THROWS_AS(s.split_cell(0, 1.0), PrecisionError);
}

TEST_CASE("invariants along random runs") {
  Rng rng = make_stream(3, 0);
  for (int rep = 0; rep < 200; ++rep) {
    const ModelParams p{-0.5, 0.7, 0.25, 1.0, 8};
    GodState s;
    while (s.active_count() > 0 && s.active_count() < p.leaves && s.steps() < 100000) {
      if (s.apply(sample_quadruple(p, rng), p.delta) != EventKind::cancelled) check_partition(s);
    }
    const RankedPlanarTree t = s.tree();
    for (NodeId id : t.internal_nodes()) {
      const TreeNode& n = t.node(id);
      for (NodeId c : {n.left, n.right}) {
        if (!t.node(c).is_leaf()) REQUIRE(t.node(c).rank > n.rank);
      }
    }
  }
}

TEST_CASE("run_god without freezing samples the ranked planar law") {
  const SplitParams grid[] = {{0, 0}, {-0.5, -0.5}, {1, 0}, {3, 3}};
  std::uint64_t seed = 100;
  for (const SplitParams& sp : grid) {
    for (int n : {4, 6}) {
      CAPTURE(n);
      CAPTURE(sp.alpha);
      const ModelParams p{sp.alpha, sp.beta, 0.0, 1.0, n};
      std::map<std::string, std::int64_t> counts;
      Rng rng = make_stream(seed++, 0);
      for (int i = 0; i < 100000; ++i) {
        const GodRun run = run_god(p, rng, kGodIterationCap, false);
        REQUIRE(run.outcome == GodOutcome::reached_n);
        ++counts[run.state.tree().to_newick()];
      }
      const auto fit = chi_square_gof(counts, exact_distribution(n, sp, Resolution::ranked_planar));
      CHECK(fit.p_value > 1e-3);
    }
  }
}

TEST_CASE("freeze fraction of effective events") {
  const ModelParams p{0, 0, 0.3, 1.0, 6};
  Rng rng = make_stream(77, 0);
  std::int64_t freezes = 0;
  std::int64_t effective = 0;
  int reached = 0;
  for (int i = 0; i < 10000; ++i) {
    const GodRun run = run_god(p, rng, kGodIterationCap, false);
    freezes += run.state.freeze_events();
    effective += run.state.effective_events();
    reached += run.outcome == GodOutcome::reached_n ? 1 : 0;
    REQUIRE((run.state.active_count() == 0 || run.state.active_count() == 6));
  }
  CHECK(std::abs(double(freezes) / double(effective) - 0.3) < 0.015);
  CHECK(reached > 0);
  CHECK(reached < 10000);
}

TEST_CASE("run_god_effective and the iteration cap") {
  Rng rng = make_stream(5, 1);
  const GodRun run = run_god_effective({0, 0, 0.2, 1.0, 1}, rng, 10);
  CHECK((run.state.effective_events() == 10 || run.state.active_count() == 0));
  CHECK_THROWS_AS(run_god_effective({0, 0, 0.0, 1.0, 1}, rng, 1000, 50), IterationCapError);
  CHECK_THROWS_AS(run_god({0, 0, 1.0, 1.0, 4}, rng), DomainError);
  CHECK_THROWS_AS(run_god({-1.5, 0, 0.0, 1.0, 4}, rng), DomainError);
}

TEST_CASE("fast-forwarding cancelled events preserves the law of trees and event counts") {
  const ModelParams p{0, 0, 0.5, 1.0, 3};
  std::map<std::string, std::int64_t> literal_trees;
  std::map<std::string, std::int64_t> fast_trees;
  std::map<std::string, std::int64_t> literal_steps;
  std::map<std::string, std::int64_t> fast_steps;
  int fast_forwarded = 0;
  for (std::uint64_t i = 0; i < 20000; ++i) {
    Rng r1 = make_stream(1, i);
    Rng r2 = make_stream(2, i);
    const GodRun x = run_god(p, r1, kGodIterationCap, true);
    const GodRun y = run_god(p, r2, kGodIterationCap, false);
    ++literal_trees[to_string(x.outcome) + x.state.tree().to_newick()];
    ++fast_trees[to_string(y.outcome) + y.state.tree().to_newick()];
    ++literal_steps[std::to_string(std::ilogb(double(x.state.steps())))];
    ++fast_steps[std::to_string(std::ilogb(double(y.state.steps())))];
    fast_forwarded += y.state.steps() > kFastForwardAfter ? 1 : 0;
  }
  CHECK(fast_forwarded > 20);
  CHECK(chi_square_two_sample(literal_trees, fast_trees).p_value > 1e-3);
  CHECK(chi_square_two_sample(literal_steps, fast_steps).p_value > 1e-3);
}
