#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <map>
#include <numeric>

#include "betasplit/error.hpp"
#include "betasplit/oracle.hpp"
#include "betasplit/probability.hpp"
#include "doctest.h"

using namespace betasplit;
using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

namespace {

cpp_int factorial(int k) {
  cpp_int f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

// B(x, y) for positive integers, exactly.
cpp_rational exact_beta(int x, int y) { return cpp_rational(factorial(x - 1) * factorial(y - 1), factorial(x + y - 1)); }

cpp_rational exact_integer_prob(const RankedPlanarTree& t, int b) {
  cpp_rational p = 1;
  for (SplitSizes s : t.split_profile()) p *= exact_beta(s.left + b + 1, s.right + b + 1) / exact_beta(b + 1, b + 1);
  return p;
}

double log_of(const cpp_rational& r) {
  return std::log(static_cast<double>(numerator(r))) - std::log(static_cast<double>(denominator(r)));
}

const SplitParams kGrid[] = {{0, 0}, {-0.5, -0.5}, {1, 0}, {0, 2}, {3, 3}};

}  // namespace

TEST_CASE("Yule law: every ranked planar tree has probability 1/(n-1)!") {
  for (int n = 1; n <= 7; ++n) {
    for (const auto& t : enumerate_ranked_planar(n)) {
      REQUIRE(std::abs(log_prob_ranked_planar(t, {0, 0}).log_value + std::lgamma(double(n))) < 1e-12);
    }
  }
}

TEST_CASE("cherry and single leaf have probability 1") {
  const auto cherry = perm_to_ranked_planar(std::vector<int>{1});
  for (const SplitParams& p : kGrid) {
    CHECK(std::abs(log_prob_ranked_planar(cherry, p).log_value) < 1e-15);
    CHECK(std::abs(log_prob_ranked_planar(RankedPlanarTree(), p).log_value) == 0.0);
    CHECK(std::abs(log_prob_shape(shape_of(cherry), p).log_value) < 1e-15);
  }
}

TEST_CASE("alpha = beta = 1 right comb against exact rationals") {
  const auto comb = perm_to_ranked_planar(std::vector<int>{1, 2, 3});
  const cpp_rational exact = exact_integer_prob(comb, 1);
  // Profile (0,2), (0,1), (0,0): 6 B(2,4) * 6 B(2,3) * 6 B(2,2) = 3/10 * 1/2 * 1.
  CHECK(exact == cpp_rational(3, 20));
  CHECK(log_prob_ranked_planar(comb, {1, 1}).log_value == doctest::Approx(std::log(0.15)).epsilon(1e-13));
}

TEST_CASE("integer-beta closed form against exact rationals and the general formula") {
  for (int n = 1; n <= 6; ++n) {
    for (const auto& t : enumerate_ranked_planar(n)) {
      for (int b = 0; b <= 3; ++b) {
        const double exact = log_of(exact_integer_prob(t, b));
        REQUIRE(std::abs(log_prob_integer_beta(t, b).log_value - exact) < 1e-12);
        REQUIRE(std::abs(log_prob_ranked_planar(t, {double(b), double(b)}).log_value - exact) < 1e-12);
      }
    }
  }
  CHECK_THROWS_AS(log_prob_integer_beta(RankedPlanarTree(), -1), DomainError);
}

TEST_CASE("half-integer closed form") {
  const auto cherry = perm_to_ranked_planar(std::vector<int>{1});
  CHECK(std::abs(log_prob_half_integer(cherry, 0).log_value) < 1e-15);
  for (int n = 1; n <= 6; ++n) {
    for (const auto& t : enumerate_ranked_planar(n)) {
      for (int b = 0; b <= 4; ++b) {
        REQUIRE(std::abs(log_prob_half_integer(t, b).log_value -
                         log_prob_ranked_planar(t, {b - 0.5, b - 0.5}).log_value) < 1e-10);
      }
    }
  }
}

TEST_CASE("planar probabilities of the four-leaf demo") {
  CHECK(log_prob_planar(balanced_planar(4), {0, 0}).value() == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  int combs = 0;
  for (const auto& t : enumerate_planar_shapes(4)) {
    if (t == balanced_planar(4)) continue;
    ++combs;
    CHECK(log_prob_planar(t, {0, 0}).value() == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  }
  CHECK(combs == 4);
  CHECK(log_prob_planar(PlanarShape::from_brackets("[., [[., .], .]]"), {0, 0}).value() ==
        doctest::Approx(1.0 / 6.0).epsilon(1e-14));
}

TEST_CASE("ranked shape and shape examples") {
  const SplitParams yule{0, 0};
  for (const auto& t : enumerate_ranked_planar(3)) CHECK(log_prob_ranked_shape(forget_planarity(t), yule).value() == doctest::Approx(1.0));
  const auto comb = forget_planarity(perm_to_ranked_planar(std::vector<int>{1, 2, 3}));
  const auto bal = forget_planarity(perm_to_ranked_planar(std::vector<int>{2, 1, 3}));
  CHECK(log_prob_ranked_shape(comb, yule).value() == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(log_prob_ranked_shape(bal, yule).value() == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  const auto comb_shape = shape_of(right_comb(4));
  const auto bal_shape = shape_of(balanced_planar(4));
  CHECK(log_prob_shape(comb_shape, yule).value() == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(log_prob_shape(bal_shape, yule).value() == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK((log_prob_shape(comb_shape, yule) + log_prob_shape(bal_shape, yule)).value() == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("alpha != beta ranked comb equals the sum over its four embeddings") {
  const SplitParams p{1, 0};
  const auto comb = forget_planarity(perm_to_ranked_planar(std::vector<int>{1, 2, 3}));
  LogReal sum = LogReal::zero();
  int embeddings = 0;
  for (const auto& t : enumerate_ranked_planar(4)) {
    if (forget_planarity(t) == comb) {
      sum += log_prob_ranked_planar(t, p);
      ++embeddings;
    }
  }
  CHECK(embeddings == 4);
  CHECK(log_prob_ranked_shape(comb, p).value() == doctest::Approx(sum.value()).epsilon(1e-13));
  CHECK(ranked_planar_embeddings(comb).size() == 4);
  CHECK(planar_embeddings(shape_of(right_comb(5))).size() == 8);
}

TEST_CASE("normalization and fiber consistency, n <= 7") {
  for (const SplitParams& p : kGrid) {
    for (int n = 1; n <= 7; ++n) {
      CAPTURE(n);
      CAPTURE(p.alpha);
      CAPTURE(p.beta);
      std::map<std::string, double> planar;
      std::map<std::string, double> ranked;
      LogReal total = LogReal::zero();
      for (const auto& t : enumerate_ranked_planar(n)) {
        const LogReal lp = log_prob_ranked_planar(t, p);
        total += lp;
        planar[forget_ranks(t).to_newick()] += lp.value();
        ranked[forget_planarity(t).to_newick()] += lp.value();
      }
      REQUIRE(std::abs(total.value() - 1.0) < 1e-10);
      std::map<std::string, double> shapes;
      double planar_total = 0.0;
      double ranked_total = 0.0;
      for (const auto& [k, v] : planar) {
        const PlanarShape t = PlanarShape::from_newick(k);
        REQUIRE(std::abs(log_prob_planar(t, p).value() - v) < 1e-12);
        shapes[shape_of(t).to_newick()] += v;
        planar_total += v;
      }
      for (const auto& [k, v] : ranked) {
        REQUIRE(std::abs(log_prob_ranked_shape(RankedShape::from_newick(k), p).value() - v) < 1e-12);
        ranked_total += v;
      }
      double shape_total = 0.0;
      for (const auto& [k, v] : shapes) {
        REQUIRE(std::abs(log_prob_shape(TreeShape::from_newick(k), p).value() - v) < 1e-12);
        shape_total += v;
      }
      REQUIRE(std::abs(planar_total - 1.0) < 1e-10);
      REQUIRE(std::abs(ranked_total - 1.0) < 1e-10);
      REQUIRE(std::abs(shape_total - 1.0) < 1e-10);
    }
  }
}

TEST_CASE("sum over planar shapes on five leaves is one") {
  for (const SplitParams& p : kGrid) {
    LogReal sum = LogReal::zero();
    for (const auto& t : enumerate_planar_shapes(5)) sum += log_prob_planar(t, p);
    CHECK(std::abs(sum.value() - 1.0) < 1e-12);
  }
}

TEST_CASE("mirror symmetry when alpha = beta") {
  for (const auto& t : enumerate_ranked_planar(7)) {
    for (double b : {-0.7, 0.0, 2.5}) REQUIRE(log_prob_ranked_planar(t.mirror(), {b, b}) == log_prob_ranked_planar(t, {b, b}));
  }
}

TEST_CASE("embedding cap") {
  const auto big = forget_planarity(perm_to_ranked_planar([] {
    std::vector<int> p(21);
    std::iota(p.begin(), p.end(), 1);
    return p;
  }()));
  CHECK(big.leaf_count() == 22);
  CHECK_THROWS_AS(log_prob_ranked_shape(big, {1, 0}), CapExceededError);
  CHECK_NOTHROW(log_prob_ranked_shape(big, {1, 1}));
  CHECK_THROWS_AS(log_prob_shape(shape_of(right_comb(21)), {0.5, 0}), CapExceededError);
  CHECK_NOTHROW(log_prob_shape(shape_of(right_comb(20)), {0.5, 0}));
}

TEST_CASE("comb and balanced shape table") {
  const auto show = [](LogReal p) { return format_decimal(p, 3); };
  CHECK(show(log_prob_comb_shape(4, BetaCase::zero)) == "6.67e-1");
  CHECK(show(log_prob_comb_shape(1024, BetaCase::zero)) == "8.49e-2330");
  CHECK(show(log_prob_comb_shape(32, BetaCase::infinity)) == "1.13e-131");
  CHECK(show(log_prob_balanced_shape(8, BetaCase::zero)) == "1.59e-2");
  CHECK(show(log_prob_balanced_shape(8, BetaCase::infinity)) == "7.81e-2");
  CHECK(show(log_prob_balanced_shape(1024, BetaCase::infinity)) == "1.26e-247");
  CHECK(show(log_prob_comb_shape(1024, BetaCase::minus_one)) == "1");
  CHECK(show(log_prob_balanced_shape(1024, BetaCase::minus_one)) == "0");
  CHECK_THROWS_AS(log_prob_balanced_shape(12, BetaCase::zero), DomainError);
  CHECK_THROWS_AS(log_prob_comb_shape(1, BetaCase::zero), DomainError);
  // Closed forms agree with the general machinery where both apply.
  for (int n : {4, 8}) {
    CHECK(log_prob_comb_shape(n, BetaCase::zero).log_value ==
          doctest::Approx(log_prob_shape(shape_of(right_comb(n)), {0, 0}).log_value).epsilon(1e-12));
    CHECK(log_prob_balanced_shape(n, BetaCase::zero).log_value ==
          doctest::Approx(log_prob_shape(shape_of(balanced_planar(n)), {0, 0}).log_value).epsilon(1e-12));
  }
}

TEST_CASE("beta -> infinity limit") {
  const double ln2 = std::log(2.0);
  for (int n = 2; n <= 10; ++n) {
    std::vector<int> inc(static_cast<std::size_t>(n - 1));
    std::iota(inc.begin(), inc.end(), 1);
    const auto comb = perm_to_ranked_planar(inc);
    CHECK(log_prob_ranked_planar_limit_inf(comb).log_value == doctest::Approx(-(n - 1) * (n - 2) / 2.0 * ln2));
  }
  for (int big_n = 1; big_n <= 4; ++big_n) {
    const int n = 1 << big_n;
    const PlanarShape shape = balanced_planar(n);
    std::vector<TreeNode> nodes(shape.nodes().begin(), shape.nodes().end());
    // Breadth-first ranks are increasing.
    std::vector<NodeId> queue{0};
    int rank = 1;
    for (std::size_t i = 0; i < queue.size(); ++i) {
      TreeNode& nd = nodes[static_cast<std::size_t>(queue[i])];
      if (nd.is_leaf()) continue;
      nd.rank = rank++;
      queue.push_back(nd.left);
      queue.push_back(nd.right);
    }
    const RankedPlanarTree tb(nodes);
    CHECK(log_prob_ranked_planar_limit_inf(tb).log_value == doctest::Approx((-n * (big_n - 2) - 2) * ln2));
  }
  for (int n = 1; n <= 6; ++n) {
    for (const auto& t : enumerate_ranked_planar(n)) {
      const double limit = log_prob_ranked_planar_limit_inf(t).log_value;
      const double finite = log_prob_ranked_planar(t, {1e4, 1e4}).log_value;
      if (limit == 0.0) {
        REQUIRE(std::abs(finite) < 1e-3);
      } else {
        REQUIRE(std::abs(finite - limit) / std::abs(limit) < 0.01);
      }
    }
  }
}

TEST_CASE("comb probability decreases with beta at n = 8") {
  const auto comb = shape_of(right_comb(8));
  double previous = 2.0;
  for (double b : {-0.9, 0.0, 1.0, 5.0, 50.0}) {
    const double p = log_prob_shape(comb, {b, b}).value();
    CHECK(p < previous);
    previous = p;
  }
}

TEST_CASE("Aldous split distribution") {
  CHECK(aldous_split_pmf(2, 0.0) == std::vector<double>{1.0});
  // Direct quadrature of the density C(n,i) x^(i+beta) (1-x)^(n-i+beta) / a_n.
  boost::math::quadrature::tanh_sinh<double> integrator;
  for (double beta : {0.0, -0.5, 2.0}) {
    const int n = 4;
    const auto q = aldous_split_pmf(n, beta);
    std::vector<double> direct;
    for (int i = 1; i < n; ++i) {
      const double c = std::tgamma(n + 1.0) / (std::tgamma(i + 1.0) * std::tgamma(n - i + 1.0));
      direct.push_back(c * integrator.integrate([&](double x) { return std::pow(x, i + beta) * std::pow(1 - x, n - i + beta); }, 0.0, 1.0));
    }
    const double a_n = integrator.integrate(
        [&](double x) { return (1 - std::pow(x, n) - std::pow(1 - x, n)) * std::pow(x, beta) * std::pow(1 - x, beta); }, 0.0, 1.0);
    for (int i = 0; i < n - 1; ++i) CHECK(q[static_cast<std::size_t>(i)] == doctest::Approx(direct[static_cast<std::size_t>(i)] / a_n).epsilon(1e-9));
    CHECK(q[0] == doctest::Approx(q[2]).epsilon(1e-14));
  }
  for (int n : {2, 3, 10, 100, 1000}) {
    for (double beta : {-1.9, -1.0, -0.5, 0.0, 3.0, 1e3}) {
      const auto q = aldous_split_pmf(n, beta);
      REQUIRE(std::abs(std::accumulate(q.begin(), q.end(), 0.0) - 1.0) < 1e-10);
      for (std::size_t i = 0; i < q.size(); ++i) {
        REQUIRE(q[i] >= 0.0);
        REQUIRE(q[i] == doctest::Approx(q[q.size() - 1 - i]).epsilon(1e-12));
      }
    }
  }
  CHECK_THROWS_AS(aldous_split_pmf(1, 0.0), DomainError);
  CHECK_THROWS_AS(aldous_split_pmf(4, -2.0), DomainError);
}

TEST_CASE("parameter validation and records") {
  const auto t = perm_to_ranked_planar(std::vector<int>{1});
  CHECK_THROWS_AS(log_prob_ranked_planar(t, {-1.0, 0.0}), DomainError);
  CHECK_THROWS_AS(log_prob_ranked_planar(t, {0.0, std::numeric_limits<double>::infinity()}), DomainError);
  const auto rec = probability_record(LogReal::from_value(1.0 / 6.0));
  CHECK(rec["exponent10"] == -1);
  CHECK(rec["mantissa"].get<double>() == doctest::Approx(1.6666666666666667));
  CHECK(probability_record(LogReal::zero())["log_e"].is_null());
}
