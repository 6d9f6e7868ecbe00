#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "betasplit/probability.hpp"
#include "betasplit/trees.hpp"

namespace betasplit {

// Brute-force ground truth for small trees.

enum class Resolution { ranked_planar, planar, ranked, shape };
std::string to_string(Resolution r);
// Accepts "ranked-planar", "planar", "ranked", "shape".
Resolution parse_resolution(std::string_view text);

// Canonical key of a ranked planar tree's projection at `r` (its Newick
// string at that resolution; frozen marks kept only at ranked_planar).
std::string encode(const RankedPlanarTree& tree, Resolution r);

inline constexpr int kEnumerationCap = 8;

// All (n-1)! ranked planar trees, in lexicographic order of their
// permutations. 1 <= n <= 8.
std::vector<RankedPlanarTree> enumerate_ranked_planar(int leaves);
// All Catalan(n-1) planar shapes on n leaves, 1 <= n <= 12.
std::vector<PlanarShape> enumerate_planar_shapes(int leaves);

struct ExactDistribution {
  Resolution resolution = Resolution::ranked_planar;
  int leaves = 1;
  SplitParams params;
  std::map<std::string, LogReal> probabilities;

  LogReal total() const;
  double probability(const std::string& key) const;
  // encoding,probability_log_e,probability_mantissa,probability_exp10
  std::string to_csv() const;
};

// Sums the ranked planar probabilities over every projection fiber. n <= 8.
ExactDistribution exact_distribution(int leaves, SplitParams p, Resolution r);

// Adds ranked planar trees [begin, end) of the enumeration (by permutation
// rank) into `into`. Building block of the parallel aggregation.
void accumulate_exact(int leaves, SplitParams p, Resolution r, std::uint64_t begin, std::uint64_t end,
                      std::map<std::string, LogReal>& into);

// Ranked planar probability with every Beta function replaced by tanh-sinh
// quadrature of its defining integral.
LogReal quadrature_check(const RankedPlanarTree& tree, SplitParams p);
// Tanh-sinh quadrature of int_0^1 x^(a-1) (1-x)^(b-1) dx.
double beta_integral(double a, double b);

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

// Pearson goodness of fit. Cells are pooled in ascending order of expected
// count until every pooled cell expects at least 5; a remainder below 5
// joins the last pooled cell. Observed keys missing from `expected` throw.
ChiSquareResult chi_square_gof(const std::map<std::string, std::int64_t>& observed,
                               const std::map<std::string, double>& expected_probabilities);
ChiSquareResult chi_square_gof(const std::map<std::string, std::int64_t>& observed, const ExactDistribution& expected);

// Two-sample homogeneity test over the union of observed keys, with the
// same pooling rule applied to the pooled-sample expectations.
ChiSquareResult chi_square_two_sample(const std::map<std::string, std::int64_t>& a,
                                      const std::map<std::string, std::int64_t>& b);

// Upper tail of the chi-square distribution.
double chi_square_tail(double statistic, int dof);

// One-sample Kolmogorov-Smirnov statistic against `cdf`; sorts a copy.
double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf);
// Asymptotic p-value with the Stephens small-sample correction.
double ks_p_value(double statistic, std::size_t n);

// Regularized incomplete beta I_x(a, b).
double beta_cdf(double x, double a, double b);

}  // namespace betasplit
