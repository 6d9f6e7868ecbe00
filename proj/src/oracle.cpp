#include "betasplit/oracle.hpp"

#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numeric>
#include <sstream>

#include "betasplit/error.hpp"

namespace betasplit {

std::string to_string(Resolution r) {
  switch (r) {
    case Resolution::ranked_planar:
      return "ranked-planar";
    case Resolution::planar:
      return "planar";
    case Resolution::ranked:
      return "ranked";
    case Resolution::shape:
      return "shape";
  }
  return "?";
}

Resolution parse_resolution(std::string_view text) {
  if (text == "ranked-planar") return Resolution::ranked_planar;
  if (text == "planar") return Resolution::planar;
  if (text == "ranked") return Resolution::ranked;
  if (text == "shape") return Resolution::shape;
  throw ValidationError("unknown resolution '" + std::string(text) + "'");
}

std::string encode(const RankedPlanarTree& tree, Resolution r) {
  switch (r) {
    case Resolution::ranked_planar:
      return tree.to_newick();
    case Resolution::planar:
      return forget_ranks(tree).to_newick();
    case Resolution::ranked:
      return forget_planarity(tree).to_newick();
    case Resolution::shape:
      return shape_of(tree).to_newick();
  }
  return {};
}

namespace {

void check_enumeration_cap(int leaves) {
  if (leaves < 1) throw DomainError("enumeration: need at least one leaf");
  if (leaves > kEnumerationCap) {
    throw CapExceededError("enumeration: " + std::to_string(leaves) + " leaves exceeds the cap of " +
                           std::to_string(kEnumerationCap));
  }
}

std::uint64_t factorial(int k) {
  std::uint64_t f = 1;
  for (int i = 2; i <= k; ++i) f *= static_cast<std::uint64_t>(i);
  return f;
}

// The index-th permutation of 1..m in lexicographic order.
std::vector<int> nth_permutation(int m, std::uint64_t index) {
  std::vector<int> pool(static_cast<std::size_t>(m));
  std::iota(pool.begin(), pool.end(), 1);
  std::vector<int> out;
  out.reserve(pool.size());
  for (int k = m; k >= 1; --k) {
    const std::uint64_t block = factorial(k - 1);
    const auto pick = static_cast<std::size_t>(index / block);
    index %= block;
    out.push_back(pool[pick]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
  }
  return out;
}

struct PooledCell {
  double observed = 0.0;
  double expected = 0.0;
};

ChiSquareResult pearson(std::vector<PooledCell> cells, int extra_constraints) {
  std::sort(cells.begin(), cells.end(), [](const PooledCell& a, const PooledCell& b) { return a.expected < b.expected; });
  std::vector<PooledCell> pooled;
  PooledCell acc;
  for (const PooledCell& c : cells) {
    acc.observed += c.observed;
    acc.expected += c.expected;
    if (acc.expected >= 5.0) {
      pooled.push_back(acc);
      acc = {};
    }
  }
  if (acc.expected > 0.0 || acc.observed > 0.0) {
    if (pooled.empty()) {
      pooled.push_back(acc);
    } else {
      pooled.back().observed += acc.observed;
      pooled.back().expected += acc.expected;
    }
  }
  ChiSquareResult r;
  for (const PooledCell& c : pooled) {
    const double diff = c.observed - c.expected;
    r.statistic += diff * diff / c.expected;
  }
  r.dof = static_cast<int>(pooled.size()) - 1 - extra_constraints;
  r.p_value = r.dof > 0 ? chi_square_tail(r.statistic, r.dof) : 1.0;
  return r;
}

}  // namespace

std::vector<RankedPlanarTree> enumerate_ranked_planar(int leaves) {
  check_enumeration_cap(leaves);
  std::vector<int> perm(static_cast<std::size_t>(leaves - 1));
  std::iota(perm.begin(), perm.end(), 1);
  std::vector<RankedPlanarTree> out;
  do {
    out.push_back(perm_to_ranked_planar(perm));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

std::vector<PlanarShape> enumerate_planar_shapes(int leaves) {
  if (leaves < 1) throw DomainError("enumerate_planar_shapes: need at least one leaf");
  if (leaves > 12) throw CapExceededError("enumerate_planar_shapes: more than 12 leaves");
  std::vector<std::vector<std::vector<TreeNode>>> by_size(static_cast<std::size_t>(leaves) + 1);
  by_size[1] = {{TreeNode{}}};
  for (int n = 2; n <= leaves; ++n) {
    for (int k = 1; k < n; ++k) {
      for (const auto& l : by_size[static_cast<std::size_t>(k)]) {
        for (const auto& r : by_size[static_cast<std::size_t>(n - k)]) {
          std::vector<TreeNode> nodes;
          nodes.reserve(1 + l.size() + r.size());
          nodes.push_back({1, static_cast<NodeId>(1 + l.size())});
          for (TreeNode t : l) {
            if (!t.is_leaf()) {
              t.left += 1;
              t.right += 1;
            }
            nodes.push_back(t);
          }
          const auto shift = static_cast<NodeId>(1 + l.size());
          for (TreeNode t : r) {
            if (!t.is_leaf()) {
              t.left += shift;
              t.right += shift;
            }
            nodes.push_back(t);
          }
          by_size[static_cast<std::size_t>(n)].push_back(std::move(nodes));
        }
      }
    }
  }
  std::vector<PlanarShape> out;
  for (auto& nodes : by_size[static_cast<std::size_t>(leaves)]) out.emplace_back(std::move(nodes));
  return out;
}

LogReal ExactDistribution::total() const {
  LogReal sum = LogReal::zero();
  for (const auto& [key, p] : probabilities) sum += p;
  return sum;
}

double ExactDistribution::probability(const std::string& key) const {
  const auto it = probabilities.find(key);
  return it == probabilities.end() ? 0.0 : it->second.value();
}

std::string ExactDistribution::to_csv() const {
  std::ostringstream out;
  out << "encoding,probability_log_e,probability_mantissa,probability_exp10\n";
  out.precision(17);
  for (const auto& [key, p] : probabilities) {
    const DecimalForm d = decimal(p);
    out << '"' << key << "\"," << p.log_value << ',' << d.mantissa << ',' << d.exponent10 << '\n';
  }
  return out.str();
}

void accumulate_exact(int leaves, SplitParams p, Resolution r, std::uint64_t begin, std::uint64_t end,
                      std::map<std::string, LogReal>& into) {
  for (std::uint64_t i = begin; i < end; ++i) {
    const auto tree = perm_to_ranked_planar(nth_permutation(leaves - 1, i));
    auto [it, inserted] = into.try_emplace(encode(tree, r), LogReal::zero());
    it->second += log_prob_ranked_planar(tree, p);
  }
}

ExactDistribution exact_distribution(int leaves, SplitParams p, Resolution r) {
  check_enumeration_cap(leaves);
  validate(p);
  ExactDistribution d{r, leaves, p, {}};
  accumulate_exact(leaves, p, r, 0, factorial(leaves - 1), d.probabilities);
  return d;
}

double beta_integral(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("beta_integral: parameters must be > 0");
  boost::math::quadrature::tanh_sinh<double> integrator;
  double error = 0.0;
  double l1 = 0.0;
  const double value = integrator.integrate(
      [&](double x, double xc) {
        // xc = 1 - x near the endpoints, keeping (1 - x)^(b-1) accurate there.
        const double one_minus = x > 0.5 ? xc : 1.0 - x;
        return std::pow(x, a - 1.0) * std::pow(one_minus, b - 1.0);
      },
      0.0, 1.0, std::sqrt(std::numeric_limits<double>::epsilon()) * 1e-3, &error, &l1);
  if (!std::isfinite(value) || error > 1e-9 * std::abs(value)) {
    throw PrecisionError("beta_integral: quadrature did not converge");
  }
  return value;
}

LogReal quadrature_check(const RankedPlanarTree& tree, SplitParams p) {
  validate(p);
  const double log_norm = std::log(beta_integral(p.alpha + 1.0, p.beta + 1.0));
  double total = 0.0;
  for (SplitSizes s : tree.split_profile()) {
    total += std::log(beta_integral(s.left + p.alpha + 1.0, s.right + p.beta + 1.0)) - log_norm;
  }
  return {total};
}

double chi_square_tail(double statistic, int dof) {
  if (dof <= 0) return 1.0;
  if (statistic <= 0.0) return 1.0;
  return boost::math::gamma_q(dof / 2.0, statistic / 2.0);
}

ChiSquareResult chi_square_gof(const std::map<std::string, std::int64_t>& observed,
                               const std::map<std::string, double>& expected_probabilities) {
  if (expected_probabilities.empty()) throw ValidationError("chi_square_gof: empty expected support");
  double total = 0.0;
  for (const auto& [key, count] : observed) {
    if (!expected_probabilities.contains(key)) throw ValidationError("chi_square_gof: observed key outside support: " + key);
    total += static_cast<double>(count);
  }
  if (total <= 0.0) throw ValidationError("chi_square_gof: no observations");
  std::vector<PooledCell> cells;
  for (const auto& [key, prob] : expected_probabilities) {
    const auto it = observed.find(key);
    cells.push_back({it == observed.end() ? 0.0 : static_cast<double>(it->second), prob * total});
  }
  return pearson(std::move(cells), 0);
}

ChiSquareResult chi_square_gof(const std::map<std::string, std::int64_t>& observed, const ExactDistribution& expected) {
  std::map<std::string, double> probs;
  for (const auto& [key, p] : expected.probabilities) probs[key] = p.value();
  return chi_square_gof(observed, probs);
}

ChiSquareResult chi_square_two_sample(const std::map<std::string, std::int64_t>& a,
                                      const std::map<std::string, std::int64_t>& b) {
  double na = 0.0;
  double nb = 0.0;
  std::map<std::string, std::pair<double, double>> joint;
  for (const auto& [k, c] : a) {
    joint[k].first += static_cast<double>(c);
    na += static_cast<double>(c);
  }
  for (const auto& [k, c] : b) {
    joint[k].second += static_cast<double>(c);
    nb += static_cast<double>(c);
  }
  if (na <= 0.0 || nb <= 0.0) throw ValidationError("chi_square_two_sample: empty sample");
  // Pool on the combined frequencies, then test the 2 x K table.
  struct Cell {
    double a, b;
  };
  std::vector<Cell> cells;
  for (const auto& [k, c] : joint) cells.push_back({c.first, c.second});
  const double n = na + nb;
  std::sort(cells.begin(), cells.end(), [](const Cell& x, const Cell& y) { return x.a + x.b < y.a + y.b; });
  std::vector<Cell> pooled;
  Cell acc{0.0, 0.0};
  const auto min_expected = [&](const Cell& c) { return std::min(na, nb) * (c.a + c.b) / n; };
  for (const Cell& c : cells) {
    acc.a += c.a;
    acc.b += c.b;
    if (min_expected(acc) >= 5.0) {
      pooled.push_back(acc);
      acc = {0.0, 0.0};
    }
  }
  if (acc.a + acc.b > 0.0) {
    if (pooled.empty()) {
      pooled.push_back(acc);
    } else {
      pooled.back().a += acc.a;
      pooled.back().b += acc.b;
    }
  }
  ChiSquareResult r;
  for (const Cell& c : pooled) {
    const double total = c.a + c.b;
    const double ea = na * total / n;
    const double eb = nb * total / n;
    r.statistic += (c.a - ea) * (c.a - ea) / ea + (c.b - eb) * (c.b - eb) / eb;
  }
  r.dof = static_cast<int>(pooled.size()) - 1;
  r.p_value = chi_square_tail(r.statistic, r.dof);
  return r;
}

double ks_statistic(std::span<const double> samples, const std::function<double(double)>& cdf) {
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double ks_p_value(double statistic, std::size_t n) {
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  const double lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * statistic;
  if (lambda < 1e-3) return 1.0;
  // Q_KS(lambda) = 2 sum_{k>=1} (-1)^(k-1) exp(-2 k^2 lambda^2)
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-16 * std::abs(sum)) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double beta_cdf(double x, double a, double b) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return boost::math::ibeta(a, b, x);
}

}  // namespace betasplit
