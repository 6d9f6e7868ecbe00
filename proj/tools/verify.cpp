#include "verify.hpp"

#include <cmath>
#include <functional>
#include <set>
#include <sstream>

#include "betasplit/numerics.hpp"
#include "betasplit/oracle.hpp"
#include "betasplit/parallel.hpp"
#include "betasplit/probability.hpp"
#include "betasplit/reversal.hpp"

namespace betasplit::cli {

namespace {

const std::vector<SplitParams> kGrid{{0, 0}, {-0.5, -0.5}, {1, 0}, {0, 2}, {3, 3}};

std::string fmt(double x) {
  std::ostringstream out;
  out.precision(3);
  out << x;
  return out.str();
}

SuiteResult suite(const std::string& name, const std::function<std::string(std::string&)>& body) {
  std::string detail;
  try {
    const std::string failure = body(detail);
    return {name, failure.empty(), failure.empty() ? detail : failure};
  } catch (const std::exception& e) {
    return {name, false, std::string("exception: ") + e.what()};
  }
}

double lfact(int n) { return std::lgamma(n + 1.0); }

}  // namespace

std::vector<SuiteResult> run_verify(VerifyLevel level, bool tamper) {
  const int n_max = level == VerifyLevel::full ? 7 : 5;
  const double shift = tamper ? 1e-6 : 0.0;
  std::vector<SuiteResult> out;

  out.push_back(suite("bijection", [&](std::string& detail) -> std::string {
    std::size_t checked = 0;
    for (int n = 1; n <= n_max; ++n) {
      std::set<std::string> seen;
      for (const auto& t : enumerate_ranked_planar(n)) {
        if (perm_to_ranked_planar(ranked_planar_to_perm(t)) != t) return "perm round trip failed";
        if (RankedPlanarTree::from_newick(t.to_newick()) != t) return "newick round trip failed";
        seen.insert(t.to_newick());
        ++checked;
      }
      if (seen.size() != std::uint64_t(std::tgamma(n) + 0.5)) return "duplicate trees at n=" + std::to_string(n);
    }
    detail = std::to_string(checked) + " trees";
    return {};
  }));

  out.push_back(suite("normalization", [&](std::string& detail) -> std::string {
    double worst = 0.0;
    for (const SplitParams& p : kGrid) {
      for (int n = 1; n <= n_max; ++n) {
        for (Resolution r : {Resolution::ranked_planar, Resolution::planar, Resolution::ranked, Resolution::shape}) {
          worst = std::max(worst, std::abs(exact_distribution_parallel(n, p, r).total().value() - 1.0 - shift));
        }
      }
    }
    detail = "max |sum - 1| = " + fmt(worst);
    return worst < 1e-10 ? "" : detail;
  }));

  out.push_back(suite("yule_law", [&](std::string& detail) -> std::string {
    double worst = 0.0;
    for (int n = 1; n <= n_max; ++n) {
      for (const auto& t : enumerate_ranked_planar(n)) {
        worst = std::max(worst, std::abs(log_prob_ranked_planar(t, {0, 0}).log_value + lfact(n - 1) + shift));
      }
    }
    detail = "max log error = " + fmt(worst);
    return worst < 1e-12 ? "" : detail;
  }));

  out.push_back(suite("table1", [&](std::string& detail) -> std::string {
    const char* expected[3][2][4] = {
        {{"1", "1", "1", "1"}, {"0", "0", "0", "0"}},
        {{"6.67e-1", "1.27e-2", "1.31e-25", "8.49e-2330"}, {"3.33e-1", "1.59e-2", "9.10e-12", "1.04e-417"}},
        {{"5.00e-1", "3.05e-5", "1.13e-131", "2.09e-157057"}, {"5.00e-1", "7.81e-2", "2.36e-7", "1.26e-247"}}};
    const BetaCase cases[3] = {BetaCase::minus_one, BetaCase::zero, BetaCase::infinity};
    const int ns[4] = {4, 8, 32, 1024};
    for (int b = 0; b < 3; ++b) {
      for (int k = 0; k < 4; ++k) {
        const LogReal comb = log_prob_comb_shape(ns[k], cases[b]) * LogReal{shift * 10};
        const LogReal bal = log_prob_balanced_shape(ns[k], cases[b]) * LogReal{shift * 10};
        if (format_decimal(comb, 3) != expected[b][0][k] || format_decimal(bal, 3) != expected[b][1][k]) {
          return "mismatch at n=" + std::to_string(ns[k]);
        }
      }
    }
    detail = "24 entries";
    return {};
  }));

  out.push_back(suite("fiber_consistency", [&](std::string& detail) -> std::string {
    double worst = 0.0;
    for (const SplitParams& p : kGrid) {
      for (int n = 2; n <= n_max; ++n) {
        for (const auto& [k, v] : exact_distribution(n, p, Resolution::planar).probabilities) {
          worst = std::max(worst, std::abs(log_prob_planar(PlanarShape::from_newick(k), p).value() - v.value()));
        }
        for (const auto& [k, v] : exact_distribution(n, p, Resolution::ranked).probabilities) {
          worst = std::max(worst, std::abs(log_prob_ranked_shape(RankedShape::from_newick(k), p).value() - v.value()));
        }
        for (const auto& [k, v] : exact_distribution(n, p, Resolution::shape).probabilities) {
          worst = std::max(worst, std::abs(log_prob_shape(TreeShape::from_newick(k), p).value() - v.value()));
        }
      }
    }
    detail = "max abs error = " + fmt(worst);
    return worst < 1e-12 ? "" : detail;
  }));

  out.push_back(suite("reversal", [&](std::string& detail) -> std::string {
    double worst = 0.0;
    for (const SplitParams& p : kGrid) {
      for (int n = 1; n < n_max; ++n) worst = std::max(worst, verify_reversal(n, p));
    }
    detail = "max residual = " + fmt(worst);
    return worst < 1e-10 ? "" : detail;
  }));

  if (level == VerifyLevel::full) {
    out.push_back(suite("closed_forms", [&](std::string& detail) -> std::string {
      double worst = 0.0;
      for (int n = 1; n <= 6; ++n) {
        for (const auto& t : enumerate_ranked_planar(n)) {
          for (int b = 0; b <= 3; ++b) {
            worst = std::max(worst, std::abs(log_prob_integer_beta(t, b).log_value -
                                             log_prob_ranked_planar(t, {double(b), double(b)}).log_value));
            worst = std::max(worst, std::abs(log_prob_half_integer(t, b).log_value -
                                             log_prob_ranked_planar(t, {b - 0.5, b - 0.5}).log_value));
          }
        }
      }
      detail = "max log error = " + fmt(worst);
      return worst < 1e-10 ? "" : detail;
    }));

    out.push_back(suite("monte_carlo", [&](std::string& detail) -> std::string {
      const ModelParams params{0.0, 0.0, 0.0, 1.0, 4};
      const auto reps = sample_replicates(params, 20240101, 10000, Process::discrete);
      const auto fit = chi_square_gof(tally(reps, Resolution::ranked_planar),
                                      exact_distribution(4, {0, 0}, Resolution::ranked_planar));
      detail = "p = " + fmt(fit.p_value);
      return fit.p_value > 1e-3 ? "" : detail;
    }));
  }
  return out;
}

}  // namespace betasplit::cli
