#pragma once

#include <vector>

#include "json.hpp"
#include "betasplit/numerics.hpp"
#include "betasplit/trees.hpp"

namespace betasplit {

// Split-fraction parameters: B ~ Beta(alpha + 1, beta + 1), alpha, beta > -1.
struct SplitParams {
  double alpha = 0.0;
  double beta = 0.0;
};

// Largest leaf count for which coarse probabilities with alpha != beta are
// obtained by enumerating planar embeddings.
inline constexpr int kDefaultEmbeddingCap = 20;

// P(tau) = prod over internal nodes of B(nL + alpha + 1, nR + beta + 1) / B(alpha + 1, beta + 1).
LogReal log_prob_ranked_planar(const RankedPlanarTree& tree, SplitParams p);

// Catalan coefficient times the ranked planar probability of any ranking.
LogReal log_prob_planar(const PlanarShape& tree, SplitParams p);

// alpha == beta: 2^(n-1-c) times the probability of any planar embedding.
// alpha != beta: sum over all 2^(n-1-c) ranked planar embeddings; throws
// CapExceededError when the leaf count exceeds embedding_cap.
LogReal log_prob_ranked_shape(const RankedShape& tree, SplitParams p, int embedding_cap = kDefaultEmbeddingCap);

// alpha == beta: 2^(n-1-s) times the probability of any planar embedding.
// alpha != beta: sum over the 2^(n-1-s) distinct planar embeddings.
LogReal log_prob_shape(const TreeShape& tree, SplitParams p, int embedding_cap = kDefaultEmbeddingCap);

// Distinct planar trees / ranked planar trees projecting onto a shape.
std::vector<PlanarShape> planar_embeddings(const TreeShape& tree);
std::vector<RankedPlanarTree> ranked_planar_embeddings(const RankedShape& tree);

// Limits of the symmetric model used by the closed forms.
enum class BetaCase { minus_one, zero, infinity };

// Probability of the comb tree shape on n >= 2 leaves.
LogReal log_prob_comb_shape(int leaves, BetaCase beta_case);
// Probability of the complete balanced tree shape on n = 2^N leaves.
LogReal log_prob_balanced_shape(int leaves, BetaCase beta_case);

// lim beta -> inf of P(tau) at alpha = beta: prod 2^-(nL + nR).
LogReal log_prob_ranked_planar_limit_inf(const RankedPlanarTree& tree);

// alpha = beta = b integer >= 0, factorial closed form.
LogReal log_prob_integer_beta(const RankedPlanarTree& tree, int b);
// alpha = beta = b - 1/2, b integer >= 0, factorial closed form.
LogReal log_prob_half_integer(const RankedPlanarTree& tree, int b);

// Aldous' symmetric split distribution q_n(i), i = 1..n-1 (index i - 1),
// for n >= 2 and beta > -2.
std::vector<double> aldous_split_pmf(int n, double beta);

// {"log_e", "mantissa", "exponent10"}.
nlohmann::json probability_record(LogReal p);

void validate(SplitParams p);

}  // namespace betasplit
