#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "betasplit/generate.hpp"
#include "betasplit/oracle.hpp"

namespace betasplit {

// OpenMP kernels with serial references. Replicate r always draws from
// make_stream(seed, r), so results do not depend on the thread count.

// omp_get_max_threads(), capped by BETASPLIT_THREADS when it holds a
// positive integer.
int worker_count();

enum class Process { discrete, continuous };

struct Replicate {
  RankedPlanarTree tree;
  GodOutcome outcome = GodOutcome::reached_n;
  std::int64_t steps = 0;
  std::int64_t effective_events = 0;
  std::int64_t freeze_events = 0;
  // Continuous time only.
  double total_time = 0.0;
};

// One replicate run until params.leaves active leaves or extinction.
Replicate run_replicate(const ModelParams& params, std::uint64_t seed, std::uint64_t index, Process process);

std::vector<Replicate> sample_replicates_serial(const ModelParams& params, std::uint64_t seed, std::int64_t count,
                                                Process process);
std::vector<Replicate> sample_replicates(const ModelParams& params, std::uint64_t seed, std::int64_t count,
                                         Process process);

// Counts of replicates that reached n, keyed by encode(tree, r).
std::map<std::string, std::int64_t> tally(const std::vector<Replicate>& replicates, Resolution r);

// Partitions the permutation space across threads and merges the partial
// maps in partition order.
ExactDistribution exact_distribution_parallel(int leaves, SplitParams p, Resolution r);

}  // namespace betasplit
