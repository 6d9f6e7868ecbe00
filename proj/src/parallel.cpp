#include "betasplit/parallel.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>

#include "betasplit/continuous.hpp"
#include "betasplit/error.hpp"

namespace betasplit {

int worker_count() {
  int n = omp_get_max_threads();
  if (const char* env = std::getenv("BETASPLIT_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && cap > 0) n = std::min<long>(n, cap);
  }
  return std::max(n, 1);
}

Replicate run_replicate(const ModelParams& params, std::uint64_t seed, std::uint64_t index, Process process) {
  Rng rng = make_stream(seed, index);
  Replicate r;
  if (process == Process::discrete) {
    GodRun run = run_god(params, rng, kGodIterationCap, false);
    r.tree = run.state.tree();
    r.outcome = run.outcome;
    r.steps = run.state.steps();
    r.effective_events = run.state.effective_events();
    r.freeze_events = run.state.freeze_events();
    return r;
  }
  TimedTree t = simulate_continuous(params, rng, StopAtActiveLeaves{params.leaves});
  r.tree = t.base;
  r.outcome = r.tree.leaf_count() - r.tree.frozen_count() == params.leaves ? GodOutcome::reached_n : GodOutcome::extinct;
  r.steps = r.tree.internal_count() + static_cast<std::int64_t>(t.freeze_times.size());
  r.effective_events = r.steps;
  r.freeze_events = static_cast<std::int64_t>(t.freeze_times.size());
  r.total_time = t.total_time;
  return r;
}

std::vector<Replicate> sample_replicates_serial(const ModelParams& params, std::uint64_t seed, std::int64_t count,
                                                Process process) {
  validate(params);
  if (count < 0) throw ValidationError("replicate count must be >= 0");
  std::vector<Replicate> out;
  out.reserve(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) out.push_back(run_replicate(params, seed, static_cast<std::uint64_t>(i), process));
  return out;
}

std::vector<Replicate> sample_replicates(const ModelParams& params, std::uint64_t seed, std::int64_t count,
                                         Process process) {
  validate(params);
  if (count < 0) throw ValidationError("replicate count must be >= 0");
  std::vector<Replicate> out(static_cast<std::size_t>(count));
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 64) num_threads(worker_count())
  for (std::int64_t i = 0; i < count; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = run_replicate(params, seed, static_cast<std::uint64_t>(i), process);
    } catch (...) {
#pragma omp critical(betasplit_replicate_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

std::map<std::string, std::int64_t> tally(const std::vector<Replicate>& replicates, Resolution r) {
  std::map<std::string, std::int64_t> counts;
  for (const Replicate& rep : replicates) {
    if (rep.outcome == GodOutcome::reached_n) ++counts[encode(rep.tree, r)];
  }
  return counts;
}

ExactDistribution exact_distribution_parallel(int leaves, SplitParams p, Resolution r) {
  if (leaves < 1) throw DomainError("enumeration: need at least one leaf");
  if (leaves > kEnumerationCap) throw CapExceededError("enumeration: leaf count exceeds the cap");
  validate(p);
  std::uint64_t total = 1;
  for (int i = 2; i < leaves; ++i) total *= static_cast<std::uint64_t>(i);
  // A fixed partition keeps the summation order independent of the thread count.
  constexpr int parts = 64;
  std::vector<std::map<std::string, LogReal>> partial(static_cast<std::size_t>(parts));
#pragma omp parallel for schedule(dynamic) num_threads(worker_count())
  for (int k = 0; k < parts; ++k) {
    const std::uint64_t begin = total * static_cast<std::uint64_t>(k) / static_cast<std::uint64_t>(parts);
    const std::uint64_t end = total * static_cast<std::uint64_t>(k + 1) / static_cast<std::uint64_t>(parts);
    accumulate_exact(leaves, p, r, begin, end, partial[static_cast<std::size_t>(k)]);
  }
  ExactDistribution d{r, leaves, p, {}};
  for (const auto& part : partial) {
    for (const auto& [key, value] : part) {
      auto [it, inserted] = d.probabilities.try_emplace(key, LogReal::zero());
      it->second += value;
    }
  }
  return d;
}

}  // namespace betasplit
