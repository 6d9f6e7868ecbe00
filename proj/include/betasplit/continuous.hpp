#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>

#include "json.hpp"
#include "betasplit/generate.hpp"

namespace betasplit {

// Continuous-time splitting/freezing. Each active leaf j splits at rate
// lambda (1 - delta) L_j and freezes at rate lambda delta L_j, L_j being its
// interval length. Frozen leaves carry no rate. Time 0 is the birth of the
// root species.
struct TimedTree {
  RankedPlanarTree base;
  // Split time of each rank, index rank - 1.
  std::vector<double> event_times;
  // Freeze time per frozen leaf node of `base`.
  std::map<NodeId, double> freeze_times;
  double total_time = 0.0;

  // Newick with branch lengths; the root edge runs from time 0 to the first
  // split, leaf edges end at their freeze time or at total_time.
  std::string to_newick() const;
  nlohmann::json to_json() const;
};

struct StopAfterEvents {
  std::int64_t events = 0;
};
struct StopAtActiveLeaves {
  int leaves = 1;
};
using StopRule = std::variant<StopAfterEvents, StopAtActiveLeaves>;

// One jump of the continuous process, for instrumentation.
struct ContinuousEvent {
  double wait = 0.0;
  double time = 0.0;
  // Total active length at the moment of the event.
  double active_length = 0.0;
  std::size_t cell = 0;
  double cell_width = 0.0;
  EventKind kind = EventKind::split;
};

class ContinuousProcess {
 public:
  ContinuousProcess(const ModelParams& params, Rng& rng);

  bool exhausted() const { return state_.active_count() == 0; }
  // Draws and applies the next event. Requires !exhausted().
  ContinuousEvent step();

  const GodState& state() const { return state_; }
  double time() const { return time_; }
  double active_length() const;

  TimedTree timed_tree() const;

 private:
  ModelParams params_;
  Rng& rng_;
  GodState state_;
  double time_ = 0.0;
  std::vector<double> split_times_;
  std::map<NodeId, double> freeze_times_;
};

// Throws PrecisionError if an active leaf width underflows to zero.
TimedTree simulate_continuous(const ModelParams& params, Rng& rng, StopRule stop);

// Discrete ranked planar tree (with frozen marks and intervals) underneath.
RankedPlanarTree embedded_discrete(const TimedTree& tree);

}  // namespace betasplit
