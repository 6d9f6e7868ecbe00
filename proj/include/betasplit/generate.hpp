#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "betasplit/numerics.hpp"
#include "betasplit/probability.hpp"
#include "betasplit/trees.hpp"

namespace betasplit {

struct ModelParams {
  double alpha = 0.0;
  double beta = 0.0;
  // Probability that an event is a freeze, in [0, 1).
  double delta = 0.0;
  // Event rate, continuous time only.
  double lambda = 1.0;
  // Target number of active leaves.
  int leaves = 1;

  SplitParams split() const { return {alpha, beta}; }
};

void validate(const ModelParams& p);

// One element (u, b, v, d) of the augmented generating sequence.
struct GeneratingQuadruple {
  double u = 0.0;  // picks the leaf to split
  double b = 0.5;  // split fraction, Beta(alpha + 1, beta + 1)
  double v = 1.0;  // freeze if v < delta
  double d = 0.0;  // picks the leaf to freeze
};

// Draw order per element: u, b, v, d.
std::vector<GeneratingQuadruple> sample_generating_sequence(const ModelParams& params, Rng& rng, std::size_t length);
GeneratingQuadruple sample_quadruple(const ModelParams& params, Rng& rng);

enum class EventKind { split, freeze, cancelled };
std::string to_string(EventKind kind);

struct EventRecord {
  std::int64_t step = 0;  // 1-based event index
  EventKind kind = EventKind::cancelled;
  double lo = 0.0;  // interval of the leaf the event landed on
  double hi = 0.0;
  std::optional<double> b;  // split fraction, splits only
};

// {"step", "kind", "leaf_interval": [lo, hi], "b"?}
nlohmann::json to_json(const EventRecord& e);

// State of the generating, organizing and deleting construction. Leaves
// are kept as cells ordered left to right across [0, 1]; cell j covers
// [breakpoints[j], breakpoints[j + 1]].
class GodState {
 public:
  // A single active root leaf labelled [0, 1].
  GodState();

  // Applies one event in place. The leaf containing u is split at relative
  // position b when v >= delta and it is active; the leaf containing d is
  // frozen when v < delta. Anything landing on a frozen leaf is cancelled.
  // Throws PrecisionError if a split would create a zero-width leaf.
  EventKind apply(const GeneratingQuadruple& q, double delta);

  int active_count() const { return active_count_; }
  int leaf_count() const { return static_cast<int>(cell_node_.size()); }
  int next_rank() const { return next_rank_; }
  std::int64_t steps() const { return steps_; }
  std::span<const double> breakpoints() const { return breakpoints_; }
  const std::vector<EventRecord>& event_log() const { return log_; }
  // Effective events: splits and first freezes.
  std::int64_t effective_events() const { return effective_; }
  std::int64_t freeze_events() const { return freezes_; }

  bool cell_frozen(std::size_t cell) const { return nodes_[static_cast<std::size_t>(cell_node_[cell])].frozen; }
  std::size_t cell_count() const { return cell_node_.size(); }
  NodeId cell_node(std::size_t cell) const { return cell_node_[cell]; }

  // The ranked planar tree built so far, with interval labels and frozen marks.
  RankedPlanarTree tree() const;

  // Split cell j at relative position b, creating the next rank; freeze
  // cell j. Both count as one event. The continuous-time process picks
  // cells itself and drives the state through these.
  void split_cell(std::size_t cell, double b);
  void freeze_cell(std::size_t cell);
  // Counts k cancelled events without drawing them.
  void skip_cancelled(std::int64_t k) { steps_ += k; }
  void set_logging(bool on) { logging_ = on; }
  bool logging() const { return logging_; }
  // Total length of the active leaf intervals.
  double active_length() const;

 private:
  void log_event(EventKind kind, std::size_t cell, std::optional<double> b);

  std::vector<TreeNode> nodes_;
  std::vector<double> breakpoints_{0.0, 1.0};
  std::vector<NodeId> cell_node_{0};
  int next_rank_ = 1;
  int active_count_ = 1;
  std::int64_t steps_ = 0;
  std::int64_t effective_ = 0;
  std::int64_t freezes_ = 0;
  bool logging_ = true;
  std::vector<EventRecord> log_;
};

// Pure one-step transition.
GodState god_step(const GodState& state, const GeneratingQuadruple& q, double delta);

// Deterministic organizing map on the first n - 1 pairs (u, b); u of the
// first pair is never consulted.
RankedPlanarTree organize(std::span<const GeneratingQuadruple> seq, int leaves);

enum class GodOutcome { reached_n, extinct };
std::string to_string(GodOutcome outcome);

struct GodRun {
  GodState state;
  GodOutcome outcome = GodOutcome::reached_n;
};

inline constexpr std::int64_t kGodIterationCap = 10'000'000;

inline constexpr std::int64_t kFastForwardAfter = 1024;
inline constexpr double kFastForwardLength = 1.0 / 16.0;

// Runs until `leaves` active leaves or none remain. Throws
// IterationCapError after `iteration_cap` drawn events. Without a log,
// after kFastForwardAfter consecutive cancelled events the remaining run of
// cancellations is drawn at once as Geometric(active length) and the next
// effective event from its conditional law. Fast-forwarding continues
// while the active length stays below kFastForwardLength. steps() still
// counts every event.
GodRun run_god(const ModelParams& params, Rng& rng, std::int64_t iteration_cap = kGodIterationCap,
               bool keep_log = true);

// Runs until the given number of effective events have happened or no
// active leaf remains.
GodRun run_god_effective(const ModelParams& params, Rng& rng, std::int64_t effective_events,
                         std::int64_t iteration_cap = kGodIterationCap, bool keep_log = true);

}  // namespace betasplit
