#include "betasplit/generate.hpp"

#include <cmath>
#include <limits>

#include "betasplit/error.hpp"

namespace betasplit {

void validate(const ModelParams& p) {
  validate(p.split());
  if (!(p.delta >= 0.0 && p.delta < 1.0)) throw DomainError("delta must lie in [0, 1)");
  if (!(p.lambda > 0.0) || !std::isfinite(p.lambda)) throw DomainError("lambda must be finite and > 0");
  if (p.leaves < 1) throw DomainError("leaves must be >= 1");
}

GeneratingQuadruple sample_quadruple(const ModelParams& params, Rng& rng) {
  GeneratingQuadruple q;
  q.u = uniform01(rng);
  q.b = sample_beta(params.alpha + 1.0, params.beta + 1.0, rng);
  q.v = uniform01(rng);
  q.d = uniform01(rng);
  return q;
}

std::vector<GeneratingQuadruple> sample_generating_sequence(const ModelParams& params, Rng& rng, std::size_t length) {
  validate(params.split());
  std::vector<GeneratingQuadruple> seq;
  seq.reserve(length);
  for (std::size_t i = 0; i < length; ++i) seq.push_back(sample_quadruple(params, rng));
  return seq;
}

std::string to_string(EventKind kind) {
  switch (kind) {
    case EventKind::split:
      return "split";
    case EventKind::freeze:
      return "freeze";
    case EventKind::cancelled:
      return "cancelled";
  }
  return "?";
}

std::string to_string(GodOutcome outcome) { return outcome == GodOutcome::reached_n ? "reached_n" : "extinct"; }

nlohmann::json to_json(const EventRecord& e) {
  nlohmann::json j;
  j["step"] = e.step;
  j["kind"] = to_string(e.kind);
  j["leaf_interval"] = {e.lo, e.hi};
  if (e.b) j["b"] = *e.b;
  return j;
}

GodState::GodState() {
  TreeNode root;
  root.lo = 0.0;
  root.hi = 1.0;
  root.has_interval = true;
  nodes_.push_back(root);
}

void GodState::log_event(EventKind kind, std::size_t cell, std::optional<double> b) {
  if (!logging_) return;
  log_.push_back({steps_, kind, breakpoints_[cell], breakpoints_[cell + 1], b});
}

void GodState::split_cell(std::size_t cell, double b) {
  const double lo = breakpoints_[cell];
  const double hi = breakpoints_[cell + 1];
  const double cut = lo + (hi - lo) * b;
  if (!(cut > lo && cut < hi)) {
    throw PrecisionError("split would create a zero-width leaf interval (width " + std::to_string(hi - lo) +
                         ", b = " + std::to_string(b) + ")");
  }
  ++steps_;
  ++effective_;
  log_event(EventKind::split, cell, b);

  const NodeId parent = cell_node_[cell];
  const auto left = static_cast<NodeId>(nodes_.size());
  const NodeId right = left + 1;
  TreeNode l;
  l.lo = lo;
  l.hi = cut;
  l.has_interval = true;
  TreeNode r;
  r.lo = cut;
  r.hi = hi;
  r.has_interval = true;
  nodes_.push_back(l);
  nodes_.push_back(r);
  TreeNode& p = nodes_[static_cast<std::size_t>(parent)];
  p.left = left;
  p.right = right;
  p.rank = next_rank_++;
  p.has_interval = false;

  breakpoints_.insert(breakpoints_.begin() + static_cast<std::ptrdiff_t>(cell) + 1, cut);
  cell_node_[cell] = left;
  cell_node_.insert(cell_node_.begin() + static_cast<std::ptrdiff_t>(cell) + 1, right);
  ++active_count_;
}

void GodState::freeze_cell(std::size_t cell) {
  ++steps_;
  TreeNode& leaf = nodes_[static_cast<std::size_t>(cell_node_[cell])];
  if (leaf.frozen) {
    log_event(EventKind::cancelled, cell, std::nullopt);
    return;
  }
  ++effective_;
  ++freezes_;
  leaf.frozen = true;
  --active_count_;
  log_event(EventKind::freeze, cell, std::nullopt);
}

EventKind GodState::apply(const GeneratingQuadruple& q, double delta) {
  if (q.v < delta) {
    const std::size_t cell = pick_interval(breakpoints_, q.d);
    if (cell_frozen(cell)) {
      ++steps_;
      log_event(EventKind::cancelled, cell, std::nullopt);
      return EventKind::cancelled;
    }
    freeze_cell(cell);
    return EventKind::freeze;
  }
  const std::size_t cell = pick_interval(breakpoints_, q.u);
  if (cell_frozen(cell)) {
    ++steps_;
    log_event(EventKind::cancelled, cell, std::nullopt);
    return EventKind::cancelled;
  }
  split_cell(cell, q.b);
  return EventKind::split;
}

double GodState::active_length() const {
  double total = 0.0;
  for (std::size_t c = 0; c < cell_count(); ++c) {
    if (!cell_frozen(c)) total += breakpoints_[c + 1] - breakpoints_[c];
  }
  return total;
}

RankedPlanarTree GodState::tree() const { return RankedPlanarTree(nodes_); }

GodState god_step(const GodState& state, const GeneratingQuadruple& q, double delta) {
  GodState next = state;
  next.apply(q, delta);
  return next;
}

RankedPlanarTree organize(std::span<const GeneratingQuadruple> seq, int leaves) {
  if (leaves < 1) throw ValidationError("organize: leaves must be >= 1");
  if (seq.size() + 1 < static_cast<std::size_t>(leaves)) {
    throw ValidationError("organize: sequence has " + std::to_string(seq.size()) + " entries, need " +
                          std::to_string(leaves - 1));
  }
  GodState state;
  state.set_logging(false);
  for (int i = 0; i + 1 < leaves; ++i) {
    const auto& g = seq[static_cast<std::size_t>(i)];
    const std::size_t cell = i == 0 ? 0 : pick_interval(state.breakpoints(), g.u);
    state.split_cell(cell, g.b);
  }
  return state.tree();
}

namespace {

// Skips the current run of cancelled events and applies the next effective
// one. Draw order: skip length, event type, position, split fraction.
// Returns the active length before the event.
double fast_forward(GodState& state, const ModelParams& params, Rng& rng) {
  const double active = state.active_length();
  if (!(active > 0.0)) throw PrecisionError("run_god: active leaves have zero total length");
  if (active < 1.0) {
    const double u = 1.0 - uniform01(rng);
    const double k = std::floor(std::log(u) / std::log1p(-active));
    state.skip_cancelled(k < 9e18 ? static_cast<std::int64_t>(k) : std::numeric_limits<std::int64_t>::max() / 2);
  }
  const bool freeze = uniform01(rng) < params.delta;
  const auto bp = state.breakpoints();
  const double target = uniform01(rng) * active;
  double cumulative = 0.0;
  std::size_t chosen = state.cell_count();
  for (std::size_t c = 0; c < state.cell_count(); ++c) {
    if (state.cell_frozen(c)) continue;
    chosen = c;
    cumulative += bp[c + 1] - bp[c];
    if (target < cumulative) break;
  }
  if (freeze) {
    state.freeze_cell(chosen);
  } else {
    state.split_cell(chosen, sample_beta(params.alpha + 1.0, params.beta + 1.0, rng));
  }
  return active;
}

template <class Done>
GodRun run_until(const ModelParams& params, Rng& rng, std::int64_t iteration_cap, bool keep_log, Done done) {
  validate(params);
  GodRun run;
  run.state.set_logging(keep_log);
  std::int64_t draws = 0;
  std::int64_t cancelled_run = 0;
  bool sticky = false;
  while (!done(run.state) && run.state.active_count() > 0) {
    if (draws >= iteration_cap) {
      throw IterationCapError("run_god: no termination after " + std::to_string(iteration_cap) + " events");
    }
    ++draws;
    if (!keep_log && (sticky || cancelled_run >= kFastForwardAfter)) {
      sticky = fast_forward(run.state, params, rng) < kFastForwardLength;
      cancelled_run = 0;
      continue;
    }
    const EventKind kind = run.state.apply(sample_quadruple(params, rng), params.delta);
    cancelled_run = kind == EventKind::cancelled ? cancelled_run + 1 : 0;
  }
  run.outcome = run.state.active_count() == 0 ? GodOutcome::extinct : GodOutcome::reached_n;
  return run;
}

}  // namespace

GodRun run_god(const ModelParams& params, Rng& rng, std::int64_t iteration_cap, bool keep_log) {
  return run_until(params, rng, iteration_cap, keep_log,
                   [&](const GodState& s) { return s.active_count() == params.leaves; });
}

GodRun run_god_effective(const ModelParams& params, Rng& rng, std::int64_t effective_events,
                         std::int64_t iteration_cap, bool keep_log) {
  return run_until(params, rng, iteration_cap, keep_log,
                   [&](const GodState& s) { return s.effective_events() >= effective_events; });
}

}  // namespace betasplit
