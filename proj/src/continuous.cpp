#include "betasplit/continuous.hpp"

#include <charconv>
#include <functional>

#include "betasplit/error.hpp"

namespace betasplit {

namespace {

std::string shortest(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return {buf, res.ptr};
}

}  // namespace

ContinuousProcess::ContinuousProcess(const ModelParams& params, Rng& rng) : params_(params), rng_(rng) {
  validate(params_);
  state_.set_logging(false);
}

double ContinuousProcess::active_length() const { return state_.active_length(); }

// Draw order: waiting time, leaf, event type, split fraction.
ContinuousEvent ContinuousProcess::step() {
  if (exhausted()) throw ValidationError("continuous process: no active leaf left");
  ContinuousEvent ev;
  ev.active_length = active_length();
  if (!(ev.active_length > 0.0)) throw PrecisionError("continuous process: active leaves have zero total length");
  ev.wait = sample_exponential(params_.lambda * ev.active_length, rng_);
  time_ += ev.wait;
  ev.time = time_;

  const auto bp = state_.breakpoints();
  const double target = uniform01(rng_) * ev.active_length;
  double cumulative = 0.0;
  std::size_t chosen = state_.cell_count();
  std::size_t last_active = state_.cell_count();
  for (std::size_t c = 0; c < state_.cell_count(); ++c) {
    if (state_.cell_frozen(c)) continue;
    const double w = bp[c + 1] - bp[c];
    if (w <= 0.0) continue;
    last_active = c;
    cumulative += w;
    if (target < cumulative) {
      chosen = c;
      break;
    }
  }
  // Rounding can leave target just above the accumulated total.
  if (chosen == state_.cell_count()) chosen = last_active;
  ev.cell = chosen;
  ev.cell_width = bp[chosen + 1] - bp[chosen];

  if (uniform01(rng_) < params_.delta) {
    ev.kind = EventKind::freeze;
    freeze_times_[state_.cell_node(chosen)] = time_;
    state_.freeze_cell(chosen);
  } else {
    ev.kind = EventKind::split;
    const double b = sample_beta(params_.alpha + 1.0, params_.beta + 1.0, rng_);
    split_times_.push_back(time_);
    state_.split_cell(chosen, b);
  }
  return ev;
}

TimedTree ContinuousProcess::timed_tree() const {
  TimedTree t{state_.tree(), split_times_, freeze_times_, time_};
  return t;
}

TimedTree simulate_continuous(const ModelParams& params, Rng& rng, StopRule stop) {
  ContinuousProcess process(params, rng);
  std::int64_t events = 0;
  const auto done = [&]() {
    if (const auto* s = std::get_if<StopAfterEvents>(&stop)) return events >= s->events;
    return process.state().active_count() == std::get<StopAtActiveLeaves>(stop).leaves;
  };
  if (const auto* s = std::get_if<StopAtActiveLeaves>(&stop); s != nullptr && s->leaves < 1) {
    throw ValidationError("simulate_continuous: active_leaves must be >= 1");
  }
  if (const auto* s = std::get_if<StopAfterEvents>(&stop); s != nullptr && s->events < 0) {
    throw ValidationError("simulate_continuous: after_events must be >= 0");
  }
  while (!done() && !process.exhausted()) {
    process.step();
    ++events;
  }
  return process.timed_tree();
}

RankedPlanarTree embedded_discrete(const TimedTree& tree) { return tree.base; }

std::string TimedTree::to_newick() const {
  std::string out;
  std::function<void(NodeId, double)> write = [&](NodeId id, double parent_time) {
    const TreeNode& n = base.node(id);
    double t;
    if (n.is_leaf()) {
      const auto it = freeze_times.find(id);
      if (n.frozen) out += '*';
      t = it != freeze_times.end() ? it->second : total_time;
    } else {
      t = event_times.at(static_cast<std::size_t>(n.rank - 1));
      out += '(';
      write(n.left, t);
      out += ',';
      write(n.right, t);
      out += ')';
      out += std::to_string(n.rank);
    }
    out += ':';
    out += shortest(t - parent_time);
  };
  write(BinaryTree::root(), 0.0);
  return out + ";";
}

nlohmann::json TimedTree::to_json() const {
  nlohmann::json j;
  j["tree"] = betasplit::to_json(base, true);
  j["event_times"] = event_times;
  // Frozen leaves by left-to-right leaf index.
  nlohmann::json freezes = nlohmann::json::array();
  int leaf_index = 0;
  std::function<void(NodeId)> walk = [&](NodeId id) {
    const TreeNode& n = base.node(id);
    if (n.is_leaf()) {
      if (const auto it = freeze_times.find(id); it != freeze_times.end()) {
        freezes.push_back({{"leaf", leaf_index}, {"time", it->second}});
      }
      ++leaf_index;
      return;
    }
    walk(n.left);
    walk(n.right);
  };
  walk(BinaryTree::root());
  j["freeze_times"] = freezes;
  j["total_time"] = total_time;
  j["newick"] = to_newick();
  return j;
}

}  // namespace betasplit
