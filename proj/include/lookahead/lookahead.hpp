#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lookahead/mdp.hpp"

namespace lookahead {

// Multi-step lookahead windows and their batch summaries.
//
// A lookahead window of range B at (h, s0) reveals the realized rewards and
// next states of steps h .. h+B-1, pruned to the cells actually reachable
// from s0 within the window.  Pruned cells carry reward 0 and next state
// kEmptyState.  The summary of a window is, for every state s' reachable in
// exactly B steps, the best cumulative reward of a path s0 -> s'; everything
// downstream (planning, learning) consumes windows only through summaries.

struct LookaheadInfo {
  Step start_step = 1;    // h
  State origin_state = 0; // s0
  int range = 0;          // B
  std::vector<Eigen::ArrayXXd> rewards;  // per offset, S x A
  std::vector<Eigen::ArrayXXi> next;     // per offset, S x A
};

struct BatchSummary {
  Step start_step = 1;
  State origin_state = 0;
  int range = 0;
  // best[s'] = max cumulative reward of an in-window path s0 -> s'
  // (-inf where s' is not reachable in exactly `range` steps)
  Eigen::ArrayXd best;

  std::vector<State> reachable() const {
    std::vector<State> r;
    for (int s = 0; s < best.size(); ++s)
      if (std::isfinite(best[s])) r.push_back(s);
    return r;
  }
};

// In-window action plan extracted against a terminal value function.
struct BatchPlan {
  std::vector<Action> actions;  // length B
  std::vector<State> states;    // length B+1, states[0] = s0
  double value = 0.0;           // in-window reward sum + values[end state]
};

// Reveal the pruned B-step window of `real` starting at (h, s0).
// Requires 1 <= B <= effective_lookahead(mdp, h).
LookaheadInfo extract_lookahead(const TabularMdp& mdp, const EpisodeRealization& real,
                                Step h, State s0, int B);

// Forward dynamic program over the window; O(S*A*B) time, O(S) result.
BatchSummary compute_summary(const LookaheadInfo& info);

// Best achievable "in-window reward + values[end]" given a summary.
template <class D>
double batch_value(const BatchSummary& summary, const Eigen::ArrayBase<D>& values) {
  double best = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < summary.best.size(); ++s) {
    if (!std::isfinite(summary.best[s])) continue;
    const double v = summary.best[s] + values[s];
    if (v > best) best = v;
  }
  return best;
}

// Extract the action sequence attaining batch_value exactly.  Ties are broken
// by the lowest end state, then lowest predecessor state / action while
// backtracking, so the plan is unique and deterministic.
BatchPlan extract_batch_plan(const LookaheadInfo& info, const Eigen::ArrayXd& values);

// Thrown when an exact enumeration would exceed its cap.
struct EnumerationInfeasible : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Exact distribution of the window at (h, s0, B): pairs (probability, window).
// Only factor groups intersecting the reachable frontier branch, so prefix
// structure is shared; the number of distinct windows produced must not
// exceed `cap` (else EnumerationInfeasible).
std::vector<std::pair<double, LookaheadInfo>> enumerate_lookaheads(
    const TabularMdp& mdp, Step h, State s0, int B, std::int64_t cap);

// Streaming fold over the same distribution, emitting summaries without
// materializing windows.  Returns false if the cap was exceeded (the fold is
// then incomplete).
bool for_each_lookahead_summary(const TabularMdp& mdp, Step h, State s0, int B,
                                std::int64_t cap,
                                const std::function<void(double, const BatchSummary&)>& fn);

}  // namespace lookahead
