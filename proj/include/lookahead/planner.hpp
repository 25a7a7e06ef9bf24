#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "lookahead/lookahead.hpp"
#include "lookahead/mdp.hpp"

namespace lookahead {

// Planning with adaptive batching.
//
// A batching policy picks, at every batch start (h, s), a lookahead range
// B in [1, effective_lookahead(h)], observes the realized B-step window,
// walks the best in-window path against its value table, and repeats from the
// window's end state.  plan_optimal_batching computes the best such policy by
// backward induction over expected window values; solve_augmented_oracle
// recomputes the same quantity by brute force over materialized windows and
// exists purely as a cross-check.

struct ValueTable {
  // rows h = 1 .. H+1 (row H is the all-zero terminal row), columns = states
  Eigen::ArrayXXd v;

  static ValueTable zeros(int horizon, int num_states) {
    ValueTable t;
    t.v = Eigen::ArrayXXd::Zero(horizon + 1, num_states);
    return t;
  }
  // value row of step h as a column expression
  auto row(Step h) const { return v.row(h - 1).transpose(); }
};

struct BatchingPolicy {
  Eigen::ArrayXXi batch;  // H x S; chosen range when a batch starts at (h, s)
  ValueTable values;      // table the policy plans against (row h+B at a start)
  std::string label;
};

struct ExpectationConfig {
  std::int64_t exact_cap = 10000;  // max window realizations for exact folds
  int mc_samples = 10000;          // Monte Carlo fallback sample count
  std::uint64_t seed = 0;          // base seed for Monte Carlo draws
};

struct QStat {
  double mean = 0.0;
  double variance = 0.0;  // population variance of the window value
  bool exact = false;
};

// Mean/variance of batch_value(summary, values_next) over the window law at
// (h, s, B).  Exact enumeration when the support fits under cfg.exact_cap,
// else Monte Carlo with seeds derived from (cfg.seed, h, s, B, sample).
QStat expected_batch_value(const TabularMdp& mdp, Step h, State s, int B,
                           const Eigen::ArrayXd& values_next, const ExpectationConfig& cfg);

// Backward induction over batch starts; argmax ties resolved toward the
// smallest range.  The returned policy carries its own optimal value table.
BatchingPolicy plan_optimal_batching(const TabularMdp& mdp, const ExpectationConfig& cfg);

// True expected return of `policy` from every (h, s): in-window behavior is
// defined by the policy's attached table, continuation uses the true values.
ValueTable evaluate_batching_policy(const TabularMdp& mdp, const BatchingPolicy& policy,
                                    const ExpectationConfig& cfg);

// Non-adaptive schedule: consecutive batch sizes covering [1, H] exactly.
// Throws std::invalid_argument if a size exceeds the effective lookahead at
// its start.  Rows of the value table at non-start steps are zero-filled and
// their batch entries are a placeholder 1; only batch-start rows are
// meaningful.
BatchingPolicy plan_fixed_batching(const TabularMdp& mdp, const std::vector<int>& schedule,
                                   const ExpectationConfig& cfg);

// Schedule of constant range B truncated near the horizon.
std::vector<int> constant_schedule(const TabularMdp& mdp, int B);

// Brute-force reference: enumerates materialized windows and optimizes each
// by per-step action recursion (no summary DP), so it shares no code path
// with plan_optimal_batching beyond window enumeration.  `cap` bounds the
// total number of windows across all (h, s, B); tiny instances only.
ValueTable solve_augmented_oracle(const TabularMdp& mdp, std::int64_t cap = 500000);

// Execution of a batching policy on one realized episode.
struct BatchStart {
  Step h = 1;
  State state = 0;
  int range = 1;
  double planned_value = 0.0;   // batch_value against the policy's table
  double batch_reward = 0.0;    // realized in-window reward collected
};
struct EpisodeTrace {
  double total_reward = 0.0;
  std::vector<BatchStart> batches;
};
EpisodeTrace run_policy_episode(const TabularMdp& mdp, const BatchingPolicy& policy,
                                const EpisodeRealization& real, State s1);

}  // namespace lookahead
