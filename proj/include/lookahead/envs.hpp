#pragma once

#include <cstdint>
#include <vector>

#include "lookahead/mdp.hpp"

namespace lookahead {

// Benchmark environments.
//
// The tree environments are deliberately adversarial for non-adaptive
// lookahead agents: all reward sits on a semi-terminal layer at step depth+1,
// reachable only through a deterministic funnel, so the value of a policy is
// decided entirely by how much of that layer its windows reveal.

// Complete A-ary tree of `depth` levels entered from a separate initial
// state: s0 -> root -> ... -> leaves (level `depth`, reached at step
// depth+1), then a terminal absorbing state.  Each (leaf, action) cell pays
// an independent Bernoulli(leaf_p) reward; leaf_p < 0 selects the calibrated
// default A^-depth.  depth < 0 selects depth = ell.  Requires H >= depth + 1.
TabularMdp build_bernoulli_leaf_tree(int A, int ell, int H, double leaf_p = -1.0,
                                     int depth = -1);

struct TreeLayout {
  State initial = 0;
  State root = 1;
  std::vector<State> leaves;
  State terminal = 0;
};
TreeLayout bernoulli_leaf_tree_layout(int A, int depth);

// Fork environment: the initial state s1 splits (action 0 vs the rest) into a
// complete A-ary tree of depth ell and a line of length ell.  Both end on a
// semi-terminal reward layer at step ell+1: one side carries "sure" states
// (every action pays A^{-ell/2} deterministically), the other "gamble" states
// (independent Bernoulli(A^-ell) per action).  Which type sits at the end of
// the line is the case parameter:
//  * resolve      pick the type with the higher one-step backward value
//                 (the sure type, under the default rewards);
//  * sure_line    sure type on the line, gambles at the leaves;
//  * gamble_line  gamble type on the line, sure type at the leaves;
//  * equal_margin sure type on the line plus an entry reward
//                 0.25 * A^{-ell/2} on the line branch, for schemes that
//                 value both types identically.
enum class TreeLineCase { resolve, sure_line, gamble_line, equal_margin };
TabularMdp build_tree_and_line(int A, int ell, int H,
                               TreeLineCase scheme_case = TreeLineCase::resolve);

struct TreeLineLayout {
  State initial = 0;
  State root = 1;
  std::vector<State> leaves;
  State line_start = 0;
  State line_end = 0;
  State terminal = 0;
};
TreeLineLayout tree_and_line_layout(int A, int ell);

// Random MDP with one independent factor group per (state, action) cell:
// categorical transitions over a `density`-sized support and Bernoulli
// rewards, all parameters drawn from (seed).
TabularMdp build_random_mdp(int S, int A, int H, int ell, std::uint64_t seed,
                            int density);

// Random MDP with a single fully-correlated factor group per step holding
// `outcomes_per_step` joint scenarios (dense reward/next tables).  Keeps the
// per-step support tiny, which brute-force oracles need.
TabularMdp build_random_joint_mdp(int S, int A, int H, int ell, std::uint64_t seed,
                                  int outcomes_per_step);

// Phase-augmented copy of `base` in which the environment only progresses on
// every delay-th step and freezes (zero reward) in between.  States are
// (s, phase), horizon becomes delay * base.horizon, lookahead becomes
// `delay`.  A window of range `delay` reveals exactly one base step, so the
// optimal batching value here equals the base optimum under lookahead 1.
TabularMdp build_delayed_env(const TabularMdp& base, int delay);

inline State delayed_state(const TabularMdp& base, State s, int phase, int delay) {
  (void)base;
  return s * delay + phase;
}

}  // namespace lookahead
