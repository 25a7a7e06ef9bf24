#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "lookahead/planner.hpp"

namespace lookahead {

// Reference agents that ignore the batching structure.

// Backward induction on the marginal one-step laws (no lookahead):
// V[h][s] = max_a E[R] + sum_s' P(s') V[h+1][s'].
ValueTable mpc_backward_values(const TabularMdp& mdp);

struct MarkovPolicy {
  Eigen::ArrayXXi action;  // H x S, argmax with ties -> lowest action
  ValueTable values;
};
// Best deterministic no-lookahead Markov policy (same backup as above).
MarkovPolicy markov_optimal(const TabularMdp& mdp);

// Model-predictive control: at every step, open the full currently available
// window, extract the best plan against `values`, execute only its first
// action, then replan.
EpisodeTrace run_mpc_episode(const TabularMdp& mdp, const ValueTable& values,
                             const EpisodeRealization& real, State s1);

// Consistency check of a value scheme on semi-terminal states.
//
// A state is semi-terminal at step h when every action, under every scenario,
// moves it to the designated terminal.  Two semi-terminal states of the same
// step with identical joint reward laws (up to action-aligned relabeling of
// outcomes) are indistinguishable to any agent, so a usable value scheme must
// assign them equal values.  The check groups semi-terminal states by step
// and canonical law fingerprint and compares values within each group.
struct ValueSchemeEntry {
  Step h = 0;
  State state = 0;
  int law_class = 0;   // index of the (step, law) equivalence class
  bool pass = true;
  State witness = -1;  // first same-class state with a differing value
  double value = 0.0;
  double witness_value = 0.0;
};
struct ValueSchemeReport {
  bool ok = true;           // no within-class value mismatch
  bool has_terminal = false;
  bool terminal_ok = true;  // terminal self-loops with zero reward everywhere
  std::vector<ValueSchemeEntry> entries;  // one per semi-terminal (h, s)
};
ValueSchemeReport check_value_scheme(const TabularMdp& mdp, const ValueTable& values,
                                     double tol = 1e-12);

// Mean return of an arbitrary episode runner.  Exact full-support enumeration
// when the episode realization space fits under `exact_cap`; otherwise Monte
// Carlo over `episodes` draws keyed (seed, episode).
struct AgentValue {
  double mean = 0.0;
  double stderr_ = 0.0;  // 0 in exact mode
  std::int64_t n = 0;
  bool exact = false;
};
AgentValue evaluate_agent(const TabularMdp& mdp,
                          const std::function<double(const EpisodeRealization&)>& runner,
                          std::int64_t episodes, std::uint64_t seed,
                          std::int64_t exact_cap = 0);

}  // namespace lookahead
