#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "lookahead/rng.hpp"

namespace lookahead {

// Tabular episodic MDP with factored per-step reward/transition laws.
//
// Conventions used throughout the library:
//  * states s in [0, S), actions a in [0, A), steps h in [1, H] (1-based);
//  * all rewards live in [0, 1];
//  * the randomness of step h is described by a list of FactorGroups: each
//    group owns a disjoint set of (state, action) cells and draws one joint
//    outcome for all of them; distinct groups (and distinct steps) are
//    independent.  A single group covering all of S x A models a fully
//    correlated step; one group per cell models per-cell independence.

using State = int;
using Action = int;
using Step = int;  // 1-based

// out-of-range next-state code for pruned lookahead cells (never a real state)
inline constexpr State kEmptyState = -1;

struct Cell {
  State state = 0;
  Action action = 0;
};

// One joint outcome of a factor group: rewards/next states aligned with the
// group's cell list.
struct Outcome {
  double weight = 0.0;
  std::vector<double> rewards;
  std::vector<State> next;
};

struct FactorGroup {
  std::vector<Cell> cells;
  std::vector<Outcome> outcomes;
};

// A fully realized step: dense S x A reward and next-state tables.
struct StepScenario {
  Eigen::ArrayXXd rewards;  // S x A
  Eigen::ArrayXXi next;     // S x A
};

struct StepLaw {
  std::vector<FactorGroup> groups;
  // cell -> owning group / slot within that group's cell list; built by
  // index_cells().  -1 marks an uncovered cell (invalid MDP).
  Eigen::ArrayXXi cell_group;
  Eigen::ArrayXXi cell_slot;

  void index_cells(int num_states, int num_actions);
};

struct TabularMdp {
  int num_states = 0;
  int num_actions = 0;
  int horizon = 0;    // H
  int lookahead = 1;  // max lookahead range the agent may request
  std::vector<StepLaw> laws;  // laws[h-1] describes step h
  State terminal = -1;        // optional designated terminal, -1 = none
};

// Per-episode realization: one outcome index per factor group per step.
struct EpisodeRealization {
  std::vector<std::vector<int>> outcome;  // [h-1][group] -> outcome index
};

struct StepResult {
  double reward = 0.0;
  State next = 0;
};

struct ValidationReport {
  bool ok = true;
  std::string field;    // "sizes", "weights", "cells", "coverage", "reward_table", "next_table"
  std::string message;
  Step step = 0;        // 1-based step of the first violation, 0 if none
  int group = -1;       // group index of the first violation, -1 if none
};

// min(lookahead, H - h + 1); throws std::invalid_argument unless 1 <= h <= H.
int effective_lookahead(const TabularMdp& mdp, Step h);

// Structural validation; reports the first violation found.
ValidationReport validate_mdp(const TabularMdp& mdp);

// Draw the full H-step realization for one episode.  Deterministic in
// (seed, episode): group g of step h consumes one uniform from the counter
// stream keyed (seed, episode, h, g).
EpisodeRealization sample_episode(const TabularMdp& mdp, std::uint64_t seed,
                                  std::uint64_t episode);

// Dense realized tables for step h.
StepScenario realize_step(const TabularMdp& mdp, const EpisodeRealization& real, Step h);

// Realized reward and next state of one cell (cheap point lookup).
StepResult step(const TabularMdp& mdp, const EpisodeRealization& real, Step h,
                State s, Action a);

// Marginal one-cell law: expected reward and next-state distribution.
struct MarginalLaw {
  double expected_reward = 0.0;
  Eigen::VectorXd next_prob;  // size S, sums to 1
};
MarginalLaw marginal_law(const TabularMdp& mdp, Step h, State s, Action a);

// Number of joint outcomes of step h (product over groups), saturating at cap.
std::int64_t step_outcome_count(const TabularMdp& mdp, Step h, std::int64_t cap);

}  // namespace lookahead
