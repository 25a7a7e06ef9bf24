#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "lookahead/planner.hpp"

namespace lookahead {

// Optimistic online learner over batching policies.
//
// The learner never sees the step laws.  It stores the summary of every
// window it has opened, keyed by (start step, start state, range).  At each
// episode it rebuilds optimistic value tables backward: the stored summaries
// are re-evaluated against the current table, their empirical mean gets a
// variance-plus-count confidence bonus, and the result is clipped at the
// largest return still collectable.  Acting greedily w.r.t. these tables
// drives exploration of underused ranges.

struct StoredSummary {
  BatchSummary summary;
  double weight = 1.0;  // always 1 online; fractional in exact-law stores
};

class SampleStore {
 public:
  SampleStore() = default;
  SampleStore(int horizon, int num_states, int lookahead)
      : horizon_(horizon), num_states_(num_states), lookahead_(lookahead),
        buckets_(static_cast<std::size_t>(horizon) * num_states * lookahead) {}

  void append(Step h, State s, int B, BatchSummary summary, double weight = 1.0) {
    buckets_[index(h, s, B)].push_back({std::move(summary), weight});
  }
  const std::vector<StoredSummary>& at(Step h, State s, int B) const {
    return buckets_[index(h, s, B)];
  }
  std::int64_t count(Step h, State s, int B) const {
    return static_cast<std::int64_t>(buckets_[index(h, s, B)].size());
  }
  std::int64_t total() const {
    std::int64_t n = 0;
    for (const auto& b : buckets_) n += static_cast<std::int64_t>(b.size());
    return n;
  }

 private:
  std::size_t index(Step h, State s, int B) const {
    return (static_cast<std::size_t>(h - 1) * num_states_ + s) * lookahead_ + (B - 1);
  }
  int horizon_ = 0, num_states_ = 0, lookahead_ = 0;
  std::vector<std::vector<StoredSummary>> buckets_;
};

// Store holding the exact window law: every realizable summary with its
// probability as weight.  Used to sanity-check the estimator path.
SampleStore exact_law_store(const TabularMdp& mdp, std::int64_t cap);

struct LearnerConfig {
  int episodes = 1000;            // K
  double delta = 0.05;            // confidence parameter
  int eval_interval = 100;        // exact policy evaluation cadence; 0 = never
  std::vector<State> initial_states = {0};  // cycled over episodes
  std::uint64_t seed = 0;         // run seed (episode realizations)
  ExpectationConfig expectation;  // used for the optimal plan and evaluations
};

struct OptimisticTables {
  std::vector<Eigen::ArrayXXd> q;  // q[h-1]: S x effective_lookahead(h)
  Eigen::ArrayXXd vbar;            // (H+1) x S, row H is the zero terminal row
  auto vbar_row(Step h) const { return vbar.row(h - 1).transpose(); }
};

struct EmpiricalStat {
  double mean = 0.0;
  double variance = 0.0;
  std::int64_t count = 0;
};

// ln(18 * S * H * lookahead * k^3 * (k+1) / delta); asserts the result is >= 1.
double confidence_log_term(std::int64_t k, double delta, int num_states, int horizon,
                           int lookahead);

// Weighted mean / population variance of batch_value over the stored
// summaries at (h, s, B), re-evaluated against `values_next`.
EmpiricalStat empirical_stat(const SampleStore& store, Step h, State s, int B,
                             const Eigen::ArrayXd& values_next);

// sqrt(8 * variance * log_term / n) + 11 * horizon * log_term / n, with n
// floored at 1.
double exploration_bonus(double variance, std::int64_t n, int horizon, double log_term);

// Backward construction of the optimistic tables for episode k (1-based).
// `bonus_scale` exists for degenerate-bonus checks; the learner uses 1.
OptimisticTables compute_optimistic_tables(const TabularMdp& mdp, const SampleStore& store,
                                           std::int64_t k, double delta,
                                           double bonus_scale = 1.0);

// One greedy episode against fixed tables; appends every opened window's
// summary to the store and returns the executed trace.
EpisodeTrace run_learning_episode(const TabularMdp& mdp, const OptimisticTables& tables,
                                  SampleStore& store, std::int64_t episode, State s1,
                                  std::uint64_t seed);

struct RegretRecord {
  std::int64_t episode = 0;  // 1-based
  State initial_state = 0;
  double realized_return = 0.0;
  double v_opt = 0.0;                 // optimal value at (1, initial_state)
  double regret_realized_cum = 0.0;   // sum of v_opt - realized_return
  bool evaluated = false;             // exact policy evaluation ran this episode
  double v_policy = 0.0;              // exact value of this episode's greedy policy
  double regret_expected_cum = 0.0;   // piecewise-constant between evaluations
};

// Full learning run.  `optimal` may pass a precomputed optimal plan (shared
// across seeds); `observer`, if set, sees every episode's trace and tables.
using EpisodeObserver =
    std::function<void(std::int64_t, const EpisodeTrace&, const OptimisticTables&)>;
std::vector<RegretRecord> run_learning(const TabularMdp& mdp, const LearnerConfig& cfg,
                                       const BatchingPolicy* optimal = nullptr,
                                       const EpisodeObserver& observer = nullptr);

// Greedy policy induced by a table snapshot (argmax range, ties -> smallest).
BatchingPolicy greedy_policy(const TabularMdp& mdp, const OptimisticTables& tables);

}  // namespace lookahead
