#include "lookahead/learner.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace lookahead {

SampleStore exact_law_store(const TabularMdp& mdp, std::int64_t cap) {
  SampleStore store(mdp.horizon, mdp.num_states, mdp.lookahead);
  for (Step h = 1; h <= mdp.horizon; ++h) {
    const int ell_h = effective_lookahead(mdp, h);
    for (State s = 0; s < mdp.num_states; ++s) {
      for (int B = 1; B <= ell_h; ++B) {
        const bool done = for_each_lookahead_summary(
            mdp, h, s, B, cap,
            [&](double p, const BatchSummary& sum) { store.append(h, s, B, sum, p); });
        if (!done)
          throw EnumerationInfeasible("exact_law_store: window support exceeds cap");
      }
    }
  }
  return store;
}

double confidence_log_term(std::int64_t k, double delta, int num_states, int horizon,
                           int lookahead) {
  if (k < 1) throw std::invalid_argument("confidence_log_term: episode index must be >= 1");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("confidence_log_term: delta must lie in (0, 1)");
  const double kd = static_cast<double>(k);
  const double value = std::log(18.0 * num_states * horizon * lookahead) +
                       3.0 * std::log(kd) + std::log(kd + 1.0) - std::log(delta);
  assert(value >= 1.0);
  return value;
}

EmpiricalStat empirical_stat(const SampleStore& store, Step h, State s, int B,
                             const Eigen::ArrayXd& values_next) {
  EmpiricalStat stat;
  double wsum = 0.0, m1 = 0.0, m2 = 0.0;
  for (const StoredSummary& entry : store.at(h, s, B)) {
    const double q = batch_value(entry.summary, values_next);
    wsum += entry.weight;
    m1 += entry.weight * q;
    m2 += entry.weight * q * q;
  }
  stat.count = store.count(h, s, B);
  const double denom = std::max(wsum, 1.0);
  stat.mean = m1 / denom;
  stat.variance = std::max(0.0, m2 / denom - stat.mean * stat.mean);
  return stat;
}

double exploration_bonus(double variance, std::int64_t n, int horizon, double log_term) {
  const double nn = static_cast<double>(std::max<std::int64_t>(n, 1));
  return std::sqrt(8.0 * variance * log_term / nn) + 11.0 * horizon * log_term / nn;
}

OptimisticTables compute_optimistic_tables(const TabularMdp& mdp, const SampleStore& store,
                                           std::int64_t k, double delta,
                                           double bonus_scale) {
  const int S = mdp.num_states, H = mdp.horizon;
  const double log_term = confidence_log_term(k, delta, S, H, mdp.lookahead);
  OptimisticTables t;
  t.q.resize(H);
  t.vbar = Eigen::ArrayXXd::Zero(H + 1, S);
  for (Step h = H; h >= 1; --h) {
    const int ell_h = effective_lookahead(mdp, h);
    t.q[h - 1] = Eigen::ArrayXXd::Zero(S, ell_h);
    for (int B = 1; B <= ell_h; ++B) {
      const Eigen::ArrayXd cont = t.vbar_row(h + B);
      for (State s = 0; s < S; ++s) {
        const EmpiricalStat stat = empirical_stat(store, h, s, B, cont);
        const double bonus =
            bonus_scale * exploration_bonus(stat.variance, stat.count, H, log_term);
        t.q[h - 1](s, B - 1) =
            std::min(stat.mean + bonus, static_cast<double>(H - h + 1));
      }
    }
    for (State s = 0; s < S; ++s) t.vbar(h - 1, s) = t.q[h - 1].row(s).maxCoeff();
  }
  return t;
}

namespace {

int greedy_range(const OptimisticTables& tables, Step h, State s) {
  const auto& row = tables.q[h - 1];
  int best_b = 1;
  double best = row(s, 0);
  for (int B = 2; B <= row.cols(); ++B)
    if (row(s, B - 1) > best) { best = row(s, B - 1); best_b = B; }
  return best_b;
}

}  // namespace

BatchingPolicy greedy_policy(const TabularMdp& mdp, const OptimisticTables& tables) {
  BatchingPolicy pol;
  pol.label = "greedy";
  pol.batch = Eigen::ArrayXXi::Ones(mdp.horizon, mdp.num_states);
  pol.values.v = tables.vbar;
  for (Step h = 1; h <= mdp.horizon; ++h)
    for (State s = 0; s < mdp.num_states; ++s)
      pol.batch(h - 1, s) = greedy_range(tables, h, s);
  return pol;
}

EpisodeTrace run_learning_episode(const TabularMdp& mdp, const OptimisticTables& tables,
                                  SampleStore& store, std::int64_t episode, State s1,
                                  std::uint64_t seed) {
  const EpisodeRealization real =
      sample_episode(mdp, seed, static_cast<std::uint64_t>(episode));
  EpisodeTrace trace;
  Step h = 1;
  State cur = s1;
  while (h <= mdp.horizon) {
    const int B = greedy_range(tables, h, cur);
    const LookaheadInfo info = extract_lookahead(mdp, real, h, cur, B);
    const BatchPlan plan = extract_batch_plan(info, tables.vbar_row(h + B));
    BatchStart rec;
    rec.h = h;
    rec.state = cur;
    rec.range = B;
    rec.planned_value = plan.value;
    for (int b = 0; b < B; ++b) {
      const StepResult sr = step(mdp, real, h + b, cur, plan.actions[b]);
      rec.batch_reward += sr.reward;
      cur = sr.next;
    }
    store.append(h, rec.state, B, compute_summary(info));
    trace.total_reward += rec.batch_reward;
    trace.batches.push_back(rec);
    h += B;
  }
  return trace;
}

std::vector<RegretRecord> run_learning(const TabularMdp& mdp, const LearnerConfig& cfg,
                                       const BatchingPolicy* optimal,
                                       const EpisodeObserver& observer) {
  if (cfg.initial_states.empty())
    throw std::invalid_argument("run_learning: need at least one initial state");
  BatchingPolicy computed;
  if (!optimal) {
    computed = plan_optimal_batching(mdp, cfg.expectation);
    optimal = &computed;
  }

  SampleStore store(mdp.horizon, mdp.num_states, mdp.lookahead);
  std::vector<RegretRecord> records;
  records.reserve(cfg.episodes);
  double realized_cum = 0.0, expected_cum = 0.0;
  std::int64_t last_eval = 0;
  for (std::int64_t k = 1; k <= cfg.episodes; ++k) {
    const State s1 =
        cfg.initial_states[static_cast<std::size_t>((k - 1) % cfg.initial_states.size())];
    const OptimisticTables tables =
        compute_optimistic_tables(mdp, store, k, cfg.delta);
    const EpisodeTrace trace =
        run_learning_episode(mdp, tables, store, k, s1, cfg.seed);

    RegretRecord rec;
    rec.episode = k;
    rec.initial_state = s1;
    rec.realized_return = trace.total_reward;
    rec.v_opt = optimal->values.v(0, s1);
    realized_cum += rec.v_opt - rec.realized_return;
    rec.regret_realized_cum = realized_cum;
    if (cfg.eval_interval > 0 && k % cfg.eval_interval == 0) {
      const BatchingPolicy pol = greedy_policy(mdp, tables);
      const ValueTable truth = evaluate_batching_policy(mdp, pol, cfg.expectation);
      rec.evaluated = true;
      rec.v_policy = truth.v(0, s1);
      // hold this episode's gap for the episodes since the last evaluation
      expected_cum += (rec.v_opt - rec.v_policy) * static_cast<double>(k - last_eval);
      rec.regret_expected_cum = expected_cum;
      last_eval = k;
    }
    records.push_back(rec);
    if (observer) observer(k, trace, tables);
  }
  return records;
}

}  // namespace lookahead
