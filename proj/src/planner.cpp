#include "lookahead/planner.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace lookahead {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::uint64_t kMcTag = 0x6d63u;      // planner Monte Carlo stream
constexpr std::uint64_t kEvalTag = 0x6576u;    // policy evaluation stream

// Sample one window summary directly (no materialized window): per offset,
// draw an outcome for each factor group intersecting the frontier, ascending
// group order, and push the forward DP layer through it.
BatchSummary sample_summary(const TabularMdp& mdp, Step h, State s0, int B,
                            CounterRng& rng) {
  const int S = mdp.num_states;
  Eigen::ArrayXd layer = Eigen::ArrayXd::Constant(S, kNegInf);
  layer[s0] = 0.0;
  for (int b = 0; b < B; ++b) {
    const StepLaw& law = mdp.laws[h + b - 1];
    Eigen::ArrayXd acc = Eigen::ArrayXd::Constant(S, kNegInf);
    for (const FactorGroup& group : law.groups) {
      bool relevant = false;
      for (const Cell& cell : group.cells)
        if (std::isfinite(layer[cell.state])) { relevant = true; break; }
      if (!relevant) continue;
      const double u = rng.next_double();
      double cum = 0.0;
      int pick = static_cast<int>(group.outcomes.size()) - 1;
      for (int i = 0; i < static_cast<int>(group.outcomes.size()); ++i) {
        cum += group.outcomes[i].weight;
        if (u < cum) { pick = i; break; }
      }
      const Outcome& o = group.outcomes[pick];
      for (int c = 0; c < static_cast<int>(group.cells.size()); ++c) {
        const Cell& cell = group.cells[c];
        if (!std::isfinite(layer[cell.state])) continue;
        const double cand = layer[cell.state] + o.rewards[c];
        if (cand > acc[o.next[c]]) acc[o.next[c]] = cand;
      }
    }
    layer = std::move(acc);
  }
  BatchSummary s;
  s.start_step = h;
  s.origin_state = s0;
  s.range = B;
  s.best = std::move(layer);
  return s;
}

}  // namespace

QStat expected_batch_value(const TabularMdp& mdp, Step h, State s, int B,
                           const Eigen::ArrayXd& values_next,
                           const ExpectationConfig& cfg) {
  QStat out;
  double m1 = 0.0, m2 = 0.0;
  const bool done = for_each_lookahead_summary(
      mdp, h, s, B, cfg.exact_cap,
      [&](double p, const BatchSummary& sum) {
        const double q = batch_value(sum, values_next);
        m1 += p * q;
        m2 += p * q * q;
      });
  if (done) {
    out.mean = m1;
    out.variance = std::max(0.0, m2 - m1 * m1);
    out.exact = true;
    return out;
  }
  m1 = m2 = 0.0;
  for (int i = 0; i < cfg.mc_samples; ++i) {
    CounterRng rng{cfg.seed, kMcTag, static_cast<std::uint64_t>(h),
                   static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(B),
                   static_cast<std::uint64_t>(i)};
    const BatchSummary sum = sample_summary(mdp, h, s, B, rng);
    const double q = batch_value(sum, values_next);
    m1 += q;
    m2 += q * q;
  }
  const double n = std::max(1, cfg.mc_samples);
  out.mean = m1 / n;
  out.variance = std::max(0.0, m2 / n - out.mean * out.mean);
  out.exact = false;
  return out;
}

BatchingPolicy plan_optimal_batching(const TabularMdp& mdp, const ExpectationConfig& cfg) {
  const int S = mdp.num_states, H = mdp.horizon;
  BatchingPolicy pol;
  pol.label = "optimal";
  pol.batch = Eigen::ArrayXXi::Ones(H, S);
  pol.values = ValueTable::zeros(H, S);
  for (Step h = H; h >= 1; --h) {
    const int ell_h = effective_lookahead(mdp, h);
    for (State s = 0; s < S; ++s) {
      double best = kNegInf;
      int best_b = 1;
      for (int B = 1; B <= ell_h; ++B) {
        const Eigen::ArrayXd cont = pol.values.row(h + B);
        const double q = expected_batch_value(mdp, h, s, B, cont, cfg).mean;
        if (q > best) { best = q; best_b = B; }
      }
      pol.values.v(h - 1, s) = best;
      pol.batch(h - 1, s) = best_b;
    }
  }
  return pol;
}

ValueTable evaluate_batching_policy(const TabularMdp& mdp, const BatchingPolicy& policy,
                                    const ExpectationConfig& cfg) {
  const int S = mdp.num_states, H = mdp.horizon;
  ValueTable truth = ValueTable::zeros(H, S);
  for (Step h = H; h >= 1; --h) {
    for (State s = 0; s < S; ++s) {
      const int B = policy.batch(h - 1, s);
      if (B < 1 || B > effective_lookahead(mdp, h))
        throw std::invalid_argument("evaluate_batching_policy: batch range out of bounds");
      const Eigen::ArrayXd plan_row = policy.values.row(h + B);
      const Eigen::ArrayXd true_row = truth.row(h + B);
      // per realization: the policy walks to the end state that is best under
      // its own table (ties -> lowest state), collecting that path's reward;
      // continuation is valued by the true table
      auto realized = [&](const BatchSummary& sum) {
        State end = -1;
        double best = kNegInf;
        for (State t = 0; t < S; ++t) {
          if (!std::isfinite(sum.best[t])) continue;
          const double v = sum.best[t] + plan_row[t];
          if (v > best) { best = v; end = t; }
        }
        return sum.best[end] + true_row[end];
      };
      double mean = 0.0;
      const bool done = for_each_lookahead_summary(
          mdp, h, s, B, cfg.exact_cap,
          [&](double p, const BatchSummary& sum) { mean += p * realized(sum); });
      if (!done) {
        mean = 0.0;
        for (int i = 0; i < cfg.mc_samples; ++i) {
          CounterRng rng{cfg.seed, kEvalTag, static_cast<std::uint64_t>(h),
                         static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(B),
                         static_cast<std::uint64_t>(i)};
          const BatchSummary sum = sample_summary(mdp, h, s, B, rng);
          mean += realized(sum);
        }
        mean /= std::max(1, cfg.mc_samples);
      }
      truth.v(h - 1, s) = mean;
    }
  }
  return truth;
}

std::vector<int> constant_schedule(const TabularMdp& mdp, int B) {
  if (B < 1 || B > mdp.lookahead)
    throw std::invalid_argument("constant_schedule: range out of [1, lookahead]");
  std::vector<int> schedule;
  Step h = 1;
  while (h <= mdp.horizon) {
    const int size = std::min(B, mdp.horizon - h + 1);
    schedule.push_back(size);
    h += size;
  }
  return schedule;
}

BatchingPolicy plan_fixed_batching(const TabularMdp& mdp, const std::vector<int>& schedule,
                                   const ExpectationConfig& cfg) {
  const int S = mdp.num_states, H = mdp.horizon;
  std::vector<Step> starts;
  Step h = 1;
  for (int size : schedule) {
    if (size < 1 || h > H || size > effective_lookahead(mdp, h))
      throw std::invalid_argument("plan_fixed_batching: invalid schedule entry");
    starts.push_back(h);
    h += size;
  }
  if (h != H + 1)
    throw std::invalid_argument("plan_fixed_batching: schedule must cover [1, H] exactly");

  BatchingPolicy pol;
  pol.label = "fixed";
  pol.batch = Eigen::ArrayXXi::Ones(H, S);
  pol.values = ValueTable::zeros(H, S);
  for (int i = static_cast<int>(starts.size()) - 1; i >= 0; --i) {
    const Step hs = starts[i];
    const int B = schedule[i];
    for (State s = 0; s < S; ++s) {
      const Eigen::ArrayXd cont = pol.values.row(hs + B);
      pol.values.v(hs - 1, s) = expected_batch_value(mdp, hs, s, B, cont, cfg).mean;
      pol.batch(hs - 1, s) = B;
    }
  }
  return pol;
}

namespace {

// best value through a materialized window from `s` at offset `b`, optimizing
// one action at a time (deliberately not the summary DP)
double window_walk(const LookaheadInfo& info, const ValueTable& vtab, State s, int b) {
  if (b == info.range) return vtab.v(info.start_step + info.range - 1, s);
  double best = kNegInf;
  const auto& rew = info.rewards[b];
  const auto& ns = info.next[b];
  for (Action a = 0; a < rew.cols(); ++a) {
    if (ns(s, a) == kEmptyState) continue;
    const double v = rew(s, a) + window_walk(info, vtab, ns(s, a), b + 1);
    if (v > best) best = v;
  }
  if (!std::isfinite(best))
    throw std::logic_error("solve_augmented_oracle: walked into a pruned cell");
  return best;
}

}  // namespace

ValueTable solve_augmented_oracle(const TabularMdp& mdp, std::int64_t cap) {
  const int S = mdp.num_states, H = mdp.horizon;
  ValueTable vtab = ValueTable::zeros(H, S);
  std::int64_t budget = cap;
  for (Step h = H; h >= 1; --h) {
    const int ell_h = effective_lookahead(mdp, h);
    for (State s = 0; s < S; ++s) {
      double best = kNegInf;
      for (int B = 1; B <= ell_h; ++B) {
        const auto windows = enumerate_lookaheads(mdp, h, s, B, budget);
        budget -= static_cast<std::int64_t>(windows.size());
        if (budget < 0)
          throw EnumerationInfeasible("solve_augmented_oracle: window budget exhausted");
        double mean = 0.0;
        for (const auto& [p, info] : windows) mean += p * window_walk(info, vtab, s, 0);
        if (mean > best) best = mean;
      }
      vtab.v(h - 1, s) = best;
    }
  }
  return vtab;
}

EpisodeTrace run_policy_episode(const TabularMdp& mdp, const BatchingPolicy& policy,
                                const EpisodeRealization& real, State s1) {
  EpisodeTrace trace;
  Step h = 1;
  State cur = s1;
  while (h <= mdp.horizon) {
    const int B = policy.batch(h - 1, cur);
    if (B < 1 || B > effective_lookahead(mdp, h))
      throw std::invalid_argument("run_policy_episode: batch range out of bounds");
    const LookaheadInfo info = extract_lookahead(mdp, real, h, cur, B);
    const BatchPlan plan = extract_batch_plan(info, policy.values.row(h + B));
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
    trace.total_reward += rec.batch_reward;
    trace.batches.push_back(rec);
    h += B;
  }
  return trace;
}

}  // namespace lookahead
