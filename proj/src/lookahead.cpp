#include "lookahead/lookahead.hpp"

#include <cmath>

namespace lookahead {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

LookaheadInfo extract_lookahead(const TabularMdp& mdp, const EpisodeRealization& real,
                                Step h, State s0, int B) {
  if (B < 1 || B > effective_lookahead(mdp, h))
    throw std::invalid_argument("extract_lookahead: range out of [1, effective lookahead]");
  if (s0 < 0 || s0 >= mdp.num_states)
    throw std::invalid_argument("extract_lookahead: origin state out of range");

  const int S = mdp.num_states, A = mdp.num_actions;
  LookaheadInfo info;
  info.start_step = h;
  info.origin_state = s0;
  info.range = B;
  info.rewards.reserve(B);
  info.next.reserve(B);

  std::vector<char> frontier(S, 0);
  frontier[s0] = 1;
  for (int b = 0; b < B; ++b) {
    const StepScenario sc = realize_step(mdp, real, h + b);
    Eigen::ArrayXXd rew = Eigen::ArrayXXd::Zero(S, A);
    Eigen::ArrayXXi nxt = Eigen::ArrayXXi::Constant(S, A, kEmptyState);
    std::vector<char> reached(S, 0);
    for (State s = 0; s < S; ++s) {
      if (!frontier[s]) continue;
      for (Action a = 0; a < A; ++a) {
        rew(s, a) = sc.rewards(s, a);
        nxt(s, a) = sc.next(s, a);
        reached[sc.next(s, a)] = 1;
      }
    }
    info.rewards.push_back(std::move(rew));
    info.next.push_back(std::move(nxt));
    frontier = std::move(reached);
  }
  return info;
}

namespace {

// One forward DP sweep; layers[b][s] = best in-window reward of a path
// s0 -> s using exactly b steps (-inf if unreachable).
std::vector<Eigen::ArrayXd> forward_layers(const LookaheadInfo& info, int num_states) {
  std::vector<Eigen::ArrayXd> layers;
  layers.reserve(info.range + 1);
  Eigen::ArrayXd cur = Eigen::ArrayXd::Constant(num_states, kNegInf);
  cur[info.origin_state] = 0.0;
  layers.push_back(cur);
  for (int b = 0; b < info.range; ++b) {
    Eigen::ArrayXd nxt = Eigen::ArrayXd::Constant(num_states, kNegInf);
    const auto& rew = info.rewards[b];
    const auto& ns = info.next[b];
    for (State s = 0; s < num_states; ++s) {
      if (!std::isfinite(cur[s])) continue;
      for (Action a = 0; a < rew.cols(); ++a) {
        const State t = ns(s, a);
        if (t == kEmptyState) continue;
        const double cand = cur[s] + rew(s, a);
        if (cand > nxt[t]) nxt[t] = cand;
      }
    }
    layers.push_back(std::move(nxt));
    cur = layers.back();
  }
  return layers;
}

}  // namespace

BatchSummary compute_summary(const LookaheadInfo& info) {
  const int S = info.rewards.empty() ? 0 : static_cast<int>(info.rewards[0].rows());
  BatchSummary out;
  out.start_step = info.start_step;
  out.origin_state = info.origin_state;
  out.range = info.range;
  if (info.range == 0) {
    // zero-length window: only the origin, with zero reward
    const int n = std::max(S, info.origin_state + 1);
    out.best = Eigen::ArrayXd::Constant(n, kNegInf);
    out.best[info.origin_state] = 0.0;
    return out;
  }
  out.best = forward_layers(info, S).back();
  return out;
}

BatchPlan extract_batch_plan(const LookaheadInfo& info, const Eigen::ArrayXd& values) {
  const int S = static_cast<int>(values.size());
  const int B = info.range;
  const auto layers = forward_layers(info, S);

  State end = -1;
  double best = kNegInf;
  for (State s = 0; s < S; ++s) {
    if (!std::isfinite(layers[B][s])) continue;
    const double v = layers[B][s] + values[s];
    if (v > best) { best = v; end = s; }
  }
  if (end < 0) throw std::logic_error("extract_batch_plan: empty reachable set");

  BatchPlan plan;
  plan.value = best;
  plan.actions.assign(B, 0);
  plan.states.assign(B + 1, 0);
  plan.states[B] = end;
  State cur = end;
  for (int b = B; b >= 1; --b) {
    const auto& rew = info.rewards[b - 1];
    const auto& ns = info.next[b - 1];
    bool found = false;
    for (State s = 0; s < S && !found; ++s) {
      if (!std::isfinite(layers[b - 1][s])) continue;
      for (Action a = 0; a < rew.cols() && !found; ++a) {
        if (ns(s, a) != cur) continue;
        // exact: the layer value was computed as the max of these very sums
        if (layers[b - 1][s] + rew(s, a) == layers[b][cur]) {
          plan.actions[b - 1] = a;
          plan.states[b - 1] = s;
          cur = s;
          found = true;
        }
      }
    }
    if (!found) throw std::logic_error("extract_batch_plan: backtracking failed");
  }
  return plan;
}

namespace {

// Depth-first enumeration of window realizations.  At each offset only the
// factor groups intersecting the reachable frontier branch; the running
// forward-DP layer is carried down so shared prefixes are computed once.
class Enumerator {
 public:
  Enumerator(const TabularMdp& mdp, Step h, State s0, int B, std::int64_t cap,
             bool materialize)
      : mdp_(mdp), h_(h), s0_(s0), B_(B), cap_(cap), materialize_(materialize) {
    if (B < 1 || B > effective_lookahead(mdp, h))
      throw std::invalid_argument("enumerate_lookaheads: range out of [1, effective lookahead]");
    if (s0 < 0 || s0 >= mdp.num_states)
      throw std::invalid_argument("enumerate_lookaheads: origin state out of range");
    if (materialize_) {
      work_.start_step = h;
      work_.origin_state = s0;
      work_.range = B;
      for (int b = 0; b < B; ++b) {
        work_.rewards.emplace_back(Eigen::ArrayXXd::Zero(mdp.num_states, mdp.num_actions));
        work_.next.emplace_back(
            Eigen::ArrayXXi::Constant(mdp.num_states, mdp.num_actions, kEmptyState));
      }
    }
  }

  using SummaryFn = std::function<void(double, const BatchSummary&)>;
  using InfoFn = std::function<void(double, const LookaheadInfo&)>;

  bool run(const SummaryFn* on_summary, const InfoFn* on_info) {
    on_summary_ = on_summary;
    on_info_ = on_info;
    count_ = 0;
    Eigen::ArrayXd layer = Eigen::ArrayXd::Constant(mdp_.num_states, kNegInf);
    layer[s0_] = 0.0;
    return offset_rec(0, 1.0, layer);
  }

 private:
  bool offset_rec(int b, double prob, const Eigen::ArrayXd& layer) {
    if (b == B_) {
      if (++count_ > cap_) return false;
      if (on_summary_) {
        BatchSummary s;
        s.start_step = h_;
        s.origin_state = s0_;
        s.range = B_;
        s.best = layer;
        (*on_summary_)(prob, s);
      }
      if (on_info_) (*on_info_)(prob, work_);
      return true;
    }
    const StepLaw& law = mdp_.laws[h_ + b - 1];
    std::vector<int> relevant;
    for (int g = 0; g < static_cast<int>(law.groups.size()); ++g)
      for (const Cell& cell : law.groups[g].cells)
        if (std::isfinite(layer[cell.state])) { relevant.push_back(g); break; }
    return group_rec(b, law, relevant, 0, prob, layer,
                     Eigen::ArrayXd::Constant(mdp_.num_states, kNegInf));
  }

  bool group_rec(int b, const StepLaw& law, const std::vector<int>& relevant, int gi,
                 double prob, const Eigen::ArrayXd& layer, const Eigen::ArrayXd& acc) {
    if (gi == static_cast<int>(relevant.size())) return offset_rec(b + 1, prob, acc);
    const FactorGroup& group = law.groups[relevant[gi]];
    for (const Outcome& o : group.outcomes) {
      Eigen::ArrayXd acc2 = acc;
      const int ncells = static_cast<int>(group.cells.size());
      for (int c = 0; c < ncells; ++c) {
        const Cell& cell = group.cells[c];
        if (!std::isfinite(layer[cell.state])) continue;
        const double cand = layer[cell.state] + o.rewards[c];
        if (cand > acc2[o.next[c]]) acc2[o.next[c]] = cand;
        if (materialize_) {
          work_.rewards[b](cell.state, cell.action) = o.rewards[c];
          work_.next[b](cell.state, cell.action) = o.next[c];
        }
      }
      const bool ok = group_rec(b, law, relevant, gi + 1, prob * o.weight, layer, acc2);
      if (materialize_) {
        for (int c = 0; c < ncells; ++c) {
          const Cell& cell = group.cells[c];
          if (!std::isfinite(layer[cell.state])) continue;
          work_.rewards[b](cell.state, cell.action) = 0.0;
          work_.next[b](cell.state, cell.action) = kEmptyState;
        }
      }
      if (!ok) return false;
    }
    return true;
  }

  const TabularMdp& mdp_;
  Step h_;
  State s0_;
  int B_;
  std::int64_t cap_;
  bool materialize_;
  LookaheadInfo work_;
  std::int64_t count_ = 0;
  const SummaryFn* on_summary_ = nullptr;
  const InfoFn* on_info_ = nullptr;
};

}  // namespace

std::vector<std::pair<double, LookaheadInfo>> enumerate_lookaheads(
    const TabularMdp& mdp, Step h, State s0, int B, std::int64_t cap) {
  std::vector<std::pair<double, LookaheadInfo>> out;
  Enumerator e(mdp, h, s0, B, cap, /*materialize=*/true);
  Enumerator::InfoFn fn = [&out](double p, const LookaheadInfo& info) {
    out.emplace_back(p, info);
  };
  if (!e.run(nullptr, &fn))
    throw EnumerationInfeasible("enumerate_lookaheads: window support exceeds cap");
  return out;
}

bool for_each_lookahead_summary(const TabularMdp& mdp, Step h, State s0, int B,
                                std::int64_t cap,
                                const std::function<void(double, const BatchSummary&)>& fn) {
  Enumerator e(mdp, h, s0, B, cap, /*materialize=*/false);
  return e.run(&fn, nullptr);
}

}  // namespace lookahead
