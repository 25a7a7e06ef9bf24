#pragma once

// Brute-force reference implementations shared by the test suite.  These
// deliberately avoid the library's DP/enumeration code paths: window values
// come from exhaustive action-sequence search and expectations from full
// episode-realization enumeration.

#include <functional>
#include <limits>
#include <vector>

#include "lookahead/envs.hpp"
#include "lookahead/lookahead.hpp"
#include "lookahead/mdp.hpp"

namespace testutil {

using namespace lookahead;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Exhaustive max over every B-length action sequence of (in-window reward sum
// + values[end]).  The running sum accumulates prefix-first, matching the
// addition order of a forward sweep, so agreement can be checked exactly.
inline void brute_window_rec(const LookaheadInfo& info, const Eigen::ArrayXd& values,
                             State s, int b, double acc, double& best,
                             Eigen::ArrayXd* best_per_end) {
  if (b == info.range) {
    if (best_per_end && acc > (*best_per_end)[s]) (*best_per_end)[s] = acc;
    const double v = acc + values[s];
    if (v > best) best = v;
    return;
  }
  for (Action a = 0; a < info.rewards[b].cols(); ++a) {
    const State ns = info.next[b](s, a);
    if (ns == kEmptyState) continue;
    brute_window_rec(info, values, ns, b + 1, acc + info.rewards[b](s, a), best,
                     best_per_end);
  }
}

inline double brute_window_value(const LookaheadInfo& info, const Eigen::ArrayXd& values,
                                 Eigen::ArrayXd* best_per_end = nullptr) {
  double best = kNegInf;
  if (best_per_end)
    *best_per_end = Eigen::ArrayXd::Constant(values.size(), kNegInf);
  brute_window_rec(info, values, info.origin_state, 0, 0.0, best, best_per_end);
  return best;
}

// Visit every joint episode realization with its probability.
inline void for_each_realization(
    const TabularMdp& mdp,
    const std::function<void(const EpisodeRealization&, double)>& fn) {
  EpisodeRealization real;
  real.outcome.resize(mdp.horizon);
  for (Step h = 1; h <= mdp.horizon; ++h)
    real.outcome[h - 1].assign(mdp.laws[h - 1].groups.size(), 0);
  std::function<void(Step, int, double)> rec = [&](Step h, int g, double p) {
    if (h > mdp.horizon) {
      fn(real, p);
      return;
    }
    const auto& groups = mdp.laws[h - 1].groups;
    if (g == static_cast<int>(groups.size())) {
      rec(h + 1, 0, p);
      return;
    }
    for (int o = 0; o < static_cast<int>(groups[g].outcomes.size()); ++o) {
      real.outcome[h - 1][g] = o;
      rec(h, g + 1, p * groups[g].outcomes[o].weight);
    }
  };
  rec(1, 0, 1.0);
}

// Expected return of a deterministic episode runner, by full enumeration.
inline double brute_expected_return(
    const TabularMdp& mdp, const std::function<double(const EpisodeRealization&)>& runner) {
  double mean = 0.0;
  for_each_realization(mdp, [&](const EpisodeRealization& real, double p) {
    mean += p * runner(real);
  });
  return mean;
}

// Small fully deterministic MDP: next(s, a) = (s + a + h) % S with a fixed
// reward pattern.  Useful where realized and expected behavior must coincide.
inline TabularMdp deterministic_mdp(int S, int A, int H, int ell) {
  TabularMdp mdp;
  mdp.num_states = S;
  mdp.num_actions = A;
  mdp.horizon = H;
  mdp.lookahead = ell;
  mdp.laws.resize(H);
  for (Step h = 1; h <= H; ++h) {
    FactorGroup g;
    Outcome o;
    o.weight = 1.0;
    for (State s = 0; s < S; ++s)
      for (Action a = 0; a < A; ++a) {
        g.cells.push_back({s, a});
        o.rewards.push_back(((s + 1) * (a + 2) + h) % 7 / 7.0);
        o.next.push_back((s + a + h) % S);
      }
    g.outcomes.push_back(std::move(o));
    mdp.laws[h - 1].groups.push_back(std::move(g));
    mdp.laws[h - 1].index_cells(S, A);
  }
  return mdp;
}

}  // namespace testutil
