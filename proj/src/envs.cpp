#include "lookahead/envs.hpp"

#include <cmath>
#include <stdexcept>

namespace lookahead {

namespace {

std::int64_t ipow(int base, int exp) {
  std::int64_t v = 1;
  for (int i = 0; i < exp; ++i) v *= base;
  return v;
}

// nodes in levels 1..v-1 of a complete A-ary tree (level 1 = root)
int level_offset(int A, int v) {
  return static_cast<int>((ipow(A, v - 1) - 1) / (A - 1));
}

// one deterministic group over an explicit cell list
FactorGroup deterministic_group(const std::vector<Cell>& cells,
                                const std::vector<double>& rewards,
                                const std::vector<State>& next) {
  FactorGroup g;
  g.cells = cells;
  Outcome o;
  o.weight = 1.0;
  o.rewards = rewards;
  o.next = next;
  g.outcomes.push_back(std::move(o));
  return g;
}

FactorGroup bernoulli_cell_group(State s, Action a, double p, State target) {
  FactorGroup g;
  g.cells = {{s, a}};
  if (p <= 0.0 || p >= 1.0) {
    Outcome o;
    o.weight = 1.0;
    o.rewards = {p >= 1.0 ? 1.0 : 0.0};
    o.next = {target};
    g.outcomes.push_back(std::move(o));
  } else {
    Outcome zero, one;
    zero.weight = 1.0 - p;
    zero.rewards = {0.0};
    zero.next = {target};
    one.weight = p;
    one.rewards = {1.0};
    one.next = {target};
    g.outcomes.push_back(std::move(zero));
    g.outcomes.push_back(std::move(one));
  }
  return g;
}

// deterministic transition table builder: next_of(s, a) -> state,
// reward_of(s, a) -> double; cells with use(s, a) == false are skipped
template <class Use, class Next, class Reward>
FactorGroup table_group(int S, int A, Use use, Next next_of, Reward reward_of) {
  std::vector<Cell> cells;
  std::vector<double> rewards;
  std::vector<State> next;
  for (State s = 0; s < S; ++s)
    for (Action a = 0; a < A; ++a) {
      if (!use(s, a)) continue;
      cells.push_back({s, a});
      rewards.push_back(reward_of(s, a));
      next.push_back(next_of(s, a));
    }
  return deterministic_group(cells, rewards, next);
}

}  // namespace

TreeLayout bernoulli_leaf_tree_layout(int A, int depth) {
  TreeLayout lay;
  lay.initial = 0;
  lay.root = 1;
  const int first_leaf = 1 + level_offset(A, depth);
  const int num_leaves = static_cast<int>(ipow(A, depth - 1));
  for (int i = 0; i < num_leaves; ++i) lay.leaves.push_back(first_leaf + i);
  lay.terminal = 1 + level_offset(A, depth + 1);
  return lay;
}

TabularMdp build_bernoulli_leaf_tree(int A, int ell, int H, double leaf_p, int depth) {
  if (depth < 0) depth = ell;
  if (A < 2 || depth < 1 || ell < 1 || ell > H || H < depth + 1)
    throw std::invalid_argument("build_bernoulli_leaf_tree: need A>=2, 1<=depth, H>=depth+1");
  if (leaf_p < 0.0) leaf_p = std::pow(static_cast<double>(A), -static_cast<double>(depth));

  const TreeLayout lay = bernoulli_leaf_tree_layout(A, depth);
  const int S = lay.terminal + 1;
  TabularMdp mdp;
  mdp.num_states = S;
  mdp.num_actions = A;
  mdp.horizon = H;
  mdp.lookahead = ell;
  mdp.terminal = lay.terminal;
  mdp.laws.resize(H);

  for (Step h = 1; h <= H; ++h) {
    StepLaw& law = mdp.laws[h - 1];
    if (h == 1) {
      // everything funnels to the terminal except s0 -> root
      law.groups.push_back(table_group(
          S, A, [](State, Action) { return true; },
          [&](State s, Action) { return s == lay.initial ? lay.root : lay.terminal; },
          [](State, Action) { return 0.0; }));
    } else if (h <= depth) {
      // tree level h-1 advances to level h
      const int lo = 1 + level_offset(A, h - 1), hi = 1 + level_offset(A, h);
      law.groups.push_back(table_group(
          S, A, [](State, Action) { return true; },
          [&](State s, Action a) {
            return (s >= lo && s < hi) ? hi + (s - lo) * A + a : lay.terminal;
          },
          [](State, Action) { return 0.0; }));
    } else if (h == depth + 1) {
      // reward layer: independent Bernoulli cell per (leaf, action)
      const int lo = lay.leaves.front(), hi = lay.leaves.back() + 1;
      for (State s = lo; s < hi; ++s)
        for (Action a = 0; a < A; ++a)
          law.groups.push_back(bernoulli_cell_group(s, a, leaf_p, lay.terminal));
      law.groups.push_back(table_group(
          S, A, [&](State s, Action) { return s < lo || s >= hi; },
          [&](State, Action) { return lay.terminal; },
          [](State, Action) { return 0.0; }));
    } else {
      law.groups.push_back(table_group(
          S, A, [](State, Action) { return true; },
          [&](State, Action) { return lay.terminal; },
          [](State, Action) { return 0.0; }));
    }
    law.index_cells(S, A);
  }
  return mdp;
}

TreeLineLayout tree_and_line_layout(int A, int ell) {
  TreeLineLayout lay;
  lay.initial = 0;
  lay.root = 1;
  const int first_leaf = 1 + level_offset(A, ell);
  const int num_leaves = static_cast<int>(ipow(A, ell - 1));
  for (int i = 0; i < num_leaves; ++i) lay.leaves.push_back(first_leaf + i);
  lay.line_start = 1 + level_offset(A, ell + 1);
  lay.line_end = lay.line_start + ell - 1;
  lay.terminal = lay.line_start + ell;
  return lay;
}

TabularMdp build_tree_and_line(int A, int ell, int H, TreeLineCase scheme_case) {
  if (A < 2 || ell < 2 || H < ell + 1)
    throw std::invalid_argument("build_tree_and_line: need A>=2, ell>=2, H>=ell+1");

  const double sure_reward = std::pow(static_cast<double>(A), -0.5 * ell);
  const double gamble_p = std::pow(static_cast<double>(A), -static_cast<double>(ell));
  if (scheme_case == TreeLineCase::resolve) {
    // one-step backward values of the two semi-terminal types
    const double v_sure = sure_reward, v_gamble = gamble_p;
    scheme_case = v_sure > v_gamble  ? TreeLineCase::sure_line
                  : v_gamble > v_sure ? TreeLineCase::gamble_line
                                      : TreeLineCase::equal_margin;
  }
  const bool gamble_at_leaves = scheme_case != TreeLineCase::gamble_line;
  const double line_entry_reward =
      scheme_case == TreeLineCase::equal_margin ? 0.25 * sure_reward : 0.0;

  const TreeLineLayout lay = tree_and_line_layout(A, ell);
  const int S = lay.terminal + 1;
  TabularMdp mdp;
  mdp.num_states = S;
  mdp.num_actions = A;
  mdp.horizon = H;
  mdp.lookahead = ell;
  mdp.terminal = lay.terminal;
  mdp.laws.resize(H);

  for (Step h = 1; h <= H; ++h) {
    StepLaw& law = mdp.laws[h - 1];
    if (h == 1) {
      law.groups.push_back(table_group(
          S, A, [](State, Action) { return true; },
          [&](State s, Action a) {
            if (s != lay.initial) return lay.terminal;
            return a == 0 ? lay.root : lay.line_start;
          },
          [&](State s, Action a) {
            return (s == lay.initial && a != 0) ? line_entry_reward : 0.0;
          }));
    } else if (h <= ell) {
      const int lo = 1 + level_offset(A, h - 1), hi = 1 + level_offset(A, h);
      const State line_prev = lay.line_start + (h - 2);
      law.groups.push_back(table_group(
          S, A, [](State, Action) { return true; },
          [&](State s, Action a) {
            if (s >= lo && s < hi) return hi + (s - lo) * A + a;
            if (s == line_prev) return static_cast<State>(line_prev + 1);
            return lay.terminal;
          },
          [](State, Action) { return 0.0; }));
    } else if (h == ell + 1) {
      // semi-terminal reward layer
      const int leaf_lo = lay.leaves.front(), leaf_hi = lay.leaves.back() + 1;
      auto is_gamble = [&](State s) {
        return gamble_at_leaves ? (s >= leaf_lo && s < leaf_hi) : s == lay.line_end;
      };
      for (State s = 0; s < S; ++s)
        if (is_gamble(s))
          for (Action a = 0; a < A; ++a)
            law.groups.push_back(bernoulli_cell_group(s, a, gamble_p, lay.terminal));
      auto is_sure = [&](State s) {
        return gamble_at_leaves ? s == lay.line_end : (s >= leaf_lo && s < leaf_hi);
      };
      law.groups.push_back(table_group(
          S, A, [&](State s, Action) { return !is_gamble(s); },
          [&](State, Action) { return lay.terminal; },
          [&](State s, Action) { return is_sure(s) ? sure_reward : 0.0; }));
    } else {
      law.groups.push_back(table_group(
          S, A, [](State, Action) { return true; },
          [&](State, Action) { return lay.terminal; },
          [](State, Action) { return 0.0; }));
    }
    law.index_cells(S, A);
  }
  return mdp;
}

TabularMdp build_random_mdp(int S, int A, int H, int ell, std::uint64_t seed,
                            int density) {
  if (S < 1 || A < 1 || H < 1 || ell < 1 || ell > H || density < 1 || density > S)
    throw std::invalid_argument("build_random_mdp: invalid sizes");
  TabularMdp mdp;
  mdp.num_states = S;
  mdp.num_actions = A;
  mdp.horizon = H;
  mdp.lookahead = ell;
  mdp.laws.resize(H);
  for (Step h = 1; h <= H; ++h) {
    StepLaw& law = mdp.laws[h - 1];
    for (State s = 0; s < S; ++s)
      for (Action a = 0; a < A; ++a) {
        CounterRng rng{seed, 0x7261u, static_cast<std::uint64_t>(h),
                       static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(a)};
        // transition support: first `density` entries of a seeded shuffle
        std::vector<State> pool(S);
        for (State i = 0; i < S; ++i) pool[i] = i;
        for (int i = 0; i < density; ++i) {
          const int j = i + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(S - i));
          std::swap(pool[i], pool[j]);
        }
        std::vector<double> q(density);
        double total = 0.0;
        for (int i = 0; i < density; ++i) { q[i] = 0.1 + rng.next_double(); total += q[i]; }
        for (int i = 0; i < density; ++i) q[i] /= total;
        const double p = 0.05 + 0.9 * rng.next_double();  // Bernoulli reward mean

        FactorGroup g;
        g.cells = {{s, a}};
        for (int i = 0; i < density; ++i) {
          Outcome zero, one;
          zero.weight = q[i] * (1.0 - p);
          zero.rewards = {0.0};
          zero.next = {pool[i]};
          one.weight = q[i] * p;
          one.rewards = {1.0};
          one.next = {pool[i]};
          g.outcomes.push_back(std::move(zero));
          g.outcomes.push_back(std::move(one));
        }
        law.groups.push_back(std::move(g));
      }
    law.index_cells(S, A);
  }
  return mdp;
}

TabularMdp build_random_joint_mdp(int S, int A, int H, int ell, std::uint64_t seed,
                                  int outcomes_per_step) {
  if (S < 1 || A < 1 || H < 1 || ell < 1 || ell > H || outcomes_per_step < 1)
    throw std::invalid_argument("build_random_joint_mdp: invalid sizes");
  TabularMdp mdp;
  mdp.num_states = S;
  mdp.num_actions = A;
  mdp.horizon = H;
  mdp.lookahead = ell;
  mdp.laws.resize(H);
  for (Step h = 1; h <= H; ++h) {
    CounterRng rng{seed, 0x6a74u, static_cast<std::uint64_t>(h)};
    FactorGroup g;
    for (State s = 0; s < S; ++s)
      for (Action a = 0; a < A; ++a) g.cells.push_back({s, a});
    std::vector<double> w(outcomes_per_step);
    double total = 0.0;
    for (int i = 0; i < outcomes_per_step; ++i) { w[i] = 0.1 + rng.next_double(); total += w[i]; }
    for (int i = 0; i < outcomes_per_step; ++i) {
      Outcome o;
      o.weight = w[i] / total;
      for (std::size_t c = 0; c < g.cells.size(); ++c) {
        o.rewards.push_back(rng.next_double());
        o.next.push_back(std::min(static_cast<State>(rng.next_double() * S), S - 1));
      }
      g.outcomes.push_back(std::move(o));
    }
    mdp.laws[h - 1].groups.push_back(std::move(g));
    mdp.laws[h - 1].index_cells(S, A);
  }
  return mdp;
}

TabularMdp build_delayed_env(const TabularMdp& base, int delay) {
  if (delay < 1) throw std::invalid_argument("build_delayed_env: delay must be >= 1");
  const int S = base.num_states * delay, A = base.num_actions;
  TabularMdp mdp;
  mdp.num_states = S;
  mdp.num_actions = A;
  mdp.horizon = base.horizon * delay;
  mdp.lookahead = delay;
  mdp.terminal = -1;  // phase cycling breaks the strict self-loop convention
  mdp.laws.resize(mdp.horizon);

  for (Step t = 1; t <= mdp.horizon; ++t) {
    StepLaw& law = mdp.laws[t - 1];
    const int phase = (t - 1) % delay;           // phase of reachable states
    const bool progress = phase == delay - 1;    // base step applied here
    const Step base_h = (t - 1) / delay + 1;
    if (progress) {
      // on-phase cells follow the base law with states lifted to phase 0
      for (const FactorGroup& bg : base.laws[base_h - 1].groups) {
        FactorGroup g;
        for (const Cell& cell : bg.cells)
          g.cells.push_back({cell.state * delay + phase, cell.action});
        for (const Outcome& bo : bg.outcomes) {
          Outcome o;
          o.weight = bo.weight;
          o.rewards = bo.rewards;
          for (State ns : bo.next) o.next.push_back(ns * delay);
          g.outcomes.push_back(std::move(o));
        }
        law.groups.push_back(std::move(g));
      }
    }
    // freeze: every cell not at the active phase (all cells when not a
    // progress step) advances its phase with zero reward
    law.groups.push_back(table_group(
        S, A,
        [&](State s, Action) { return !progress || s % delay != phase; },
        [&](State s, Action) {
          const State bs = s / delay;
          return bs * delay + (s % delay + 1) % delay;
        },
        [](State, Action) { return 0.0; }));
    law.index_cells(S, A);
  }
  return mdp;
}

}  // namespace lookahead
