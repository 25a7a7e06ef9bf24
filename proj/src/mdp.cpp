#include "lookahead/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lookahead {

void StepLaw::index_cells(int num_states, int num_actions) {
  cell_group = Eigen::ArrayXXi::Constant(num_states, num_actions, -1);
  cell_slot = Eigen::ArrayXXi::Constant(num_states, num_actions, -1);
  for (int g = 0; g < static_cast<int>(groups.size()); ++g) {
    const auto& cells = groups[g].cells;
    for (int c = 0; c < static_cast<int>(cells.size()); ++c) {
      const Cell& cell = cells[c];
      if (cell.state < 0 || cell.state >= num_states) continue;
      if (cell.action < 0 || cell.action >= num_actions) continue;
      cell_group(cell.state, cell.action) = g;
      cell_slot(cell.state, cell.action) = c;
    }
  }
}

int effective_lookahead(const TabularMdp& mdp, Step h) {
  if (h < 1 || h > mdp.horizon)
    throw std::invalid_argument("effective_lookahead: step out of range");
  return std::min(mdp.lookahead, mdp.horizon - h + 1);
}

namespace {

ValidationReport fail(const std::string& field, const std::string& message, Step step,
                      int group) {
  ValidationReport r;
  r.ok = false;
  r.field = field;
  r.message = message;
  r.step = step;
  r.group = group;
  return r;
}

}  // namespace

ValidationReport validate_mdp(const TabularMdp& mdp) {
  if (mdp.num_states < 1 || mdp.num_actions < 1 || mdp.horizon < 1)
    return fail("sizes", "num_states, num_actions and horizon must be >= 1", 0, -1);
  if (mdp.lookahead < 1 || mdp.lookahead > mdp.horizon)
    return fail("sizes", "lookahead must lie in [1, horizon]", 0, -1);
  if (static_cast<int>(mdp.laws.size()) != mdp.horizon)
    return fail("sizes", "need exactly one StepLaw per step", 0, -1);
  if (mdp.terminal < -1 || mdp.terminal >= mdp.num_states)
    return fail("sizes", "terminal state out of range", 0, -1);

  const int S = mdp.num_states, A = mdp.num_actions;
  for (Step h = 1; h <= mdp.horizon; ++h) {
    const StepLaw& law = mdp.laws[h - 1];
    Eigen::ArrayXXi seen = Eigen::ArrayXXi::Zero(S, A);
    for (int g = 0; g < static_cast<int>(law.groups.size()); ++g) {
      const FactorGroup& group = law.groups[g];
      if (group.cells.empty())
        return fail("cells", "empty cell list", h, g);
      if (group.outcomes.empty())
        return fail("weights", "group has no outcomes", h, g);
      for (const Cell& cell : group.cells) {
        if (cell.state < 0 || cell.state >= S || cell.action < 0 || cell.action >= A)
          return fail("cells", "cell index out of range", h, g);
        if (seen(cell.state, cell.action)++)
          return fail("cells", "cell owned by more than one group", h, g);
      }
      double total = 0.0;
      for (const Outcome& o : group.outcomes) {
        if (!(o.weight > 0.0))
          return fail("weights", "outcome weights must be positive", h, g);
        total += o.weight;
        if (o.rewards.size() != group.cells.size() || o.next.size() != group.cells.size())
          return fail("cells", "outcome tables misaligned with cell list", h, g);
        for (double r : o.rewards)
          if (!(r >= 0.0 && r <= 1.0))
            return fail("reward_table", "rewards must lie in [0, 1]", h, g);
        for (State ns : o.next)
          if (ns < 0 || ns >= S)
            return fail("next_table", "next state out of range", h, g);
      }
      if (std::abs(total - 1.0) > 1e-12)
        return fail("weights", "outcome weights must sum to 1", h, g);
    }
    if ((seen == 0).any())
      return fail("coverage", "some (state, action) cell is covered by no group", h, -1);
    // the lookup tables must agree with the group lists
    if (law.cell_group.rows() != S || law.cell_group.cols() != A)
      return fail("cells", "cell index tables not built (call index_cells)", h, -1);
  }
  return ValidationReport{};
}

EpisodeRealization sample_episode(const TabularMdp& mdp, std::uint64_t seed,
                                  std::uint64_t episode) {
  EpisodeRealization real;
  real.outcome.resize(mdp.horizon);
  for (Step h = 1; h <= mdp.horizon; ++h) {
    const StepLaw& law = mdp.laws[h - 1];
    auto& row = real.outcome[h - 1];
    row.resize(law.groups.size());
    for (int g = 0; g < static_cast<int>(law.groups.size()); ++g) {
      CounterRng rng{seed, episode, static_cast<std::uint64_t>(h),
                     static_cast<std::uint64_t>(g)};
      const auto& outs = law.groups[g].outcomes;
      const double u = rng.next_double();
      double acc = 0.0;
      int pick = static_cast<int>(outs.size()) - 1;
      for (int i = 0; i < static_cast<int>(outs.size()); ++i) {
        acc += outs[i].weight;
        if (u < acc) { pick = i; break; }
      }
      row[g] = pick;
    }
  }
  return real;
}

StepScenario realize_step(const TabularMdp& mdp, const EpisodeRealization& real, Step h) {
  const int S = mdp.num_states, A = mdp.num_actions;
  StepScenario sc;
  sc.rewards = Eigen::ArrayXXd::Zero(S, A);
  sc.next = Eigen::ArrayXXi::Constant(S, A, kEmptyState);
  const StepLaw& law = mdp.laws[h - 1];
  const auto& row = real.outcome.at(h - 1);
  for (int g = 0; g < static_cast<int>(law.groups.size()); ++g) {
    const FactorGroup& group = law.groups[g];
    const Outcome& o = group.outcomes.at(row.at(g));
    for (int c = 0; c < static_cast<int>(group.cells.size()); ++c) {
      const Cell& cell = group.cells[c];
      sc.rewards(cell.state, cell.action) = o.rewards[c];
      sc.next(cell.state, cell.action) = o.next[c];
    }
  }
  return sc;
}

StepResult step(const TabularMdp& mdp, const EpisodeRealization& real, Step h,
                State s, Action a) {
  const StepLaw& law = mdp.laws.at(h - 1);
  const int g = law.cell_group(s, a);
  const int c = law.cell_slot(s, a);
  if (g < 0) throw std::invalid_argument("step: cell covered by no group");
  const Outcome& o = law.groups[g].outcomes.at(real.outcome.at(h - 1).at(g));
  return StepResult{o.rewards[c], o.next[c]};
}

MarginalLaw marginal_law(const TabularMdp& mdp, Step h, State s, Action a) {
  if (h < 1 || h > mdp.horizon) throw std::invalid_argument("marginal_law: step out of range");
  const StepLaw& law = mdp.laws[h - 1];
  const int g = law.cell_group(s, a);
  const int c = law.cell_slot(s, a);
  if (g < 0) throw std::invalid_argument("marginal_law: cell covered by no group");
  MarginalLaw m;
  m.next_prob = Eigen::VectorXd::Zero(mdp.num_states);
  for (const Outcome& o : law.groups[g].outcomes) {
    m.expected_reward += o.weight * o.rewards[c];
    m.next_prob[o.next[c]] += o.weight;
  }
  return m;
}

std::int64_t step_outcome_count(const TabularMdp& mdp, Step h, std::int64_t cap) {
  std::int64_t n = 1;
  for (const FactorGroup& g : mdp.laws.at(h - 1).groups) {
    n *= static_cast<std::int64_t>(g.outcomes.size());
    if (n > cap) return cap + 1;
  }
  return n;
}

}  // namespace lookahead
