#include "lookahead/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lookahead {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

ValueTable mpc_backward_values(const TabularMdp& mdp) {
  return markov_optimal(mdp).values;
}

MarkovPolicy markov_optimal(const TabularMdp& mdp) {
  const int S = mdp.num_states, A = mdp.num_actions, H = mdp.horizon;
  MarkovPolicy pol;
  pol.action = Eigen::ArrayXXi::Zero(H, S);
  pol.values = ValueTable::zeros(H, S);
  for (Step h = H; h >= 1; --h) {
    // row h of the table is step h+1; for h = H it is the zero terminal row
    const Eigen::VectorXd cont = pol.values.v.row(h).matrix().transpose();
    for (State s = 0; s < S; ++s) {
      double best = kNegInf;
      Action best_a = 0;
      for (Action a = 0; a < A; ++a) {
        const MarginalLaw m = marginal_law(mdp, h, s, a);
        const double q = m.expected_reward + m.next_prob.dot(cont);
        if (q > best) { best = q; best_a = a; }
      }
      pol.values.v(h - 1, s) = best;
      pol.action(h - 1, s) = best_a;
    }
  }
  return pol;
}

EpisodeTrace run_mpc_episode(const TabularMdp& mdp, const ValueTable& values,
                             const EpisodeRealization& real, State s1) {
  EpisodeTrace trace;
  State cur = s1;
  for (Step h = 1; h <= mdp.horizon; ++h) {
    const int w = effective_lookahead(mdp, h);
    const LookaheadInfo info = extract_lookahead(mdp, real, h, cur, w);
    const BatchPlan plan = extract_batch_plan(info, values.row(h + w));
    const StepResult sr = step(mdp, real, h, cur, plan.actions[0]);
    BatchStart rec;
    rec.h = h;
    rec.state = cur;
    rec.range = w;
    rec.planned_value = plan.value;
    rec.batch_reward = sr.reward;
    trace.total_reward += sr.reward;
    trace.batches.push_back(rec);
    cur = sr.next;
  }
  return trace;
}

namespace {

// Canonical fingerprint of the joint reward law of state s at step h,
// restricted to semi-terminal states: a sorted list of (action-indexed reward
// vector, weight), outcomes with identical reward vectors coalesced.
struct LawFingerprint {
  std::vector<std::pair<std::vector<double>, double>> atoms;

  bool equals(const LawFingerprint& other, double tol) const {
    if (atoms.size() != other.atoms.size()) return false;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      if (atoms[i].first != other.atoms[i].first) return false;
      if (std::abs(atoms[i].second - other.atoms[i].second) > tol) return false;
    }
    return true;
  }
};

bool fingerprint_state(const TabularMdp& mdp, Step h, State s, LawFingerprint* out) {
  const StepLaw& law = mdp.laws[h - 1];
  const int A = mdp.num_actions;
  // groups owning at least one of this state's cells, in ascending order
  std::vector<int> owners;
  for (Action a = 0; a < A; ++a) {
    const int g = law.cell_group(s, a);
    if (std::find(owners.begin(), owners.end(), g) == owners.end()) owners.push_back(g);
  }
  std::sort(owners.begin(), owners.end());
  // enumerate the joint outcomes of the owning groups (tiny by construction:
  // semi-terminal layers are either per-cell or single-group)
  std::vector<std::pair<std::vector<double>, double>> atoms{{std::vector<double>(A, 0.0), 1.0}};
  for (int g : owners) {
    const FactorGroup& group = law.groups[g];
    std::vector<std::pair<std::vector<double>, double>> next_atoms;
    for (const auto& atom : atoms) {
      for (const Outcome& o : group.outcomes) {
        auto rewards = atom.first;
        for (int c = 0; c < static_cast<int>(group.cells.size()); ++c) {
          const Cell& cell = group.cells[c];
          if (cell.state != s) continue;
          rewards[cell.action] = o.rewards[c];
          if (o.next[c] != mdp.terminal) return false;  // not semi-terminal
        }
        next_atoms.emplace_back(std::move(rewards), atom.second * o.weight);
      }
    }
    atoms = std::move(next_atoms);
    if (atoms.size() > 4096) return false;  // defensively skip huge joint laws
  }
  std::sort(atoms.begin(), atoms.end());
  // coalesce outcomes with identical reward vectors
  out->atoms.clear();
  for (auto& atom : atoms) {
    if (!out->atoms.empty() && out->atoms.back().first == atom.first)
      out->atoms.back().second += atom.second;
    else
      out->atoms.push_back(std::move(atom));
  }
  return true;
}

}  // namespace

ValueSchemeReport check_value_scheme(const TabularMdp& mdp, const ValueTable& values,
                                     double tol) {
  ValueSchemeReport report;
  if (mdp.terminal < 0) return report;  // vacuous without a designated terminal
  report.has_terminal = true;

  // the terminal itself must absorb with zero reward at every step
  for (Step h = 1; h <= mdp.horizon && report.terminal_ok; ++h) {
    const StepLaw& law = mdp.laws[h - 1];
    for (Action a = 0; a < mdp.num_actions && report.terminal_ok; ++a) {
      const int g = law.cell_group(mdp.terminal, a);
      const int c = law.cell_slot(mdp.terminal, a);
      for (const Outcome& o : law.groups[g].outcomes)
        if (o.next[c] != mdp.terminal || o.rewards[c] != 0.0) {
          report.terminal_ok = false;
          break;
        }
    }
  }

  int next_class = 0;
  for (Step h = 1; h <= mdp.horizon; ++h) {
    // collect this step's semi-terminal states and their law fingerprints
    std::vector<State> states;
    std::vector<LawFingerprint> prints;
    for (State s = 0; s < mdp.num_states; ++s) {
      if (s == mdp.terminal) continue;
      LawFingerprint fp;
      if (fingerprint_state(mdp, h, s, &fp)) {
        states.push_back(s);
        prints.push_back(std::move(fp));
      }
    }
    std::vector<int> cls(states.size(), -1);
    std::vector<int> class_rep;  // index of the first state of each class
    for (std::size_t i = 0; i < states.size(); ++i) {
      for (std::size_t j = 0; j < class_rep.size(); ++j)
        if (prints[i].equals(prints[class_rep[j]], tol)) { cls[i] = static_cast<int>(j); break; }
      if (cls[i] < 0) {
        cls[i] = static_cast<int>(class_rep.size());
        class_rep.push_back(static_cast<int>(i));
      }
    }
    for (std::size_t i = 0; i < states.size(); ++i) {
      ValueSchemeEntry e;
      e.h = h;
      e.state = states[i];
      e.law_class = next_class + cls[i];
      e.value = values.v(h - 1, states[i]);
      for (std::size_t j = 0; j < states.size(); ++j) {
        if (j == i || cls[j] != cls[i]) continue;
        const double other = values.v(h - 1, states[j]);
        if (std::abs(other - e.value) > tol) {
          e.pass = false;
          e.witness = states[j];
          e.witness_value = other;
          report.ok = false;
          break;
        }
      }
      report.entries.push_back(e);
    }
    next_class += static_cast<int>(class_rep.size());
  }
  return report;
}

AgentValue evaluate_agent(const TabularMdp& mdp,
                          const std::function<double(const EpisodeRealization&)>& runner,
                          std::int64_t episodes, std::uint64_t seed,
                          std::int64_t exact_cap) {
  AgentValue out;
  if (exact_cap > 0) {
    std::int64_t support = 1;
    for (Step h = 1; h <= mdp.horizon && support <= exact_cap; ++h)
      for (const FactorGroup& g : mdp.laws[h - 1].groups) {
        support *= static_cast<std::int64_t>(g.outcomes.size());
        if (support > exact_cap) break;
      }
    if (support <= exact_cap) {
      // enumerate the full episode realization space
      EpisodeRealization real;
      real.outcome.resize(mdp.horizon);
      for (Step h = 1; h <= mdp.horizon; ++h)
        real.outcome[h - 1].assign(mdp.laws[h - 1].groups.size(), 0);
      double mean = 0.0;
      std::int64_t count = 0;
      std::function<void(Step, int, double)> rec = [&](Step h, int g, double p) {
        if (h > mdp.horizon) {
          mean += p * runner(real);
          ++count;
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
      out.mean = mean;
      out.n = count;
      out.exact = true;
      return out;
    }
  }
  double m1 = 0.0, m2 = 0.0;
  for (std::int64_t e = 0; e < episodes; ++e) {
    const EpisodeRealization real = sample_episode(mdp, seed, static_cast<std::uint64_t>(e));
    const double v = runner(real);
    m1 += v;
    m2 += v * v;
  }
  const double n = static_cast<double>(std::max<std::int64_t>(episodes, 1));
  out.mean = m1 / n;
  const double var = std::max(0.0, (m2 - n * out.mean * out.mean) / std::max(1.0, n - 1.0));
  out.stderr_ = std::sqrt(var / n);
  out.n = episodes;
  return out;
}

}  // namespace lookahead
