#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lookahead/envs.hpp"
#include "lookahead/mdp.hpp"
#include "test_util.hpp"

using namespace lookahead;

TEST_CASE("effective lookahead clamps near the horizon and rejects bad steps") {
  const TabularMdp mdp = build_random_mdp(3, 2, 4, 3, 7, 2);
  CHECK(effective_lookahead(mdp, 1) == 3);
  CHECK(effective_lookahead(mdp, 2) == 3);
  CHECK(effective_lookahead(mdp, 3) == 2);
  CHECK(effective_lookahead(mdp, 4) == 1);
  CHECK_THROWS_AS(effective_lookahead(mdp, 0), std::invalid_argument);
  CHECK_THROWS_AS(effective_lookahead(mdp, 5), std::invalid_argument);
}

TEST_CASE("validation reports each violation class with its location") {
  TabularMdp good = build_random_joint_mdp(3, 2, 3, 2, 11, 3);
  REQUIRE(validate_mdp(good).ok);

  SUBCASE("negative weight") {
    good.laws[1].groups[0].outcomes[0].weight = -0.2;
    const ValidationReport r = validate_mdp(good);
    CHECK_FALSE(r.ok);
    CHECK(r.field == "weights");
    CHECK(r.step == 2);
    CHECK(r.group == 0);
  }
  SUBCASE("weights that do not sum to one") {
    good.laws[0].groups[0].outcomes[0].weight += 0.25;
    const ValidationReport r = validate_mdp(good);
    CHECK_FALSE(r.ok);
    CHECK(r.field == "weights");
  }
  SUBCASE("duplicated cell") {
    good.laws[0].groups.push_back(good.laws[0].groups[0]);
    good.laws[0].index_cells(3, 2);
    const ValidationReport r = validate_mdp(good);
    CHECK_FALSE(r.ok);
    CHECK(r.field == "cells");
  }
  SUBCASE("uncovered cell") {
    good.laws[2].groups[0].cells.pop_back();
    for (Outcome& o : good.laws[2].groups[0].outcomes) {
      o.rewards.pop_back();
      o.next.pop_back();
    }
    good.laws[2].index_cells(3, 2);
    const ValidationReport r = validate_mdp(good);
    CHECK_FALSE(r.ok);
    CHECK(r.field == "coverage");
    CHECK(r.step == 3);
  }
  SUBCASE("reward out of range") {
    good.laws[0].groups[0].outcomes[0].rewards[0] = 1.5;
    const ValidationReport r = validate_mdp(good);
    CHECK_FALSE(r.ok);
    CHECK(r.field == "reward_table");
  }
  SUBCASE("next state out of range") {
    good.laws[0].groups[0].outcomes[0].next[0] = 3;
    const ValidationReport r = validate_mdp(good);
    CHECK_FALSE(r.ok);
    CHECK(r.field == "next_table");
  }
  SUBCASE("ragged outcome tables") {
    good.laws[0].groups[0].outcomes[0].rewards.pop_back();
    const ValidationReport r = validate_mdp(good);
    CHECK_FALSE(r.ok);
    CHECK(r.field == "cells");
  }
  SUBCASE("bad lookahead field") {
    good.lookahead = 5;
    const ValidationReport r = validate_mdp(good);
    CHECK_FALSE(r.ok);
    CHECK(r.field == "sizes");
  }
}

TEST_CASE("episode sampling is deterministic in (seed, episode)") {
  const TabularMdp mdp = build_random_mdp(4, 2, 5, 2, 3, 3);
  const EpisodeRealization a = sample_episode(mdp, 42, 7);
  const EpisodeRealization b = sample_episode(mdp, 42, 7);
  CHECK(a.outcome == b.outcome);

  bool differs = false;
  for (std::uint64_t e = 0; e < 16 && !differs; ++e)
    differs = sample_episode(mdp, 42, 100 + e).outcome != a.outcome;
  CHECK(differs);

  for (Step h = 1; h <= mdp.horizon; ++h) {
    REQUIRE(a.outcome[h - 1].size() == mdp.laws[h - 1].groups.size());
    for (std::size_t g = 0; g < a.outcome[h - 1].size(); ++g) {
      CHECK(a.outcome[h - 1][g] >= 0);
      CHECK(a.outcome[h - 1][g] <
            static_cast<int>(mdp.laws[h - 1].groups[g].outcomes.size()));
    }
  }
}

TEST_CASE("sampled outcome frequencies follow the group weights") {
  const TabularMdp mdp = build_random_joint_mdp(3, 2, 2, 1, 5, 3);
  const FactorGroup& group = mdp.laws[0].groups[0];
  std::vector<double> freq(group.outcomes.size(), 0.0);
  const int n = 20000;
  for (int e = 0; e < n; ++e) freq[sample_episode(mdp, 9, e).outcome[0][0]] += 1.0 / n;
  for (std::size_t o = 0; o < freq.size(); ++o) {
    const double p = group.outcomes[o].weight;
    const double sigma = std::sqrt(p * (1 - p) / n);
    CHECK(std::abs(freq[o] - p) < 5 * sigma + 1e-12);
  }
}

TEST_CASE("realized step tables agree with point lookups") {
  const TabularMdp mdp = build_random_mdp(4, 2, 4, 2, 13, 2);
  const EpisodeRealization real = sample_episode(mdp, 1, 2);
  for (Step h = 1; h <= mdp.horizon; ++h) {
    const StepScenario sc = realize_step(mdp, real, h);
    REQUIRE(sc.rewards.rows() == 4);
    REQUIRE(sc.rewards.cols() == 2);
    for (State s = 0; s < 4; ++s)
      for (Action a = 0; a < 2; ++a) {
        const StepResult r = step(mdp, real, h, s, a);
        CHECK(r.reward == sc.rewards(s, a));
        CHECK(r.next == sc.next(s, a));
      }
  }
}

TEST_CASE("marginal law matches empirical step frequencies") {
  const TabularMdp mdp = build_random_mdp(4, 2, 3, 2, 21, 3);
  const Step h = 2;
  const State s = 1;
  const Action a = 0;
  const MarginalLaw m = marginal_law(mdp, h, s, a);
  CHECK(m.next_prob.sum() == doctest::Approx(1.0).epsilon(1e-12));

  const int n = 20000;
  double mean_reward = 0.0;
  Eigen::VectorXd freq = Eigen::VectorXd::Zero(mdp.num_states);
  for (int e = 0; e < n; ++e) {
    const StepResult r = step(mdp, sample_episode(mdp, 31, e), h, s, a);
    mean_reward += r.reward / n;
    freq[r.next] += 1.0 / n;
  }
  CHECK(std::abs(mean_reward - m.expected_reward) < 0.02);
  for (State t = 0; t < mdp.num_states; ++t)
    CHECK(std::abs(freq[t] - m.next_prob[t]) < 0.02);
}

TEST_CASE("per-step outcome counts multiply across groups and saturate") {
  const TabularMdp joint = build_random_joint_mdp(3, 2, 2, 1, 1, 4);
  CHECK(step_outcome_count(joint, 1, 1000) == 4);

  const TabularMdp cells = build_random_mdp(3, 2, 2, 1, 1, 2);
  // six cells, four outcomes each (2 support states x Bernoulli reward)
  CHECK(step_outcome_count(cells, 1, 1 << 20) == 4096);
  CHECK(step_outcome_count(cells, 1, 100) == 101);  // saturates just past the cap
}

TEST_CASE("expected return via realization enumeration matches a direct sum") {
  // one state, one action, reward Bernoulli(p): E[return] = H * p
  TabularMdp mdp;
  mdp.num_states = 1;
  mdp.num_actions = 1;
  mdp.horizon = 3;
  mdp.lookahead = 1;
  mdp.laws.resize(3);
  const double p = 0.3;
  for (Step h = 1; h <= 3; ++h) {
    FactorGroup g;
    g.cells = {{0, 0}};
    Outcome zero, one;
    zero.weight = 1 - p;
    zero.rewards = {0.0};
    zero.next = {0};
    one.weight = p;
    one.rewards = {1.0};
    one.next = {0};
    g.outcomes = {zero, one};
    mdp.laws[h - 1].groups.push_back(g);
    mdp.laws[h - 1].index_cells(1, 1);
  }
  REQUIRE(validate_mdp(mdp).ok);
  const double v = testutil::brute_expected_return(mdp, [&](const EpisodeRealization& real) {
    double total = 0.0;
    for (Step h = 1; h <= 3; ++h) total += step(mdp, real, h, 0, 0).reward;
    return total;
  });
  CHECK(v == doctest::Approx(3 * p).epsilon(1e-12));
}
