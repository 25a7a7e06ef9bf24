#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lookahead/baselines.hpp"
#include "lookahead/envs.hpp"
#include "lookahead/learner.hpp"
#include "lookahead/serialize.hpp"

namespace lookahead {

// Experiment orchestration: environment specs, multi-seed learning runs,
// claims reproduction, CSV/SVG emission and the command-line front end.

// Environment spec (JSON object).  Common field: "kind"; per kind:
//   claim1:       A, ell, H, leaf_p?, depth?
//   claim2:       A, ell, H, case? (auto|sure_line|gamble_line|equal)
//   random:       S, A, H, ell, seed?, density?
//   random_joint: S, A, H, ell, seed?, outcomes_per_step?
//   delayed:      delay, base (nested env spec)
//   file:         path
// Unknown fields are rejected.
TabularMdp build_env(const json& spec);

// One CSV row of a learning run.
struct RegretRow {
  std::uint64_t seed = 0;
  std::int64_t episode = 0;
  State initial_state = 0;
  double realized_return = 0.0;
  double v_opt = 0.0;
  double regret_realized_cum = 0.0;
  bool evaluated = false;
  double v_policy = 0.0;
  double regret_expected_cum = 0.0;
};

struct ExperimentResult {
  std::vector<RegretRow> rows;  // grouped by seed, in seed order
  std::vector<std::uint64_t> seeds;
  std::int64_t episodes = 0;
  double wall_clock_s = 0.0;  // reported to the console, never serialized
};

// Fans seeds out over a bounded worker pool; the optimal plan is computed
// once and shared.  Output is merged in seed order, so the result is
// byte-identical no matter how many workers run.
ExperimentResult run_experiment(const TabularMdp& mdp, const LearnerConfig& base,
                                const std::vector<std::uint64_t>& seeds, int workers);

// CSV with header:
// seed,episode,initial_state,realized_return,v_opt,regret_realized_cum,
// v_pi_exact,regret_expected_cum  (last two empty when not evaluated)
void write_regret_csv(std::ostream& out, const std::vector<RegretRow>& rows);
std::vector<RegretRow> read_regret_csv(std::istream& in);

// Summary of the final cumulative regrets across seeds (deterministic).
json experiment_summary(const ExperimentResult& result);

// Claims table: each row checks one computed quantity against its bound.
struct ClaimRow {
  std::string quantity;
  double value = 0.0;
  double bound = 0.0;
  std::string comparator;  // ">", "<=", ">=", "~", "=="
  bool pass = false;
};
struct ClaimsReport {
  std::vector<ClaimRow> rows;
  bool all_pass() const {
    for (const ClaimRow& r : rows)
      if (!r.pass) return false;
    return true;
  }
};

// Reproduces the adversarial-environment results for the given sizes:
// optimal vs. constant-range batching on the Bernoulli-leaf tree, the MPC
// ratio / optimal-MPC existence / value-scheme consistency on the fork
// environment.  H < 0 selects ell + 1.
ClaimsReport reproduce_claims(int A, int ell, int H = -1,
                              std::int64_t exact_cap = 200000,
                              std::int64_t mc_episodes = 100000);
void write_claims_csv(std::ostream& out, const ClaimsReport& report);
void print_claims(std::ostream& out, const ClaimsReport& report);

// Self-contained SVG of per-seed cumulative regret curves, their mean, and
// (optionally) exactly one square-root reference path anchored at the final
// mean regret.
std::string emit_plot(const std::vector<RegretRow>& rows, bool sqrt_ref);

// Command-line front end (subcommands plan | learn | eval | claims | plot).
// Returns the process exit code: 0 success, 1 usage error, 2 runtime error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace lookahead
