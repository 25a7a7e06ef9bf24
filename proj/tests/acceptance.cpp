// Acceptance gate: exercises the full stack end to end and prints exactly one
// PASS/FAIL line per criterion.  Exit code 0 iff every criterion passes.
// Tolerances are pinned here on purpose; loosening them is not an option.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "lookahead/experiment.hpp"
#include "lookahead/planner.hpp"
#include "test_util.hpp"

using namespace lookahead;
namespace fs = std::filesystem;

namespace {

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

int g_failures = 0;

void report(int idx, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %d: %s%s%s\n", pass ? "PASS" : "FAIL", idx, name.c_str(),
              detail.empty() ? "" : " | ", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

ExpectationConfig exact_cfg(std::int64_t cap = 100000) {
  ExpectationConfig cfg;
  cfg.exact_cap = cap;
  return cfg;
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

// --- criterion 1: exact planner equals the brute-force oracle -------------

void criterion_1() {
  Timer timer;
  const double budget_s = 60.0;
  double max_dv = 0.0;
  int n_mdps = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const int S = 2 + static_cast<int>(seed % 3);       // 2..4
    const int H = 2 + static_cast<int>((seed / 3) % 3); // 2..4
    const int ell = 1 + static_cast<int>(seed % 2);
    const int outcomes = 2 + static_cast<int>((seed / 2) % 2);  // 2..3
    const TabularMdp mdp =
        build_random_joint_mdp(S, 2, H, std::min(ell, H), seed, outcomes);
    const BatchingPolicy pol = plan_optimal_batching(mdp, exact_cfg());
    const ValueTable oracle = solve_augmented_oracle(mdp);
    max_dv = std::max(max_dv, (pol.values.v - oracle.v).abs().maxCoeff());
    ++n_mdps;
  }
  const double elapsed = timer.seconds();
  const bool pass = n_mdps >= 20 && max_dv <= 1e-9 && elapsed <= budget_s;
  report(1, "planner matches the augmented brute-force oracle", pass,
         std::to_string(n_mdps) + " MDPs, max |dV| " + fmt("%.3g", max_dv) + ", " +
             fmt("%.1f", elapsed) + " s");
}

// --- criterion 2: window DP equals exhaustive action-sequence search ------

void criterion_2() {
  Timer timer;
  int windows = 0, mismatches = 0;
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const std::vector<TabularMdp> envs = {build_random_mdp(4, 2, 5, 3, seed, 2),
                                          build_random_joint_mdp(4, 3, 5, 4, seed, 3)};
    for (const TabularMdp& mdp : envs)
      for (std::uint64_t ep = 1; ep <= 2; ++ep) {
        const EpisodeRealization real = sample_episode(mdp, seed, ep);
        for (Step h : {1, 2, 4}) {
          const State s = static_cast<State>((seed + ep + h) % mdp.num_states);
          for (int B = 1; B <= effective_lookahead(mdp, h); ++B) {
            const LookaheadInfo info = extract_lookahead(mdp, real, h, s, B);
            const BatchSummary sum = compute_summary(info);
            const Eigen::ArrayXd zeros = Eigen::ArrayXd::Zero(mdp.num_states);
            Eigen::ArrayXd brute_best;
            const double brute = testutil::brute_window_value(info, zeros, &brute_best);
            bool ok = batch_value(sum, zeros) == brute;
            for (State t = 0; t < mdp.num_states; ++t)
              ok = ok && (sum.best[t] == brute_best[t] ||
                          (!std::isfinite(sum.best[t]) && !std::isfinite(brute_best[t])));
            // the extracted plan must attain the optimum exactly on replay
            const BatchPlan plan = extract_batch_plan(info, zeros);
            double acc = 0.0;
            State cur = s;
            for (int b = 0; b < B; ++b) {
              acc += info.rewards[b](cur, plan.actions[b]);
              cur = info.next[b](cur, plan.actions[b]);
              ok = ok && cur == plan.states[b + 1];
            }
            ok = ok && plan.value == brute && acc == brute;
            ++windows;
            if (!ok) ++mismatches;
          }
        }
      }
  }
  const bool pass = windows >= 100 && mismatches == 0;
  report(2, "window summaries equal exhaustive action-sequence search", pass,
         std::to_string(windows) + " windows, " + std::to_string(mismatches) +
             " mismatches, " + fmt("%.1f", timer.seconds()) + " s");
}

// --- criteria 3 and 4: adversarial-environment results --------------------

void criteria_3_4() {
  Timer timer;
  const ClaimsReport rep = reproduce_claims(2, 4, 5, 200000, 100000);
  const double elapsed = timer.seconds();

  bool tree_pass = true, fork_pass = true;
  std::string tree_detail, fork_detail;
  for (const ClaimRow& r : rep.rows) {
    const bool is_tree = r.quantity.rfind("tree_", 0) == 0;
    (is_tree ? tree_pass : fork_pass) &= r.pass;
    std::string& d = is_tree ? tree_detail : fork_detail;
    if (!d.empty()) d += ", ";
    d += r.quantity + " " + fmt("%.4f", r.value);
  }
  tree_pass = tree_pass && elapsed <= 300.0;
  fork_pass = fork_pass && elapsed <= 600.0;
  report(3, "optimal adaptive batching beats every constant range on the tree",
         tree_pass, tree_detail + ", " + fmt("%.1f", elapsed) + " s");
  report(4, "MPC collects at most half the optimum on the fork", fork_pass,
         fork_detail);
}

// --- criterion 5: sublinear regret on the random benchmark ----------------

void criterion_5() {
  Timer timer;
  const double budget_s = 1800.0;
  const int S = 5, A = 2, H = 6, ell = 2;
  const double delta = 0.05;
  const std::int64_t K = 20000;
  const TabularMdp mdp = build_random_mdp(S, A, H, ell, 0, 2);

  LearnerConfig lc;
  lc.episodes = static_cast<int>(K);
  lc.delta = delta;
  lc.eval_interval = 0;
  lc.expectation = exact_cfg();
  std::vector<std::uint64_t> seeds(10);
  for (int i = 0; i < 10; ++i) seeds[i] = static_cast<std::uint64_t>(i + 1);
  const int workers =
      std::min<int>(10, std::max(1u, std::thread::hardware_concurrency()));
  const ExperimentResult result = run_experiment(mdp, lc, seeds, workers);

  // per-episode mean cumulative realized regret across seeds
  std::vector<double> mean_cum(static_cast<std::size_t>(K), 0.0);
  for (const RegretRow& r : result.rows)
    mean_cum[static_cast<std::size_t>(r.episode - 1)] +=
        r.regret_realized_cum / static_cast<double>(seeds.size());

  const double reg_quarter = mean_cum[static_cast<std::size_t>(K / 4 - 1)];
  const double reg_full = mean_cum[static_cast<std::size_t>(K - 1)];
  const double ratio = reg_full / reg_quarter;
  const double norm_quarter = reg_quarter / std::sqrt(static_cast<double>(K / 4));
  const double norm_full = reg_full / std::sqrt(static_cast<double>(K));
  const double norm_ratio = norm_full / norm_quarter;

  // informational fit of reg(k) ~ c * sqrt(H^3 S k ell ln(S H ell k / delta))
  double sxy = 0.0, sxx = 0.0;
  for (std::int64_t k = 1; k <= K; ++k) {
    const double x = std::sqrt(static_cast<double>(H) * H * H * S * k * ell *
                               std::log(static_cast<double>(S) * H * ell * k / delta));
    sxy += x * mean_cum[static_cast<std::size_t>(k - 1)];
    sxx += x * x;
  }
  const double fitted_c = sxy / sxx;

  const double elapsed = timer.seconds();
  const bool pass =
      ratio <= 3.0 && norm_ratio <= 1.25 && elapsed <= budget_s && reg_quarter > 0.0;
  report(5, "cumulative regret grows sublinearly on the random benchmark", pass,
         "reg(K/4) " + fmt("%.1f", reg_quarter) + ", reg(K) " + fmt("%.1f", reg_full) +
             ", ratio " + fmt("%.3f", ratio) + " (<= 3), sqrt-normalized ratio " +
             fmt("%.3f", norm_ratio) + " (<= 1.25), fitted c " +
             fmt("%.4f", fitted_c) + " (informational), " + fmt("%.1f", elapsed) + " s");
}

// --- criterion 6: optimism at visited states ------------------------------

void criterion_6() {
  Timer timer;
  const TabularMdp mdp = build_random_joint_mdp(3, 2, 3, 2, 15, 2);
  const BatchingPolicy vstar = plan_optimal_batching(mdp, exact_cfg());

  int clean_runs = 0;
  std::int64_t total_violations = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    LearnerConfig lc;
    lc.episodes = 2000;
    lc.delta = 0.05;
    lc.eval_interval = 0;
    lc.seed = seed;
    lc.expectation = exact_cfg();
    std::int64_t violations = 0;
    run_learning(mdp, lc, &vstar,
                 [&](std::int64_t, const EpisodeTrace& trace, const OptimisticTables& t) {
                   for (const BatchStart& b : trace.batches)
                     if (t.vbar(b.h - 1, b.state) <
                         vstar.values.v(b.h - 1, b.state) - 1e-9)
                       ++violations;
                 });
    if (violations == 0) ++clean_runs;
    total_violations += violations;
  }
  const bool pass = clean_runs >= 8;
  report(6, "learner value estimates stay optimistic at visited states", pass,
         std::to_string(clean_runs) + "/10 runs with no violation (" +
             std::to_string(total_violations) + " total), " +
             fmt("%.1f", timer.seconds()) + " s");
}

// --- criterion 7: law-of-total-variance consistency -----------------------

void criterion_7() {
  Timer timer;
  const TabularMdp mdp = build_random_joint_mdp(3, 2, 4, 2, 21, 3);
  const int H = mdp.horizon;
  const BatchingPolicy pol = plan_optimal_batching(mdp, exact_cfg());

  // exact per-(h, s) window variance under the policy's chosen range
  Eigen::ArrayXXd var_tab = Eigen::ArrayXXd::Zero(H, mdp.num_states);
  for (Step h = 1; h <= H; ++h)
    for (State s = 0; s < mdp.num_states; ++s) {
      const int B = pol.batch(h - 1, s);
      const QStat st =
          expected_batch_value(mdp, h, s, B, pol.values.row(h + B), exact_cfg());
      var_tab(h - 1, s) = st.variance;
    }

  const std::int64_t n = 100000;
  std::vector<double> g(n), v(n);
  for (std::int64_t i = 0; i < n; ++i) {
    const EpisodeRealization real = sample_episode(mdp, 7, static_cast<std::uint64_t>(i));
    const EpisodeTrace trace = run_policy_episode(mdp, pol, real, 0);
    g[i] = trace.total_reward;
    double sum_var = 0.0;
    for (const BatchStart& b : trace.batches) sum_var += var_tab(b.h - 1, b.state);
    v[i] = sum_var;
  }

  const auto mean_of = [n](const std::vector<double>& xs) {
    double m = 0.0;
    for (double x : xs) m += x;
    return m / static_cast<double>(n);
  };
  const double mean_v = mean_of(v);
  double var_v = 0.0;
  for (double x : v) var_v += (x - mean_v) * (x - mean_v);
  var_v /= static_cast<double>(n - 1);
  const double se_v = std::sqrt(var_v / static_cast<double>(n));

  const double mean_g = mean_of(g);
  double var_g = 0.0, m4 = 0.0;
  for (double x : g) {
    const double d = x - mean_g;
    var_g += d * d;
    m4 += d * d * d * d;
  }
  var_g /= static_cast<double>(n - 1);
  m4 /= static_cast<double>(n);
  const double se_var_g = std::sqrt(std::max(m4 - var_g * var_g, 0.0) / n);

  const double diff = std::abs(mean_v - var_g);
  const double tol = 3.0 * std::sqrt(se_v * se_v + se_var_g * se_var_g);
  const bool pass =
      diff <= tol && mean_v <= static_cast<double>(H) * H && var_g <= static_cast<double>(H) * H;
  report(7, "summed batch variances match the return variance", pass,
         "sum E[var] " + fmt("%.5f", mean_v) + ", Var(return) " + fmt("%.5f", var_g) +
             ", |diff| " + fmt("%.2g", diff) + " <= " + fmt("%.2g", tol) + ", " +
             fmt("%.1f", timer.seconds()) + " s");
}

// --- criterion 8: zero-bonus tables on the exact law equal the planner ----

void criterion_8() {
  Timer timer;
  double max_dv = 0.0;
  const std::vector<TabularMdp> envs = {build_random_joint_mdp(3, 2, 3, 2, 15, 2),
                                        build_random_mdp(4, 2, 4, 2, 3, 2)};
  for (const TabularMdp& mdp : envs) {
    const BatchingPolicy pol = plan_optimal_batching(mdp, exact_cfg(200000));
    const SampleStore store = exact_law_store(mdp, 200000);
    const OptimisticTables tables =
        compute_optimistic_tables(mdp, store, 1, 0.05, /*bonus_scale=*/0.0);
    for (Step h = 1; h <= mdp.horizon; ++h)
      for (State s = 0; s < mdp.num_states; ++s)
        max_dv = std::max(max_dv,
                          std::abs(tables.vbar(h - 1, s) - pol.values.v(h - 1, s)));
  }
  const bool pass = max_dv <= 1e-9;
  report(8, "zero-bonus tables on the exact window law equal the planner", pass,
         "max |dV| " + fmt("%.3g", max_dv) + " over " + std::to_string(envs.size()) +
             " environments, " + fmt("%.1f", timer.seconds()) + " s");
}

// --- criterion 9: command-line round trip ---------------------------------

void criterion_9() {
  Timer timer;
  const fs::path dir = fs::temp_directory_path() / "lookahead_lab_acceptance";
  fs::create_directories(dir);
  const auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const auto run = [](const std::vector<std::string>& args, std::string* text) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    if (text) *text = out.str() + err.str();
    return code;
  };

  bool pass = true;
  std::string why;
  const auto check = [&](bool ok, const std::string& what) {
    if (!ok && why.empty()) why = "failed: " + what;
    pass = pass && ok;
  };

  std::string claims_text;
  const fs::path claims_csv = dir / "claims.csv";
  check(run({"claims", "--A", "2", "--ell", "4", "--out", claims_csv.string()},
            &claims_text) == 0,
        "claims exit code");
  check(claims_text.find("PASS") != std::string::npos &&
            claims_text.find("FAIL") == std::string::npos,
        "claims table all-pass");

  const std::vector<std::string> learn_args = {
      "learn", "--env", "random_joint", "--S", "3", "--A", "2", "--H", "3", "--ell",
      "2", "--K", "60", "--eval-interval", "20", "--seeds", "2", "--workers", "2"};
  const fs::path csv_a = dir / "a.csv", csv_b = dir / "b.csv";
  auto with_out = [&](const fs::path& p) {
    std::vector<std::string> args = learn_args;
    args.push_back("--out");
    args.push_back(p.string());
    return args;
  };
  check(run(with_out(csv_a), nullptr) == 0, "learn exit code");
  check(run(with_out(csv_b), nullptr) == 0, "learn rerun exit code");
  const std::string csv_text = slurp(csv_a);
  check(!csv_text.empty() && csv_text == slurp(csv_b), "byte-identical rerun");
  check(slurp(fs::path(csv_a.string() + ".summary.json")) ==
            slurp(fs::path(csv_b.string() + ".summary.json")),
        "byte-identical summary");
  try {
    std::istringstream in(csv_text);
    check(read_regret_csv(in).size() == 120, "csv row count");
  } catch (const std::exception&) {
    check(false, "csv parse");
  }

  const fs::path svg_path = dir / "regret.svg";
  check(run({"plot", "--csv", csv_a.string(), "--sqrt-ref", "--out", svg_path.string()},
            nullptr) == 0,
        "plot exit code");
  const std::string svg = slurp(svg_path);
  check(svg.rfind("<svg", 0) == 0 && svg.find("</svg>") != std::string::npos &&
            svg.find("id=\"mean\"") != std::string::npos &&
            svg.find("id=\"sqrt-ref\"") != std::string::npos,
        "svg structure");

  report(9, "command-line pipeline reproduces results deterministically", pass,
         (why.empty() ? std::string("claims/learn/plot round trip") : why) + ", " +
             fmt("%.1f", timer.seconds()) + " s");
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  const auto wanted = [&](int idx) {
    return only.empty() || std::find(only.begin(), only.end(), idx) != only.end();
  };

  if (wanted(1)) criterion_1();
  if (wanted(2)) criterion_2();
  if (wanted(3) || wanted(4)) criteria_3_4();
  if (wanted(5)) criterion_5();
  if (wanted(6)) criterion_6();
  if (wanted(7)) criterion_7();
  if (wanted(8)) criterion_8();
  if (wanted(9)) criterion_9();

  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
