#include "lookahead/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

namespace lookahead {

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void check_keys(const json& j, std::initializer_list<const char*> allowed,
                const std::string& where) {
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* key : allowed)
      if (item.key() == key) { ok = true; break; }
    if (!ok) throw std::runtime_error(where + ": unknown key '" + item.key() + "'");
  }
}

template <class T>
T field_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw std::runtime_error(std::string("config: field '") + key + "' has the wrong type");
  }
}

}  // namespace

TabularMdp build_env(const json& spec) {
  if (!spec.is_object()) throw std::runtime_error("env spec: expected a JSON object");
  const std::string kind = field_or<std::string>(spec, "kind", "");
  if (kind == "claim1") {
    check_keys(spec, {"kind", "A", "ell", "H", "leaf_p", "depth"}, "env claim1");
    const int A = field_or(spec, "A", 2), ell = field_or(spec, "ell", 2);
    return build_bernoulli_leaf_tree(A, ell, field_or(spec, "H", ell + 1),
                                     field_or(spec, "leaf_p", -1.0),
                                     field_or(spec, "depth", -1));
  }
  if (kind == "claim2") {
    check_keys(spec, {"kind", "A", "ell", "H", "case"}, "env claim2");
    const int A = field_or(spec, "A", 2), ell = field_or(spec, "ell", 2);
    const std::string c = field_or<std::string>(spec, "case", "auto");
    TreeLineCase scheme_case;
    if (c == "auto") scheme_case = TreeLineCase::resolve;
    else if (c == "sure_line") scheme_case = TreeLineCase::sure_line;
    else if (c == "gamble_line") scheme_case = TreeLineCase::gamble_line;
    else if (c == "equal") scheme_case = TreeLineCase::equal_margin;
    else throw std::runtime_error("env claim2: unknown case '" + c + "'");
    return build_tree_and_line(A, ell, field_or(spec, "H", ell + 1), scheme_case);
  }
  if (kind == "random") {
    check_keys(spec, {"kind", "S", "A", "H", "ell", "seed", "density"}, "env random");
    return build_random_mdp(field_or(spec, "S", 5), field_or(spec, "A", 2),
                            field_or(spec, "H", 6), field_or(spec, "ell", 2),
                            field_or<std::uint64_t>(spec, "seed", 0),
                            field_or(spec, "density", 2));
  }
  if (kind == "random_joint") {
    check_keys(spec, {"kind", "S", "A", "H", "ell", "seed", "outcomes_per_step"},
               "env random_joint");
    return build_random_joint_mdp(field_or(spec, "S", 3), field_or(spec, "A", 2),
                                  field_or(spec, "H", 3), field_or(spec, "ell", 2),
                                  field_or<std::uint64_t>(spec, "seed", 0),
                                  field_or(spec, "outcomes_per_step", 3));
  }
  if (kind == "delayed") {
    check_keys(spec, {"kind", "delay", "base"}, "env delayed");
    if (!spec.contains("base")) throw std::runtime_error("env delayed: missing 'base' spec");
    return build_delayed_env(build_env(spec.at("base")), field_or(spec, "delay", 2));
  }
  if (kind == "file") {
    check_keys(spec, {"kind", "path"}, "env file");
    const std::string path = field_or<std::string>(spec, "path", "");
    if (path.empty()) throw std::runtime_error("env file: missing 'path'");
    return load_mdp(path);
  }
  throw std::runtime_error("env spec: unknown kind '" + kind + "'");
}

ExperimentResult run_experiment(const TabularMdp& mdp, const LearnerConfig& base,
                                const std::vector<std::uint64_t>& seeds, int workers) {
  if (seeds.empty()) throw std::invalid_argument("run_experiment: need at least one seed");
  const auto t0 = std::chrono::steady_clock::now();
  const BatchingPolicy optimal = plan_optimal_batching(mdp, base.expectation);

  std::vector<std::vector<RegretRecord>> per_seed(seeds.size());
  std::atomic<std::size_t> cursor{0};
  workers = std::max(1, std::min<int>(workers, static_cast<int>(seeds.size())));
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= seeds.size()) return;
      LearnerConfig cfg = base;
      cfg.seed = seeds[i];
      per_seed[i] = run_learning(mdp, cfg, &optimal);
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  ExperimentResult result;
  result.seeds = seeds;
  result.episodes = base.episodes;
  for (std::size_t i = 0; i < seeds.size(); ++i)
    for (const RegretRecord& r : per_seed[i]) {
      RegretRow row;
      row.seed = seeds[i];
      row.episode = r.episode;
      row.initial_state = r.initial_state;
      row.realized_return = r.realized_return;
      row.v_opt = r.v_opt;
      row.regret_realized_cum = r.regret_realized_cum;
      row.evaluated = r.evaluated;
      row.v_policy = r.v_policy;
      row.regret_expected_cum = r.regret_expected_cum;
      result.rows.push_back(row);
    }
  result.wall_clock_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

void write_regret_csv(std::ostream& out, const std::vector<RegretRow>& rows) {
  out << "seed,episode,initial_state,realized_return,v_opt,regret_realized_cum,"
         "v_pi_exact,regret_expected_cum\n";
  for (const RegretRow& r : rows) {
    out << r.seed << ',' << r.episode << ',' << r.initial_state << ','
        << fmt_double(r.realized_return) << ',' << fmt_double(r.v_opt) << ','
        << fmt_double(r.regret_realized_cum) << ',';
    if (r.evaluated)
      out << fmt_double(r.v_policy) << ',' << fmt_double(r.regret_expected_cum);
    else
      out << ',';
    out << '\n';
  }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') { fields.push_back(cur); cur.clear(); }
    else cur.push_back(c);
  }
  fields.push_back(cur);
  return fields;
}

[[noreturn]] void bad_row(std::size_t n, const std::string& why) {
  throw std::runtime_error("regret csv: row " + std::to_string(n) + ": " + why);
}

}  // namespace

std::vector<RegretRow> read_regret_csv(std::istream& in) {
  std::vector<RegretRow> rows;
  std::string line;
  std::size_t n = 0;
  if (!std::getline(in, line)) throw std::runtime_error("regret csv: empty file");
  if (split_csv_line(line).size() != 8) bad_row(1, "unexpected header");
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 8) bad_row(n + 1, "expected 8 fields, got " + std::to_string(f.size()));
    RegretRow r;
    try {
      r.seed = std::stoull(f[0]);
      r.episode = std::stoll(f[1]);
      r.initial_state = std::stoi(f[2]);
      r.realized_return = std::stod(f[3]);
      r.v_opt = std::stod(f[4]);
      r.regret_realized_cum = std::stod(f[5]);
      r.evaluated = !f[6].empty();
      if (r.evaluated != !f[7].empty()) bad_row(n + 1, "half-filled evaluation fields");
      if (r.evaluated) {
        r.v_policy = std::stod(f[6]);
        r.regret_expected_cum = std::stod(f[7]);
      }
    } catch (const std::logic_error&) {
      bad_row(n + 1, "unparsable numeric field");
    }
    rows.push_back(r);
  }
  return rows;
}

namespace {

struct MeanStderr {
  double mean = 0.0, se = 0.0;
};

MeanStderr mean_stderr(const std::vector<double>& xs) {
  MeanStderr out;
  if (xs.empty()) return out;
  for (double x : xs) out.mean += x;
  out.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.se = std::sqrt(ss / static_cast<double>(xs.size() - 1) /
                       static_cast<double>(xs.size()));
  }
  return out;
}

}  // namespace

json experiment_summary(const ExperimentResult& result) {
  std::vector<double> realized, expected;
  for (std::uint64_t seed : result.seeds) {
    double last_realized = 0.0, last_expected = 0.0;
    bool any = false, any_eval = false;
    for (const RegretRow& r : result.rows) {
      if (r.seed != seed) continue;
      any = true;
      last_realized = r.regret_realized_cum;
      if (r.evaluated) { any_eval = true; last_expected = r.regret_expected_cum; }
    }
    if (any) realized.push_back(last_realized);
    if (any_eval) expected.push_back(last_expected);
  }
  json s;
  s["episodes"] = result.episodes;
  s["seeds"] = result.seeds;
  const MeanStderr r = mean_stderr(realized);
  s["final_regret_realized"] = {{"mean", r.mean}, {"stderr", r.se}};
  if (!expected.empty()) {
    const MeanStderr e = mean_stderr(expected);
    s["final_regret_expected"] = {{"mean", e.mean}, {"stderr", e.se}};
  }
  return s;
}

ClaimsReport reproduce_claims(int A, int ell, int H, std::int64_t exact_cap,
                              std::int64_t mc_episodes) {
  if (H < 0) H = ell + 1;
  ClaimsReport report;
  ExpectationConfig cfg;
  cfg.exact_cap = exact_cap;
  cfg.mc_samples = 100000;
  cfg.seed = 0;
  const double fixed_bound = std::pow(static_cast<double>(A), 1.0 - 0.5 * ell);

  // Bernoulli-leaf tree: adaptive batching clears 1/2, constant batching cannot
  const TabularMdp tree = build_bernoulli_leaf_tree(A, ell, H);
  const BatchingPolicy tree_opt = plan_optimal_batching(tree, cfg);
  const double v_tree = tree_opt.values.v(0, 0);
  report.rows.push_back({"tree_optimal_value", v_tree, 0.5, ">", v_tree > 0.5});
  for (int B = 1; B <= ell; ++B) {
    const BatchingPolicy fixed = plan_fixed_batching(tree, constant_schedule(tree, B), cfg);
    const double v = fixed.values.v(0, 0);
    report.rows.push_back({"tree_fixed_B" + std::to_string(B), v, fixed_bound, "<=",
                           v <= fixed_bound + 1e-9});
  }
  const ValueSchemeReport tree_scheme = check_value_scheme(tree, mpc_backward_values(tree));
  report.rows.push_back({"tree_value_scheme_ok", tree_scheme.ok ? 1.0 : 0.0, 1.0, "==",
                         tree_scheme.ok});

  // fork environment: MPC under any consistent value scheme is dominated
  const TabularMdp fork = build_tree_and_line(A, ell, H);
  const BatchingPolicy fork_opt = plan_optimal_batching(fork, cfg);
  const double v_fork = fork_opt.values.v(0, 0);
  report.rows.push_back({"fork_optimal_value", v_fork, 0.0, "info", true});

  const ValueTable mpc_vals = mpc_backward_values(fork);
  const AgentValue mpc = evaluate_agent(
      fork,
      [&](const EpisodeRealization& real) {
        return run_mpc_episode(fork, mpc_vals, real, 0).total_reward;
      },
      mc_episodes, 0, exact_cap);
  const double ratio = mpc.mean / v_fork;
  report.rows.push_back({"fork_mpc_ratio", ratio, fixed_bound, "<=",
                         ratio <= fixed_bound + 3.0 * mpc.stderr_ / v_fork + 1e-9});

  const AgentValue traverse = evaluate_agent(
      fork,
      [&](const EpisodeRealization& real) {
        return run_policy_episode(fork, fork_opt, real, 0).total_reward;
      },
      mc_episodes, 0, /*exact_cap=*/0);
  const double e_bound = 1.0 - std::exp(-1.0) - 0.02;
  report.rows.push_back({"fork_tree_traversal_mc", traverse.mean, e_bound, ">=",
                         traverse.mean >= e_bound});

  // an MPC agent with unit values on the leaves recovers the optimum
  ValueTable unit = ValueTable::zeros(H, fork.num_states);
  for (State leaf : tree_and_line_layout(A, ell).leaves) unit.v(ell, leaf) = 1.0;
  const AgentValue unit_mpc = evaluate_agent(
      fork,
      [&](const EpisodeRealization& real) {
        return run_mpc_episode(fork, unit, real, 0).total_reward;
      },
      mc_episodes, 0, /*exact_cap=*/0);
  report.rows.push_back({"fork_unit_leaf_mpc", unit_mpc.mean, v_fork, "~",
                         std::abs(unit_mpc.mean - v_fork) <=
                             3.0 * unit_mpc.stderr_ + 1e-9});

  const ValueSchemeReport scheme = check_value_scheme(fork, mpc_vals);
  report.rows.push_back({"fork_value_scheme_ok", scheme.ok ? 1.0 : 0.0, 1.0, "==",
                         scheme.ok && scheme.terminal_ok});
  return report;
}

void write_claims_csv(std::ostream& out, const ClaimsReport& report) {
  out << "quantity,value,bound,comparator,pass\n";
  for (const ClaimRow& r : report.rows)
    out << r.quantity << ',' << fmt_double(r.value) << ',' << fmt_double(r.bound) << ','
        << r.comparator << ',' << (r.pass ? "1" : "0") << '\n';
}

void print_claims(std::ostream& out, const ClaimsReport& report) {
  out << std::left << std::setw(26) << "quantity" << std::right << std::setw(14) << "value"
      << std::setw(14) << "bound" << std::setw(6) << "cmp" << std::setw(7) << "pass"
      << "\n";
  for (const ClaimRow& r : report.rows) {
    char value[32], bound[32];
    std::snprintf(value, sizeof(value), "%.6f", r.value);
    std::snprintf(bound, sizeof(bound), "%.6f", r.bound);
    out << std::left << std::setw(26) << r.quantity << std::right << std::setw(14) << value
        << std::setw(14) << bound << std::setw(6) << r.comparator << std::setw(7)
        << (r.pass ? "PASS" : "FAIL") << "\n";
  }
}

namespace {

struct CliOptions {
  std::string config_path;
  std::string out;
  std::string csv_in = "regret.csv";
  int seeds_n = -1;
  std::string seed_list;
  std::string env_kind;
  int A = -1, ell = -1, H = -1, S = -1;
  std::int64_t K = -1;
  double delta = -1.0;
  int eval_interval = -1;
  std::int64_t exact_cap = -1;
  int mc_samples = -1;
  int workers = -1;
  int schedule_B = -1;
  std::string agents;
  bool sqrt_ref = false;
};

void add_env_options(CLI::App* cmd, CliOptions& o) {
  cmd->add_option("--config", o.config_path, "JSON config file");
  cmd->add_option("--env", o.env_kind, "environment kind")
      ->check(CLI::IsMember({"claim1", "claim2", "random", "random_joint", "delayed", "file"}));
  cmd->add_option("--A", o.A, "actions per state");
  cmd->add_option("--ell", o.ell, "maximum lookahead range");
  cmd->add_option("--H", o.H, "horizon");
  cmd->add_option("--S", o.S, "state count (random envs)");
  cmd->add_option("--exact-cap", o.exact_cap, "exact enumeration cap");
  cmd->add_option("--mc-samples", o.mc_samples, "Monte Carlo sample count");
}

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error("config file '" + path + "': " + e.what());
  }
  check_keys(j,
             {"env", "agent", "learner", "expectation", "seeds", "workers", "out",
              "schedule_B", "eval_episodes"},
             "config");
  return j;
}

json resolve_env_spec(const CliOptions& o, const json& cfg) {
  json spec = cfg.contains("env") ? cfg.at("env") : json::object();
  if (!o.env_kind.empty()) spec["kind"] = o.env_kind;
  if (!spec.contains("kind")) throw std::runtime_error("no environment: pass --env or config 'env'");
  if (o.A >= 0) spec["A"] = o.A;
  if (o.ell >= 0) spec["ell"] = o.ell;
  if (o.H >= 0) spec["H"] = o.H;
  if (o.S >= 0) spec["S"] = o.S;
  return spec;
}

ExpectationConfig resolve_expectation(const CliOptions& o, const json& cfg) {
  ExpectationConfig e;
  if (cfg.contains("expectation")) {
    const json& j = cfg.at("expectation");
    check_keys(j, {"exact_cap", "mc_samples", "seed"}, "config.expectation");
    e.exact_cap = field_or<std::int64_t>(j, "exact_cap", e.exact_cap);
    e.mc_samples = field_or(j, "mc_samples", e.mc_samples);
    e.seed = field_or<std::uint64_t>(j, "seed", e.seed);
  }
  if (o.exact_cap >= 0) e.exact_cap = o.exact_cap;
  if (o.mc_samples >= 0) e.mc_samples = o.mc_samples;
  return e;
}

std::vector<std::uint64_t> resolve_seeds(const CliOptions& o, const json& cfg) {
  if (!o.seed_list.empty()) {
    std::vector<std::uint64_t> seeds;
    std::stringstream ss(o.seed_list);
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (!tok.empty()) seeds.push_back(std::stoull(tok));
    if (seeds.empty()) throw std::runtime_error("--seed-list: no seeds given");
    return seeds;
  }
  if (o.seeds_n > 0) {
    std::vector<std::uint64_t> seeds(o.seeds_n);
    for (int i = 0; i < o.seeds_n; ++i) seeds[i] = static_cast<std::uint64_t>(i + 1);
    return seeds;
  }
  if (cfg.contains("seeds")) return cfg.at("seeds").get<std::vector<std::uint64_t>>();
  return {1};
}

int resolve_workers(const CliOptions& o, const json& cfg) {
  int workers = field_or(cfg, "workers", 0);
  if (o.workers > 0) workers = o.workers;
  if (const char* env = std::getenv("LOOKAHEAD_LAB_WORKERS"))
    if (const int w = std::atoi(env); w > 0) workers = w;
  if (workers <= 0)
    workers = std::max(1u, std::thread::hardware_concurrency());
  return workers;
}

LearnerConfig resolve_learner(const CliOptions& o, const json& cfg) {
  LearnerConfig lc;
  lc.expectation = resolve_expectation(o, cfg);
  if (cfg.contains("learner")) {
    const json& j = cfg.at("learner");
    check_keys(j, {"K", "delta", "eval_interval", "initial_states"}, "config.learner");
    lc.episodes = field_or<std::int64_t>(j, "K", lc.episodes);
    lc.delta = field_or(j, "delta", lc.delta);
    lc.eval_interval = field_or(j, "eval_interval", lc.eval_interval);
    lc.initial_states = field_or(j, "initial_states", lc.initial_states);
  }
  if (o.K >= 0) lc.episodes = o.K;
  if (o.delta >= 0.0) lc.delta = o.delta;
  if (o.eval_interval >= 0) lc.eval_interval = o.eval_interval;
  return lc;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << text;
}

int cmd_plan(const CliOptions& o, std::ostream& out) {
  const json cfg = load_config(o.config_path);
  const TabularMdp mdp = build_env(resolve_env_spec(o, cfg));
  const BatchingPolicy pol = plan_optimal_batching(mdp, resolve_expectation(o, cfg));
  const std::string path = o.out.empty() ? "plan.json" : o.out;
  write_text_file(path, policy_to_json(pol).dump(2) + "\n");
  out << "wrote " << path << " (initial values:";
  for (State s = 0; s < mdp.num_states; ++s) out << ' ' << pol.values.v(0, s);
  out << ")\n";
  return 0;
}

int cmd_learn(const CliOptions& o, std::ostream& out) {
  const json cfg = load_config(o.config_path);
  const TabularMdp mdp = build_env(resolve_env_spec(o, cfg));
  const LearnerConfig lc = resolve_learner(o, cfg);
  const auto seeds = resolve_seeds(o, cfg);
  const int workers = resolve_workers(o, cfg);
  const ExperimentResult result = run_experiment(mdp, lc, seeds, workers);

  std::string path = o.out;
  if (path.empty()) path = field_or<std::string>(cfg, "out", "regret.csv");
  std::ostringstream csv;
  write_regret_csv(csv, result.rows);
  write_text_file(path, csv.str());
  const json summary = experiment_summary(result);
  write_text_file(path + ".summary.json", summary.dump(2) + "\n");

  const double eps = static_cast<double>(result.episodes) *
                     static_cast<double>(seeds.size()) /
                     std::max(result.wall_clock_s, 1e-9);
  out << "wrote " << path << " and " << path << ".summary.json\n";
  out << "final realized regret: mean "
      << summary.at("final_regret_realized").at("mean").get<double>() << " (stderr "
      << summary.at("final_regret_realized").at("stderr").get<double>() << ") over "
      << seeds.size() << " seeds\n";
  out << "wall clock " << result.wall_clock_s << " s, " << eps << " episodes/s\n";
  return 0;
}

int cmd_eval(const CliOptions& o, std::ostream& out) {
  const json cfg = load_config(o.config_path);
  const TabularMdp mdp = build_env(resolve_env_spec(o, cfg));
  const ExpectationConfig ecfg = resolve_expectation(o, cfg);
  const std::int64_t episodes = field_or<std::int64_t>(cfg, "eval_episodes", 10000);
  const std::string agents_arg =
      !o.agents.empty() ? o.agents
                        : field_or<std::string>(cfg, "agent",
                                                "optimal_batching,fixed_batching,mpc,markov");
  int schedule_B = field_or(cfg, "schedule_B", 1);
  if (o.schedule_B > 0) schedule_B = o.schedule_B;

  json rows = json::array();
  std::stringstream ss(agents_arg);
  std::string agent;
  while (std::getline(ss, agent, ',')) {
    if (agent.empty()) continue;
    std::function<double(const EpisodeRealization&)> runner;
    if (agent == "optimal_batching") {
      auto pol = std::make_shared<BatchingPolicy>(plan_optimal_batching(mdp, ecfg));
      runner = [&mdp, pol](const EpisodeRealization& real) {
        return run_policy_episode(mdp, *pol, real, 0).total_reward;
      };
    } else if (agent == "fixed_batching") {
      auto pol = std::make_shared<BatchingPolicy>(
          plan_fixed_batching(mdp, constant_schedule(mdp, schedule_B), ecfg));
      runner = [&mdp, pol](const EpisodeRealization& real) {
        return run_policy_episode(mdp, *pol, real, 0).total_reward;
      };
    } else if (agent == "mpc") {
      auto vals = std::make_shared<ValueTable>(mpc_backward_values(mdp));
      runner = [&mdp, vals](const EpisodeRealization& real) {
        return run_mpc_episode(mdp, *vals, real, 0).total_reward;
      };
    } else if (agent == "markov") {
      auto pol = std::make_shared<MarkovPolicy>(markov_optimal(mdp));
      runner = [&mdp, pol](const EpisodeRealization& real) {
        double total = 0.0;
        State s = 0;
        for (Step h = 1; h <= mdp.horizon; ++h) {
          const StepResult sr = step(mdp, real, h, s, pol->action(h - 1, s));
          total += sr.reward;
          s = sr.next;
        }
        return total;
      };
    } else {
      throw std::runtime_error("eval: unknown agent '" + agent + "'");
    }
    const AgentValue v = evaluate_agent(mdp, runner, episodes, 0, ecfg.exact_cap);
    rows.push_back({{"agent", agent},
                    {"env", field_or<std::string>(resolve_env_spec(o, cfg), "kind", "?")},
                    {"mean", v.mean},
                    {"stderr", v.stderr_},
                    {"n", v.n},
                    {"exact", v.exact}});
    out << agent << ": mean " << v.mean << " (stderr " << v.stderr_ << ", n " << v.n
        << (v.exact ? ", exact" : ", mc") << ")\n";
  }
  const std::string path = o.out.empty() ? "eval.json" : o.out;
  write_text_file(path, rows.dump(2) + "\n");
  out << "wrote " << path << "\n";
  return 0;
}

int cmd_claims(const CliOptions& o, std::ostream& out) {
  const int A = o.A >= 0 ? o.A : 2;
  const int ell = o.ell >= 0 ? o.ell : 4;
  const ClaimsReport report = reproduce_claims(
      A, ell, o.H, o.exact_cap >= 0 ? o.exact_cap : 200000,
      o.mc_samples >= 0 ? o.mc_samples : 100000);
  print_claims(out, report);
  const std::string path = o.out.empty() ? "claims.csv" : o.out;
  std::ostringstream csv;
  write_claims_csv(csv, report);
  write_text_file(path, csv.str());
  out << "wrote " << path << "\n";
  return 0;
}

int cmd_plot(const CliOptions& o, std::ostream& out) {
  std::ifstream in(o.csv_in);
  if (!in) throw std::runtime_error("cannot open csv file: " + o.csv_in);
  const std::vector<RegretRow> rows = read_regret_csv(in);
  const std::string path = o.out.empty() ? "regret.svg" : o.out;
  write_text_file(path, emit_plot(rows, o.sqrt_ref));
  out << "wrote " << path << " (" << rows.size() << " rows)\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"simulation, planning and learning for MDPs with multi-step lookahead"};
  app.require_subcommand(1);
  CliOptions o;

  CLI::App* plan = app.add_subcommand("plan", "compute the optimal batching plan");
  add_env_options(plan, o);
  plan->add_option("--out", o.out, "output plan JSON path");

  CLI::App* learn = app.add_subcommand("learn", "run the online learner");
  add_env_options(learn, o);
  learn->add_option("--out", o.out, "output regret CSV path");
  learn->add_option("--seeds", o.seeds_n, "number of seeds (uses 1..N)");
  learn->add_option("--seed-list", o.seed_list, "explicit comma-separated seeds");
  learn->add_option("--K", o.K, "episodes per seed");
  learn->add_option("--delta", o.delta, "confidence parameter");
  learn->add_option("--eval-interval", o.eval_interval,
                    "exact evaluation cadence (0 = realized only)");
  learn->add_option("--workers", o.workers, "worker threads (env LOOKAHEAD_LAB_WORKERS overrides)");

  CLI::App* eval = app.add_subcommand("eval", "evaluate reference agents");
  add_env_options(eval, o);
  eval->add_option("--out", o.out, "output JSON path");
  eval->add_option("--agents", o.agents, "comma list: optimal_batching,fixed_batching,mpc,markov");
  eval->add_option("--B", o.schedule_B, "constant range for fixed_batching");

  CLI::App* claims = app.add_subcommand("claims", "reproduce the adversarial-environment results");
  claims->add_option("--A", o.A, "actions per state");
  claims->add_option("--ell", o.ell, "maximum lookahead range");
  claims->add_option("--H", o.H, "horizon (default ell+1)");
  claims->add_option("--exact-cap", o.exact_cap, "exact enumeration cap");
  claims->add_option("--mc-samples", o.mc_samples, "Monte Carlo episode count");
  claims->add_option("--out", o.out, "output claims CSV path");

  CLI::App* plot = app.add_subcommand("plot", "render a regret CSV as SVG");
  plot->add_option("--csv,--in", o.csv_in, "input regret CSV");
  plot->add_option("--out", o.out, "output SVG path");
  plot->add_flag("--sqrt-ref", o.sqrt_ref, "overlay a square-root reference curve");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }
  try {
    if (plan->parsed()) return cmd_plan(o, out);
    if (learn->parsed()) return cmd_learn(o, out);
    if (eval->parsed()) return cmd_eval(o, out);
    if (claims->parsed()) return cmd_claims(o, out);
    if (plot->parsed()) return cmd_plot(o, out);
    err << "error: no subcommand\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace lookahead
