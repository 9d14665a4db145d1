// Acceptance checks. `acceptance N` runs criterion N (1-10) and prints one
// PASS/FAIL line; without arguments every criterion runs in turn. The exit
// status is 0 only if every criterion that ran passed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "../oracles.hpp"
#include "navlearn/action_selection.hpp"
#include "navlearn/cli.hpp"
#include "navlearn/engine.hpp"
#include "navlearn/experiment.hpp"
#include "navlearn/mcmc.hpp"
#include "navlearn/metrics.hpp"
#include "navlearn/orca.hpp"

using namespace navlearn;
namespace fs = std::filesystem;

namespace {

constexpr std::size_t kSeeds = 30;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

BatchAggregate batch(const std::string &scenario, int agents, const std::string &policy,
                     EngineConfig cfg = {}, const ActionSet &actions = sample_action_set()) {
  const ScenarioSource source{scenario, agents, ""};
  const PolicyChoice choice = parse_policy(policy, actions);
  const std::vector<std::uint64_t> seeds = seed_range(0, kSeeds);
  const std::vector<RunRecord> records = run_batch(source, cfg, choice, seeds, 0);
  return aggregate(records);
}

// Sweep over x-sorted agents; only pairs closer than one diameter matter.
double min_pair_clearance(std::span<const AgentState> agents) {
  std::vector<const AgentState *> live;
  double max_r = 0.0;
  for (const AgentState &a : agents) {
    if (a.arrived) continue;
    live.push_back(&a);
    max_r = std::max(max_r, a.spec.radius);
  }
  std::sort(live.begin(), live.end(),
            [](const AgentState *a, const AgentState *b) { return a->position.x < b->position.x; });
  double worst = 1e9;
  for (std::size_t i = 0; i < live.size(); ++i) {
    for (std::size_t j = i + 1; j < live.size(); ++j) {
      if (live[j]->position.x - live[i]->position.x > 2.0 * max_r + 1.0) break;
      worst = std::min(worst, norm(live[i]->position - live[j]->position) - live[i]->spec.radius -
                                  live[j]->spec.radius);
    }
  }
  return worst;
}

Verdict softmax_rows() {
  struct Row {
    std::vector<double> values;
    std::vector<double> printed;
  };
  const std::vector<Row> rows = {
      {{0.997, 0, 0, 0.147, 0, 0.145, 0, 0}, {94.1, 0.64, 0.64, 1.34, 0.64, 1.33, 0.64, 0.64}},
      {{-0.05, -0.42, -0.54, 0, 0.001, -0.192, 0.456, 0}, {5.4, 0.83, 0.46, 7.1, 7.1, 2.7, 69.3, 7.1}},
  };
  double worst = 0.0;
  for (const Row &r : rows) {
    const std::vector<double> p = softmax_probs(r.values, 0.2);
    for (std::size_t a = 0; a < p.size(); ++a) worst = std::max(worst, std::abs(100 * p[a] - r.printed[a]));
  }
  return {worst <= 0.15, "largest deviation " + fmt(worst, 3) + " pp (limit 0.15)"};
}

Verdict lp_oracle() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int certified = 0, mismatched = 0;
  double worst_gap = 0.0, worst_slack = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int m = static_cast<int>(rng() % 13);
    std::vector<HalfPlane> hs;
    for (int k = 0; k < m; ++k) {
      const double a = std::numbers::pi * u(rng);
      hs.push_back({{1.5 * u(rng), 1.5 * u(rng)}, {std::cos(a), std::sin(a)}});
    }
    const Vec2 pref{2.0 * u(rng), 2.0 * u(rng)};
    const LpResult r = solve_lp(hs, pref, 1.5);
    const auto sampled = oracle::lp_sampled(hs, pref, 1.5, 600, 20000);
    if (!sampled) continue;
    ++certified;
    double slack = 0.0;
    for (const HalfPlane &h : hs) slack = std::min(slack, h.slack(r.velocity));
    slack = std::min(slack, 1.5 - norm(r.velocity));
    const double gap = norm(r.velocity - *sampled);
    worst_gap = std::max(worst_gap, gap);
    worst_slack = std::min(worst_slack, slack);
    if (gap > 1e-2 || slack < -1e-9 || !r.feasible) ++mismatched;
  }
  return {mismatched == 0 && certified > 0,
          std::to_string(certified) + " certified sets, " + std::to_string(mismatched) +
              " mismatches, largest gap " + fmt(worst_gap, 5) + " m/s, worst slack " +
              fmt(worst_slack, 12)};
}

Verdict collision_free() {
  double worst_pair = 1e9, worst_obstacle = 1e9;
  std::string where_pair, where_obstacle;
  const Policy policy = Policy::learning(sample_action_set());
  for (const std::string &name : builtin_scenario_names()) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const Scenario s = builtin_scenario(name, 0, seed);
      EngineConfig cfg;
      cfg.seed = seed;
      run(s, cfg, policy, nullptr, [&](const Simulation &sim) {
        const double p = min_pair_clearance(sim.agents());
        if (p < worst_pair) {
          worst_pair = p;
          where_pair = name + " seed " + std::to_string(seed);
        }
        for (const AgentState &a : sim.agents()) {
          if (a.arrived) continue;
          for (const Obstacle &o : s.obstacles) {
            const double c = dist_point_segment(a.position, o) - a.spec.radius;
            if (c < worst_obstacle) {
              worst_obstacle = c;
              where_obstacle = name + " seed " + std::to_string(seed);
            }
          }
        }
      });
    }
  }
  return {worst_pair >= -1e-3 && worst_obstacle >= -1e-3,
          "min agent clearance " + fmt(worst_pair, 5) + " m (" + where_pair +
              "), min obstacle clearance " + fmt(worst_obstacle, 5) + " m (" + where_obstacle + ")"};
}

Verdict deadlock_blocks() {
  bool pass = true;
  std::string detail;
  for (const char *name : {"deadlock", "blocks"}) {
    const BatchAggregate alan = batch(name, 0, "alan");
    const BatchAggregate orca = batch(name, 0, "orca");
    pass &= alan.completion_rate >= 0.9 && orca.completion_rate <= 0.1;
    detail += std::string(detail.empty() ? "" : "; ") + name + ": alan completes " +
              fmt(100 * alan.completion_rate, 0) + "%, orca " + fmt(100 * orca.completion_rate, 0) + "%";
  }
  return {pass, detail};
}

Verdict orderings() {
  struct Case {
    std::string name;
    int agents;
    bool vs_orca;
    bool vs_random;
  };
  const std::vector<Case> cases = {
      {"congested", 32, true, true},    {"deadlock", 0, false, true}, {"incoming", 16, true, true},
      {"blocks", 0, false, true},       {"intersection", 80, true, true},
      {"crowd", 200, true, true},
  };
  bool pass = true;
  std::string detail;
  for (const Case &c : cases) {
    const double alan = batch(c.name, c.agents, "alan").mean_capped_overhead;
    std::string line = c.name + ": alan " + fmt(alan);
    bool ok = true;
    if (c.vs_orca) {
      const double orca = batch(c.name, c.agents, "orca").mean_capped_overhead;
      ok &= alan < orca;
      line += ", orca " + fmt(orca);
    }
    if (c.vs_random) {
      const double rnd = batch(c.name, c.agents, "random:2").mean_capped_overhead;
      ok &= alan < rnd;
      line += ", random:2 " + fmt(rnd);
    }
    line += ok ? " (alan lowest)" : " (alan NOT lowest)";
    pass &= ok;
    std::cout << "  " << line << std::endl;
    detail += (detail.empty() ? "" : "; ") + line;
  }
  return {pass, detail};
}

Verdict mcmc_improvement() {
  McmcConfig cfg;
  cfg.schedule.n_iterations = 150;
  cfg.seed = 1;
  const std::vector<Scenario> scenarios = {builtin_scenario("incoming")};
  const OptimizeResult r = optimize(scenarios, cfg, EngineConfig{});
  bool monotone = true;
  for (std::size_t k = 1; k < r.chain.size(); ++k) monotone &= r.chain[k].best_f <= r.chain[k - 1].best_f;
  const double learned = batch("incoming", 0, "alan", {}, r.best).mean_capped_overhead;
  const double sample = batch("incoming", 0, "alan", {}, sample_action_set()).mean_capped_overhead;
  return {monotone && learned < sample,
          "optimized set (" + std::to_string(r.best.size()) + " actions) overhead " + fmt(learned) +
              " vs Sample " + fmt(sample) + ", best-so-far " +
              (monotone ? "non-increasing" : "INCREASED")};
}

Verdict sensitivity() {
  std::map<double, double> by_gamma, by_window;
  for (double g : {0.0, 0.4, 0.9}) {
    EngineConfig cfg;
    cfg.selection.gamma = g;
    by_gamma[g] = batch("deadlock", 0, "alan", cfg).mean_capped_overhead;
  }
  for (double w : {0.1, 2.0, 20.0}) {
    EngineConfig cfg;
    cfg.selection.window_length = w;
    by_window[w] = batch("congested", 32, "alan", cfg).mean_capped_overhead;
  }
  const bool gamma_ok = by_gamma[0.4] < by_gamma[0.0] && by_gamma[0.4] < by_gamma[0.9];
  const bool window_ok =
      by_window[2.0] <= 1.05 * by_window[0.1] && by_window[2.0] <= 1.05 * by_window[20.0];
  return {gamma_ok && window_ok,
          "deadlock gamma 0/0.4/0.9: " + fmt(by_gamma[0.0]) + "/" + fmt(by_gamma[0.4]) + "/" +
              fmt(by_gamma[0.9]) + "; congested window 0.1/2/20: " + fmt(by_window[0.1]) + "/" +
              fmt(by_window[2.0]) + "/" + fmt(by_window[20.0])};
}

Verdict performance() {
  std::map<int, double> total, per_agent_step;
  for (int n : {100, 200, 400}) {
    EngineConfig cfg;
    cfg.time_cap = 30.0;
    const Scenario s = builtin_scenario("crowd", n, 0);
    const auto t0 = std::chrono::steady_clock::now();
    const SimulationResult r = run(s, cfg, Policy::learning(sample_action_set()));
    total[n] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    per_agent_step[n] = r.compute_seconds / static_cast<double>(std::max<std::uint64_t>(1, r.agent_steps));
  }
  const bool fast = per_agent_step[400] <= 1e-3;
  const bool scaling = total[200] <= 4.0 * total[100] && total[400] <= 4.0 * total[200];
  return {fast && scaling,
          "400 agents: " + fmt(per_agent_step[400] * 1e6, 1) + " us per agent-step (limit 1000); 30 s of "
          "simulation takes " + fmt(total[100], 2) + "/" + fmt(total[200], 2) + "/" + fmt(total[400], 2) +
              " s at 100/200/400 agents"};
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Verdict determinism() {
  const std::vector<std::vector<std::string>> commands = {
      {"run", "--scenario", "congested", "--policy", "alan", "--seed", "3"},
      {"run", "--scenario", "crowd", "--agents", "60", "--policy", "random:2", "--seed", "4"},
      {"batch", "--scenario", "incoming", "--policy", "alan", "--policy", "orca", "--seeds", "3"},
      {"sweep", "--scenario", "incoming", "--param", "gamma", "--values", "0,0.4", "--seeds", "2"},
      {"optimize", "--scenario", "incoming", "--agents", "6", "--iterations", "4", "--evals-start",
       "1", "--evals-end", "2"},
  };
  const fs::path root = fs::temp_directory_path() / "navlearn_acceptance_determinism";
  int files = 0, differing = 0;
  std::string failures;
  for (std::size_t c = 0; c < commands.size(); ++c) {
    std::vector<fs::path> dirs;
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path dir = root / (std::to_string(c) + "_" + std::to_string(rep));
      fs::remove_all(dir);
      std::vector<std::string> args = commands[c];
      args.insert(args.begin(), "navlearn");
      args.insert(args.end(), {"--out-dir", dir.string()});
      std::vector<const char *> argv;
      for (const std::string &a : args) argv.push_back(a.c_str());
      std::ostringstream out, err;
      if (run_cli(static_cast<int>(argv.size()), argv.data(), out, err) != kExitOk) {
        return {false, commands[c][0] + " failed: " + err.str()};
      }
      dirs.push_back(dir);
    }
    for (const auto &entry : fs::directory_iterator(dirs[0])) {
      ++files;
      const fs::path other = dirs[1] / entry.path().filename();
      if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) {
        ++differing;
        failures += " " + commands[c][0] + "/" + entry.path().filename().string();
      }
    }
  }
  fs::remove_all(root);
  return {differing == 0 && files > 0,
          std::to_string(files) + " files compared, " + std::to_string(differing) + " differ" + failures};
}

Verdict failure_degradation() {
  std::vector<double> times;
  std::string detail = "congested mean travel time at p = 0/0.2/0.5/0.8:";
  for (double p : {0.0, 0.2, 0.5, 0.8}) {
    EngineConfig cfg;
    cfg.actuator_failure_prob = p;
    times.push_back(batch("congested", 32, "alan", cfg).mean_travel_time);
    detail += " " + fmt(times.back());
  }
  bool monotone = true;
  for (std::size_t k = 1; k < times.size(); ++k) monotone &= times[k] >= times[k - 1];
  return {monotone, detail + " s"};
}

const std::map<int, std::pair<std::string, std::function<Verdict()>>> &criteria() {
  static const std::map<int, std::pair<std::string, std::function<Verdict()>>> table = {
      {1, {"softmax probabilities", softmax_rows}},
      {2, {"LP oracle equivalence", lp_oracle}},
      {3, {"collision-freeness", collision_free}},
      {4, {"deadlock and blocks completion", deadlock_blocks}},
      {5, {"policy orderings", orderings}},
      {6, {"MCMC improvement", mcmc_improvement}},
      {7, {"gamma and window sensitivity", sensitivity}},
      {8, {"performance", performance}},
      {9, {"determinism", determinism}},
      {10, {"actuator-failure degradation", failure_degradation}},
  };
  return table;
}

}  // namespace

int main(int argc, char **argv) {
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
  if (which.empty()) {
    for (const auto &[k, v] : criteria()) which.push_back(k);
  }
  bool all = true;
  for (int k : which) {
    const auto it = criteria().find(k);
    if (it == criteria().end()) {
      std::cerr << "unknown criterion " << k << "\n";
      return 2;
    }
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = it->second.second();
    } catch (const std::exception &e) {
      v = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << "criterion " << k << " (" << it->second.first << "): " << (v.pass ? "PASS" : "FAIL")
              << " | " << v.detail << " | " << fmt(secs, 1) << " s" << std::endl;
    all &= v.pass;
  }
  return all ? 0 : 1;
}
