#include "navlearn/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "navlearn/experiment.hpp"
#include "navlearn/mcmc.hpp"

namespace navlearn {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// Flags shared by the simulation commands.
struct Options {
  std::vector<std::string> scenarios;
  std::string scenario_file;
  int agents = 0;
  std::vector<std::string> policies;
  std::string actions = "sample";
  std::uint64_t seed = 0;
  int seeds = 30;
  EngineConfig engine;
  std::string out_dir = ".";
  unsigned threads = 0;
  std::size_t trace_every = 1;
  // sweep
  std::string param;
  std::string values;
  // optimize
  McmcConfig mcmc;
  double range_start_deg = 60.0;
  double range_end_deg = 10.0;
};

void add_engine_flags(CLI::App *cmd, Options &o) {
  cmd->add_option("--gamma", o.engine.selection.gamma, "coordination factor in [0, 1)")
      ->capture_default_str();
  cmd->add_option("--tau", o.engine.selection.temperature, "Softmax temperature")
      ->capture_default_str();
  cmd->add_option("--window", o.engine.selection.window_length, "reward window length (s)")
      ->capture_default_str();
  cmd->add_option("--dt", o.engine.dt, "simulation step (s)")->capture_default_str();
  cmd->add_option("--time-cap", o.engine.time_cap, "time cap (s); 0 picks one per scenario")
      ->capture_default_str();
  cmd->add_option("--failure-prob", o.engine.actuator_failure_prob,
                  "probability that a chosen action is not executed")
      ->capture_default_str();
}

void add_scenario_flags(CLI::App *cmd, Options &o, bool many) {
  auto *s = cmd->add_option("--scenario", o.scenarios,
                            many ? "built-in scenario name (repeatable)" : "built-in scenario name");
  if (!many) s->expected(1);
  cmd->add_option("--scenario-file", o.scenario_file, "scenario JSON file");
  cmd->add_option("--agents", o.agents, "agent count for built-in scenarios (0 = default)")
      ->capture_default_str();
}

void add_output_flags(CLI::App *cmd, Options &o) {
  cmd->add_option("--out-dir", o.out_dir, "directory for result files")->capture_default_str();
}

std::vector<ScenarioSource> scenario_sources(const Options &o) {
  if (!o.scenario_file.empty() && !o.scenarios.empty()) {
    throw std::invalid_argument("give either --scenario or --scenario-file, not both");
  }
  if (o.agents < 0) {
    throw std::invalid_argument("--agents must be >= 0");
  }
  std::vector<ScenarioSource> out;
  if (!o.scenario_file.empty()) {
    out.push_back({"", 0, o.scenario_file});
    return out;
  }
  if (o.scenarios.empty()) {
    throw std::invalid_argument("missing --scenario or --scenario-file");
  }
  for (const std::string &name : o.scenarios) {
    ScenarioSource src{name, o.agents, ""};
    src.make(0);  // rejects unknown names and infeasible counts early
    out.push_back(src);
  }
  return out;
}

std::vector<PolicyChoice> policy_choices(const Options &o, const ActionSet &actions) {
  std::vector<std::string> names = o.policies;
  if (names.empty()) names.push_back("alan");
  std::vector<PolicyChoice> out;
  for (const std::string &n : names) out.push_back(parse_policy(n, actions));
  return out;
}

json engine_json(const EngineConfig &c) {
  return {{"dt", c.dt},
          {"sense_radius_agents", c.sense_radius_agents},
          {"sense_radius_obstacles", c.sense_radius_obstacles},
          {"max_neighbors", c.max_neighbors},
          {"agent_horizon", c.agent_horizon},
          {"obstacle_horizon", c.obstacle_horizon},
          {"decision_period_mean", c.decision_period_mean},
          {"decision_jitter", c.decision_jitter},
          {"pref_noise", c.pref_noise},
          {"failure_prob", c.actuator_failure_prob},
          {"time_cap", c.time_cap},
          {"strategy", to_string(c.selection.strategy)},
          {"tau", c.selection.temperature},
          {"epsilon", c.selection.epsilon},
          {"gamma", c.selection.gamma},
          {"window", c.selection.window_length},
          {"ucb_c", c.selection.ucb_c}};
}

json actions_json(const ActionSet &set) { return json::parse(format_action_set(set)); }

json config_json(const std::string &command, const Options &o, const ActionSet &actions) {
  json c;
  c["command"] = command;
  c["scenarios"] = o.scenarios;
  c["scenario_file"] = o.scenario_file;
  c["agents"] = o.agents;
  c["policies"] = o.policies.empty() ? std::vector<std::string>{"alan"} : o.policies;
  c["actions"] = o.actions;
  c["action_set"] = actions_json(actions);
  c["engine"] = engine_json(o.engine);
  return c;
}

json optional_number(const std::optional<double> &v) { return v ? json(*v) : json(nullptr); }

json report_json(const MetricsReport &r) {
  return {{"completed", r.completed},
          {"n_agents", r.n_agents},
          {"interaction_overhead", optional_number(r.interaction_overhead)},
          {"capped_overhead", r.capped_overhead},
          {"ttime", r.ttime},
          {"min_ttime", r.min_ttime},
          {"mean", r.mean},
          {"stdev", r.stdev}};
}

json aggregate_json(const BatchAggregate &a) {
  return {{"scenario", a.scenario},
          {"policy", a.policy},
          {"runs", a.runs},
          {"completion_rate", a.completion_rate},
          {"mean_overhead", optional_number(a.mean_overhead)},
          {"stdev_overhead", optional_number(a.stdev_overhead)},
          {"mean_capped_overhead", a.mean_capped_overhead},
          {"mean_ttime", a.mean_ttime},
          {"mean_travel_time", a.mean_travel_time}};
}

std::string optional_cell(const std::optional<double> &v) { return v ? format_number(*v) : ""; }

std::string aggregate_header() {
  return "scenario,policy,runs,completion_rate,mean_overhead,stdev_overhead,"
         "mean_capped_overhead,mean_ttime,mean_travel_time";
}

std::string aggregate_row(const BatchAggregate &a) {
  return a.scenario + "," + a.policy + "," + std::to_string(a.runs) + "," +
         format_number(a.completion_rate) + "," + optional_cell(a.mean_overhead) + "," +
         optional_cell(a.stdev_overhead) + "," + format_number(a.mean_capped_overhead) + "," +
         format_number(a.mean_ttime) + "," + format_number(a.mean_travel_time);
}

fs::path prepare_out_dir(const std::string &dir) {
  const fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) {
    throw std::runtime_error("cannot create output directory '" + dir + "': " + ec.message());
  }
  return p;
}

std::ofstream open_output(const fs::path &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write '" + path.string() + "'");
  }
  return out;
}

void write_json(const fs::path &path, const json &doc) { open_output(path) << doc.dump(2) << '\n'; }

std::vector<std::uint64_t> seed_list(const Options &o) {
  if (o.seeds < 1) {
    throw std::invalid_argument("--seeds must be >= 1");
  }
  return seed_range(o.seed, static_cast<std::size_t>(o.seeds));
}

std::vector<double> parse_values(const std::string &text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find(',', start), text.size());
    const std::string item = text.substr(start, end - start);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size()) {
      throw std::invalid_argument("bad value '" + item + "' in --values");
    }
    out.push_back(v);
    start = end + 1;
  }
  return out;
}

int cmd_scenarios(std::ostream &out) {
  for (const std::string &name : builtin_scenario_names()) {
    out << name << " " << default_agent_count(name) << "\n";
  }
  return kExitOk;
}

int cmd_run(const Options &o, std::ostream &out) {
  if (o.policies.size() > 1) {
    throw std::invalid_argument("run takes a single --policy");
  }
  o.engine.validate();
  const ActionSet actions = resolve_action_set(o.actions);
  const ScenarioSource source = scenario_sources(o).front();
  const PolicyChoice policy = policy_choices(o, actions).front();
  const EngineConfig cfg = [&] {
    EngineConfig c = policy.configure(o.engine);
    c.seed = o.seed;
    return c;
  }();
  const Scenario scenario = source.make(o.seed);
  const std::vector<double> min_times = min_travel_times(scenario, true);

  const fs::path dir = prepare_out_dir(o.out_dir);
  std::optional<std::ofstream> trace_file;
  std::optional<TraceWriter> trace;
  if (o.trace_every > 0) {
    trace_file.emplace(open_output(dir / "trace.csv"));
    trace.emplace(*trace_file, o.trace_every);
  }
  const SimulationResult result = run(scenario, cfg, policy.policy, trace ? &*trace : nullptr);
  const MetricsReport report = interaction_overhead(result, min_times);

  json doc;
  doc["config"] = config_json("run", o, actions);
  doc["config"]["scenario"] = source.label();
  doc["config"]["seed"] = o.seed;
  json res = report_json(report);
  res["end_time"] = result.end_time;
  res["time_cap"] = result.time_cap;
  res["steps"] = result.steps;
  res["infeasible_solves"] = result.infeasible_solves;
  json arrivals = json::array();
  for (std::size_t i = 0; i < result.arrival_times.size(); ++i) {
    arrivals.push_back({{"id", result.agent_ids[i]},
                        {"arrival_time", optional_number(result.arrival_times[i])},
                        {"min_time", min_times[i]}});
  }
  res["agents"] = arrivals;
  doc["result"] = res;
  write_json(dir / "summary.json", doc);

  if (report.interaction_overhead) {
    out << "overhead " << std::fixed << std::setprecision(2) << *report.interaction_overhead
        << " s\n" << std::defaultfloat;
  } else {
    std::size_t arrived = 0;
    for (const auto &t : result.arrival_times) arrived += t.has_value();
    out << "incomplete: " << arrived << " of " << result.arrival_times.size()
        << " agents arrived by the time cap (" << format_number(result.time_cap) << " s)\n";
  }
  const double per_agent_step =
      result.agent_steps > 0 ? result.compute_seconds / static_cast<double>(result.agent_steps) : 0.0;
  out << "compute " << std::setprecision(3) << per_agent_step * 1e6 << " us per agent-step\n";
  return kExitOk;
}

void print_aggregate(std::ostream &out, const BatchAggregate &a) {
  out << a.scenario << " " << a.policy << ": ";
  if (a.mean_overhead) {
    out << "overhead " << std::fixed << std::setprecision(2) << *a.mean_overhead << " +- "
        << *a.stdev_overhead;
  } else {
    out << "overhead N/A";
  }
  out << std::fixed << std::setprecision(2) << ", completed " << a.completion_rate * 100.0
      << "%, capped overhead " << a.mean_capped_overhead << "\n";
  out << std::defaultfloat;
}

int cmd_batch(const Options &o, std::ostream &out) {
  o.engine.validate();
  const std::vector<std::uint64_t> seeds = seed_list(o);
  const ActionSet actions = resolve_action_set(o.actions);
  const std::vector<ScenarioSource> sources = scenario_sources(o);
  const std::vector<PolicyChoice> policies = policy_choices(o, actions);
  const fs::path dir = prepare_out_dir(o.out_dir);

  std::ofstream runs = open_output(dir / "runs.csv");
  std::ofstream agg = open_output(dir / "aggregate.csv");
  runs << batch_csv_header() << "\n";
  agg << aggregate_header() << "\n";
  json doc;
  doc["config"] = config_json("batch", o, actions);
  doc["config"]["seeds"] = seeds;
  doc["aggregates"] = json::array();
  for (const ScenarioSource &src : sources) {
    for (const PolicyChoice &p : policies) {
      const std::vector<RunRecord> records = run_batch(src, o.engine, p, seeds, o.threads);
      for (const RunRecord &r : records) runs << batch_csv_row(r) << "\n";
      const BatchAggregate a = aggregate(records);
      agg << aggregate_row(a) << "\n";
      doc["aggregates"].push_back(aggregate_json(a));
      print_aggregate(out, a);
    }
  }
  write_json(dir / "summary.json", doc);
  return kExitOk;
}

int cmd_sweep(const Options &o, std::ostream &out) {
  const std::vector<double> values = parse_values(o.values);
  const std::vector<std::uint64_t> seeds = seed_list(o);
  const ActionSet actions = resolve_action_set(o.actions);
  const std::vector<ScenarioSource> sources = scenario_sources(o);
  const std::vector<PolicyChoice> policies = policy_choices(o, actions);
  if (o.param == "agents" && !o.scenario_file.empty()) {
    throw std::invalid_argument("an agent-count sweep needs a built-in --scenario");
  }
  // Validate every point before running any.
  std::vector<EngineConfig> configs;
  for (double v : values) {
    EngineConfig c = o.engine;
    if (o.param == "gamma") {
      c.selection.gamma = v;
    } else if (o.param == "window") {
      c.selection.window_length = v;
    } else if (o.param == "failure_prob") {
      c.actuator_failure_prob = v;
    } else if (o.param == "agents") {
      if (v < 1.0 || v != std::floor(v)) {
        throw std::invalid_argument("agent counts must be positive integers");
      }
      for (const ScenarioSource &s : sources) {
        ScenarioSource sized = s;
        sized.n_agents = static_cast<int>(v);
        sized.make(0);
      }
    } else {
      throw std::invalid_argument("--param must be one of gamma, window, agents, failure_prob");
    }
    c.validate();
    configs.push_back(c);
  }

  const fs::path dir = prepare_out_dir(o.out_dir);
  std::ofstream sweep = open_output(dir / "sweep.csv");
  std::ofstream runs = open_output(dir / "runs.csv");
  sweep << "param,value," << aggregate_header() << "\n";
  runs << "param,value," << batch_csv_header() << "\n";
  json doc;
  doc["config"] = config_json("sweep", o, actions);
  doc["config"]["param"] = o.param;
  doc["config"]["values"] = values;
  doc["config"]["seeds"] = seeds;
  doc["points"] = json::array();
  for (std::size_t k = 0; k < values.size(); ++k) {
    const std::string value = format_number(values[k]);
    for (ScenarioSource src : sources) {
      if (o.param == "agents") src.n_agents = static_cast<int>(values[k]);
      for (const PolicyChoice &p : policies) {
        const std::vector<RunRecord> records = run_batch(src, configs[k], p, seeds, o.threads);
        for (const RunRecord &r : records) {
          runs << o.param << "," << value << "," << batch_csv_row(r) << "\n";
        }
        const BatchAggregate a = aggregate(records);
        sweep << o.param << "," << value << "," << aggregate_row(a) << "\n";
        json point = aggregate_json(a);
        point["value"] = values[k];
        doc["points"].push_back(point);
        out << o.param << "=" << value << " ";
        print_aggregate(out, a);
      }
    }
  }
  write_json(dir / "summary.json", doc);
  return kExitOk;
}

int cmd_optimize(Options o, std::ostream &out) {
  o.engine.validate();
  constexpr double kDeg = 3.14159265358979323846 / 180.0;
  o.mcmc.schedule.range_start = o.range_start_deg * kDeg;
  o.mcmc.schedule.range_end = o.range_end_deg * kDeg;
  o.mcmc.seed = o.seed;
  o.mcmc.threads = o.threads == 0 ? 1 : o.threads;
  o.mcmc.validate();
  std::vector<Scenario> scenarios;
  for (const ScenarioSource &src : scenario_sources(o)) scenarios.push_back(src.make(o.seed));

  const fs::path dir = prepare_out_dir(o.out_dir);
  std::ofstream chain_file = open_output(dir / "chain.csv");
  const OptimizeResult r = optimize(scenarios, o.mcmc, o.engine);
  write_chain_csv(chain_file, r.chain);
  save_action_set_file(r.best, (dir / "actions.json").string());

  json doc;
  doc["config"] = config_json("optimize", o, r.initial);
  doc["config"].erase("policies");
  doc["config"].erase("actions");
  doc["config"].erase("action_set");
  doc["config"]["seed"] = o.seed;
  const AnnealSchedule &s = o.mcmc.schedule;
  doc["config"]["schedule"] = {{"iterations", s.n_iterations},
                               {"t_init", s.t_init},
                               {"t_final", s.t_final},
                               {"evals_start", s.evals_start},
                               {"evals_end", s.evals_end},
                               {"range_start_deg", o.range_start_deg},
                               {"range_end_deg", o.range_end_deg},
                               {"max_set_size", o.mcmc.max_set_size},
                               {"vary_speed", o.mcmc.vary_speed}};
  doc["result"] = {{"initial_set", actions_json(r.initial)},
                   {"initial_f", r.initial_f},
                   {"best_set", actions_json(r.best)},
                   {"best_f", r.best_f}};
  write_json(dir / "summary.json", doc);
  out << "initial F " << format_number(r.initial_f) << " s, optimized F "
      << format_number(r.best_f) << " s with " << r.best.size() << " actions\n";
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  CLI::App app{"Multi-agent navigation with online action selection"};
  app.require_subcommand(1);
  Options o;

  auto *run_cmd = app.add_subcommand("run", "simulate one scenario once");
  add_scenario_flags(run_cmd, o, false);
  run_cmd->add_option("--policy", o.policies, "alan, orca, random:<s>, epsilon or ucb");
  run_cmd->add_option("--actions", o.actions, "sample, multi, goal or a JSON file")
      ->capture_default_str();
  run_cmd->add_option("--seed", o.seed)->capture_default_str();
  run_cmd->add_option("--trace-every", o.trace_every, "trace every k-th step; 0 disables")
      ->capture_default_str();
  add_engine_flags(run_cmd, o);
  add_output_flags(run_cmd, o);

  auto *batch_cmd = app.add_subcommand("batch", "run seeds seed..seed+N-1 per scenario and policy");
  add_scenario_flags(batch_cmd, o, true);
  batch_cmd->add_option("--policy", o.policies, "repeatable");
  batch_cmd->add_option("--actions", o.actions)->capture_default_str();
  batch_cmd->add_option("--seed", o.seed, "first seed")->capture_default_str();
  batch_cmd->add_option("--seeds", o.seeds, "number of seeds")->capture_default_str();
  batch_cmd->add_option("--threads", o.threads, "0 = all cores")->capture_default_str();
  add_engine_flags(batch_cmd, o);
  add_output_flags(batch_cmd, o);

  auto *sweep_cmd = app.add_subcommand("sweep", "batch per value of one parameter");
  add_scenario_flags(sweep_cmd, o, true);
  sweep_cmd->add_option("--param", o.param, "gamma, window, agents or failure_prob")->required();
  sweep_cmd->add_option("--values", o.values, "comma-separated list")->required();
  sweep_cmd->add_option("--policy", o.policies, "repeatable");
  sweep_cmd->add_option("--actions", o.actions)->capture_default_str();
  sweep_cmd->add_option("--seed", o.seed, "first seed")->capture_default_str();
  sweep_cmd->add_option("--seeds", o.seeds, "number of seeds")->capture_default_str();
  sweep_cmd->add_option("--threads", o.threads, "0 = all cores")->capture_default_str();
  add_engine_flags(sweep_cmd, o);
  add_output_flags(sweep_cmd, o);

  auto *opt_cmd = app.add_subcommand("optimize", "search for an action set");
  add_scenario_flags(opt_cmd, o, true);
  opt_cmd->add_option("--seed", o.seed)->capture_default_str();
  opt_cmd->add_option("--iterations", o.mcmc.schedule.n_iterations)->capture_default_str();
  opt_cmd->add_option("--t-init", o.mcmc.schedule.t_init)->capture_default_str();
  opt_cmd->add_option("--t-final", o.mcmc.schedule.t_final)->capture_default_str();
  opt_cmd->add_option("--evals-start", o.mcmc.schedule.evals_start)->capture_default_str();
  opt_cmd->add_option("--evals-end", o.mcmc.schedule.evals_end)->capture_default_str();
  opt_cmd->add_option("--range-start", o.range_start_deg, "degrees")->capture_default_str();
  opt_cmd->add_option("--range-end", o.range_end_deg, "degrees")->capture_default_str();
  opt_cmd->add_option("--max-set-size", o.mcmc.max_set_size)->capture_default_str();
  opt_cmd->add_flag("--vary-speed", o.mcmc.vary_speed, "also search action speeds");
  opt_cmd->add_option("--threads", o.threads, "concurrent runs per evaluation")
      ->capture_default_str();
  add_engine_flags(opt_cmd, o);
  add_output_flags(opt_cmd, o);

  app.add_subcommand("scenarios", "list built-in scenarios and default agent counts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalidInput;
  }

  try {
    if (app.got_subcommand("scenarios")) return cmd_scenarios(out);
    if (run_cmd->parsed()) return cmd_run(o, out);
    if (batch_cmd->parsed()) return cmd_batch(o, out);
    if (sweep_cmd->parsed()) return cmd_sweep(o, out);
    return cmd_optimize(o, out);
  } catch (const std::invalid_argument &e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const ScenarioError &e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace navlearn
