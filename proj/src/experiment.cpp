#include "navlearn/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace navlearn {

Scenario ScenarioSource::make(std::uint64_t seed) const {
  if (!file.empty()) {
    return load_scenario_file(file);
  }
  return builtin_scenario(name, n_agents, seed);
}

bool ScenarioSource::seed_dependent() const { return file.empty() && name == "crowd"; }

std::string ScenarioSource::label() const {
  if (!file.empty()) {
    return file;
  }
  return n_agents > 0 ? name + ":" + std::to_string(n_agents) : name;
}

EngineConfig PolicyChoice::configure(EngineConfig cfg) const {
  if (strategy) {
    cfg.selection.strategy = *strategy;
  }
  return cfg;
}

PolicyChoice parse_policy(std::string_view text, const ActionSet &actions) {
  PolicyChoice c;
  c.label = std::string(text);
  if (text == "alan") {
    c.policy = Policy::learning(actions);
  } else if (text == "orca") {
    c.policy = Policy::orca_only();
  } else if (text == "epsilon") {
    c.policy = Policy::learning(actions);
    c.strategy = Strategy::kEpsilonGreedy;
  } else if (text == "ucb") {
    c.policy = Policy::learning(actions);
    c.strategy = Strategy::kUcb;
  } else if (text.starts_with("random:")) {
    const std::string_view arg = text.substr(7);
    double period = 0.0;
    const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), period);
    if (ec != std::errc() || ptr != arg.data() + arg.size() || !(period > 0.0)) {
      throw std::invalid_argument("random policy needs a positive period, e.g. random:2");
    }
    c.policy = Policy::random_action(period);
  } else {
    throw std::invalid_argument("unknown policy '" + std::string(text) +
                                "' (valid: alan, orca, random:<seconds>, epsilon, ucb)");
  }
  return c;
}

ActionSet resolve_action_set(std::string_view ref, double speed) {
  if (ref == "sample") return sample_action_set(speed);
  if (ref == "multi") return multi_scenario_action_set(speed);
  if (ref == "goal") return goal_only_action_set(speed);
  return load_action_set_file(std::string(ref));
}

void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)> &fn) {
  if (threads == 0) {
    threads = std::max(1U, std::thread::hardware_concurrency());
  }
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  pool.clear();
  if (error) std::rethrow_exception(error);
}

std::vector<RunRecord> run_batch(const ScenarioSource &source, const EngineConfig &cfg,
                                 const PolicyChoice &policy, std::span<const std::uint64_t> seeds,
                                 unsigned threads) {
  std::vector<RunRecord> out(seeds.size());
  const EngineConfig base = policy.configure(cfg);
  // Minimum times only depend on the layout.
  std::optional<Scenario> fixed;
  std::vector<double> fixed_min;
  if (!source.seed_dependent()) {
    fixed = source.make(0);
    fixed_min = min_travel_times(*fixed, true);
  }
  parallel_for(seeds.size(), threads, [&](std::size_t k) {
    EngineConfig c = base;
    c.seed = seeds[k];
    const Scenario scenario = fixed ? *fixed : source.make(seeds[k]);
    const std::vector<double> min_times = fixed ? fixed_min : min_travel_times(scenario, true);
    const SimulationResult result = run(scenario, c, policy.policy);
    RunRecord &r = out[k];
    r.scenario = source.label();
    r.policy = policy.label;
    r.seed = seeds[k];
    r.report = interaction_overhead(result, min_times);
    r.end_time = result.end_time;
    r.compute_seconds = result.compute_seconds;
    r.agent_steps = result.agent_steps;
  });
  return out;
}

BatchAggregate aggregate(std::span<const RunRecord> records) {
  BatchAggregate a;
  a.runs = records.size();
  if (records.empty()) {
    return a;
  }
  a.scenario = records.front().scenario;
  a.policy = records.front().policy;
  std::vector<double> done;
  double capped = 0.0;
  double tt = 0.0;
  double travel = 0.0;
  for (const RunRecord &r : records) {
    if (r.report.interaction_overhead) done.push_back(*r.report.interaction_overhead);
    capped += r.report.capped_overhead;
    tt += r.report.ttime;
    travel += r.report.mean;
  }
  a.completion_rate = static_cast<double>(done.size()) / static_cast<double>(records.size());
  a.mean_capped_overhead = capped / static_cast<double>(records.size());
  a.mean_ttime = tt / static_cast<double>(records.size());
  a.mean_travel_time = travel / static_cast<double>(records.size());
  if (!done.empty()) {
    const MeanStdev s = mean_stdev(done);
    a.mean_overhead = s.mean;
    a.stdev_overhead = s.stdev;
  }
  return a;
}

std::string batch_csv_header() { return "scenario,policy,seed,overhead,mean,stdev,completed"; }

std::string batch_csv_row(const RunRecord &r) {
  std::string row = r.scenario + "," + r.policy + "," + std::to_string(r.seed) + ",";
  row += r.report.interaction_overhead ? format_number(*r.report.interaction_overhead) : "";
  row += "," + format_number(r.report.mean) + "," + format_number(r.report.stdev) + ",";
  row += r.report.completed ? "1" : "0";
  return row;
}

std::vector<std::uint64_t> seed_range(std::uint64_t first, std::size_t count) {
  std::vector<std::uint64_t> s(count);
  for (std::size_t i = 0; i < count; ++i) s[i] = first + i;
  return s;
}

}  // namespace navlearn
