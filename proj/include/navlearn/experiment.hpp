#ifndef NAVLEARN_EXPERIMENT_HPP_
#define NAVLEARN_EXPERIMENT_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "navlearn/engine.hpp"
#include "navlearn/metrics.hpp"

namespace navlearn {

// A built-in layout (optionally with an agent count) or a scenario file.
struct ScenarioSource {
  std::string name;
  int n_agents = 0;
  std::string file;

  // Randomized layouts use `seed`; the others ignore it.
  Scenario make(std::uint64_t seed) const;
  bool seed_dependent() const;
  std::string label() const;
};

// A named policy: "alan", "orca", "random:<period>", "epsilon" or "ucb".
struct PolicyChoice {
  std::string label;
  Policy policy;
  std::optional<Strategy> strategy;  // overrides EngineConfig::selection.strategy

  EngineConfig configure(EngineConfig cfg) const;
};

// `actions` is the set used by the learning policies. Throws
// std::invalid_argument for unknown names or a bad period.
PolicyChoice parse_policy(std::string_view text, const ActionSet &actions);

// Resolves "sample", "multi", "goal" or a JSON file path.
ActionSet resolve_action_set(std::string_view ref, double speed = 1.5);

struct RunRecord {
  std::string scenario;
  std::string policy;
  std::uint64_t seed = 0;
  MetricsReport report;
  double end_time = 0.0;
  double compute_seconds = 0.0;
  std::uint64_t agent_steps = 0;
};

// Runs fn(0..count-1) on up to `threads` workers (0 = hardware concurrency).
// Each index is processed exactly once; callers store results by index.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)> &fn);

// One run per seed; records come back in seed order regardless of scheduling.
std::vector<RunRecord> run_batch(const ScenarioSource &source, const EngineConfig &cfg,
                                 const PolicyChoice &policy, std::span<const std::uint64_t> seeds,
                                 unsigned threads = 0);

struct BatchAggregate {
  std::string scenario;
  std::string policy;
  std::size_t runs = 0;
  double completion_rate = 0.0;
  // Over completed runs only; absent when none completed.
  std::optional<double> mean_overhead;
  std::optional<double> stdev_overhead;
  // Over all runs, unfinished agents counted at the time cap.
  double mean_capped_overhead = 0.0;
  double mean_ttime = 0.0;
  double mean_travel_time = 0.0;  // mean over runs of the per-agent mean time
};

BatchAggregate aggregate(std::span<const RunRecord> records);

// `scenario,policy,seed,overhead,mean,stdev,completed`
std::string batch_csv_header();
std::string batch_csv_row(const RunRecord &r);

std::vector<std::uint64_t> seed_range(std::uint64_t first, std::size_t count);

}  // namespace navlearn

#endif  // NAVLEARN_EXPERIMENT_HPP_
