#ifndef NAVLEARN_METRICS_HPP_
#define NAVLEARN_METRICS_HPP_

#include <optional>
#include <span>
#include <vector>

#include "navlearn/engine.hpp"
#include "navlearn/world.hpp"

namespace navlearn {

struct MeanStdev {
  double mean = 0.0;
  double stdev = 0.0;  // sample (n - 1) estimator; 0 for a single value
};

// Throws std::invalid_argument on an empty input.
MeanStdev mean_stdev(std::span<const double> values);

// mean + 3 * sample standard deviation.
double ttime(std::span<const double> times);

// Per-agent shortest obstacle-avoiding path length divided by max speed. The
// path keeps the agent's radius clear of every obstacle. With
// `stop_within_radius` the path ends one agent radius short of the goal, which
// is where the engine declares arrival. Throws std::runtime_error naming the
// first agent whose goal cannot be reached.
std::vector<double> min_travel_times(const Scenario &scenario, bool stop_within_radius = false);

// ttime of min_travel_times(scenario).
double min_ttime(const Scenario &scenario);

struct MetricsReport {
  double ttime = 0.0;
  double min_ttime = 0.0;
  std::optional<double> interaction_overhead;  // absent unless completed
  double mean = 0.0;
  double stdev = 0.0;
  int n_agents = 0;
  bool completed = false;
  // Overhead with unfinished agents counted as arriving at the time cap. Equals
  // interaction_overhead for completed runs and bounds it from below otherwise.
  double capped_overhead = 0.0;
};

// Compares a run with the unconstrained lower bound, using the engine's
// arrival tolerance for the latter.
MetricsReport interaction_overhead(const SimulationResult &result, const Scenario &scenario);

// Same, reusing min_travel_times(scenario, true).
MetricsReport interaction_overhead(const SimulationResult &result,
                                   std::span<const double> min_times);

}  // namespace navlearn

#endif  // NAVLEARN_METRICS_HPP_
