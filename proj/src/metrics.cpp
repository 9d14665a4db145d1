#include "navlearn/metrics.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <string>

#include "navlearn/shortest_path.hpp"

namespace navlearn {

MeanStdev mean_stdev(std::span<const double> values) {
  if (values.empty()) {
    throw std::invalid_argument("no travel times");
  }
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() == 1) {
    return {mean, 0.0};
  }
  double ss = 0.0;
  for (double v : values) {
    ss += (v - mean) * (v - mean);
  }
  return {mean, std::sqrt(ss / (n - 1.0))};
}

double ttime(std::span<const double> times) {
  const MeanStdev s = mean_stdev(times);
  return s.mean + 3.0 * s.stdev;
}

std::vector<double> min_travel_times(const Scenario &scenario, bool stop_within_radius) {
  // One planner per distinct radius.
  std::map<double, std::unique_ptr<ShortestPathPlanner>> planners;
  std::vector<double> out;
  out.reserve(scenario.agents.size());
  for (const AgentSpec &a : scenario.agents) {
    auto &planner = planners[a.radius];
    if (!planner) {
      planner = std::make_unique<ShortestPathPlanner>(scenario.obstacles, a.radius);
    }
    const double length = planner->distance(a.start, a.goal);
    if (!std::isfinite(length)) {
      throw std::runtime_error("agent " + std::to_string(a.id) + " cannot reach its goal");
    }
    const double travelled = stop_within_radius ? std::max(0.0, length - a.radius) : length;
    out.push_back(travelled / a.max_speed);
  }
  return out;
}

double min_ttime(const Scenario &scenario) { return ttime(min_travel_times(scenario)); }

MetricsReport interaction_overhead(const SimulationResult &result,
                                   std::span<const double> min_times) {
  MetricsReport r;
  r.n_agents = static_cast<int>(result.arrival_times.size());
  r.completed = result.completed;
  if (result.arrival_times.empty()) {
    r.completed = true;
    r.interaction_overhead = 0.0;
    return r;
  }
  const std::vector<double> times = result.capped_times();
  const MeanStdev s = mean_stdev(times);
  r.mean = s.mean;
  r.stdev = s.stdev;
  r.ttime = s.mean + 3.0 * s.stdev;
  r.min_ttime = ttime(min_times);
  r.capped_overhead = r.ttime - r.min_ttime;
  if (r.completed) {
    r.interaction_overhead = r.capped_overhead;
  }
  return r;
}

MetricsReport interaction_overhead(const SimulationResult &result, const Scenario &scenario) {
  return interaction_overhead(result, min_travel_times(scenario, true));
}

}  // namespace navlearn
