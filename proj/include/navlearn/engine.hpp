#ifndef NAVLEARN_ENGINE_HPP_
#define NAVLEARN_ENGINE_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "navlearn/action_selection.hpp"
#include "navlearn/world.hpp"

namespace navlearn {

struct EngineConfig {
  double dt = 0.05;                      // s
  double sense_radius_agents = 15.0;     // m, center to center
  double sense_radius_obstacles = 1.0;   // m, from the agent's edge
  std::size_t max_neighbors = 10;
  double agent_horizon = 5.0;            // s
  double obstacle_horizon = 1.0;         // s
  double decision_period_mean = 0.2;     // s
  double decision_jitter = 0.25;         // fraction of the mean, uniform +-
  double pref_noise = 0.01;              // m/s, std of each component
  double actuator_failure_prob = 0.0;
  double time_cap = 0.0;                 // s; 0 picks a scenario-dependent cap
  SelectionConfig selection;
  std::uint64_t seed = 0;

  // Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

// max(300 s, 4 x the longest straight-line travel time).
double default_time_cap(const Scenario &scenario);

// How agents pick their preferred velocity.
struct Policy {
  enum class Kind { kLearning, kRandomAction };

  Kind kind = Kind::kLearning;
  ActionSet actions = sample_action_set();
  double random_period = 0.0;  // s, kRandomAction only

  // Bandit selection over `actions` using EngineConfig::selection.
  static Policy learning(ActionSet actions);
  // Goal-directed velocity only.
  static Policy orca_only(double speed = 1.5);
  // Goal-directed, except that the first decision after every `period`
  // seconds takes a uniform draw from the Sample set. The drawn action lasts
  // one decision interval.
  static Policy random_action(double period, double speed = 1.5);

  void validate() const;
};

struct AgentState {
  AgentSpec spec;
  Vec2 position;
  Vec2 velocity;
  std::size_t current_action = 0;
  Vec2 v_pref;
  RewardWindow window;
  std::vector<std::uint64_t> pulls;
  std::uint64_t total_pulls = 0;
  double next_decision_time = 0.0;
  double next_random_time = 0.0;  // kRandomAction only
  std::uint64_t decisions = 0;  // decision instants reached, including failed ones
  bool arrived = false;
  double arrival_time = 0.0;
  bool infeasible_last_step = false;
};

struct SimulationResult {
  std::vector<int> agent_ids;
  std::vector<std::optional<double>> arrival_times;  // s, per agent in scenario order
  bool completed = false;
  double end_time = 0.0;
  double time_cap = 0.0;
  std::uint64_t steps = 0;
  std::uint64_t agent_steps = 0;  // sum over steps of agents still moving
  std::uint64_t infeasible_solves = 0;
  double compute_seconds = 0.0;   // wall time spent inside step()

  // Arrival times with unfinished agents counted at time_cap.
  std::vector<double> capped_times() const;
};

// Writes `t,agent_id,x,y,vx,vy,action_id` rows.
class TraceWriter {
 public:
  explicit TraceWriter(std::ostream &out, std::size_t every = 1);
  void write(std::uint64_t step, double t, std::span<const AgentState> agents);

 private:
  std::ostream &out_;
  std::size_t every_;
};

class Simulation {
 public:
  Simulation(const Scenario &scenario, const EngineConfig &cfg, const Policy &policy);

  // Advances every moving agent by one dt against a snapshot of the previous state.
  void step();

  bool done() const;
  double time() const { return time_; }
  std::uint64_t step_count() const { return steps_; }
  double time_cap() const { return time_cap_; }
  std::span<const AgentState> agents() const { return agents_; }
  const Scenario &scenario() const { return scenario_; }
  std::uint64_t infeasible_solves() const { return infeasible_; }

 private:
  struct Streams {
    Rng noise;
    Rng timing;
    Rng select;
  };

  void decide(std::size_t i);
  double next_interval(Rng &rng) const;
  void gather_neighbors(std::size_t i, std::vector<std::size_t> &nearest,
                        std::vector<std::size_t> &close) const;
  void rebuild_grid();

  Scenario scenario_;
  EngineConfig cfg_;
  Policy policy_;
  std::vector<AgentState> agents_;
  std::vector<Streams> streams_;
  double time_ = 0.0;
  double time_cap_ = 0.0;
  std::uint64_t steps_ = 0;
  std::uint64_t infeasible_ = 0;

  // Uniform grid over moving agents, rebuilt every step.
  double grid_min_x_ = 0.0;
  double grid_min_y_ = 0.0;
  double cell_ = 1.0;
  int grid_w_ = 0;
  int grid_h_ = 0;
  std::vector<std::uint32_t> cell_start_;
  std::vector<std::uint32_t> cell_items_;
};

// Called after every step with the simulation state.
using StepObserver = std::function<void(const Simulation &)>;

// Steps until every agent arrives or the time cap is reached.
SimulationResult run(const Scenario &scenario, const EngineConfig &cfg, const Policy &policy,
                     TraceWriter *trace = nullptr, const StepObserver &observer = {});

// Shortest decimal form that round-trips; identical across runs.
std::string format_number(double v);

}  // namespace navlearn

#endif  // NAVLEARN_ENGINE_HPP_
