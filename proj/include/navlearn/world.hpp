#ifndef NAVLEARN_WORLD_HPP_
#define NAVLEARN_WORLD_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "navlearn/vec2.hpp"

namespace navlearn {

// Static obstacle: an open line segment. Walls are chains of segments.
struct Obstacle {
  Vec2 a;
  Vec2 b;

  friend bool operator==(const Obstacle &, const Obstacle &) = default;
};

struct AgentSpec {
  int id = 0;
  Vec2 start;
  Vec2 goal;
  double radius = 0.5;     // m
  double max_speed = 1.5;  // m/s

  friend bool operator==(const AgentSpec &, const AgentSpec &) = default;
};

struct Scenario {
  std::string name;
  std::vector<AgentSpec> agents;
  std::vector<Obstacle> obstacles;

  friend bool operator==(const Scenario &, const Scenario &) = default;
};

// Raised for malformed scenario documents. `where` is either "line L, column C"
// for syntax errors or a JSON pointer such as "/agents/3/radius".
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string where, const std::string &what)
      : std::runtime_error(where.empty() ? what : where + ": " + what),
        where_(std::move(where)) {}

  const std::string &where() const { return where_; }

 private:
  std::string where_;
};

// Euclidean distance from p to the closest point of segment o.
double dist_point_segment(const Vec2 &p, const Obstacle &o);

// Closest point of segment o to p.
Vec2 closest_point_on_segment(const Vec2 &p, const Obstacle &o);

// Minimum distance between segments [p0,p1] and [q0,q1].
double dist_segment_segment(const Vec2 &p0, const Vec2 &p1, const Vec2 &q0, const Vec2 &q1);

// Checks every scenario invariant; throws ScenarioError naming the first violation.
void validate(const Scenario &scenario);

// Parses and validates a scenario JSON document. Unknown fields are rejected.
Scenario load_scenario(std::string_view source);

// Serializes to the same JSON format accepted by load_scenario.
std::string save_scenario(const Scenario &scenario);

Scenario load_scenario_file(const std::string &path);
void save_scenario_file(const Scenario &scenario, const std::string &path);

// Names of the procedurally generated scenarios, in canonical order.
const std::vector<std::string> &builtin_scenario_names();

// Agent count used when no override is given.
int default_agent_count(std::string_view name);

// Deterministic for a given (name, n_agents, seed). n_agents <= 0 selects the
// default count. Throws std::invalid_argument for unknown names or counts the
// geometry cannot host.
Scenario builtin_scenario(std::string_view name, int n_agents = 0, std::uint64_t seed = 0);

}  // namespace navlearn

#endif  // NAVLEARN_WORLD_HPP_
