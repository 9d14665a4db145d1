#ifndef NAVLEARN_ORCA_HPP_
#define NAVLEARN_ORCA_HPP_

#include <cstddef>
#include <optional>
#include <span>

#include "navlearn/vec2.hpp"
#include "navlearn/world.hpp"

namespace navlearn {

// Linear velocity constraint: the permitted set is {v : dot(v - point, normal) >= 0}.
struct HalfPlane {
  Vec2 point;
  Vec2 normal;  // unit length

  // Signed distance of v into the permitted side; negative means violated.
  double slack(const Vec2 &v) const { return dot(v - point, normal); }
  bool permits(const Vec2 &v, double tolerance = 0.0) const { return slack(v) >= -tolerance; }
};

// What agent i observes about neighbor j. Positions and velocities are
// relative to agent i: relative_position = p_j - p_i, relative_velocity = v_i - v_j.
struct NeighborView {
  Vec2 relative_position;
  Vec2 relative_velocity;
  double combined_radius = 0.0;
  Vec2 neighbor_velocity;
};

struct AgentConstraint {
  HalfPlane plane;
  // Smallest change of relative velocity that reaches the boundary of the
  // truncated velocity obstacle. Agent i takes half of it.
  Vec2 u;
  // True when the agents already overlap and the separating variant was used.
  bool colliding = false;
};

// Reciprocal half-plane for agent i induced by neighbor j. The velocity
// obstacle is truncated at `horizon`; overlapping agents get a constraint that
// resolves the overlap within one `dt`. When the relative velocity lies
// exactly between both legs, the leg with det(relative_position, u) < 0 is used.
AgentConstraint agent_halfplane(const NeighborView &view, double horizon, double dt);

// Guard that lets agent i close at most half of the current gap to a neighbor
// within one `dt`: v . n <= (|p| - r) / (2 dt) with n = p / |p|. If both agents
// respect it they cannot overlap after the step, and the zero velocity always
// satisfies it while the agents are apart.
HalfPlane contact_halfplane(const Vec2 &relative_position, double combined_radius, double dt);

struct ObstacleConstraint {
  HalfPlane plane;
  bool penetrating = false;
};

// Half-plane for a static segment; the agent takes full responsibility.
// Absent when the segment cannot be reached within `horizon` at `max_speed`.
std::optional<ObstacleConstraint> obstacle_halfplane(const Vec2 &position, const Vec2 &velocity,
                                                     double radius, double max_speed,
                                                     const Obstacle &obstacle, double horizon,
                                                     double dt);

struct LpResult {
  Vec2 velocity;
  bool feasible = true;
};

// Velocity inside the disc of radius max_speed and every half-plane that is
// closest to `preferred`. Constraints are processed in a fixed pseudo-random
// order, giving expected linear time.
//
// When the constraints have no common point, the first `hard_count`
// constraints stay hard and the returned velocity minimizes the largest
// violation of the remaining ones; `feasible` is then false. If the hard
// constraints conflict with each other, the others are dropped and the largest
// hard violation is minimized instead. The result is a pure function of the
// inputs.
LpResult solve_lp(std::span<const HalfPlane> constraints, const Vec2 &preferred, double max_speed,
                  std::size_t hard_count = 0);

}  // namespace navlearn

#endif  // NAVLEARN_ORCA_HPP_
