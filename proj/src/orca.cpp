#include "navlearn/orca.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

namespace navlearn {
namespace {

constexpr double kEpsilon = 1e-9;

// Boundary line in direction form: the permitted side lies to the left of
// `direction`, i.e. normal == perp(direction).
struct Line {
  Vec2 point;
  Vec2 direction;
};

HalfPlane to_half_plane(const Line &line) { return {line.point, perp(line.direction)}; }

Line to_line(const HalfPlane &h) { return {h.point, {h.normal.y, -h.normal.x}}; }

// Positive when v lies on the forbidden side of the line.
double violation(const Line &line, const Vec2 &v) { return det(line.direction, line.point - v); }

// Optimum on line `index` subject to lines [0, index) and the speed disc.
bool solve_on_line(std::span<const Line> lines, std::size_t index, double radius,
                   const Vec2 &target, bool optimize_direction, Vec2 &result) {
  const Line &line = lines[index];
  const double along = dot(line.point, line.direction);
  const double discriminant = along * along + radius * radius - norm_sq(line.point);
  if (discriminant < 0.0) {
    return false;  // speed disc misses the line
  }
  const double root = std::sqrt(discriminant);
  double t_left = -along - root;
  double t_right = -along + root;

  for (std::size_t i = 0; i < index; ++i) {
    const double denominator = det(line.direction, lines[i].direction);
    const double numerator = det(lines[i].direction, line.point - lines[i].point);
    if (std::fabs(denominator) <= kEpsilon) {
      if (numerator < 0.0) {
        return false;  // parallel and entirely forbidden
      }
      continue;
    }
    const double t = numerator / denominator;
    if (denominator >= 0.0) {
      t_right = std::min(t_right, t);
    } else {
      t_left = std::max(t_left, t);
    }
    if (t_left > t_right) {
      return false;
    }
  }

  if (optimize_direction) {
    result = line.point + (dot(target, line.direction) > 0.0 ? t_right : t_left) * line.direction;
  } else {
    const double t = std::clamp(dot(line.direction, target - line.point), t_left, t_right);
    result = line.point + t * line.direction;
  }
  return true;
}

// Incremental solver. Returns the index of the first line that could not be
// satisfied, or lines.size() on success.
std::size_t solve_incremental(std::span<const Line> lines, double radius, const Vec2 &target,
                              bool optimize_direction, Vec2 &result) {
  if (optimize_direction) {
    result = target * radius;  // target is a unit direction here
  } else if (norm_sq(target) > radius * radius) {
    result = normalized(target) * radius;
  } else {
    result = target;
  }
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (violation(lines[i], result) > 0.0) {
      const Vec2 previous = result;
      if (!solve_on_line(lines, i, radius, target, optimize_direction, result)) {
        result = previous;
        return i;
      }
    }
  }
  return lines.size();
}

// Minimizes the largest violation over lines [hard_count, end) while keeping
// lines [0, hard_count) satisfied, starting from the partial result of the
// failed incremental pass.
void minimize_max_violation(std::span<const Line> lines, std::size_t hard_count,
                            std::size_t begin, double radius, Vec2 &result) {
  double distance = 0.0;
  std::vector<Line> projected;
  for (std::size_t i = begin; i < lines.size(); ++i) {
    if (violation(lines[i], result) <= distance) {
      continue;
    }
    projected.assign(lines.begin(), lines.begin() + static_cast<std::ptrdiff_t>(hard_count));
    for (std::size_t j = hard_count; j < i; ++j) {
      Line line;
      const double determinant = det(lines[i].direction, lines[j].direction);
      if (std::fabs(determinant) <= kEpsilon) {
        if (dot(lines[i].direction, lines[j].direction) > 0.0) {
          continue;  // same direction: j is implied by i
        }
        line.point = 0.5 * (lines[i].point + lines[j].point);
      } else {
        line.point = lines[i].point +
                     (det(lines[j].direction, lines[i].point - lines[j].point) / determinant) *
                         lines[i].direction;
      }
      line.direction = normalized(lines[j].direction - lines[i].direction);
      projected.push_back(line);
    }
    const Vec2 previous = result;
    if (solve_incremental(projected, radius, {-lines[i].direction.y, lines[i].direction.x}, true,
                          result) < projected.size()) {
      // Only reachable through rounding; the previous point is already optimal.
      result = previous;
    }
    distance = violation(lines[i], result);
  }
}

std::uint64_t splitmix64(std::uint64_t &state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30U)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27U)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31U);
}

}  // namespace

AgentConstraint agent_halfplane(const NeighborView &view, double horizon, double dt) {
  const Vec2 &rel_pos = view.relative_position;
  const Vec2 &rel_vel = view.relative_velocity;
  const double dist_sq = norm_sq(rel_pos);
  const double r = view.combined_radius;
  const double r_sq = r * r;
  const Vec2 own_velocity = rel_vel + view.neighbor_velocity;

  AgentConstraint out;
  Vec2 direction;
  if (dist_sq > r_sq) {
    const double inv_horizon = 1.0 / horizon;
    // From the cutoff disc center to the relative velocity.
    const Vec2 w = rel_vel - inv_horizon * rel_pos;
    const double w_len_sq = norm_sq(w);
    const double w_dot_p = dot(w, rel_pos);
    if (w_dot_p < 0.0 && w_dot_p * w_dot_p > r_sq * w_len_sq) {
      // Nearest boundary point lies on the cutoff arc.
      const double w_len = std::sqrt(w_len_sq);
      const Vec2 unit_w = w / w_len;
      direction = {unit_w.y, -unit_w.x};
      out.u = (r * inv_horizon - w_len) * unit_w;
    } else {
      const double leg = std::sqrt(dist_sq - r_sq);
      if (det(rel_pos, w) > 0.0) {
        direction = Vec2{rel_pos.x * leg - rel_pos.y * r, rel_pos.x * r + rel_pos.y * leg} / dist_sq;
      } else {
        direction =
            -(Vec2{rel_pos.x * leg + rel_pos.y * r, -rel_pos.x * r + rel_pos.y * leg} / dist_sq);
      }
      out.u = dot(rel_vel, direction) * direction - rel_vel;
    }
  } else {
    // Overlapping: leave the cutoff disc of one timestep.
    out.colliding = true;
    const double inv_dt = 1.0 / dt;
    const Vec2 w = rel_vel - inv_dt * rel_pos;
    const double w_len = norm(w);
    const Vec2 unit_w = w_len > 0.0 ? w / w_len : normalized(-rel_pos);
    direction = {unit_w.y, -unit_w.x};
    out.u = (r * inv_dt - w_len) * unit_w;
  }
  out.plane = to_half_plane({own_velocity + 0.5 * out.u, direction});
  return out;
}

HalfPlane contact_halfplane(const Vec2 &relative_position, double combined_radius, double dt) {
  const double dist = norm(relative_position);
  const Vec2 n = dist > 0.0 ? relative_position / dist : Vec2{1.0, 0.0};
  return {n * ((dist - combined_radius) / (2.0 * dt)), -n};
}

std::optional<ObstacleConstraint> obstacle_halfplane(const Vec2 &position, const Vec2 &velocity,
                                                     double radius, double max_speed,
                                                     const Obstacle &obstacle, double horizon,
                                                     double dt) {
  const double gap = dist_point_segment(position, obstacle) - radius;
  if (gap > max_speed * horizon) {
    return std::nullopt;
  }

  // Orient the segment so the agent sits on its right, as a counterclockwise
  // polygon edge seen from outside. Each endpoint is a convex vertex whose
  // neighbor is the other endpoint.
  Vec2 p1 = obstacle.a;
  Vec2 p2 = obstacle.b;
  if (det(p2 - p1, position - p1) > 0.0) {
    std::swap(p1, p2);
  }
  struct Vertex {
    Vec2 point;
    Vec2 direction;  // toward the next vertex
  };
  const Vec2 edge_dir = normalized(p2 - p1);
  const Vertex v1{p1, edge_dir};
  const Vertex v2{p2, -edge_dir};
  const auto previous = [&](const Vertex *v) { return v == &v1 ? &v2 : &v1; };

  const Vec2 rel1 = p1 - position;
  const Vec2 rel2 = p2 - position;
  const double dist_sq1 = norm_sq(rel1);
  const double dist_sq2 = norm_sq(rel2);
  const double r_sq = radius * radius;
  const Vec2 edge = p2 - p1;
  const double s = dot(-rel1, edge) / norm_sq(edge);
  const double dist_sq_line = norm_sq(-rel1 - s * edge);

  // Overlap: move away from the closest feature fast enough to separate in one step.
  const auto separate = [&](const Vec2 &away, double dist) {
    const double overlap = std::max(0.0, radius - dist);
    return ObstacleConstraint{{away * (overlap / dt), away}, true};
  };
  if (s < 0.0 && dist_sq1 <= r_sq) {
    return separate(normalized(-rel1), std::sqrt(dist_sq1));
  }
  if (s > 1.0 && dist_sq2 <= r_sq) {
    return separate(normalized(-rel2), std::sqrt(dist_sq2));
  }
  if (s >= 0.0 && s <= 1.0 && dist_sq_line <= r_sq) {
    return separate(perp(-edge_dir), std::sqrt(dist_sq_line));
  }

  const auto left_tangent = [&](const Vec2 &rel, double dist_sq) {
    const double leg = std::sqrt(dist_sq - r_sq);
    return Vec2{rel.x * leg - rel.y * radius, rel.x * radius + rel.y * leg} / dist_sq;
  };
  const auto right_tangent = [&](const Vec2 &rel, double dist_sq) {
    const double leg = std::sqrt(dist_sq - r_sq);
    return Vec2{rel.x * leg + rel.y * radius, -rel.x * radius + rel.y * leg} / dist_sq;
  };

  const Vertex *first = &v1;
  const Vertex *second = &v2;
  Vec2 left_leg;
  Vec2 right_leg;
  if (s < 0.0 && dist_sq_line <= r_sq) {
    // Seen obliquely: the near endpoint alone shapes the obstacle.
    second = &v1;
    left_leg = left_tangent(rel1, dist_sq1);
    right_leg = right_tangent(rel1, dist_sq1);
  } else if (s > 1.0 && dist_sq_line <= r_sq) {
    first = &v2;
    left_leg = left_tangent(rel2, dist_sq2);
    right_leg = right_tangent(rel2, dist_sq2);
  } else {
    left_leg = left_tangent(rel1, dist_sq1);
    right_leg = right_tangent(rel2, dist_sq2);
  }

  // A leg that would cut through the segment is replaced by the segment edge.
  bool left_foreign = false;
  bool right_foreign = false;
  const Vertex *left_neighbor = previous(first);
  if (det(left_leg, -left_neighbor->direction) >= 0.0) {
    left_leg = -left_neighbor->direction;
    left_foreign = true;
  }
  if (det(right_leg, second->direction) <= 0.0) {
    right_leg = second->direction;
    right_foreign = true;
  }

  const double inv_horizon = 1.0 / horizon;
  const Vec2 left_cutoff = inv_horizon * (first->point - position);
  const Vec2 right_cutoff = inv_horizon * (second->point - position);
  const Vec2 cutoff_vec = right_cutoff - left_cutoff;
  const bool single_vertex = first == second;

  const double t = single_vertex ? 0.5 : dot(velocity - left_cutoff, cutoff_vec) / norm_sq(cutoff_vec);
  const double t_left = dot(velocity - left_cutoff, left_leg);
  const double t_right = dot(velocity - right_cutoff, right_leg);

  Line line;
  if ((t < 0.0 && t_left < 0.0) || (single_vertex && t_left < 0.0 && t_right < 0.0)) {
    const Vec2 unit_w = normalized(velocity - left_cutoff);
    line.direction = {unit_w.y, -unit_w.x};
    line.point = left_cutoff + radius * inv_horizon * unit_w;
    return ObstacleConstraint{to_half_plane(line), false};
  }
  if (t > 1.0 && t_right < 0.0) {
    const Vec2 unit_w = normalized(velocity - right_cutoff);
    line.direction = {unit_w.y, -unit_w.x};
    line.point = right_cutoff + radius * inv_horizon * unit_w;
    return ObstacleConstraint{to_half_plane(line), false};
  }

  constexpr double kInf = std::numeric_limits<double>::infinity();
  const double dist_sq_cutoff = (t < 0.0 || t > 1.0 || single_vertex)
                                    ? kInf
                                    : norm_sq(velocity - (left_cutoff + t * cutoff_vec));
  const double dist_sq_left =
      t_left < 0.0 ? kInf : norm_sq(velocity - (left_cutoff + t_left * left_leg));
  const double dist_sq_right =
      t_right < 0.0 ? kInf : norm_sq(velocity - (right_cutoff + t_right * right_leg));

  if (dist_sq_cutoff <= dist_sq_left && dist_sq_cutoff <= dist_sq_right) {
    line.direction = -first->direction;
    line.point = left_cutoff + radius * inv_horizon * perp(line.direction);
    return ObstacleConstraint{to_half_plane(line), false};
  }
  if (dist_sq_left <= dist_sq_right) {
    if (left_foreign) {
      return std::nullopt;
    }
    line.direction = left_leg;
    line.point = left_cutoff + radius * inv_horizon * perp(line.direction);
    return ObstacleConstraint{to_half_plane(line), false};
  }
  if (right_foreign) {
    return std::nullopt;
  }
  line.direction = -right_leg;
  line.point = right_cutoff + radius * inv_horizon * perp(line.direction);
  return ObstacleConstraint{to_half_plane(line), false};
}

LpResult solve_lp(std::span<const HalfPlane> constraints, const Vec2 &preferred, double max_speed,
                  std::size_t hard_count) {
  const std::size_t n = constraints.size();
  hard_count = std::min(hard_count, n);

  std::vector<Line> shuffled(n);
  {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::uint64_t state = 0x5DEECE66DULL ^ n;
    for (std::size_t i = n; i > 1; --i) {
      std::swap(order[i - 1], order[splitmix64(state) % i]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      shuffled[i] = to_line(constraints[order[i]]);
    }
  }

  LpResult out;
  if (solve_incremental(shuffled, max_speed, preferred, false, out.velocity) == n) {
    return out;
  }

  // Infeasible: rerun in insertion order so hard constraints come first.
  std::vector<Line> lines(n);
  std::transform(constraints.begin(), constraints.end(), lines.begin(), to_line);
  const std::size_t failed = solve_incremental(lines, max_speed, preferred, false, out.velocity);
  if (failed < n) {
    out.feasible = false;
    if (failed < hard_count) {
      // The hard constraints conflict among themselves: relax all of them
      // uniformly and ignore the rest.
      out.velocity = solve_lp(constraints.first(hard_count), preferred, max_speed, 0).velocity;
      return out;
    }
    minimize_max_violation(lines, hard_count, failed, max_speed, out.velocity);
  }
  return out;
}

}  // namespace navlearn
