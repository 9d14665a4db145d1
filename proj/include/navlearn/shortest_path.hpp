#ifndef NAVLEARN_SHORTEST_PATH_HPP_
#define NAVLEARN_SHORTEST_PATH_HPP_

#include <cstddef>
#include <vector>

#include "navlearn/world.hpp"

namespace navlearn {

// Shortest paths for a disc of radius `clearance` among segment obstacles.
// Each segment is inflated into a capsule; the round caps are replaced by
// circumscribed polygons, so reported lengths may exceed the exact value by
// at most a factor 1 / cos(pi / sides) on the curved parts.
//
// The visibility graph between cap vertices is built once; queries only add
// their two endpoints.
class ShortestPathPlanner {
 public:
  ShortestPathPlanner(std::vector<Obstacle> obstacles, double clearance, int sides = 32);

  // Length of the shortest collision-free path, or +infinity if none exists.
  double distance(const Vec2 &from, const Vec2 &to) const;

  std::size_t node_count() const { return nodes_.size(); }

 private:
  bool clear(const Vec2 &a, const Vec2 &b) const;
  bool free_point(const Vec2 &p) const;

  std::vector<Obstacle> obstacles_;
  double clearance_;
  std::vector<Vec2> nodes_;
  std::vector<std::vector<std::pair<std::size_t, double>>> adjacency_;
};

}  // namespace navlearn

#endif  // NAVLEARN_SHORTEST_PATH_HPP_
