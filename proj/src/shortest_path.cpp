#include "navlearn/shortest_path.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <queue>

namespace navlearn {

namespace {

// Slack for points that sit exactly on a capsule boundary.
constexpr double kTolerance = 1e-9;

}  // namespace

ShortestPathPlanner::ShortestPathPlanner(std::vector<Obstacle> obstacles, double clearance,
                                         int sides)
    : obstacles_(std::move(obstacles)), clearance_(clearance) {
  std::vector<Vec2> corners;
  for (const Obstacle &o : obstacles_) {
    for (const Vec2 &p : {o.a, o.b}) {
      if (std::find(corners.begin(), corners.end(), p) == corners.end()) {
        corners.push_back(p);
      }
    }
  }
  // Vertices of a regular polygon circumscribing each cap; a little extra
  // radius keeps the polygon sides strictly outside the capsule.
  const double outer = clearance_ / std::cos(std::numbers::pi / sides) * (1.0 + 1e-9) + 1e-9;
  for (const Vec2 &c : corners) {
    for (int k = 0; k < sides; ++k) {
      const double angle = 2.0 * std::numbers::pi * (k + 0.5) / sides;
      const Vec2 p = c + outer * Vec2{std::cos(angle), std::sin(angle)};
      if (free_point(p)) {
        nodes_.push_back(p);
      }
    }
  }
  adjacency_.resize(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    for (std::size_t j = i + 1; j < nodes_.size(); ++j) {
      if (clear(nodes_[i], nodes_[j])) {
        const double d = norm(nodes_[i] - nodes_[j]);
        adjacency_[i].emplace_back(j, d);
        adjacency_[j].emplace_back(i, d);
      }
    }
  }
}

bool ShortestPathPlanner::free_point(const Vec2 &p) const {
  return std::all_of(obstacles_.begin(), obstacles_.end(), [&](const Obstacle &o) {
    return dist_point_segment(p, o) >= clearance_ - kTolerance;
  });
}

bool ShortestPathPlanner::clear(const Vec2 &a, const Vec2 &b) const {
  return std::all_of(obstacles_.begin(), obstacles_.end(), [&](const Obstacle &o) {
    return dist_segment_segment(a, b, o.a, o.b) >= clearance_ - kTolerance;
  });
}

double ShortestPathPlanner::distance(const Vec2 &from, const Vec2 &to) const {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  if (clear(from, to)) {
    return norm(to - from);
  }
  // Node ids: graph nodes, then `from`, then `to`.
  const std::size_t n = nodes_.size();
  const std::size_t source = n;
  const std::size_t target = n + 1;
  std::vector<double> to_target(n, kInf);
  std::vector<double> best(n + 2, kInf);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  for (std::size_t i = 0; i < n; ++i) {
    if (clear(nodes_[i], to)) {
      to_target[i] = norm(to - nodes_[i]);
    }
    if (clear(from, nodes_[i])) {
      best[i] = norm(nodes_[i] - from);
      open.emplace(best[i], i);
    }
  }
  best[source] = 0.0;
  while (!open.empty()) {
    const auto [d, u] = open.top();
    open.pop();
    if (u == target) {
      return d;
    }
    if (d > best[u]) {
      continue;
    }
    if (to_target[u] < kInf && d + to_target[u] < best[target]) {
      best[target] = d + to_target[u];
      open.emplace(best[target], target);
    }
    for (const auto &[v, w] : adjacency_[u]) {
      if (d + w < best[v]) {
        best[v] = d + w;
        open.emplace(best[v], v);
      }
    }
  }
  return best[target];
}

}  // namespace navlearn
