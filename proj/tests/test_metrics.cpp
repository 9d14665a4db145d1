#include <cmath>
#include <random>

#include "doctest.h"
#include "navlearn/engine.hpp"
#include "navlearn/metrics.hpp"
#include "navlearn/shortest_path.hpp"
#include "oracles.hpp"

using namespace navlearn;

TEST_CASE("ttime examples") {
  const std::vector<double> flat = {10, 10, 10};
  const std::vector<double> spread = {8, 10, 12};
  const std::vector<double> one = {5};
  CHECK(ttime(flat) == doctest::Approx(10.0));
  CHECK(ttime(spread) == doctest::Approx(16.0));
  CHECK(ttime(one) == doctest::Approx(5.0));
  CHECK_THROWS_AS(ttime(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("ttime properties") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(1.0, 100.0);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> t(1 + rng() % 30);
    for (double &x : t) x = u(rng);
    const double base = ttime(t);
    const MeanStdev ms = mean_stdev(t);
    CHECK(base >= ms.mean);
    CHECK(base == doctest::Approx(ms.mean + 3.0 * ms.stdev));
    const double c = u(rng);
    const double s = u(rng) / 10.0;
    std::vector<double> shifted = t, scaled = t;
    for (double &x : shifted) x += c;
    for (double &x : scaled) x *= s;
    CHECK(ttime(shifted) == doctest::Approx(base + c).epsilon(1e-9));
    CHECK(ttime(scaled) == doctest::Approx(base * s).epsilon(1e-9));
    if (t.size() > 1 && t[0] != t[1]) CHECK(base > ms.mean);
  }
}

TEST_CASE("min_ttime of obstacle-free layouts is the straight-line ttime") {
  Scenario s;
  s.name = "two";
  s.agents.push_back({0, {0, 0}, {15, 0}, 0.5, 1.5});
  CHECK(min_ttime(s) == doctest::Approx(10.0));
  s.agents.push_back({1, {0, 5}, {0, 20}, 0.5, 1.5});
  CHECK(min_ttime(s) == doctest::Approx(10.0));

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-30.0, 30.0);
  Scenario r;
  r.name = "scatter";
  std::vector<double> straight;
  for (int k = 0; k < 20; ++k) {
    const Vec2 start{3.0 * k, 0.0};
    const Vec2 goal{u(rng), u(rng)};
    r.agents.push_back({k, start, goal, 0.4, 1.2});
    straight.push_back(norm(goal - start) / 1.2);
  }
  CHECK(min_ttime(r) == ttime(straight));
}

TEST_CASE("detour around a wall matches the grid oracle") {
  Scenario s;
  s.name = "wall";
  s.agents.push_back({0, {0, 0}, {10, 0}, 0.5, 1.5});
  s.obstacles.push_back({{5, -1}, {5, 1}});
  const double planned = min_travel_times(s)[0] * 1.5;
  oracle::GridPlanner grid(s.obstacles, 0.5, {-2, -5}, {12, 5}, 0.05);
  const double reference = grid.distance({0, 0}, {10, 0});
  CHECK(planned > 10.0);
  CHECK(std::abs(planned - reference) / reference < 0.01);

  // Lower bound: the two tangent segments alone.
  const double tangent = std::sqrt(26.0 - 0.25);
  CHECK(planned >= 2.0 * tangent - 1e-9);
}

TEST_CASE("unreachable goal names the agent") {
  Scenario s;
  s.name = "boxed";
  s.agents.push_back({7, {0, 0}, {10, 0}, 0.5, 1.5});
  s.obstacles = {{{8, -2}, {12, -2}}, {{12, -2}, {12, 2}}, {{12, 2}, {8, 2}}, {{8, 2}, {8, -2}}};
  try {
    min_ttime(s);
    FAIL("expected an error");
  } catch (const std::runtime_error &e) {
    CHECK(std::string(e.what()).find("7") != std::string::npos);
  }
}

TEST_CASE("visibility graph agrees with grid Dijkstra on builtin layouts") {
  for (const std::string &name : builtin_scenario_names()) {
    const Scenario s = builtin_scenario(name);
    if (s.obstacles.empty()) continue;
    CAPTURE(name);
    Vec2 lo{1e9, 1e9}, hi{-1e9, -1e9};
    auto grow = [&](const Vec2 &p) {
      lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
      hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    };
    for (const AgentSpec &a : s.agents) {
      grow(a.start);
      grow(a.goal);
    }
    for (const Obstacle &o : s.obstacles) {
      grow(o.a);
      grow(o.b);
    }
    lo = lo - Vec2{3, 3};
    hi = hi + Vec2{3, 3};
    const double r = s.agents[0].radius;
    const ShortestPathPlanner planner(s.obstacles, r);
    const oracle::GridPlanner grid(s.obstacles, r, lo, hi, 0.1);
    const std::size_t n = s.agents.size();
    for (std::size_t k : {std::size_t{0}, n / 2, n - 1}) {
      const AgentSpec &a = s.agents[k];
      const double v = planner.distance(a.start, a.goal);
      const double g = grid.distance(a.start, a.goal);
      CAPTURE(a.id);
      CHECK(std::isfinite(v));
      CHECK(std::abs(v - g) / g < 0.01);
    }
  }
}

TEST_CASE("interaction overhead") {
  Scenario s;
  s.name = "single";
  s.agents.push_back({0, {0, 0}, {15, 0}, 0.5, 1.5});
  SimulationResult r;
  r.agent_ids = {0};
  r.arrival_times = {14.5 / 1.5 + 0.1};
  r.completed = true;
  r.time_cap = 300.0;
  const MetricsReport m = interaction_overhead(r, s);
  CHECK(m.completed);
  REQUIRE(m.interaction_overhead.has_value());
  CHECK(*m.interaction_overhead == doctest::Approx(0.1).epsilon(1e-9));
  CHECK(m.ttime - m.min_ttime == doctest::Approx(*m.interaction_overhead));
  CHECK(m.capped_overhead == doctest::Approx(*m.interaction_overhead));

  r.arrival_times = {std::nullopt};
  r.completed = false;
  const MetricsReport inc = interaction_overhead(r, s);
  CHECK_FALSE(inc.completed);
  CHECK_FALSE(inc.interaction_overhead.has_value());
  CHECK(inc.capped_overhead == doctest::Approx(300.0 - 14.5 / 1.5));
}
