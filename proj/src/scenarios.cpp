// Procedural generators for the eight benchmark layouts. All agents use a
// 0.5 m radius and 1.5 m/s maximum speed. Dimensions below are the project's
// own choices and are documented in README.md (scenario gallery).

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "navlearn/world.hpp"

namespace navlearn {
namespace {

constexpr double kRadius = 0.5;
constexpr double kMaxSpeed = 1.5;

class Builder {
 public:
  explicit Builder(std::string name) { s_.name = std::move(name); }

  void agent(Vec2 start, Vec2 goal) {
    s_.agents.push_back({static_cast<int>(s_.agents.size()), start, goal, kRadius, kMaxSpeed});
  }
  void wall(Vec2 a, Vec2 b) { s_.obstacles.push_back({a, b}); }
  void polyline(std::initializer_list<Vec2> pts) {
    const Vec2 *prev = nullptr;
    for (const Vec2 &p : pts) {
      if (prev != nullptr) {
        wall(*prev, p);
      }
      prev = &p;
    }
  }
  // Axis-aligned rectangle as four segments.
  void box(Vec2 lo, Vec2 hi) {
    polyline({lo, {hi.x, lo.y}, hi, {lo.x, hi.y}, lo});
  }

  Scenario done() {
    validate(s_);
    return std::move(s_);
  }

 private:
  Scenario s_;
};

void require(bool ok, std::string_view name, int n, const char *why) {
  if (!ok) {
    throw std::invalid_argument("scenario '" + std::string(name) + "' cannot host " +
                                std::to_string(n) + " agents: " + why);
  }
}

// 32 agents packed in front of a 1.6 m exit at the end of a 10 m wide hallway.
// Goals lie in the open area past the exit.
Scenario congested(int n) {
  require(n >= 1 && n <= 400, "congested", n, "supported range is 1..400");
  constexpr int kRows = 8;
  constexpr double kSpacing = 1.1;
  constexpr double kHalfWidth = 5.0;
  constexpr double kHalfDoor = 0.8;
  const int cols = (n + kRows - 1) / kRows;
  const double hall_len = 2.0 + kSpacing * cols;
  Builder b("congested");
  b.wall({-hall_len, kHalfWidth}, {0.0, kHalfWidth});
  b.wall({-hall_len, -kHalfWidth}, {0.0, -kHalfWidth});
  b.wall({0.0, -kHalfWidth}, {0.0, -kHalfDoor});
  b.wall({0.0, kHalfDoor}, {0.0, kHalfWidth});
  for (int k = 0; k < n; ++k) {
    const int c = k / kRows;
    const int r = k % kRows;
    const double y = (r - (kRows - 1) / 2.0) * kSpacing;
    const double x = -1.0 - kSpacing * c;
    b.agent({x, y}, {3.0 - x, y});
  }
  return b.done();
}

// Two groups on opposite sides of a 16 m corridor only 1.2 agent diameters
// wide, inside a 6 m deep room. Funnel walls lead into both ends.
Scenario deadlock(int n) {
  require(n >= 2 && n % 2 == 0 && n <= 40, "deadlock", n, "needs an even count in 2..40");
  constexpr double kHalfLen = 8.0;
  constexpr double kHalfCorr = 0.6;
  constexpr double kFunnel = 2.4;
  const int per_side = n / 2;
  const int depth = (per_side + 1) / 2;
  const double room_x = kHalfLen + 4.0 + 1.2 * depth + 2.0;
  constexpr double kRoomY = 3.0;
  Builder b("deadlock");
  b.box({-room_x, -kRoomY}, {room_x, kRoomY});
  for (double side : {-1.0, 1.0}) {
    b.wall({side * kHalfLen, kHalfCorr}, {side * (kHalfLen + kFunnel), kRoomY});
    b.wall({side * (kHalfLen + kFunnel), -kRoomY}, {side * kHalfLen, -kHalfCorr});
  }
  b.wall({-kHalfLen, kHalfCorr}, {kHalfLen, kHalfCorr});
  b.wall({-kHalfLen, -kHalfCorr}, {kHalfLen, -kHalfCorr});
  for (double side : {-1.0, 1.0}) {
    for (int k = 0; k < per_side; ++k) {
      const double x = side * (kHalfLen + 1.5 + 1.2 * (k / 2));
      const double y = (k % 2 == 0 ? -0.65 : 0.65) * side;
      const double gx = -side * (kHalfLen + 3.5 + 1.2 * (k / 2));
      b.agent({x, y}, {gx, y});
    }
  }
  return b.done();
}

// One agent heading right meets a wide group heading left,
// arranged in files of eight centred on the single agent's path.
Scenario incoming(int n) {
  require(n >= 2 && n <= 200, "incoming", n, "needs 2..200 agents");
  constexpr int kRows = 8;
  constexpr double kSpacing = 1.3;
  Builder b("incoming");
  b.agent({-8.0, 0.0}, {12.0, 0.0});
  const int group = n - 1;
  for (int k = 0; k < group; ++k) {
    const int c = k / kRows;
    const int r = k % kRows;
    const int in_file = std::min(kRows, group - c * kRows);
    const double x = 3.0 + kSpacing * c;
    const double y = (r - (in_file - 1) / 2.0) * kSpacing;
    b.agent({x, y}, {x - 20.0, y});
  }
  return b.done();
}

// Each agent's straight path runs into the middle of a square block.
Scenario blocks(int n) {
  require(n >= 1 && n <= 12, "blocks", n, "needs 1..12 agents");
  constexpr double kLane = 4.0;
  constexpr double kHalfBlock = 1.2;
  Builder b("blocks");
  for (int k = 0; k < n; ++k) {
    const double y = (k - (n - 1) / 2.0) * kLane;
    b.box({-kHalfBlock, y - kHalfBlock}, {kHalfBlock, y + kHalfBlock});
    b.agent({-8.0, y}, {8.0, y});
  }
  return b.done();
}

// Two groups swap ends of a 6 m wide corridor.
Scenario bidirectional(int n) {
  require(n >= 2 && n % 2 == 0 && n <= 120, "bidirectional", n, "needs an even count in 2..120");
  constexpr int kRows = 3;
  constexpr double kSpacing = 1.5;
  constexpr double kHalfWidth = 3.0;
  const int per_side = n / 2;
  const int cols = (per_side + kRows - 1) / kRows;
  const double start = 8.0;
  const double half_len = start + kSpacing * cols + 2.0;
  Builder b("bidirectional");
  b.wall({-half_len, kHalfWidth}, {half_len, kHalfWidth});
  b.wall({-half_len, -kHalfWidth}, {half_len, -kHalfWidth});
  for (double side : {-1.0, 1.0}) {
    for (int k = 0; k < per_side; ++k) {
      const int c = k / kRows;
      const int r = k % kRows;
      const double x = side * (start - 4.0 + kSpacing * c);
      const double y = (r - (kRows - 1) / 2.0) * kSpacing;
      b.agent({x, y}, {-side * (start + kSpacing * c), y});
    }
  }
  return b.done();
}

// Agents evenly spaced on a circle walk to the antipodal point.
Scenario circle(int n) {
  require(n >= 2 && n <= 1000, "circle", n, "needs 2..1000 agents");
  const double radius = std::max(5.0, n * 1.5 / (2.0 * std::numbers::pi));
  Builder b("circle");
  for (int k = 0; k < n; ++k) {
    const double a = 2.0 * std::numbers::pi * k / n;
    const Vec2 p{radius * std::cos(a), radius * std::sin(a)};
    b.agent(p, -p);
  }
  return b.done();
}

// Four streams cross a plus-shaped junction of two 7 m wide streets.
Scenario intersection(int n) {
  require(n >= 4 && n % 4 == 0 && n <= 400, "intersection", n, "needs a multiple of 4 in 4..400");
  constexpr double kHalfStreet = 3.5;
  constexpr int kLanes = 4;
  constexpr double kSpacing = 1.2;
  const int per_stream = n / 4;
  const int depth = (per_stream + kLanes - 1) / kLanes;
  const double first = 6.0;
  const double arm = first + kSpacing * depth + 8.0;
  Builder b("intersection");
  for (double sx : {-1.0, 1.0}) {
    for (double sy : {-1.0, 1.0}) {
      b.polyline({{sx * arm, sy * kHalfStreet},
                  {sx * kHalfStreet, sy * kHalfStreet},
                  {sx * kHalfStreet, sy * arm}});
    }
  }
  // Stream d travels along direction dirs[d]; lanes spread along its normal.
  const Vec2 dirs[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  for (int d = 0; d < 4; ++d) {
    const Vec2 dir = dirs[d];
    const Vec2 lateral = perp(dir);
    for (int k = 0; k < per_stream; ++k) {
      const int row = k / kLanes;
      const int lane = k % kLanes;
      const double along = -(first + kSpacing * row);
      const double across = (lane - (kLanes - 1) / 2.0) * kSpacing;
      const Vec2 start = along * dir + across * lateral;
      const Vec2 goal = (first + kSpacing * row + 2.0) * dir + across * lateral;
      b.agent(start, goal);
    }
  }
  return b.done();
}

// Random starts and goals inside a square room. Placement area grows with n
// to keep about 0.39 agents per square metre.
Scenario crowd(int n, std::uint64_t seed) {
  require(n >= 1 && n <= 2000, "crowd", n, "needs 1..2000 agents");
  const double margin = kRadius + 0.3;
  const double half = 0.8 * std::sqrt(static_cast<double>(n)) + margin;
  Builder b("crowd");
  b.box({-half, -half}, {half, half});
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-half + margin, half - margin);
  auto place = [&](std::vector<Vec2> &taken) {
    for (int attempt = 0; attempt < 100000; ++attempt) {
      const Vec2 p{coord(rng), coord(rng)};
      const bool clear = std::none_of(taken.begin(), taken.end(), [&](const Vec2 &q) {
        return norm(p - q) <= 2.0 * kRadius + 0.2;
      });
      if (clear) {
        taken.push_back(p);
        return p;
      }
    }
    throw std::invalid_argument("crowd: could not place agents without overlap");
  };
  std::vector<Vec2> starts;
  std::vector<Vec2> goals;
  for (int k = 0; k < n; ++k) {
    const Vec2 s = place(starts);
    const Vec2 g = place(goals);
    b.agent(s, g);
  }
  return b.done();
}

}  // namespace

const std::vector<std::string> &builtin_scenario_names() {
  static const std::vector<std::string> names = {"congested", "deadlock",      "incoming",
                                                 "blocks",    "bidirectional", "circle",
                                                 "intersection", "crowd"};
  return names;
}

int default_agent_count(std::string_view name) {
  if (name == "congested") return 32;
  if (name == "deadlock") return 10;
  if (name == "incoming") return 16;
  if (name == "blocks") return 5;
  if (name == "bidirectional") return 18;
  if (name == "circle") return 80;
  if (name == "intersection") return 80;
  if (name == "crowd") return 400;
  return 0;
}

Scenario builtin_scenario(std::string_view name, int n_agents, std::uint64_t seed) {
  const int n = n_agents > 0 ? n_agents : default_agent_count(name);
  if (name == "congested") return congested(n);
  if (name == "deadlock") return deadlock(n);
  if (name == "incoming") return incoming(n);
  if (name == "blocks") return blocks(n);
  if (name == "bidirectional") return bidirectional(n);
  if (name == "circle") return circle(n);
  if (name == "intersection") return intersection(n);
  if (name == "crowd") return crowd(n, seed);
  std::string valid;
  for (const std::string &s : builtin_scenario_names()) {
    valid += (valid.empty() ? "" : ", ") + s;
  }
  throw std::invalid_argument("unknown scenario '" + std::string(name) + "' (valid: " + valid + ")");
}

}  // namespace navlearn
