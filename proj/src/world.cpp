#include "navlearn/world.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace navlearn {

using nlohmann::json;

Vec2 closest_point_on_segment(const Vec2 &p, const Obstacle &o) {
  const Vec2 ab = o.b - o.a;
  const double len_sq = norm_sq(ab);
  if (len_sq <= 0.0) {
    return o.a;
  }
  const double t = std::clamp(dot(p - o.a, ab) / len_sq, 0.0, 1.0);
  return o.a + t * ab;
}

double dist_point_segment(const Vec2 &p, const Obstacle &o) {
  return norm(p - closest_point_on_segment(p, o));
}

namespace {

bool segments_intersect(const Vec2 &p0, const Vec2 &p1, const Vec2 &q0, const Vec2 &q1) {
  const double d1 = det(p1 - p0, q0 - p0);
  const double d2 = det(p1 - p0, q1 - p0);
  const double d3 = det(q1 - q0, p0 - q0);
  const double d4 = det(q1 - q0, p1 - q0);
  return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
         ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

}  // namespace

double dist_segment_segment(const Vec2 &p0, const Vec2 &p1, const Vec2 &q0, const Vec2 &q1) {
  if (segments_intersect(p0, p1, q0, q1)) {
    return 0.0;
  }
  const Obstacle p{p0, p1};
  const Obstacle q{q0, q1};
  return std::min({dist_point_segment(p0, q), dist_point_segment(p1, q),
                   dist_point_segment(q0, p), dist_point_segment(q1, p)});
}

void validate(const Scenario &scenario) {
  std::set<int> ids;
  for (std::size_t i = 0; i < scenario.agents.size(); ++i) {
    const AgentSpec &a = scenario.agents[i];
    const std::string at = "/agents/" + std::to_string(i);
    if (!is_finite(a.start) || !is_finite(a.goal)) {
      throw ScenarioError(at, "non-finite coordinate");
    }
    if (!(a.radius > 0.0) || !std::isfinite(a.radius)) {
      throw ScenarioError(at + "/radius", "radius must be > 0");
    }
    if (!(a.max_speed > 0.0) || !std::isfinite(a.max_speed)) {
      throw ScenarioError(at + "/max_speed", "max_speed must be > 0");
    }
    if (!ids.insert(a.id).second) {
      throw ScenarioError(at + "/id", "duplicate agent id " + std::to_string(a.id));
    }
  }
  for (std::size_t k = 0; k < scenario.obstacles.size(); ++k) {
    const Obstacle &o = scenario.obstacles[k];
    if (!is_finite(o.a) || !is_finite(o.b)) {
      throw ScenarioError("/obstacles/" + std::to_string(k), "non-finite coordinate");
    }
    if (o.a == o.b) {
      throw ScenarioError("/obstacles/" + std::to_string(k) + "/endpoints",
                          "obstacle endpoints must be distinct");
    }
  }
  for (std::size_t i = 0; i < scenario.agents.size(); ++i) {
    const AgentSpec &a = scenario.agents[i];
    for (std::size_t j = i + 1; j < scenario.agents.size(); ++j) {
      const AgentSpec &b = scenario.agents[j];
      if (norm(a.start - b.start) <= a.radius + b.radius) {
        throw ScenarioError("/agents/" + std::to_string(j) + "/start",
                            "agent " + std::to_string(b.id) + " overlaps agent " +
                                std::to_string(a.id) + " at start");
      }
    }
    for (std::size_t k = 0; k < scenario.obstacles.size(); ++k) {
      if (dist_point_segment(a.start, scenario.obstacles[k]) <= a.radius) {
        throw ScenarioError("/agents/" + std::to_string(i) + "/start",
                            "agent " + std::to_string(a.id) + " penetrates obstacle " +
                                std::to_string(k) + " at start");
      }
    }
  }
}

namespace {

std::string line_column(std::string_view source, std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i < std::min(byte, source.size()); ++i) {
    if (source[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

void require_fields(const json &obj, const std::string &at,
                    std::initializer_list<std::string_view> fields) {
  if (!obj.is_object()) {
    throw ScenarioError(at, "expected an object");
  }
  for (const auto &[key, value] : obj.items()) {
    if (std::find(fields.begin(), fields.end(), key) == fields.end()) {
      throw ScenarioError(at + "/" + key, "unknown field");
    }
  }
  for (std::string_view f : fields) {
    if (!obj.contains(std::string(f))) {
      throw ScenarioError(at + "/" + std::string(f), "missing field");
    }
  }
}

double read_number(const json &v, const std::string &at) {
  if (!v.is_number()) {
    throw ScenarioError(at, "expected a number");
  }
  return v.get<double>();
}

Vec2 read_point(const json &v, const std::string &at) {
  if (!v.is_array() || v.size() != 2) {
    throw ScenarioError(at, "expected [x, y]");
  }
  return {read_number(v[0], at + "/0"), read_number(v[1], at + "/1")};
}

json point_json(const Vec2 &p) { return json::array({p.x, p.y}); }

}  // namespace

Scenario load_scenario(std::string_view source) {
  json doc;
  try {
    doc = json::parse(source.begin(), source.end());
  } catch (const json::parse_error &e) {
    throw ScenarioError(line_column(source, e.byte == 0 ? 0 : e.byte - 1), e.what());
  }
  require_fields(doc, "", {"name", "agents", "obstacles"});
  Scenario s;
  if (!doc["name"].is_string()) {
    throw ScenarioError("/name", "expected a string");
  }
  s.name = doc["name"].get<std::string>();
  if (!doc["agents"].is_array()) {
    throw ScenarioError("/agents", "expected an array");
  }
  for (std::size_t i = 0; i < doc["agents"].size(); ++i) {
    const json &a = doc["agents"][i];
    const std::string at = "/agents/" + std::to_string(i);
    require_fields(a, at, {"id", "start", "goal", "radius", "max_speed"});
    if (!a["id"].is_number_integer()) {
      throw ScenarioError(at + "/id", "expected an integer");
    }
    AgentSpec spec;
    spec.id = a["id"].get<int>();
    spec.start = read_point(a["start"], at + "/start");
    spec.goal = read_point(a["goal"], at + "/goal");
    spec.radius = read_number(a["radius"], at + "/radius");
    spec.max_speed = read_number(a["max_speed"], at + "/max_speed");
    s.agents.push_back(spec);
  }
  if (!doc["obstacles"].is_array()) {
    throw ScenarioError("/obstacles", "expected an array");
  }
  for (std::size_t k = 0; k < doc["obstacles"].size(); ++k) {
    const json &o = doc["obstacles"][k];
    const std::string at = "/obstacles/" + std::to_string(k);
    require_fields(o, at, {"endpoints"});
    const json &ends = o["endpoints"];
    if (!ends.is_array() || ends.size() != 2) {
      throw ScenarioError(at + "/endpoints", "expected [[x1, y1], [x2, y2]]");
    }
    s.obstacles.push_back(
        {read_point(ends[0], at + "/endpoints/0"), read_point(ends[1], at + "/endpoints/1")});
  }
  validate(s);
  return s;
}

std::string save_scenario(const Scenario &scenario) {
  json doc;
  doc["name"] = scenario.name;
  doc["agents"] = json::array();
  for (const AgentSpec &a : scenario.agents) {
    doc["agents"].push_back({{"id", a.id},
                             {"start", point_json(a.start)},
                             {"goal", point_json(a.goal)},
                             {"radius", a.radius},
                             {"max_speed", a.max_speed}});
  }
  doc["obstacles"] = json::array();
  for (const Obstacle &o : scenario.obstacles) {
    doc["obstacles"].push_back({{"endpoints", json::array({point_json(o.a), point_json(o.b)})}});
  }
  return doc.dump(2) + "\n";
}

Scenario load_scenario_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ScenarioError("", "cannot open scenario file '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_scenario(buf.str());
}

void save_scenario_file(const Scenario &scenario, const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write scenario file '" + path + "'");
  }
  out << save_scenario(scenario);
}

}  // namespace navlearn
