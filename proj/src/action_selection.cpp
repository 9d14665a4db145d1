#include "navlearn/action_selection.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace navlearn {

namespace {

constexpr double kPi = std::numbers::pi;

double deg(double rad) { return rad * 180.0 / kPi; }
double rad(double deg) { return deg * kPi / 180.0; }

ActionSet fan(std::initializer_list<double> degrees, double speed) {
  ActionSet set;
  for (double d : degrees) {
    set.actions.push_back({rad(d), speed});
  }
  set.goal_action_index = 0;
  return set;
}

}  // namespace

void validate(const ActionSet &set, double max_speed) {
  if (set.actions.empty()) {
    throw std::invalid_argument("action set is empty");
  }
  if (set.goal_action_index >= set.actions.size()) {
    throw std::invalid_argument("goal action index out of range");
  }
  if (set.actions[set.goal_action_index].angle_offset != 0.0) {
    throw std::invalid_argument("goal action must have a zero angle offset");
  }
  for (std::size_t i = 0; i < set.actions.size(); ++i) {
    const Action &a = set.actions[i];
    if (!std::isfinite(a.angle_offset) || a.angle_offset < -kPi || a.angle_offset > kPi) {
      throw std::invalid_argument("action " + std::to_string(i) + ": angle outside [-180, 180] deg");
    }
    if (!std::isfinite(a.speed) || a.speed < 0.0 || a.speed > max_speed) {
      throw std::invalid_argument("action " + std::to_string(i) + ": speed outside [0, " +
                                  std::to_string(max_speed) + "]");
    }
  }
}

ActionSet sample_action_set(double speed) {
  return fan({0.0, 45.0, 90.0, 135.0, -45.0, -90.0, -135.0, 180.0}, speed);
}

ActionSet goal_only_action_set(double speed) { return fan({0.0}, speed); }

ActionSet multi_scenario_action_set(double speed) {
  // Output of `navlearn optimize` over the five training layouts; see README.
  return fan({0.0, -99.49, 6.63, 152.81, 114.29}, speed);
}

ActionSet parse_action_set(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text.begin(), json_text.end());
  } catch (const nlohmann::json::parse_error &e) {
    throw std::invalid_argument(std::string("action set: ") + e.what());
  }
  if (!doc.is_array()) {
    throw std::invalid_argument("action set: expected a JSON array");
  }
  ActionSet set;
  bool have_goal = false;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto &item = doc[i];
    const std::string at = "action set entry " + std::to_string(i);
    if (!item.is_object() || item.size() != 2 || !item.contains("angle_deg") ||
        !item.contains("speed")) {
      throw std::invalid_argument(at + ": expected {\"angle_deg\", \"speed\"}");
    }
    if (!item["angle_deg"].is_number() || !item["speed"].is_number()) {
      throw std::invalid_argument(at + ": fields must be numbers");
    }
    const double a = item["angle_deg"].get<double>();
    const double s = item["speed"].get<double>();
    if (!have_goal && a == 0.0) {
      set.goal_action_index = i;
      have_goal = true;
    }
    set.actions.push_back({rad(a), s});
  }
  if (set.actions.empty()) {
    throw std::invalid_argument("action set is empty");
  }
  if (!have_goal) {
    throw std::invalid_argument("action set has no goal-directed (0 deg) action");
  }
  return set;
}

std::string format_action_set(const ActionSet &set) {
  nlohmann::json doc = nlohmann::json::array();
  for (const Action &a : set.actions) {
    doc.push_back({{"angle_deg", deg(a.angle_offset)}, {"speed", a.speed}});
  }
  return doc.dump(2) + "\n";
}

ActionSet load_action_set_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::invalid_argument("cannot open action set file '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_action_set(buf.str());
}

void save_action_set_file(const ActionSet &set, const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write action set file '" + path + "'");
  }
  out << format_action_set(set);
}

Vec2 preferred_velocity(const Action &action, const Vec2 &position, const Vec2 &goal) {
  const Vec2 to_goal = goal - position;
  if (norm_sq(to_goal) == 0.0) {
    return {};
  }
  return action.speed * rotated(normalized(to_goal), action.angle_offset);
}

double goal_reward(const Vec2 &executed, const Vec2 &position, const Vec2 &goal) {
  const Vec2 to_goal = goal - position;
  if (norm_sq(to_goal) == 0.0) {
    return 0.0;
  }
  return dot(executed, normalized(to_goal));
}

double polite_reward(const Vec2 &executed, const Vec2 &preferred) {
  return dot(executed, preferred);
}

double combined_reward(double goal, double polite, double gamma) {
  return (1.0 - gamma) * goal + gamma * polite;
}

RewardWindow::RewardWindow(std::size_t n_actions, double window_length)
    : entries_(n_actions), window_length_(window_length) {}

void RewardWindow::record(std::size_t action, double reward, double time) {
  if (action >= entries_.size()) {
    entries_.resize(action + 1);
  }
  entries_[action] = {reward, time, true};
}

void RewardWindow::values(double now, std::span<double> out) const {
  for (std::size_t a = 0; a < out.size(); ++a) {
    out[a] = 0.0;
    if (a < entries_.size()) {
      const Entry &e = entries_[a];
      if (e.sampled && now - e.time <= window_length_) {
        out[a] = e.reward;
      }
    }
  }
}

std::vector<double> RewardWindow::values(double now, std::size_t n_actions) const {
  std::vector<double> out(n_actions);
  values(now, std::span<double>(out));
  return out;
}

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::kSoftmax:
      return "softmax";
    case Strategy::kEpsilonGreedy:
      return "epsilon_greedy";
    case Strategy::kUcb:
      return "ucb";
  }
  return "softmax";
}

Strategy parse_strategy(std::string_view name) {
  if (name == "softmax") return Strategy::kSoftmax;
  if (name == "epsilon_greedy" || name == "epsilon") return Strategy::kEpsilonGreedy;
  if (name == "ucb") return Strategy::kUcb;
  throw std::invalid_argument("unknown strategy '" + std::string(name) +
                              "' (valid: softmax, epsilon_greedy, ucb)");
}

void SelectionConfig::validate() const {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw std::invalid_argument("temperature must be > 0");
  }
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw std::invalid_argument("epsilon must lie in [0, 1]");
  }
  if (!(gamma >= 0.0 && gamma < 1.0)) {
    throw std::invalid_argument("gamma must lie in [0, 1)");
  }
  if (!(window_length > 0.0) || !std::isfinite(window_length)) {
    throw std::invalid_argument("window length must be > 0");
  }
  if (!(ucb_c >= 0.0) || !std::isfinite(ucb_c)) {
    throw std::invalid_argument("ucb exploration constant must be >= 0");
  }
}

std::vector<double> softmax_probs(std::span<const double> values, double temperature) {
  std::vector<double> p(values.size());
  if (values.empty()) {
    return p;
  }
  const double top = *std::max_element(values.begin(), values.end());
  double total = 0.0;
  for (std::size_t a = 0; a < values.size(); ++a) {
    p[a] = std::exp((values[a] - top) / temperature);
    total += p[a];
  }
  for (double &x : p) {
    x /= total;
  }
  return p;
}

double uniform01(Rng &rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t argmax(std::span<const double> values) {
  return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
}

namespace {

// Inverse-CDF draw; avoids std::discrete_distribution so results do not
// depend on the standard library implementation.
std::size_t draw(std::span<const double> probs, Rng &rng) {
  const double u = uniform01(rng);
  double acc = 0.0;
  for (std::size_t a = 0; a < probs.size(); ++a) {
    acc += probs[a];
    if (u < acc) {
      return a;
    }
  }
  return probs.size() - 1;
}

std::size_t uniform_index(std::size_t n, Rng &rng) {
  const double u = uniform01(rng);
  return std::min(n - 1, static_cast<std::size_t>(u * static_cast<double>(n)));
}

}  // namespace

std::size_t select_action(std::span<const double> values, const SelectionConfig &cfg, Rng &rng,
                          std::span<const std::uint64_t> counts, std::uint64_t total_pulls) {
  switch (cfg.strategy) {
    case Strategy::kSoftmax: {
      const std::vector<double> p = softmax_probs(values, cfg.temperature);
      return draw(p, rng);
    }
    case Strategy::kEpsilonGreedy: {
      const double u = uniform01(rng);
      if (u < cfg.epsilon) {
        return uniform_index(values.size(), rng);
      }
      return argmax(values);
    }
    case Strategy::kUcb: {
      for (std::size_t a = 0; a < values.size(); ++a) {
        if (a >= counts.size() || counts[a] == 0) {
          return a;
        }
      }
      const double log_total = std::log(static_cast<double>(std::max<std::uint64_t>(total_pulls, 1)));
      std::size_t best = 0;
      double best_score = -std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < values.size(); ++a) {
        const double bonus =
            cfg.ucb_c * std::sqrt(2.0 * log_total / static_cast<double>(counts[a]));
        const double score = values[a] + bonus;
        if (score > best_score) {
          best_score = score;
          best = a;
        }
      }
      return best;
    }
  }
  return 0;
}

}  // namespace navlearn
