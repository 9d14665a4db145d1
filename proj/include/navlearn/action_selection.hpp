#ifndef NAVLEARN_ACTION_SELECTION_HPP_
#define NAVLEARN_ACTION_SELECTION_HPP_

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "navlearn/vec2.hpp"

namespace navlearn {

using Rng = std::mt19937_64;

// Uniform double in [0, 1) from the top 53 bits of one draw.
double uniform01(Rng &rng);

// A preferred-velocity template relative to the current goal direction.
struct Action {
  double angle_offset = 0.0;  // radians, counterclockwise, in [-pi, pi]
  double speed = 0.0;         // m/s

  friend bool operator==(const Action &, const Action &) = default;
};

// The arms available to an agent. goal_action_index points at the
// goal-directed (zero offset) action, which every valid set contains.
struct ActionSet {
  std::vector<Action> actions;
  std::size_t goal_action_index = 0;

  std::size_t size() const { return actions.size(); }
  const Action &operator[](std::size_t i) const { return actions[i]; }

  friend bool operator==(const ActionSet &, const ActionSet &) = default;
};

// Throws std::invalid_argument when the set is empty, the goal index is out of
// range or not zero-offset, or an action violates its bounds.
void validate(const ActionSet &set, double max_speed);

// Eight directions 45 degrees apart at `speed`, goal-directed action first.
ActionSet sample_action_set(double speed = 1.5);

// The goal-directed action alone; equivalent to plain reciprocal avoidance.
ActionSet goal_only_action_set(double speed = 1.5);

// Set learned offline over the congested, deadlock, incoming, blocks and
// circle layouts. Shipped as a fixed table.
ActionSet multi_scenario_action_set(double speed = 1.5);

// JSON array of {"angle_deg": a, "speed": s}. The first zero-angle entry is the
// goal action.
ActionSet parse_action_set(std::string_view json_text);
std::string format_action_set(const ActionSet &set);
ActionSet load_action_set_file(const std::string &path);
void save_action_set_file(const ActionSet &set, const std::string &path);

// Velocity of magnitude action.speed rotated by action.angle_offset from the
// goal direction. Zero when position == goal.
Vec2 preferred_velocity(const Action &action, const Vec2 &position, const Vec2 &goal);

// Projection of the executed velocity on the unit goal direction.
double goal_reward(const Vec2 &executed, const Vec2 &position, const Vec2 &goal);

// Agreement between executed and preferred velocity.
double polite_reward(const Vec2 &executed, const Vec2 &preferred);

// (1 - gamma) * goal + gamma * polite.
double combined_reward(double goal, double polite, double gamma);

// Last sampled reward per action, valid for window_length seconds after it
// was recorded. Expired or never-sampled actions value as exactly zero.
class RewardWindow {
 public:
  RewardWindow() = default;
  RewardWindow(std::size_t n_actions, double window_length);

  void record(std::size_t action, double reward, double time);
  double window_length() const { return window_length_; }

  // Fills values[a] for every action a < values.size().
  void values(double now, std::span<double> values) const;
  std::vector<double> values(double now, std::size_t n_actions) const;

 private:
  struct Entry {
    double reward = 0.0;
    double time = 0.0;
    bool sampled = false;
  };
  std::vector<Entry> entries_;
  double window_length_ = 2.0;
};

// Convenience wrapper matching the stateless formulation.
inline std::vector<double> action_values(const RewardWindow &window, double now,
                                         std::size_t n_actions) {
  return window.values(now, n_actions);
}

enum class Strategy { kSoftmax, kEpsilonGreedy, kUcb };

std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view name);

struct SelectionConfig {
  Strategy strategy = Strategy::kSoftmax;
  double temperature = 0.2;
  double epsilon = 0.1;
  double gamma = 0.4;
  double window_length = 2.0;  // s
  double ucb_c = 1.0;

  // Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

// Boltzmann distribution over values at the given temperature.
std::vector<double> softmax_probs(std::span<const double> values, double temperature);

// Lowest index among the maxima.
std::size_t argmax(std::span<const double> values);

// Draws an action index. counts/total_pulls are only read by UCB; an action
// with zero pulls is chosen first (lowest index).
std::size_t select_action(std::span<const double> values, const SelectionConfig &cfg, Rng &rng,
                          std::span<const std::uint64_t> counts = {},
                          std::uint64_t total_pulls = 0);

}  // namespace navlearn

#endif  // NAVLEARN_ACTION_SELECTION_HPP_
