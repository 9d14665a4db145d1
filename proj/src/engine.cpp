#include "navlearn/engine.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "navlearn/orca.hpp"

namespace navlearn {

namespace {

enum StreamTag : std::uint32_t { kNoiseTag = 1, kTimingTag = 2, kSelectTag = 3 };

Rng make_stream(std::uint64_t seed, int agent_id, StreamTag tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(agent_id), static_cast<std::uint32_t>(tag)};
  return Rng(seq);
}

double gaussian(Rng &rng) {
  // Box-Muller; keeps the stream layout independent of the standard library.
  const double u1 = 1.0 - uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

void require(bool ok, const char *message) {
  if (!ok) {
    throw std::invalid_argument(message);
  }
}

}  // namespace

void EngineConfig::validate() const {
  require(dt > 0.0 && std::isfinite(dt), "dt must be > 0");
  require(sense_radius_agents > 0.0, "agent sensing radius must be > 0");
  require(sense_radius_obstacles >= 0.0, "obstacle sensing radius must be >= 0");
  require(max_neighbors >= 1, "max_neighbors must be >= 1");
  require(agent_horizon > 0.0 && obstacle_horizon > 0.0, "horizons must be > 0");
  require(decision_period_mean > 0.0, "decision period must be > 0");
  require(decision_jitter >= 0.0 && decision_jitter < 1.0, "decision jitter must lie in [0, 1)");
  require(pref_noise >= 0.0 && std::isfinite(pref_noise), "preferred-velocity noise must be >= 0");
  require(actuator_failure_prob >= 0.0 && actuator_failure_prob <= 1.0,
          "actuator failure probability must lie in [0, 1]");
  require(time_cap >= 0.0 && std::isfinite(time_cap), "time cap must be > 0 (or 0 for automatic)");
  selection.validate();
}

double default_time_cap(const Scenario &scenario) {
  double longest = 0.0;
  for (const AgentSpec &a : scenario.agents) {
    longest = std::max(longest, norm(a.goal - a.start) / a.max_speed);
  }
  return std::max(300.0, 4.0 * longest);
}

Policy Policy::learning(ActionSet actions) {
  Policy p;
  p.kind = Kind::kLearning;
  p.actions = std::move(actions);
  return p;
}

Policy Policy::orca_only(double speed) { return learning(goal_only_action_set(speed)); }

Policy Policy::random_action(double period, double speed) {
  Policy p;
  p.kind = Kind::kRandomAction;
  p.actions = sample_action_set(speed);
  p.random_period = period;
  return p;
}

void Policy::validate() const {
  if (kind == Kind::kRandomAction && !(random_period > 0.0)) {
    throw std::invalid_argument("random-action period must be > 0");
  }
  if (actions.actions.empty()) {
    throw std::invalid_argument("policy has no actions");
  }
}

std::vector<double> SimulationResult::capped_times() const {
  std::vector<double> out;
  out.reserve(arrival_times.size());
  for (const auto &t : arrival_times) {
    out.push_back(t.value_or(time_cap));
  }
  return out;
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

TraceWriter::TraceWriter(std::ostream &out, std::size_t every)
    : out_(out), every_(std::max<std::size_t>(every, 1)) {
  out_ << "t,agent_id,x,y,vx,vy,action_id\n";
}

void TraceWriter::write(std::uint64_t step, double t, std::span<const AgentState> agents) {
  if (step % every_ != 0) {
    return;
  }
  std::string line;
  for (const AgentState &a : agents) {
    if (a.arrived && a.arrival_time < t) {
      continue;
    }
    line.clear();
    line += format_number(t);
    line += ',';
    line += std::to_string(a.spec.id);
    for (double v : {a.position.x, a.position.y, a.velocity.x, a.velocity.y}) {
      line += ',';
      line += format_number(v);
    }
    line += ',';
    line += std::to_string(a.current_action);
    line += '\n';
    out_ << line;
  }
}

Simulation::Simulation(const Scenario &scenario, const EngineConfig &cfg, const Policy &policy)
    : scenario_(scenario), cfg_(cfg), policy_(policy) {
  validate(scenario_);
  cfg_.validate();
  policy_.validate();
  time_cap_ = cfg_.time_cap > 0.0 ? cfg_.time_cap : default_time_cap(scenario_);
  cell_ = cfg_.sense_radius_agents;

  const std::size_t n_actions = policy_.actions.size();
  agents_.reserve(scenario_.agents.size());
  streams_.reserve(scenario_.agents.size());
  for (const AgentSpec &spec : scenario_.agents) {
    AgentState a;
    a.spec = spec;
    a.position = spec.start;
    a.current_action = policy_.actions.goal_action_index;
    a.window = RewardWindow(n_actions, cfg_.selection.window_length);
    a.pulls.assign(n_actions, 0);
    Streams s{make_stream(cfg_.seed, spec.id, kNoiseTag), make_stream(cfg_.seed, spec.id, kTimingTag),
              make_stream(cfg_.seed, spec.id, kSelectTag)};
    // First decision at a random offset so agents do not decide in lockstep.
    a.next_decision_time =
        uniform01(s.timing) * cfg_.decision_period_mean * (1.0 + cfg_.decision_jitter);
    if (policy_.kind == Policy::Kind::kRandomAction) {
      a.next_random_time = uniform01(s.timing) * policy_.random_period;
    }
    if (norm(spec.goal - spec.start) <= spec.radius) {
      a.arrived = true;
      a.arrival_time = 0.0;
    }
    agents_.push_back(std::move(a));
    streams_.push_back(std::move(s));
  }
}

bool Simulation::done() const {
  if (time_ >= time_cap_ - 1e-9) {
    return true;
  }
  return std::all_of(agents_.begin(), agents_.end(), [](const AgentState &a) { return a.arrived; });
}

double Simulation::next_interval(Rng &rng) const {
  const double spread = cfg_.decision_jitter * cfg_.decision_period_mean;
  return cfg_.decision_period_mean - spread + 2.0 * spread * uniform01(rng);
}

void Simulation::decide(std::size_t i) {
  AgentState &a = agents_[i];
  Streams &s = streams_[i];
  if (time_ + 1e-9 < a.next_decision_time) {
    return;
  }
  ++a.decisions;
  const bool failed = uniform01(s.timing) < cfg_.actuator_failure_prob;
  a.next_decision_time += next_interval(s.timing);
  if (failed) {
    return;
  }
  const std::size_t n = policy_.actions.size();
  if (policy_.kind == Policy::Kind::kRandomAction) {
    if (time_ + 1e-9 >= a.next_random_time) {
      a.current_action = std::min(n - 1, static_cast<std::size_t>(uniform01(s.select) * n));
      while (a.next_random_time <= time_ + 1e-9) a.next_random_time += policy_.random_period;
    } else {
      a.current_action = policy_.actions.goal_action_index;
    }
  } else {
    const std::vector<double> values = a.window.values(time_, n);
    a.current_action = select_action(values, cfg_.selection, s.select, a.pulls, a.total_pulls);
  }
  ++a.pulls[a.current_action];
  ++a.total_pulls;
}

void Simulation::rebuild_grid() {
  double min_x = 0.0, min_y = 0.0, max_x = 0.0, max_y = 0.0;
  bool any = false;
  for (const AgentState &a : agents_) {
    if (a.arrived) continue;
    if (!any) {
      min_x = max_x = a.position.x;
      min_y = max_y = a.position.y;
      any = true;
    } else {
      min_x = std::min(min_x, a.position.x);
      max_x = std::max(max_x, a.position.x);
      min_y = std::min(min_y, a.position.y);
      max_y = std::max(max_y, a.position.y);
    }
  }
  grid_min_x_ = min_x;
  grid_min_y_ = min_y;
  grid_w_ = any ? static_cast<int>((max_x - min_x) / cell_) + 1 : 0;
  grid_h_ = any ? static_cast<int>((max_y - min_y) / cell_) + 1 : 0;
  const std::size_t cells = static_cast<std::size_t>(grid_w_) * grid_h_;
  cell_start_.assign(cells + 1, 0);
  auto cell_of = [&](const Vec2 &p) {
    const int cx = std::min(grid_w_ - 1, static_cast<int>((p.x - grid_min_x_) / cell_));
    const int cy = std::min(grid_h_ - 1, static_cast<int>((p.y - grid_min_y_) / cell_));
    return static_cast<std::size_t>(cy) * grid_w_ + cx;
  };
  for (const AgentState &a : agents_) {
    if (!a.arrived) ++cell_start_[cell_of(a.position) + 1];
  }
  for (std::size_t c = 0; c < cells; ++c) cell_start_[c + 1] += cell_start_[c];
  cell_items_.assign(cell_start_.back(), 0);
  std::vector<std::uint32_t> fill(cell_start_.begin(), cell_start_.end() - 1);
  for (std::size_t j = 0; j < agents_.size(); ++j) {
    if (!agents_[j].arrived) cell_items_[fill[cell_of(agents_[j].position)]++] = static_cast<std::uint32_t>(j);
  }
}

void Simulation::gather_neighbors(std::size_t i, std::vector<std::size_t> &nearest,
                                  std::vector<std::size_t> &close) const {
  nearest.clear();
  close.clear();
  const AgentState &a = agents_[i];
  const Vec2 p = a.position;
  const double range_sq = cfg_.sense_radius_agents * cfg_.sense_radius_agents;
  const int cx = static_cast<int>((p.x - grid_min_x_) / cell_);
  const int cy = static_cast<int>((p.y - grid_min_y_) / cell_);
  thread_local std::vector<std::pair<double, std::size_t>> found;
  found.clear();
  for (int y = std::max(0, cy - 1); y <= std::min(grid_h_ - 1, cy + 1); ++y) {
    for (int x = std::max(0, cx - 1); x <= std::min(grid_w_ - 1, cx + 1); ++x) {
      const std::size_t c = static_cast<std::size_t>(y) * grid_w_ + x;
      for (std::uint32_t k = cell_start_[c]; k < cell_start_[c + 1]; ++k) {
        const std::size_t j = cell_items_[k];
        if (j == i) continue;
        const double d = norm_sq(agents_[j].position - p);
        if (d < range_sq) found.emplace_back(d, j);
      }
    }
  }
  const std::size_t keep = std::min(found.size(), cfg_.max_neighbors);
  std::partial_sort(found.begin(), found.begin() + static_cast<std::ptrdiff_t>(keep), found.end());
  for (std::size_t k = 0; k < keep; ++k) nearest.push_back(found[k].second);
  // Anyone who could touch us within one step, regardless of the neighbor cap.
  for (const auto &[d_sq, j] : found) {
    const AgentState &b = agents_[j];
    const double reach = a.spec.radius + b.spec.radius + (a.spec.max_speed + b.spec.max_speed) * cfg_.dt;
    if (d_sq < reach * reach) close.push_back(j);
  }
}

void Simulation::step() {
  const double dt = cfg_.dt;
  rebuild_grid();

  for (std::size_t i = 0; i < agents_.size(); ++i) {
    if (!agents_[i].arrived) decide(i);
  }

  struct Update {
    Vec2 velocity;
    Vec2 v_pref;
    bool infeasible = false;
  };
  std::vector<Update> updates(agents_.size());
  std::vector<HalfPlane> planes;
  std::vector<std::size_t> neighbors;
  std::vector<std::size_t> close;

  for (std::size_t i = 0; i < agents_.size(); ++i) {
    const AgentState &a = agents_[i];
    if (a.arrived) continue;
    Vec2 v_pref = preferred_velocity(policy_.actions[a.current_action], a.position, a.spec.goal);
    if (cfg_.pref_noise > 0.0) {
      Rng &noise = streams_[i].noise;
      const double nx = gaussian(noise);
      const double ny = gaussian(noise);
      v_pref += cfg_.pref_noise * Vec2{nx, ny};
    }

    planes.clear();
    for (const Obstacle &o : scenario_.obstacles) {
      if (dist_point_segment(a.position, o) - a.spec.radius > cfg_.sense_radius_obstacles) {
        continue;
      }
      if (auto c = obstacle_halfplane(a.position, a.velocity, a.spec.radius, a.spec.max_speed, o,
                                      cfg_.obstacle_horizon, dt)) {
        planes.push_back(c->plane);
      }
    }
    // Hard block: obstacles, then a gap-sharing guard against every agent
    // within one step of contact. Soft block: the reciprocal constraints.
    gather_neighbors(i, neighbors, close);
    for (std::size_t j : close) {
      const AgentState &b = agents_[j];
      planes.push_back(contact_halfplane(b.position - a.position, a.spec.radius + b.spec.radius, dt));
    }
    const std::size_t hard = planes.size();
    for (std::size_t j : neighbors) {
      const AgentState &b = agents_[j];
      const NeighborView view{b.position - a.position, a.velocity - b.velocity,
                              a.spec.radius + b.spec.radius, b.velocity};
      planes.push_back(agent_halfplane(view, cfg_.agent_horizon, dt).plane);
    }
    const LpResult lp = solve_lp(planes, v_pref, a.spec.max_speed, hard);
    Vec2 v = lp.velocity;
    const double speed = norm(v);
    if (speed > a.spec.max_speed) {
      v = v * (a.spec.max_speed / speed);
    }
    updates[i] = {v, v_pref, !lp.feasible};
  }

  const double t_next = static_cast<double>(steps_ + 1) * dt;
  const double gamma = cfg_.selection.gamma;
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    AgentState &a = agents_[i];
    if (a.arrived) continue;
    const Update &u = updates[i];
    const double reward = combined_reward(goal_reward(u.velocity, a.position, a.spec.goal),
                                          polite_reward(u.velocity, u.v_pref), gamma);
    a.window.record(a.current_action, reward, t_next);
    a.velocity = u.velocity;
    a.v_pref = u.v_pref;
    a.position += u.velocity * dt;
    a.infeasible_last_step = u.infeasible;
    if (u.infeasible) ++infeasible_;
    if (norm(a.position - a.spec.goal) <= a.spec.radius) {
      a.arrived = true;
      a.arrival_time = t_next;
    }
  }
  ++steps_;
  time_ = t_next;
}

SimulationResult run(const Scenario &scenario, const EngineConfig &cfg, const Policy &policy,
                     TraceWriter *trace, const StepObserver &observer) {
  Simulation sim(scenario, cfg, policy);
  SimulationResult result;
  result.time_cap = sim.time_cap();
  if (trace != nullptr) {
    trace->write(0, 0.0, sim.agents());
  }
  double compute = 0.0;
  while (!sim.done()) {
    for (const AgentState &a : sim.agents()) {
      if (!a.arrived) ++result.agent_steps;
    }
    const auto t0 = std::chrono::steady_clock::now();
    sim.step();
    compute += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (trace != nullptr) {
      trace->write(sim.step_count(), sim.time(), sim.agents());
    }
    if (observer) {
      observer(sim);
    }
  }
  result.compute_seconds = compute;
  result.steps = sim.step_count();
  result.end_time = sim.time();
  result.infeasible_solves = sim.infeasible_solves();
  result.completed = true;
  for (const AgentState &a : sim.agents()) {
    result.agent_ids.push_back(a.spec.id);
    if (a.arrived) {
      result.arrival_times.emplace_back(a.arrival_time);
    } else {
      result.arrival_times.emplace_back(std::nullopt);
      result.completed = false;
    }
  }
  return result;
}

}  // namespace navlearn
