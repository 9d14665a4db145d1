#include "navlearn/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "navlearn/experiment.hpp"
#include "navlearn/metrics.hpp"

namespace navlearn {

namespace {

double lerp_at(double from, double to, int iteration, int n) {
  if (n <= 1) return from;
  const double s = static_cast<double>(iteration - 1) / static_cast<double>(n - 1);
  return from + (to - from) * std::clamp(s, 0.0, 1.0);
}

double angular_distance(double a, double b) { return std::abs(wrap_angle(a - b)); }

// Density of the angle (and speed) an add move proposes from `set`.
double add_density(const ActionSet &set, double angle, double range, const McmcConfig &cfg) {
  int covering = 0;
  for (const Action &a : set.actions) {
    if (angular_distance(angle, a.angle_offset) <= range) ++covering;
  }
  double d = covering / (static_cast<double>(set.size()) * 2.0 * range);
  if (cfg.vary_speed) d /= cfg.speed;
  return d;
}

std::size_t pick_non_goal(const ActionSet &set, Rng &rng) {
  const std::size_t n = set.size() - 1;
  std::size_t k = std::min(n - 1, static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)));
  if (k >= set.goal_action_index) ++k;
  return k;
}

double draw_speed(const McmcConfig &cfg, Rng &rng) {
  return cfg.vary_speed ? cfg.speed * (1.0 - uniform01(rng)) : cfg.speed;
}

}  // namespace

void AnnealSchedule::validate() const {
  if (!(t_init > t_final && t_final > 0.0)) {
    throw std::invalid_argument("schedule needs t_init > t_final > 0");
  }
  if (n_iterations < 2) {
    throw std::invalid_argument("schedule needs at least 2 iterations");
  }
  if (evals_start < 1 || evals_end < 1) {
    throw std::invalid_argument("evaluation repetitions must be >= 1");
  }
  if (!(range_start > 0.0 && range_end > 0.0 && range_start <= std::numbers::pi &&
        range_end <= std::numbers::pi)) {
    throw std::invalid_argument("modification ranges must lie in (0, pi]");
  }
}

double AnnealSchedule::temperature(int iteration) const {
  return lerp_at(t_init, t_final, iteration, n_iterations);
}

double AnnealSchedule::modification_range(int iteration) const {
  return lerp_at(range_start, range_end, iteration, n_iterations);
}

int AnnealSchedule::evaluations(int iteration) const {
  return static_cast<int>(std::lround(lerp_at(evals_start, evals_end, iteration, n_iterations)));
}

void McmcConfig::validate() const {
  schedule.validate();
  if (weights.modify < 0.0 || weights.remove < 0.0 || weights.add < 0.0 ||
      weights.modify + weights.remove + weights.add <= 0.0) {
    throw std::invalid_argument("modification weights must be >= 0 with a positive sum");
  }
  if (max_set_size < 2) {
    throw std::invalid_argument("max_set_size must be >= 2");
  }
  if (!(speed > 0.0)) {
    throw std::invalid_argument("action speed must be > 0");
  }
}

double wrap_angle(double angle) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double a = std::fmod(angle, kTwoPi);
  if (a <= -std::numbers::pi) a += kTwoPi;
  if (a > std::numbers::pi) a -= kTwoPi;
  return a;
}

ActionSet initial_set(Rng &rng, double speed) {
  // u in [0, 1) maps onto (-pi, pi].
  const double angle = std::numbers::pi - 2.0 * std::numbers::pi * uniform01(rng);
  ActionSet set;
  set.actions = {{0.0, speed}, {angle, speed}};
  set.goal_action_index = 0;
  return set;
}

KindProbabilities kind_probabilities(std::size_t size, const McmcConfig &cfg) {
  KindProbabilities p;
  const bool has_other = size > 1;
  p.modify = has_other ? cfg.weights.modify : 0.0;
  p.remove = has_other ? cfg.weights.remove : 0.0;
  p.add = size < cfg.max_set_size ? cfg.weights.add : 0.0;
  const double total = p.modify + p.remove + p.add;
  if (total <= 0.0) {
    throw std::logic_error("no modification applies to this set");
  }
  p.modify /= total;
  p.remove /= total;
  p.add /= total;
  return p;
}

Modification select_modification(const ActionSet &set, int iteration, const McmcConfig &cfg,
                                  Rng &rng) {
  const KindProbabilities p = kind_probabilities(set.size(), cfg);
  const double range = cfg.schedule.modification_range(iteration);
  const double u = uniform01(rng);
  Modification m;
  if (u < p.modify) {
    m.kind = ModificationKind::kModify;
  } else if (u < p.modify + p.remove) {
    m.kind = ModificationKind::kRemove;
  } else {
    m.kind = ModificationKind::kAdd;
  }
  switch (m.kind) {
    case ModificationKind::kModify:
      m.target_index = pick_non_goal(set, rng);
      break;
    case ModificationKind::kRemove:
      m.target_index = pick_non_goal(set, rng);
      return m;
    case ModificationKind::kAdd:
      m.target_index = std::min(set.size() - 1, static_cast<std::size_t>(
                                                    uniform01(rng) * static_cast<double>(set.size())));
      break;
  }
  const double offset = range * (2.0 * uniform01(rng) - 1.0);
  m.new_angle = wrap_angle(set[m.target_index].angle_offset + offset);
  m.new_speed = draw_speed(cfg, rng);
  return m;
}

ActionSet apply_modification(const ActionSet &set, const Modification &m) {
  ActionSet out = set;
  switch (m.kind) {
    case ModificationKind::kModify:
      if (m.target_index == set.goal_action_index) {
        throw std::invalid_argument("the goal action cannot be modified");
      }
      out.actions.at(m.target_index) = {m.new_angle, m.new_speed};
      break;
    case ModificationKind::kRemove:
      if (m.target_index == set.goal_action_index) {
        throw std::invalid_argument("the goal action cannot be removed");
      }
      out.actions.erase(out.actions.begin() + static_cast<std::ptrdiff_t>(m.target_index));
      if (m.target_index < out.goal_action_index) --out.goal_action_index;
      break;
    case ModificationKind::kAdd:
      out.actions.push_back({m.new_angle, m.new_speed});
      break;
  }
  return out;
}

double proposal_ratio(const ActionSet &set, const Modification &m, int iteration,
                      const McmcConfig &cfg) {
  const double range = cfg.schedule.modification_range(iteration);
  const std::size_t n = set.size();
  switch (m.kind) {
    case ModificationKind::kModify:
      return 1.0;
    case ModificationKind::kAdd: {
      const double forward = kind_probabilities(n, cfg).add * add_density(set, m.new_angle, range, cfg);
      const double reverse = kind_probabilities(n + 1, cfg).remove / static_cast<double>(n);
      return reverse / forward;
    }
    case ModificationKind::kRemove: {
      const ActionSet smaller = apply_modification(set, m);
      const double forward = kind_probabilities(n, cfg).remove / static_cast<double>(n - 1);
      const double reverse =
          kind_probabilities(n - 1, cfg).add *
          add_density(smaller, set[m.target_index].angle_offset, range, cfg);
      return reverse / forward;
    }
  }
  return 1.0;
}

bool accept(double f_old, double f_new, double q, double temperature, Rng &rng) {
  if (!(temperature > 0.0)) {
    throw std::invalid_argument("acceptance temperature must be > 0");
  }
  const double u = uniform01(rng);
  return u < q * std::exp((f_old - f_new) / temperature);
}

double evaluate(const ActionSet &set, std::span<const Scenario> scenarios, int repetitions,
                std::uint64_t seed_base, const EngineConfig &engine, unsigned threads) {
  if (scenarios.empty()) {
    throw std::invalid_argument("evaluation needs at least one scenario");
  }
  if (repetitions < 1) {
    throw std::invalid_argument("evaluation needs at least one repetition");
  }
  const std::size_t reps = static_cast<std::size_t>(repetitions);
  const Policy policy = Policy::learning(set);
  std::vector<double> scores(scenarios.size() * reps, 0.0);
  parallel_for(scores.size(), threads, [&](std::size_t k) {
    EngineConfig cfg = engine;
    cfg.seed = seed_base + k % reps;
    const SimulationResult r = run(scenarios[k / reps], cfg, policy);
    scores[k] = r.arrival_times.empty() ? 0.0 : ttime(r.capped_times());
  });
  double sum = 0.0;
  for (double s : scores) sum += s;
  return sum / static_cast<double>(scores.size());
}

OptimizeResult optimize(std::span<const Scenario> scenarios, const McmcConfig &cfg,
                        const EngineConfig &engine, const ChainObserver &observer) {
  cfg.validate();
  const AnnealSchedule &sched = cfg.schedule;
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                    0x6d636d63U};
  Rng rng(seq);
  auto next_seed_base = [&rng] { return rng() >> 16; };

  OptimizeResult result;
  ActionSet current = initial_set(rng, cfg.speed);
  double f = evaluate(current, scenarios, sched.evaluations(1), next_seed_base(), engine, cfg.threads);
  result.initial = current;
  ActionSet best = current;
  double best_f = f;

  auto log = [&](const ChainEntry &e) {
    result.chain.push_back(e);
    if (observer) observer(e);
  };
  log({0, f, true, current.size(), sched.temperature(1), best_f});

  for (int i = 1; i <= sched.n_iterations; ++i) {
    const Modification m = select_modification(current, i, cfg, rng);
    const ActionSet proposal = apply_modification(current, m);
    const double q = proposal_ratio(current, m, i, cfg);
    const double f_new =
        evaluate(proposal, scenarios, sched.evaluations(i), next_seed_base(), engine, cfg.threads);
    if (f_new < best_f) {
      best = proposal;
      best_f = f_new;
    }
    const double temperature = sched.temperature(i);
    const bool accepted = accept(f, f_new, q, temperature, rng);
    if (accepted) {
      current = proposal;
      f = f_new;
    }
    log({i, f_new, accepted, proposal.size(), temperature, best_f});
  }

  const std::uint64_t final_seeds = next_seed_base();
  result.best_f = evaluate(best, scenarios, sched.evals_end, final_seeds, engine, cfg.threads);
  result.initial_f =
      evaluate(result.initial, scenarios, sched.evals_end, final_seeds, engine, cfg.threads);
  result.best = best;
  if (result.initial_f < result.best_f) {
    result.best = result.initial;
    result.best_f = result.initial_f;
  }
  return result;
}

void write_chain_csv(std::ostream &out, std::span<const ChainEntry> chain) {
  out << "iteration,F,accepted,set_size,temperature\n";
  for (const ChainEntry &e : chain) {
    out << e.iteration << ',' << format_number(e.f) << ',' << (e.accepted ? 1 : 0) << ','
        << e.set_size << ',' << format_number(e.temperature) << '\n';
  }
}

}  // namespace navlearn
