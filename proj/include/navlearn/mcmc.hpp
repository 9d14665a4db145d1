#ifndef NAVLEARN_MCMC_HPP_
#define NAVLEARN_MCMC_HPP_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "navlearn/action_selection.hpp"
#include "navlearn/engine.hpp"
#include "navlearn/world.hpp"

namespace navlearn {

// Linear annealing of temperature, proposal range and evaluation repetitions
// over iterations 1..n_iterations.
struct AnnealSchedule {
  double t_init = 2.0;   // in units of F (seconds)
  double t_final = 0.05;
  int n_iterations = 300;
  int evals_start = 3;
  int evals_end = 10;
  double range_start = 1.0471975511965976;  // 60 degrees
  double range_end = 0.17453292519943295;   // 10 degrees

  void validate() const;

  double temperature(int iteration) const;
  double modification_range(int iteration) const;
  int evaluations(int iteration) const;
};

struct ModificationWeights {
  double modify = 0.6;
  double remove = 0.2;
  double add = 0.2;
};

struct McmcConfig {
  AnnealSchedule schedule;
  ModificationWeights weights;
  std::size_t max_set_size = 12;
  double speed = 1.5;         // speed of every action unless vary_speed
  bool vary_speed = false;    // modify/add also draw a speed in (0, speed]
  std::uint64_t seed = 0;
  unsigned threads = 1;       // concurrent runs inside one evaluation

  void validate() const;
};

enum class ModificationKind { kModify, kRemove, kAdd };

struct Modification {
  ModificationKind kind = ModificationKind::kModify;
  std::size_t target_index = 0;  // action modified, removed, or the add anchor
  double new_angle = 0.0;        // modify/add
  double new_speed = 0.0;        // modify/add
};

// Wraps to (-pi, pi].
double wrap_angle(double angle);

// {goal action, one action at a uniformly random angle}, both at full speed.
ActionSet initial_set(Rng &rng, double speed = 1.5);

// Probability of each kind for a set of `size` actions, after dropping the
// kinds that cannot apply (no removable or modifiable action, or a full set).
struct KindProbabilities {
  double modify = 0.0;
  double remove = 0.0;
  double add = 0.0;
};
KindProbabilities kind_probabilities(std::size_t size, const McmcConfig &cfg);

// The goal action is never modified or removed. Angles are drawn uniformly
// within +-range of the target's angle and wrapped.
Modification select_modification(const ActionSet &set, int iteration, const McmcConfig &cfg,
                                  Rng &rng);

ActionSet apply_modification(const ActionSet &set, const Modification &m);

// Reverse over forward proposal density for the move set -> apply(set, m).
double proposal_ratio(const ActionSet &set, const Modification &m, int iteration,
                      const McmcConfig &cfg);

// Metropolis-Hastings test: u < q * exp((f_old - f_new) / temperature).
bool accept(double f_old, double f_new, double q, double temperature, Rng &rng);

// Mean ttime over `repetitions` ALAN runs of every scenario, seeds
// seed_base, seed_base + 1, ... Unfinished agents count as arriving at the
// time cap.
double evaluate(const ActionSet &set, std::span<const Scenario> scenarios, int repetitions,
                std::uint64_t seed_base, const EngineConfig &engine, unsigned threads = 1);

struct ChainEntry {
  int iteration = 0;     // 0 for the initial set
  double f = 0.0;        // evaluation of the proposal
  bool accepted = false;
  std::size_t set_size = 0;
  double temperature = 0.0;
  double best_f = 0.0;   // best proposal seen so far
};

struct OptimizeResult {
  ActionSet best;
  double best_f = 0.0;       // final re-evaluation
  ActionSet initial;
  double initial_f = 0.0;    // final re-evaluation
  std::vector<ChainEntry> chain;
};

using ChainObserver = std::function<void(const ChainEntry &)>;

// Runs the chain and returns the best set seen. Both the best and the initial
// set are re-evaluated at evals_end repetitions on common seeds; the initial
// set wins if it scores lower there.
OptimizeResult optimize(std::span<const Scenario> scenarios, const McmcConfig &cfg,
                        const EngineConfig &engine, const ChainObserver &observer = {});

// `iteration,F,accepted,set_size,temperature`
void write_chain_csv(std::ostream &out, std::span<const ChainEntry> chain);

}  // namespace navlearn

#endif  // NAVLEARN_MCMC_HPP_
