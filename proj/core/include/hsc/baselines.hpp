#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "hsc/env.hpp"
#include "hsc/ppo.hpp"

namespace hsc {

// Time-expanded activation plan: T slices of |C|+|W| bits, time-major.
// This is the decision space the non-RL optimizers search; the per-step
// amount decisions stay stochastic inside the environment.
struct Schedule {
  std::vector<std::uint8_t> bits;

  static std::size_t bit_count(std::size_t horizon, std::size_t n_centers,
                               std::size_t n_warehouses) {
    return horizon * (n_centers + n_warehouses);
  }
};

// Splits slice t of the schedule into an environment action.
Action decode(const Schedule& schedule, std::size_t t, std::size_t n_centers,
              std::size_t n_warehouses);

// Packs a per-step action sequence into one schedule.
Schedule encode(const std::vector<Action>& actions);

// Episode totals plus the per-step series for reporting.
struct CandidateScore {
  double total_efficiency = 0.0;
  double total_cost = 0.0;
  double total_reward = 0.0;
  std::vector<StepMetrics> series;
};

// Rolls one episode under the schedule. The environment stream is seeded
// by eval_seed alone, so every candidate in one optimizer run sees the
// same random numbers (common random numbers).
CandidateScore evaluate_candidate(const Schedule& schedule,
                                  const NetworkInstance& instance,
                                  const DemandSeries& series,
                                  std::uint64_t eval_seed,
                                  const EnvConfig& env_config = {});

struct FrontMember {
  Schedule schedule;
  CandidateScore score;
};
using ParetoFront = std::vector<FrontMember>;

struct ObjectivePoint {
  double efficiency = 0.0;  // maximized
  double cost = 0.0;        // minimized
};

// a dominates b iff eff_a >= eff_b and cost_a <= cost_b with one strict.
bool dominates(const ObjectivePoint& a, const ObjectivePoint& b);

// Deb-style fast non-dominated sort; front 0 is undominated, front k is
// dominated only by members of earlier fronts.
std::vector<std::vector<std::size_t>> fast_nondominated_sort(
    const std::vector<ObjectivePoint>& points);

// Crowding distances within one front; boundary members per objective get
// +infinity, interior members the normalized neighbor-gap sum.
std::vector<double> crowding_distance(const std::vector<ObjectivePoint>& front);

struct Nsga2Config {
  std::size_t population = 200;
  std::size_t generations = 200;
  double crossover_prob = 0.9;
  double mutation_prob = -1.0;  // < 0 means 1/L
  std::uint64_t seed = 0;
};

// Standard NSGA-II over schedules: binary tournament on (rank, crowding),
// uniform crossover, per-bit mutation, elitist truncation. Returns the
// final first front.
ParetoFront nsga2_run(const NetworkInstance& instance, const DemandSeries& series,
                      const Nsga2Config& config, std::uint64_t eval_seed,
                      const EnvConfig& env_config = {});

// Balance score: min-max normalize both objectives over the front and
// return the member maximizing (norm_eff + (1 - norm_cost)) / 2. Ties go
// to lower cost, then lower index.
const FrontMember& select_balance_score(const ParetoFront& front);

// Member with maximum total efficiency; ties go to lower cost.
const FrontMember& select_best_efficiency(const ParetoFront& front);

struct PsoConfig {
  std::size_t population = 100;
  std::size_t generations = 200;
  double inertia = 0.7;
  double cognitive = 1.5;  // c1
  double social = 1.5;     // c2
  std::uint64_t seed = 0;
};

// Generic synchronous global-best PSO core over a box domain, maximizing
// `fitness`. Exposed separately so it can be exercised on standard test
// functions. `on_generation` (optional) observes the global best after
// every generation.
struct PsoResult {
  std::vector<double> position;
  double fitness = 0.0;
};
PsoResult pso_optimize(std::size_t dim, double low, double high,
                       const std::function<double(const std::vector<double>&)>& fitness,
                       const PsoConfig& config,
                       const std::function<void(std::size_t, double)>& on_generation = {});

// Single-objective PSO over [0,1]^L positions thresholded at 0.5 into
// schedule bits, maximizing total log-reward.
struct PsoRunResult {
  Schedule schedule;
  CandidateScore score;
};
PsoRunResult pso_run(const NetworkInstance& instance, const DemandSeries& series,
                     const PsoConfig& config, std::uint64_t eval_seed,
                     const EnvConfig& env_config = {});

}  // namespace hsc
