#include "hsc/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hsc {

Action decode(const Schedule& schedule, std::size_t t, std::size_t n_centers,
              std::size_t n_warehouses) {
  const std::size_t width = n_centers + n_warehouses;
  if ((t + 1) * width > schedule.bits.size()) {
    throw std::out_of_range("schedule: time index past the end");
  }
  const auto slice = schedule.bits.begin() + static_cast<std::ptrdiff_t>(t * width);
  Action action;
  action.centers.assign(slice, slice + static_cast<std::ptrdiff_t>(n_centers));
  action.warehouses.assign(slice + static_cast<std::ptrdiff_t>(n_centers),
                           slice + static_cast<std::ptrdiff_t>(width));
  return action;
}

Schedule encode(const std::vector<Action>& actions) {
  Schedule schedule;
  for (const Action& action : actions) {
    schedule.bits.insert(schedule.bits.end(), action.centers.begin(),
                         action.centers.end());
    schedule.bits.insert(schedule.bits.end(), action.warehouses.begin(),
                         action.warehouses.end());
  }
  return schedule;
}

CandidateScore evaluate_candidate(const Schedule& schedule,
                                  const NetworkInstance& instance,
                                  const DemandSeries& series,
                                  std::uint64_t eval_seed,
                                  const EnvConfig& env_config) {
  if (schedule.bits.size() !=
      Schedule::bit_count(env_config.horizon, instance.n_centers,
                          instance.n_warehouses)) {
    throw std::invalid_argument("schedule length does not match the instance/horizon");
  }
  Environment env(instance, series, env_config);
  RandomStream rng(eval_seed);
  CandidateScore score;
  score.series.reserve(env_config.horizon);
  env.reset();
  for (std::size_t t = 0; t < env_config.horizon; ++t) {
    const Action action = decode(schedule, t, instance.n_centers,
                                 instance.n_warehouses);
    auto [obs, outcome, done] = env.step(action, rng);
    (void)obs;
    (void)done;
    score.total_efficiency += outcome.efficiency;
    score.total_cost += outcome.cost;
    score.total_reward += outcome.reward;
    score.series.push_back({outcome.reward, outcome.avg_satisfaction,
                            outcome.efficiency, outcome.cost,
                            outcome.avg_inventory});
  }
  return score;
}

bool dominates(const ObjectivePoint& a, const ObjectivePoint& b) {
  const bool no_worse = a.efficiency >= b.efficiency && a.cost <= b.cost;
  const bool strictly_better = a.efficiency > b.efficiency || a.cost < b.cost;
  return no_worse && strictly_better;
}

std::vector<std::vector<std::size_t>> fast_nondominated_sort(
    const std::vector<ObjectivePoint>& points) {
  const std::size_t n = points.size();
  if (n == 0) {
    throw std::invalid_argument("nondominated sort: need at least one point");
  }
  std::vector<std::vector<std::size_t>> dominated_by(n);
  std::vector<std::size_t> domination_count(n, 0);
  std::vector<std::vector<std::size_t>> fronts(1);

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (dominates(points[i], points[j])) {
        dominated_by[i].push_back(j);
      } else if (dominates(points[j], points[i])) {
        ++domination_count[i];
      }
    }
    if (domination_count[i] == 0) {
      fronts[0].push_back(i);
    }
  }

  std::size_t current = 0;
  while (!fronts[current].empty()) {
    std::vector<std::size_t> next;
    for (std::size_t i : fronts[current]) {
      for (std::size_t j : dominated_by[i]) {
        if (--domination_count[j] == 0) {
          next.push_back(j);
        }
      }
    }
    ++current;
    fronts.push_back(std::move(next));
  }
  fronts.pop_back();  // the trailing empty front
  return fronts;
}

std::vector<double> crowding_distance(const std::vector<ObjectivePoint>& front) {
  const std::size_t n = front.size();
  if (n == 0) {
    throw std::invalid_argument("crowding distance: empty front");
  }
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> distance(n, 0.0);
  if (n <= 2) {
    std::fill(distance.begin(), distance.end(), kInf);
    return distance;
  }

  auto accumulate_objective = [&](auto key) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return key(front[a]) < key(front[b]);
    });
    const double span = key(front[order.back()]) - key(front[order.front()]);
    distance[order.front()] = kInf;
    distance[order.back()] = kInf;
    if (span <= 0.0) return;  // identical values; no interior contribution
    for (std::size_t k = 1; k + 1 < n; ++k) {
      const std::size_t i = order[k];
      if (distance[i] == kInf) continue;
      distance[i] +=
          (key(front[order[k + 1]]) - key(front[order[k - 1]])) / span;
    }
  };
  accumulate_objective([](const ObjectivePoint& p) { return p.efficiency; });
  accumulate_objective([](const ObjectivePoint& p) { return p.cost; });
  return distance;
}

namespace {

struct Individual {
  std::vector<std::uint8_t> bits;
  ObjectivePoint objectives;
  CandidateScore score;
  std::size_t rank = 0;
  double crowding = 0.0;
};

std::vector<std::uint8_t> random_bits(std::size_t length, RandomStream& rng) {
  std::vector<std::uint8_t> bits(length);
  for (auto& b : bits) b = rng.uniform() < 0.5 ? 1 : 0;
  return bits;
}

void rank_population(std::vector<Individual>& pop) {
  std::vector<ObjectivePoint> points(pop.size());
  for (std::size_t i = 0; i < pop.size(); ++i) points[i] = pop[i].objectives;
  const auto fronts = fast_nondominated_sort(points);
  for (std::size_t f = 0; f < fronts.size(); ++f) {
    std::vector<ObjectivePoint> front_points;
    front_points.reserve(fronts[f].size());
    for (std::size_t i : fronts[f]) front_points.push_back(points[i]);
    const std::vector<double> crowd = crowding_distance(front_points);
    for (std::size_t k = 0; k < fronts[f].size(); ++k) {
      pop[fronts[f][k]].rank = f;
      pop[fronts[f][k]].crowding = crowd[k];
    }
  }
}

const Individual& tournament(const std::vector<Individual>& pop, RandomStream& rng) {
  const std::size_t n = pop.size();
  const auto& a = pop[static_cast<std::size_t>(
      rng.uniform_int(0, static_cast<std::int64_t>(n) - 1))];
  const auto& b = pop[static_cast<std::size_t>(
      rng.uniform_int(0, static_cast<std::int64_t>(n) - 1))];
  if (a.rank != b.rank) return a.rank < b.rank ? a : b;
  if (a.crowding != b.crowding) return a.crowding > b.crowding ? a : b;
  return a;
}

}  // namespace

ParetoFront nsga2_run(const NetworkInstance& instance, const DemandSeries& series,
                      const Nsga2Config& config, std::uint64_t eval_seed,
                      const EnvConfig& env_config) {
  if (config.population < 2 || config.population % 2 != 0) {
    throw std::invalid_argument("nsga2: population must be even and >= 2");
  }
  const std::size_t length = Schedule::bit_count(
      env_config.horizon, instance.n_centers, instance.n_warehouses);
  const double mutation_prob = config.mutation_prob >= 0.0
                                   ? config.mutation_prob
                                   : 1.0 / static_cast<double>(length);
  RandomStream rng(config.seed);

  auto evaluate = [&](Individual& ind) {
    ind.score = evaluate_candidate(Schedule{ind.bits}, instance, series, eval_seed,
                                   env_config);
    ind.objectives = {ind.score.total_efficiency, ind.score.total_cost};
  };

  std::vector<Individual> population(config.population);
  for (Individual& ind : population) {
    ind.bits = random_bits(length, rng);
    evaluate(ind);
  }
  rank_population(population);

  for (std::size_t gen = 0; gen < config.generations; ++gen) {
    std::vector<Individual> offspring;
    offspring.reserve(config.population);
    while (offspring.size() < config.population) {
      Individual child_a, child_b;
      child_a.bits = tournament(population, rng).bits;
      child_b.bits = tournament(population, rng).bits;
      if (rng.uniform() < config.crossover_prob) {
        for (std::size_t i = 0; i < length; ++i) {  // uniform crossover
          if (rng.uniform() < 0.5) std::swap(child_a.bits[i], child_b.bits[i]);
        }
      }
      for (Individual* child : {&child_a, &child_b}) {
        for (std::size_t i = 0; i < length; ++i) {
          if (rng.uniform() < mutation_prob) child->bits[i] ^= 1;
        }
        evaluate(*child);
        offspring.push_back(std::move(*child));
      }
    }

    // Elitist environmental selection over parents + offspring.
    std::vector<Individual> combined = std::move(population);
    combined.insert(combined.end(), std::make_move_iterator(offspring.begin()),
                    std::make_move_iterator(offspring.end()));
    rank_population(combined);
    std::vector<std::size_t> order(combined.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (combined[a].rank != combined[b].rank) {
        return combined[a].rank < combined[b].rank;
      }
      return combined[a].crowding > combined[b].crowding;
    });
    population.clear();
    population.reserve(config.population);
    for (std::size_t k = 0; k < config.population; ++k) {
      population.push_back(std::move(combined[order[k]]));
    }
    rank_population(population);
  }

  ParetoFront front;
  for (const Individual& ind : population) {
    if (ind.rank == 0) {
      front.push_back({Schedule{ind.bits}, ind.score});
    }
  }
  return front;
}

const FrontMember& select_balance_score(const ParetoFront& front) {
  if (front.empty()) {
    throw std::invalid_argument("balance score: empty front");
  }
  double eff_lo = front[0].score.total_efficiency, eff_hi = eff_lo;
  double cost_lo = front[0].score.total_cost, cost_hi = cost_lo;
  for (const FrontMember& m : front) {
    eff_lo = std::min(eff_lo, m.score.total_efficiency);
    eff_hi = std::max(eff_hi, m.score.total_efficiency);
    cost_lo = std::min(cost_lo, m.score.total_cost);
    cost_hi = std::max(cost_hi, m.score.total_cost);
  }
  const double eff_span = eff_hi - eff_lo;
  const double cost_span = cost_hi - cost_lo;

  std::size_t best = 0;
  double best_score = -1.0;
  for (std::size_t i = 0; i < front.size(); ++i) {
    const double norm_eff =
        eff_span > 0 ? (front[i].score.total_efficiency - eff_lo) / eff_span : 0.0;
    const double norm_cost =
        cost_span > 0 ? (front[i].score.total_cost - cost_lo) / cost_span : 0.0;
    const double balance = 0.5 * (norm_eff + (1.0 - norm_cost));
    const bool better =
        balance > best_score ||
        (balance == best_score &&
         front[i].score.total_cost < front[best].score.total_cost);
    if (better) {
      best = i;
      best_score = balance;
    }
  }
  return front[best];
}

const FrontMember& select_best_efficiency(const ParetoFront& front) {
  if (front.empty()) {
    throw std::invalid_argument("best efficiency: empty front");
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < front.size(); ++i) {
    const double eff = front[i].score.total_efficiency;
    const double best_eff = front[best].score.total_efficiency;
    if (eff > best_eff ||
        (eff == best_eff &&
         front[i].score.total_cost < front[best].score.total_cost)) {
      best = i;
    }
  }
  return front[best];
}

PsoResult pso_optimize(std::size_t dim, double low, double high,
                       const std::function<double(const std::vector<double>&)>& fitness,
                       const PsoConfig& config,
                       const std::function<void(std::size_t, double)>& on_generation) {
  if (high <= low) {
    throw std::invalid_argument("pso: invalid box bounds");
  }
  RandomStream rng(config.seed);
  const double span = high - low;

  struct Particle {
    std::vector<double> position, velocity, best_position;
    double best_fitness = 0.0;
  };
  std::vector<Particle> swarm(config.population);
  PsoResult global;
  global.fitness = -std::numeric_limits<double>::infinity();

  for (Particle& p : swarm) {
    p.position.resize(dim);
    p.velocity.assign(dim, 0.0);
    for (double& x : p.position) x = low + span * rng.uniform();
    p.best_position = p.position;
    p.best_fitness = fitness(p.position);
    if (p.best_fitness > global.fitness) {
      global.fitness = p.best_fitness;
      global.position = p.best_position;
    }
  }

  for (std::size_t gen = 0; gen < config.generations; ++gen) {
    for (Particle& p : swarm) {
      for (std::size_t d = 0; d < dim; ++d) {
        const double r1 = rng.uniform();
        const double r2 = rng.uniform();
        double v = config.inertia * p.velocity[d] +
                   config.cognitive * r1 * (p.best_position[d] - p.position[d]) +
                   config.social * r2 * (global.position[d] - p.position[d]);
        v = std::clamp(v, -span, span);
        p.velocity[d] = v;
        p.position[d] = std::clamp(p.position[d] + v, low, high);
      }
      const double f = fitness(p.position);
      if (f > p.best_fitness) {
        p.best_fitness = f;
        p.best_position = p.position;
      }
      if (f > global.fitness) {
        global.fitness = f;
        global.position = p.position;
      }
    }
    if (on_generation) on_generation(gen, global.fitness);
  }
  return global;
}

PsoRunResult pso_run(const NetworkInstance& instance, const DemandSeries& series,
                     const PsoConfig& config, std::uint64_t eval_seed,
                     const EnvConfig& env_config) {
  const std::size_t length = Schedule::bit_count(
      env_config.horizon, instance.n_centers, instance.n_warehouses);

  auto threshold = [](const std::vector<double>& position) {
    Schedule schedule;
    schedule.bits.resize(position.size());
    for (std::size_t i = 0; i < position.size(); ++i) {
      schedule.bits[i] = position[i] > 0.5 ? 1 : 0;
    }
    return schedule;
  };
  auto fitness = [&](const std::vector<double>& position) {
    return evaluate_candidate(threshold(position), instance, series, eval_seed,
                              env_config)
        .total_reward;
  };

  const PsoResult best = pso_optimize(length, 0.0, 1.0, fitness, config);
  PsoRunResult result;
  result.schedule = threshold(best.position);
  result.score = evaluate_candidate(result.schedule, instance, series, eval_seed,
                                    env_config);
  return result;
}

}  // namespace hsc
