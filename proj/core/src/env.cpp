#include "hsc/env.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace hsc {

Matrix allocate_replenishment(const Action& action, const NetworkInstance& instance,
                              RandomStream& rng) {
  const std::size_t nc = instance.n_centers;
  const std::size_t nw = instance.n_warehouses;
  Matrix a_cw(nc, nw);

  std::vector<std::size_t> active_warehouses;
  for (std::size_t w = 0; w < nw; ++w) {
    if (action.warehouses[w]) active_warehouses.push_back(w);
  }
  if (active_warehouses.empty()) return a_cw;

  std::vector<double> weights(active_warehouses.size());
  for (std::size_t c = 0; c < nc; ++c) {
    if (!action.centers[c]) continue;
    double total = 0.0;
    for (double& weight : weights) {
      weight = rng.exponential();
      total += weight;
    }
    if (total <= 0.0) {  // all-zero exponentials; fall back to an even split
      for (double& weight : weights) weight = 1.0;
      total = static_cast<double>(weights.size());
    }
    for (std::size_t k = 0; k < active_warehouses.size(); ++k) {
      a_cw(c, active_warehouses[k]) =
          std::floor(weights[k] / total * instance.center_capacity[c]);
    }
  }
  return a_cw;
}

Matrix sample_shipments(const std::vector<double>& inventory, const Action& action,
                        std::size_t n_points, RandomStream& rng) {
  const std::size_t nw = inventory.size();
  Matrix a_wp(nw, n_points);
  for (std::size_t w = 0; w < nw; ++w) {
    if (!action.warehouses[w]) continue;
    const std::int64_t bound =
        static_cast<std::int64_t>(std::max(inventory[w], 1.0));
    for (std::size_t p = 0; p < n_points; ++p) {
      a_wp(w, p) = static_cast<double>(rng.uniform_int(0, bound));
    }
  }
  return a_wp;
}

Matrix scale_shipments(const Matrix& raw, const std::vector<double>& demand) {
  Matrix scaled = raw;
  for (std::size_t p = 0; p < raw.cols(); ++p) {
    std::int64_t column_sum = 0;
    for (std::size_t w = 0; w < raw.rows(); ++w) {
      column_sum += static_cast<std::int64_t>(raw(w, p));
    }
    const std::int64_t d = static_cast<std::int64_t>(demand[p]);
    if (column_sum <= d) continue;  // scale factor 1
    for (std::size_t w = 0; w < raw.rows(); ++w) {
      const std::int64_t offer = static_cast<std::int64_t>(raw(w, p));
      scaled(w, p) = static_cast<double>(offer * d / column_sum);
    }
  }
  return scaled;
}

SettleResult settle_inventory(const std::vector<double>& inventory,
                              const Matrix& replenishment, const Matrix& shipments) {
  const std::size_t nw = inventory.size();
  SettleResult result;
  result.inventory.resize(nw);
  result.outsourced.resize(nw);
  for (std::size_t w = 0; w < nw; ++w) {
    const double inflow = replenishment.col_sum(w);
    const double outflow = shipments.row_sum(w);
    const double shortfall = outflow - inventory[w] - inflow;
    result.outsourced[w] = shortfall > 0 ? shortfall : 0.0;
    result.inventory[w] = inventory[w] + inflow - outflow + result.outsourced[w];
  }
  return result;
}

double compute_efficiency(const std::vector<double>& demand,
                          const std::vector<double>& unmet, double kit_value) {
  double satisfied = 0.0;
  for (std::size_t p = 0; p < demand.size(); ++p) {
    satisfied += demand[p] - unmet[p];
  }
  return satisfied * kit_value;
}

CostBreakdown compute_cost(const Action& action, const Action& prev_action,
                           const Matrix& replenishment, const Matrix& shipments,
                           const NetworkInstance& instance, MismatchMode mode,
                           const std::vector<double>& prev_inventory) {
  CostBreakdown out;

  double establishment = 0.0;
  for (std::size_t c = 0; c < instance.n_centers; ++c) {
    if (action.centers[c]) establishment += instance.center_cost[c];
  }
  for (std::size_t w = 0; w < instance.n_warehouses; ++w) {
    if (action.warehouses[w]) establishment += instance.warehouse_cost[w];
  }

  double transport = 0.0;
  for (std::size_t c = 0; c < instance.n_centers; ++c) {
    for (std::size_t w = 0; w < instance.n_warehouses; ++w) {
      transport += instance.dist_cw(c, w) * replenishment(c, w);
    }
  }
  for (std::size_t w = 0; w < instance.n_warehouses; ++w) {
    for (std::size_t p = 0; p < instance.n_points; ++p) {
      transport += instance.dist_wp(w, p) * shipments(w, p);
    }
  }
  transport *= instance.transport_coef;

  for (std::size_t w = 0; w < instance.n_warehouses; ++w) {
    double balance = replenishment.col_sum(w) - shipments.row_sum(w);
    if (mode == MismatchMode::kWithPrevInventory) {
      balance += prev_inventory[w];
    }
    out.mismatch += std::abs(balance);
  }
  out.mismatch *= instance.mismatch_coef;

  double center_toggles = 0.0;
  for (std::size_t c = 0; c < instance.n_centers; ++c) {
    center_toggles += std::abs(static_cast<double>(action.centers[c]) -
                               static_cast<double>(prev_action.centers[c]));
  }
  double warehouse_toggles = 0.0;
  for (std::size_t w = 0; w < instance.n_warehouses; ++w) {
    warehouse_toggles += std::abs(static_cast<double>(action.warehouses[w]) -
                                  static_cast<double>(prev_action.warehouses[w]));
  }
  out.switching = instance.switch_cost_center * center_toggles +
                  instance.switch_cost_warehouse * warehouse_toggles;

  out.total = establishment + transport + out.mismatch + out.switching;
  return out;
}

double compute_reward(double efficiency, double cost) {
  return std::log1p(efficiency) - std::log1p(cost);
}

Environment::Environment(const NetworkInstance& instance, const DemandSeries& series,
                         EnvConfig config)
    : instance_(&instance), series_(&series), config_(config) {
  if (series.points() != instance.n_points) {
    throw std::invalid_argument("env: demand series point count does not match instance");
  }
  if (series.steps() < config_.horizon) {
    throw std::invalid_argument("env: demand series shorter than the horizon");
  }
  if (config_.horizon == 0) {
    throw std::invalid_argument("env: horizon must be >= 1");
  }
  obs_demand_scale_ = 1.0 / std::max(series.params.clip_high, 1.0);
  obs_inventory_scale_ = 1.0 / std::max(instance.max_warehouse_capacity(), 1.0);
  reset();
}

void Environment::set_series(const DemandSeries& series) {
  if (series.points() != instance_->n_points || series.steps() < config_.horizon) {
    throw std::invalid_argument("env: replacement series has the wrong shape");
  }
  series_ = &series;
  obs_demand_scale_ = 1.0 / std::max(series.params.clip_high, 1.0);
}

Observation Environment::reset() {
  state_.t = 0;
  state_.inventory.assign(instance_->n_warehouses, 0.0);
  state_.demand_now.resize(instance_->n_points);
  for (std::size_t p = 0; p < instance_->n_points; ++p) {
    state_.demand_now[p] = series_->values(0, p);
  }
  state_.prev_shipments = Matrix(instance_->n_warehouses, instance_->n_points);
  state_.prev_action = Action::zeros(instance_->n_centers, instance_->n_warehouses);
  return observe();
}

std::tuple<Observation, StepOutcome, bool> Environment::step(const Action& action,
                                                             RandomStream& rng) {
  if (done()) {
    throw std::logic_error("env: step() called on a finished episode");
  }
  if (action.centers.size() != instance_->n_centers ||
      action.warehouses.size() != instance_->n_warehouses) {
    throw std::invalid_argument("env: action has the wrong shape");
  }

  StepOutcome outcome;
  outcome.replenishment = allocate_replenishment(action, *instance_, rng);
  const Matrix raw = sample_shipments(state_.inventory, action,
                                      instance_->n_points, rng);
  outcome.shipments = scale_shipments(raw, state_.demand_now);

  const std::size_t np = instance_->n_points;
  outcome.unmet.resize(np);
  outcome.satisfaction.resize(np);
  for (std::size_t p = 0; p < np; ++p) {
    const double delivered = outcome.shipments.col_sum(p);
    const double d = state_.demand_now[p];
    outcome.unmet[p] = std::max(d - delivered, 0.0);
    outcome.satisfaction[p] = d > 0 ? std::min(1.0, delivered / d) : 1.0;
    outcome.avg_satisfaction += outcome.satisfaction[p];
  }
  outcome.avg_satisfaction /= static_cast<double>(np);

  const SettleResult settled =
      settle_inventory(state_.inventory, outcome.replenishment, outcome.shipments);
  outcome.outsourced = settled.outsourced;

  outcome.efficiency =
      compute_efficiency(state_.demand_now, outcome.unmet, instance_->kit_value);
  const CostBreakdown cost =
      compute_cost(action, state_.prev_action, outcome.replenishment,
                   outcome.shipments, *instance_, config_.mismatch_mode,
                   state_.inventory);
  outcome.cost = cost.total;
  outcome.penalty_mismatch = cost.mismatch;
  outcome.penalty_switch = cost.switching;
  outcome.reward = compute_reward(outcome.efficiency, outcome.cost);

  state_.inventory = settled.inventory;
  for (double stock : state_.inventory) {
    outcome.avg_inventory += stock;
  }
  outcome.avg_inventory /= static_cast<double>(instance_->n_warehouses);

  state_.prev_shipments = outcome.shipments;
  state_.prev_action = action;
  state_.t += 1;
  const bool finished = state_.t >= config_.horizon;
  if (!finished) {
    for (std::size_t p = 0; p < np; ++p) {
      state_.demand_now[p] = series_->values(state_.t, p);
    }
  }
  return {observe(), outcome, finished};
}

Observation Environment::observe() const {
  const std::size_t np = instance_->n_points;
  const std::size_t nw = instance_->n_warehouses;
  Observation obs;
  obs.reserve(observation_size(np, nw));
  for (std::size_t p = 0; p < np; ++p) {
    obs.push_back(state_.demand_now[p] * obs_demand_scale_);
  }
  for (std::size_t w = 0; w < nw; ++w) {
    obs.push_back(state_.inventory[w] * obs_inventory_scale_);
  }
  for (std::size_t w = 0; w < nw; ++w) {
    for (std::size_t p = 0; p < np; ++p) {
      obs.push_back(state_.prev_shipments(w, p) * obs_demand_scale_);
    }
  }
  obs.push_back(static_cast<double>(state_.t) /
                static_cast<double>(config_.horizon));
  return obs;
}

}  // namespace hsc
