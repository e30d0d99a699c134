#pragma once

#include <cstdint>
#include <tuple>
#include <vector>

#include "hsc/demand.hpp"
#include "hsc/matrix.hpp"
#include "hsc/network.hpp"
#include "hsc/rng.hpp"

namespace hsc {

// Binary activation decision for one time step.
struct Action {
  std::vector<std::uint8_t> centers;     // x_c, one bit per collection center
  std::vector<std::uint8_t> warehouses;  // x_w, one bit per warehouse

  static Action zeros(std::size_t n_centers, std::size_t n_warehouses) {
    return Action{std::vector<std::uint8_t>(n_centers, 0),
                  std::vector<std::uint8_t>(n_warehouses, 0)};
  }
};

// How the mismatch penalty treats inventory carried into the step:
// kCurrent charges |inflow - outflow|; kWithPrevInventory additionally
// counts the start-of-step stock inside the absolute value.
enum class MismatchMode { kCurrent, kWithPrevInventory };

struct EnvState {
  std::size_t t = 0;
  std::vector<double> inventory;      // I_w, >= 0
  std::vector<double> demand_now;     // d_p at time t
  Matrix prev_shipments;              // A_wp at t-1, all-zero at t=0
  Action prev_action;                 // all-zero at t=0
};

// Everything one step produces. reward == log(1+efficiency) - log(1+cost).
struct StepOutcome {
  double reward = 0.0;
  double efficiency = 0.0;
  double cost = 0.0;
  double penalty_mismatch = 0.0;
  double penalty_switch = 0.0;
  Matrix replenishment;              // A_cw, |C| x |W|
  Matrix shipments;                  // A_wp, |W| x |P|, demand-scaled
  std::vector<double> outsourced;    // O_w
  std::vector<double> unmet;         // u_p
  std::vector<double> satisfaction;  // r_p in [0, 1]
  double avg_satisfaction = 0.0;     // mean over demand points
  double avg_inventory = 0.0;        // mean end-of-step warehouse stock
};

using Observation = std::vector<double>;

// --- step building blocks, exposed for direct testing ---

// Replenishment: each active center splits its full capacity across the
// active warehouses by a uniform-simplex (Dirichlet with unit
// concentration) draw, floored to whole kits. Inactive rows/columns are
// zero; no active warehouse means no replenishment at all.
Matrix allocate_replenishment(const Action& action, const NetworkInstance& instance,
                              RandomStream& rng);

// Raw shipment proposal: for every (w, p) with x_w = 1, a uniform integer
// on [0, max(I_w, 1)] where I_w is the start-of-step stock. The max(., 1)
// keeps the range valid at zero inventory.
Matrix sample_shipments(const std::vector<double>& inventory, const Action& action,
                        std::size_t n_points, RandomStream& rng);

// Demand scaling: when a point is offered more than it demands, each
// offer in the column is scaled by d_p / column_sum and floored. Computed
// in integer arithmetic, so an offer column that sums to no more than the
// demand passes through unchanged. Guarantees sum_w A_wp <= d_p.
Matrix scale_shipments(const Matrix& raw, const std::vector<double>& demand);

struct SettleResult {
  std::vector<double> inventory;   // end-of-step stock, >= 0
  std::vector<double> outsourced;  // O_w covering any shortfall
};

// Inventory bookkeeping: inflow from centers, outflow to points, and
// outsourcing that covers a warehouse shipping more than it holds.
SettleResult settle_inventory(const std::vector<double>& inventory,
                              const Matrix& replenishment, const Matrix& shipments);

// Monetized satisfied demand: sum_p (d_p - u_p) * V.
double compute_efficiency(const std::vector<double>& demand,
                          const std::vector<double>& unmet, double kit_value);

struct CostBreakdown {
  double total = 0.0;
  double mismatch = 0.0;
  double switching = 0.0;
};

// Establishment charges for open facilities, transport over both tiers,
// the mismatch penalty, and the toggle penalty against the previous
// action. `prev_inventory` is only read in kWithPrevInventory mode.
CostBreakdown compute_cost(const Action& action, const Action& prev_action,
                           const Matrix& replenishment, const Matrix& shipments,
                           const NetworkInstance& instance, MismatchMode mode,
                           const std::vector<double>& prev_inventory);

double compute_reward(double efficiency, double cost);

struct EnvConfig {
  std::size_t horizon = 100;  // T
  MismatchMode mismatch_mode = MismatchMode::kCurrent;
};

// The per-step simulator. Owns mutable state; one instance per thread.
// All randomness comes through the RandomStream passed to step().
class Environment {
 public:
  // Throws std::invalid_argument when the series does not cover the
  // instance's demand points or the horizon.
  Environment(const NetworkInstance& instance, const DemandSeries& series,
              EnvConfig config = {});

  Observation reset();
  bool done() const { return state_.t >= config_.horizon; }

  // Executes one step; throws std::logic_error when called after done().
  std::tuple<Observation, StepOutcome, bool> step(const Action& action,
                                                  RandomStream& rng);

  Observation observe() const;
  const EnvState& state() const { return state_; }
  const NetworkInstance& instance() const { return *instance_; }
  const EnvConfig& config() const { return config_; }

  // Replaces the demand series (same shape) without touching other state;
  // used when training regenerates demand between runs.
  void set_series(const DemandSeries& series);

  static std::size_t observation_size(std::size_t n_points, std::size_t n_warehouses) {
    return n_points + n_warehouses + n_warehouses * n_points + 1;
  }

 private:
  const NetworkInstance* instance_;
  const DemandSeries* series_;
  EnvConfig config_;
  EnvState state_;
  double obs_demand_scale_ = 1.0;     // 1 / clip_high
  double obs_inventory_scale_ = 1.0;  // 1 / max warehouse capacity
};

}  // namespace hsc
