#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hsc/matrix.hpp"
#include "hsc/rng.hpp"

namespace hsc {

// Closed integer interval used for uniform sampling of costs, capacities
// and distances.
struct IntRange {
  std::int64_t low = 0;
  std::int64_t high = 0;
};

// Static topology configuration. Defaults are the baseline experiment
// setup: 15 collection centers, 5 warehouses, 10 demand points, two-tier
// distances in [5, 10], transport coefficient 0.5 and kit value 100.
struct NetworkConfig {
  std::size_t n_centers = 15;
  std::size_t n_warehouses = 5;
  std::size_t n_points = 10;
  IntRange center_cost_range{400, 800};
  IntRange center_capacity_range{800, 1500};
  IntRange warehouse_cost_range{200, 500};
  IntRange warehouse_capacity_range{4000, 10000};
  IntRange dist_cw_range{5, 10};
  IntRange dist_wp_range{5, 10};
  double transport_coef = 0.5;        // h: money per kit per distance
  double kit_value = 100.0;           // V: money per kit
  double mismatch_coef = 1.0;         // money per mismatched kit
  double switch_cost_center = 30.0;   // money per toggle
  double switch_cost_warehouse = 10.0;
  std::uint64_t seed = 42;

  void validate() const;  // throws std::invalid_argument on a bad range
};

// Immutable sampled instance: distances, establishment costs, capacities,
// and the economic coefficients copied from the config. Shareable across
// threads once built.
struct NetworkInstance {
  Matrix dist_cw;  // |C| x |W|
  Matrix dist_wp;  // |W| x |P|
  std::vector<double> center_cost;        // E_c
  std::vector<double> warehouse_cost;     // E_w
  std::vector<double> center_capacity;    // C_c
  std::vector<double> warehouse_capacity; // C_w
  double transport_coef = 0.5;
  double kit_value = 100.0;
  double mismatch_coef = 1.0;
  double switch_cost_center = 30.0;
  double switch_cost_warehouse = 10.0;
  std::size_t n_centers = 0;
  std::size_t n_warehouses = 0;
  std::size_t n_points = 0;

  double max_warehouse_capacity() const;
};

// Samples every distance/cost/capacity as a uniform integer from its
// configured range. Deterministic in config.seed; the stream is derived
// independently from the demand streams so demand variants share one
// topology.
NetworkInstance generate_instance(const NetworkConfig& config);

// Reports violated instance invariants (non-positive entries, shape
// mismatches against `config`). Empty report means valid. Never throws.
std::vector<std::string> validate(const NetworkInstance& instance,
                                  const NetworkConfig& config);

// Flat name=value serialization (matrices row-major, comma separated).
void dump_instance(const NetworkInstance& instance, std::ostream& os);
NetworkInstance parse_instance(std::istream& is);

}  // namespace hsc
