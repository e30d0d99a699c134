#pragma once

#include <cstdint>
#include <string>

#include "hsc/matrix.hpp"
#include "hsc/rng.hpp"

namespace hsc {

enum class DemandModel { kGbm, kPoisson, kMerton };

std::string to_string(DemandModel model);
DemandModel demand_model_from_string(const std::string& name);

// Stochastic demand generator parameters. Defaults follow the standard
// experiment setup: multiplicative drift 0.02 and volatility 0.1 per step,
// Poisson increments of mean 30 kits, jump events at rate 0.1 with
// N(0.05, 0.2^2) jump sizes, initial demand uniform on [1200, 2000],
// values clipped to [0, 2000].
struct DemandParams {
  DemandModel model = DemandModel::kGbm;
  double mu = 0.02;          // drift per step
  double sigma = 0.1;        // volatility per step
  double shock_std = 0.05;   // extra additive disturbance in the GBM exponent
  double poisson_rate = 30.0;
  double jump_intensity = 0.1;
  double jump_mean = 0.05;
  double jump_std = 0.2;
  double init_low = 1200.0;
  double init_high = 2000.0;
  double clip_low = 0.0;
  double clip_high = 2000.0;
  std::uint64_t seed = 42;

  // Throws std::invalid_argument when a non-negativity or ordering
  // invariant is broken.
  void validate() const;
};

// T x n_points matrix of integer-valued demand, plus the parameters that
// produced it. Regenerating with the same params yields the same matrix.
struct DemandSeries {
  Matrix values;  // values(t, p)
  DemandParams params;

  std::size_t steps() const { return values.rows(); }
  std::size_t points() const { return values.cols(); }
};

// Initial demand draws: uniform on [init_low, init_high], rounded to
// integer, then clipped. One sequential draw per point from `rng`.
std::vector<double> init_demand(const DemandParams& params, std::size_t n_points,
                                RandomStream& rng);

// One multiplicative step: prev * exp((mu - sigma^2/2) + sigma*z + shock),
// z ~ N(0,1), shock ~ N(0, shock_std^2), then round and clip.
double step_gbm(double prev, const DemandParams& params, RandomStream& rng);

// One additive step: prev + Poisson(poisson_rate), clipped.
double step_poisson(double prev, const DemandParams& params, RandomStream& rng);

// Jump-diffusion step: the GBM exponent plus a N(jump_mean, jump_std^2)
// jump when a Poisson(jump_intensity) event count is positive. When
// `jump_occurred` is non-null it reports whether this step jumped.
double step_merton(double prev, const DemandParams& params, RandomStream& rng,
                   bool* jump_occurred = nullptr);

// Full series. Each demand point evolves on its own substream derived from
// (params.seed, point index), so column p does not depend on n_points.
DemandSeries generate_series(const DemandParams& params, std::size_t T,
                             std::size_t n_points);

}  // namespace hsc
