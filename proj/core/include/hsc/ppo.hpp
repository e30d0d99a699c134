#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "hsc/env.hpp"
#include "hsc/mlp.hpp"

namespace hsc {

// Actor-critic over independent Bernoulli activation bits. The actor maps
// an observation to |C|+|W| logits; the critic to a scalar value.
struct PolicyParams {
  Mlp actor;
  Mlp critic;

  static PolicyParams init(std::size_t obs_dim, std::size_t act_dim,
                           std::size_t hidden, RandomStream& rng);

  std::vector<double*> parameter_view();
  std::vector<const double*> parameter_view() const;
  void fill(double value);
};

struct TrainConfig {
  double gamma = 0.999;
  double gae_lambda = 0.95;
  double clip_epsilon = 0.2;
  double learning_rate = 1e-4;
  double entropy_coef = 0.01;
  double value_coef = 0.5;
  std::size_t minibatch_size = 64;
  std::size_t epochs_per_update = 10;
  std::size_t rollout_episodes_per_update = 4;
  std::size_t total_steps = 20000;
  double max_grad_norm = 0.5;
  std::size_t hidden_size = 64;
  std::uint64_t seed = 0;

  void validate() const;
};

struct PolicyOutput {
  std::vector<double> logits;
  double value = 0.0;
};

PolicyOutput policy_forward(const PolicyParams& params, const Observation& obs);

struct SampledAction {
  std::vector<std::uint8_t> bits;
  double log_prob = 0.0;
};

// Independent Bernoulli(sigmoid(logit)) per bit; log_prob is the joint.
SampledAction sample_action(const std::vector<double>& logits, RandomStream& rng);

// Joint Bernoulli log-probability of `bits` under `logits`.
double action_log_prob(const std::vector<double>& logits,
                       const std::vector<std::uint8_t>& bits);

// Mean per-bit Bernoulli entropy; always in [0, ln 2].
double mean_bit_entropy(const std::vector<double>& logits);

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;
};

// Backward recursion: delta_t = r_t + gamma*v_{t+1} - v_t,
// adv_t = delta_t + gamma*lambda*adv_{t+1}, return_t = adv_t + v_t.
// `bootstrap` stands in for v_T (zero at a terminal end).
GaeResult compute_gae(const std::vector<double>& rewards,
                      const std::vector<double>& values, double bootstrap,
                      double gamma, double lambda);

// One collected transition, with advantage/return filled in after GAE and
// the advantage normalized over the update batch.
struct Sample {
  Observation obs;
  std::vector<std::uint8_t> bits;
  double old_log_prob = 0.0;
  double reward = 0.0;
  double value = 0.0;
  double advantage = 0.0;
  double ret = 0.0;
};

struct TrajectoryBuffer {
  std::vector<Sample> samples;
  std::vector<std::size_t> episode_starts;

  void clear() {
    samples.clear();
    episode_starts.clear();
  }
};

// Shifts/scales all advantages in the buffer to mean 0, std 1.
void normalize_advantages(TrajectoryBuffer& buffer);

struct LossResult {
  double loss = 0.0;
  double policy_term = 0.0;
  double value_term = 0.0;
  double entropy = 0.0;
  PolicyParams grad;  // same shape as the parameters
};

// Clipped-surrogate loss with exact gradients:
//   -mean(min(rho*A, clip(rho, 1-eps, 1+eps)*A))
//   + value_coef * mean((v - return)^2)
//   - entropy_coef * mean bit entropy.
// Throws std::runtime_error with diagnostics on non-finite intermediates.
LossResult ppo_loss(const PolicyParams& params, std::span<const Sample> batch,
                    const TrainConfig& config);

// epochs_per_update passes of shuffled minibatches with Adam steps and
// global-norm gradient clipping. Deterministic given (params, buffer,
// optimizer state, shuffle stream).
void ppo_update(PolicyParams& params, AdamOptimizer& adam,
                const TrajectoryBuffer& buffer, const TrainConfig& config,
                RandomStream& shuffle_rng);

// Per-episode means of the five tracked metrics.
struct EpisodeMetrics {
  double reward = 0.0;
  double satisfaction = 0.0;
  double efficiency = 0.0;
  double cost = 0.0;
  double inventory = 0.0;
};

struct TrainResult {
  PolicyParams params;
  std::vector<EpisodeMetrics> episodes;
};

// Full training loop: total_steps/horizon episodes, grouped into updates
// of rollout_episodes_per_update episodes. All randomness derives from
// config.seed.
TrainResult train(const NetworkInstance& instance, const DemandSeries& series,
                  const TrainConfig& config, const EnvConfig& env_config = {});

// Convenience overload: generates this run's demand series from
// `demand_params` with a substream of config.seed, then trains on it.
TrainResult train(const NetworkInstance& instance, const DemandParams& demand_params,
                  const TrainConfig& config, const EnvConfig& env_config = {});

// Per-timestep metric row used by evaluation and the method comparison.
struct StepMetrics {
  double reward = 0.0;
  double satisfaction = 0.0;
  double efficiency = 0.0;
  double cost = 0.0;
  double inventory = 0.0;
};

// Rolls episodes with the (unchanged) policy; one per-timestep series per
// episode.
std::vector<std::vector<StepMetrics>> evaluate(const PolicyParams& params,
                                               const NetworkInstance& instance,
                                               const DemandSeries& series,
                                               std::size_t n_episodes,
                                               RandomStream& rng,
                                               const EnvConfig& env_config = {});

// Versioned text checkpoint: all weights plus the TrainConfig.
void save_checkpoint(const PolicyParams& params, const TrainConfig& config,
                     std::ostream& os);
struct Checkpoint {
  PolicyParams params;
  TrainConfig config;
};
Checkpoint load_checkpoint(std::istream& is);

}  // namespace hsc
