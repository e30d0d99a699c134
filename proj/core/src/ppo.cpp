#include "hsc/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace hsc {

namespace {

double sigmoid(double x) {
  if (x >= 0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log(sigmoid(x)), stable for large |x|.
double log_sigmoid(double x) {
  return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

// Entropy of Bernoulli(sigmoid(l)).
double bit_entropy(double logit) {
  const double s = sigmoid(logit);
  return -(s * log_sigmoid(logit) + (1.0 - s) * log_sigmoid(-logit));
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_block(std::ostream& os, const char* name, const std::vector<double>& v) {
  os << name << ' ' << v.size();
  for (double x : v) os << ' ' << format_double(x);
  os << '\n';
}

std::vector<double> read_block(std::istream& is, const char* name) {
  std::string label;
  std::size_t n = 0;
  if (!(is >> label >> n) || label != name) {
    throw std::runtime_error(std::string("checkpoint: expected block ") + name);
  }
  std::vector<double> v(n);
  for (double& x : v) {
    if (!(is >> x)) throw std::runtime_error("checkpoint: truncated block");
  }
  return v;
}

Mlp read_mlp(std::istream& is) {
  std::string label;
  std::size_t in = 0, hidden = 0, out = 0;
  if (!(is >> label >> in >> hidden >> out) || label != "mlp") {
    throw std::runtime_error("checkpoint: expected mlp header");
  }
  Mlp net = Mlp::zeros(in, hidden, out);
  net.w1 = read_block(is, "w1");
  net.b1 = read_block(is, "b1");
  net.w2 = read_block(is, "w2");
  net.b2 = read_block(is, "b2");
  net.w3 = read_block(is, "w3");
  net.b3 = read_block(is, "b3");
  return net;
}

void write_mlp(std::ostream& os, const Mlp& net) {
  os << "mlp " << net.in << ' ' << net.hidden << ' ' << net.out << '\n';
  write_block(os, "w1", net.w1);
  write_block(os, "b1", net.b1);
  write_block(os, "w2", net.w2);
  write_block(os, "b2", net.b2);
  write_block(os, "w3", net.w3);
  write_block(os, "b3", net.b3);
}

Action bits_to_action(const std::vector<std::uint8_t>& bits, std::size_t n_centers,
                      std::size_t n_warehouses) {
  Action action;
  action.centers.assign(bits.begin(), bits.begin() + n_centers);
  action.warehouses.assign(bits.begin() + n_centers,
                           bits.begin() + n_centers + n_warehouses);
  return action;
}

}  // namespace

void TrainConfig::validate() const {
  if (gamma <= 0.0 || gamma > 1.0) {
    throw std::invalid_argument("train config: gamma must be in (0, 1]");
  }
  if (clip_epsilon <= 0.0) {
    throw std::invalid_argument("train config: clip_epsilon must be > 0");
  }
  if (minibatch_size == 0 || epochs_per_update == 0 ||
      rollout_episodes_per_update == 0 || hidden_size == 0) {
    throw std::invalid_argument("train config: sizes must be >= 1");
  }
}

PolicyParams PolicyParams::init(std::size_t obs_dim, std::size_t act_dim,
                                std::size_t hidden, RandomStream& rng) {
  const double trunk_gain = std::sqrt(2.0);
  PolicyParams params;
  params.actor = Mlp::orthogonal(obs_dim, hidden, act_dim, trunk_gain, 0.01, rng);
  params.critic = Mlp::orthogonal(obs_dim, hidden, 1, trunk_gain, 0.01, rng);
  // Fresh policies start biased toward opening facilities (activation
  // probability ~0.56 per bit). A closed network ships nothing, so an
  // unbiased start spends its first updates learning to open anything at
  // all instead of learning which facilities to run.
  for (double& b : params.actor.b3) b = 0.25;
  return params;
}

std::vector<double*> PolicyParams::parameter_view() {
  std::vector<double*> view = actor.parameter_view();
  const std::vector<double*> critic_view = critic.parameter_view();
  view.insert(view.end(), critic_view.begin(), critic_view.end());
  return view;
}

std::vector<const double*> PolicyParams::parameter_view() const {
  std::vector<const double*> view = actor.parameter_view();
  const std::vector<const double*> critic_view = critic.parameter_view();
  view.insert(view.end(), critic_view.begin(), critic_view.end());
  return view;
}

void PolicyParams::fill(double value) {
  actor.fill(value);
  critic.fill(value);
}

PolicyOutput policy_forward(const PolicyParams& params, const Observation& obs) {
  PolicyOutput out;
  out.logits = params.actor.forward(obs);
  out.value = params.critic.forward(obs)[0];
  return out;
}

SampledAction sample_action(const std::vector<double>& logits, RandomStream& rng) {
  SampledAction sampled;
  sampled.bits.resize(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    sampled.bits[i] = rng.uniform() < sigmoid(logits[i]) ? 1 : 0;
  }
  sampled.log_prob = action_log_prob(logits, sampled.bits);
  return sampled;
}

double action_log_prob(const std::vector<double>& logits,
                       const std::vector<std::uint8_t>& bits) {
  double lp = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    lp += bits[i] ? log_sigmoid(logits[i]) : log_sigmoid(-logits[i]);
  }
  return lp;
}

double mean_bit_entropy(const std::vector<double>& logits) {
  double total = 0.0;
  for (double l : logits) total += bit_entropy(l);
  return total / static_cast<double>(logits.size());
}

GaeResult compute_gae(const std::vector<double>& rewards,
                      const std::vector<double>& values, double bootstrap,
                      double gamma, double lambda) {
  if (rewards.size() != values.size()) {
    throw std::invalid_argument("gae: rewards/values length mismatch");
  }
  const std::size_t n = rewards.size();
  GaeResult out;
  out.advantages.assign(n, 0.0);
  out.returns.assign(n, 0.0);
  double running = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    const double next_value = (i + 1 < n) ? values[i + 1] : bootstrap;
    const double delta = rewards[i] + gamma * next_value - values[i];
    running = delta + gamma * lambda * running;
    out.advantages[i] = running;
    out.returns[i] = running + values[i];
  }
  return out;
}

void normalize_advantages(TrajectoryBuffer& buffer) {
  if (buffer.samples.empty()) return;
  const double n = static_cast<double>(buffer.samples.size());
  double mean = 0.0;
  for (const Sample& s : buffer.samples) mean += s.advantage;
  mean /= n;
  double var = 0.0;
  for (const Sample& s : buffer.samples) {
    const double d = s.advantage - mean;
    var += d * d;
  }
  const double std_dev = std::sqrt(var / n);
  const double scale = std_dev > 1e-8 ? 1.0 / std_dev : 1.0;
  for (Sample& s : buffer.samples) {
    s.advantage = (s.advantage - mean) * scale;
  }
}

LossResult ppo_loss(const PolicyParams& params, std::span<const Sample> batch,
                    const TrainConfig& config) {
  if (batch.empty()) {
    throw std::invalid_argument("ppo_loss: empty batch");
  }
  const std::size_t act_dim = params.actor.out;
  const double batch_size = static_cast<double>(batch.size());
  const double eps = config.clip_epsilon;

  LossResult result;
  result.grad.actor = Mlp::zeros(params.actor.in, params.actor.hidden, act_dim);
  result.grad.critic = Mlp::zeros(params.critic.in, params.critic.hidden, 1);

  for (const Sample& sample : batch) {
    Mlp::Cache actor_cache, critic_cache;
    const std::vector<double> logits = params.actor.forward(sample.obs, &actor_cache);
    const double value = params.critic.forward(sample.obs, &critic_cache)[0];

    const double new_lp = action_log_prob(logits, sample.bits);
    const double ratio = std::exp(new_lp - sample.old_log_prob);
    if (!std::isfinite(ratio)) {
      std::ostringstream msg;
      msg << "ppo_loss: non-finite ratio (new_lp=" << new_lp
          << ", old_lp=" << sample.old_log_prob << ")";
      throw std::runtime_error(msg.str());
    }
    const double clipped = std::clamp(ratio, 1.0 - eps, 1.0 + eps);
    const double surr1 = ratio * sample.advantage;
    const double surr2 = clipped * sample.advantage;
    result.policy_term += -std::min(surr1, surr2) / batch_size;
    // The clipped branch is constant in the parameters, so only the
    // unclipped branch contributes gradient.
    const bool unclipped_active = surr1 <= surr2;

    const double value_error = value - sample.ret;
    result.value_term += value_error * value_error / batch_size;

    std::vector<double> dlogits(act_dim, 0.0);
    double entropy_sum = 0.0;
    for (std::size_t j = 0; j < act_dim; ++j) {
      const double s = sigmoid(logits[j]);
      entropy_sum += bit_entropy(logits[j]);
      if (unclipped_active) {
        // d(-surr1)/dlogit = -A * rho * (bit - sigmoid)
        dlogits[j] += -sample.advantage * ratio *
                      (static_cast<double>(sample.bits[j]) - s) / batch_size;
      }
      // d(-entropy_coef * H)/dlogit = entropy_coef * l * s * (1 - s)
      dlogits[j] += config.entropy_coef * logits[j] * s * (1.0 - s) /
                    (batch_size * static_cast<double>(act_dim));
    }
    result.entropy += entropy_sum / (batch_size * static_cast<double>(act_dim));

    params.actor.backward(actor_cache, dlogits, result.grad.actor);
    const std::vector<double> dvalue = {config.value_coef * 2.0 * value_error /
                                        batch_size};
    params.critic.backward(critic_cache, dvalue, result.grad.critic);
  }

  result.loss = result.policy_term + config.value_coef * result.value_term -
                config.entropy_coef * result.entropy;
  if (!std::isfinite(result.loss)) {
    std::ostringstream msg;
    msg << "ppo_loss: non-finite loss (policy=" << result.policy_term
        << ", value=" << result.value_term << ", entropy=" << result.entropy << ")";
    throw std::runtime_error(msg.str());
  }
  return result;
}

void ppo_update(PolicyParams& params, AdamOptimizer& adam,
                const TrajectoryBuffer& buffer, const TrainConfig& config,
                RandomStream& shuffle_rng) {
  const std::size_t n = buffer.samples.size();
  if (n == 0) return;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  std::vector<Sample> minibatch;
  minibatch.reserve(config.minibatch_size);
  for (std::size_t epoch = 0; epoch < config.epochs_per_update; ++epoch) {
    // Fisher-Yates on the seeded stream.
    for (std::size_t i = n; i-- > 1;) {
      const std::size_t j = static_cast<std::size_t>(
          shuffle_rng.uniform_int(0, static_cast<std::int64_t>(i)));
      std::swap(order[i], order[j]);
    }
    for (std::size_t start = 0; start < n; start += config.minibatch_size) {
      const std::size_t stop = std::min(start + config.minibatch_size, n);
      minibatch.clear();
      for (std::size_t k = start; k < stop; ++k) {
        minibatch.push_back(buffer.samples[order[k]]);
      }
      LossResult loss = ppo_loss(params, minibatch, config);
      const std::vector<double*> grad_view = loss.grad.parameter_view();
      clip_global_norm(grad_view, config.max_grad_norm);
      std::vector<const double*> grad_const(grad_view.begin(), grad_view.end());
      adam.step(params.parameter_view(), grad_const, config.learning_rate);
    }
  }
}

TrainResult train(const NetworkInstance& instance, const DemandSeries& series,
                  const TrainConfig& config, const EnvConfig& env_config) {
  config.validate();
  const RandomStream root(config.seed);
  RandomStream init_rng = root.substream(RandomStream::kPolicyInitStream);
  RandomStream env_rng = root.substream(RandomStream::kEnvStream);
  RandomStream update_rng = root.substream(RandomStream::kUpdateStream);

  Environment env(instance, series, env_config);
  const std::size_t horizon = env_config.horizon;
  const std::size_t obs_dim =
      Environment::observation_size(instance.n_points, instance.n_warehouses);
  const std::size_t act_dim = instance.n_centers + instance.n_warehouses;

  TrainResult result;
  result.params = PolicyParams::init(obs_dim, act_dim, config.hidden_size, init_rng);
  AdamOptimizer adam;

  const std::size_t n_episodes = config.total_steps / horizon;
  result.episodes.reserve(n_episodes);

  TrajectoryBuffer buffer;
  std::vector<double> ep_rewards(horizon), ep_values(horizon);

  for (std::size_t episode = 0; episode < n_episodes; ++episode) {
    Observation obs = env.reset();
    EpisodeMetrics metrics;
    const std::size_t episode_start = buffer.samples.size();
    buffer.episode_starts.push_back(episode_start);

    for (std::size_t t = 0; t < horizon; ++t) {
      const PolicyOutput head = policy_forward(result.params, obs);
      const SampledAction sampled = sample_action(head.logits, env_rng);
      const Action action =
          bits_to_action(sampled.bits, instance.n_centers, instance.n_warehouses);
      auto [next_obs, outcome, done] = env.step(action, env_rng);

      Sample s;
      s.obs = std::move(obs);
      s.bits = sampled.bits;
      s.old_log_prob = sampled.log_prob;
      s.reward = outcome.reward;
      s.value = head.value;
      buffer.samples.push_back(std::move(s));

      ep_rewards[t] = outcome.reward;
      ep_values[t] = head.value;
      metrics.reward += outcome.reward;
      metrics.satisfaction += outcome.avg_satisfaction;
      metrics.efficiency += outcome.efficiency;
      metrics.cost += outcome.cost;
      metrics.inventory += outcome.avg_inventory;
      obs = std::move(next_obs);
      (void)done;
    }

    const GaeResult gae = compute_gae(ep_rewards, ep_values, 0.0, config.gamma,
                                      config.gae_lambda);
    for (std::size_t t = 0; t < horizon; ++t) {
      buffer.samples[episode_start + t].advantage = gae.advantages[t];
      buffer.samples[episode_start + t].ret = gae.returns[t];
    }

    const double steps = static_cast<double>(horizon);
    metrics.reward /= steps;
    metrics.satisfaction /= steps;
    metrics.efficiency /= steps;
    metrics.cost /= steps;
    metrics.inventory /= steps;
    result.episodes.push_back(metrics);

    const bool group_full =
        (episode + 1) % config.rollout_episodes_per_update == 0;
    if (group_full || episode + 1 == n_episodes) {
      normalize_advantages(buffer);
      ppo_update(result.params, adam, buffer, config, update_rng);
      buffer.clear();
    }
  }
  return result;
}

TrainResult train(const NetworkInstance& instance, const DemandParams& demand_params,
                  const TrainConfig& config, const EnvConfig& env_config) {
  DemandParams run_params = demand_params;
  // Fold the run seed into the demand stream so distinct runs see distinct
  // stochastic demand realizations.
  run_params.seed = RandomStream(config.seed)
                        .substream(RandomStream::kDemandStream)
                        .next_u64() ^
                    demand_params.seed;
  const DemandSeries series =
      generate_series(run_params, env_config.horizon, instance.n_points);
  return train(instance, series, config, env_config);
}

std::vector<std::vector<StepMetrics>> evaluate(const PolicyParams& params,
                                               const NetworkInstance& instance,
                                               const DemandSeries& series,
                                               std::size_t n_episodes,
                                               RandomStream& rng,
                                               const EnvConfig& env_config) {
  Environment env(instance, series, env_config);
  std::vector<std::vector<StepMetrics>> all;
  all.reserve(n_episodes);
  for (std::size_t episode = 0; episode < n_episodes; ++episode) {
    Observation obs = env.reset();
    std::vector<StepMetrics> rows;
    rows.reserve(env_config.horizon);
    for (std::size_t t = 0; t < env_config.horizon; ++t) {
      const PolicyOutput head = policy_forward(params, obs);
      const SampledAction sampled = sample_action(head.logits, rng);
      const Action action =
          bits_to_action(sampled.bits, instance.n_centers, instance.n_warehouses);
      auto [next_obs, outcome, done] = env.step(action, rng);
      rows.push_back({outcome.reward, outcome.avg_satisfaction, outcome.efficiency,
                      outcome.cost, outcome.avg_inventory});
      obs = std::move(next_obs);
      (void)done;
    }
    all.push_back(std::move(rows));
  }
  return all;
}

void save_checkpoint(const PolicyParams& params, const TrainConfig& config,
                     std::ostream& os) {
  os << "hsc_checkpoint v1\n";
  os << "gamma " << format_double(config.gamma) << '\n';
  os << "gae_lambda " << format_double(config.gae_lambda) << '\n';
  os << "clip_epsilon " << format_double(config.clip_epsilon) << '\n';
  os << "learning_rate " << format_double(config.learning_rate) << '\n';
  os << "entropy_coef " << format_double(config.entropy_coef) << '\n';
  os << "value_coef " << format_double(config.value_coef) << '\n';
  os << "minibatch_size " << config.minibatch_size << '\n';
  os << "epochs_per_update " << config.epochs_per_update << '\n';
  os << "rollout_episodes_per_update " << config.rollout_episodes_per_update << '\n';
  os << "total_steps " << config.total_steps << '\n';
  os << "max_grad_norm " << format_double(config.max_grad_norm) << '\n';
  os << "hidden_size " << config.hidden_size << '\n';
  os << "seed " << config.seed << '\n';
  write_mlp(os, params.actor);
  write_mlp(os, params.critic);
}

Checkpoint load_checkpoint(std::istream& is) {
  std::string magic, version;
  if (!(is >> magic >> version) || magic != "hsc_checkpoint" || version != "v1") {
    throw std::runtime_error("checkpoint: unrecognized header");
  }
  Checkpoint ckpt;
  auto read_scalar = [&is](const char* name, auto& value) {
    std::string label;
    if (!(is >> label >> value) || label != name) {
      throw std::runtime_error(std::string("checkpoint: expected field ") + name);
    }
  };
  read_scalar("gamma", ckpt.config.gamma);
  read_scalar("gae_lambda", ckpt.config.gae_lambda);
  read_scalar("clip_epsilon", ckpt.config.clip_epsilon);
  read_scalar("learning_rate", ckpt.config.learning_rate);
  read_scalar("entropy_coef", ckpt.config.entropy_coef);
  read_scalar("value_coef", ckpt.config.value_coef);
  read_scalar("minibatch_size", ckpt.config.minibatch_size);
  read_scalar("epochs_per_update", ckpt.config.epochs_per_update);
  read_scalar("rollout_episodes_per_update", ckpt.config.rollout_episodes_per_update);
  read_scalar("total_steps", ckpt.config.total_steps);
  read_scalar("max_grad_norm", ckpt.config.max_grad_norm);
  read_scalar("hidden_size", ckpt.config.hidden_size);
  read_scalar("seed", ckpt.config.seed);
  ckpt.params.actor = read_mlp(is);
  ckpt.params.critic = read_mlp(is);
  return ckpt;
}

}  // namespace hsc
