#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "hsc/ppo.hpp"

using namespace hsc;

namespace {

// Random batch over a toy network. old_log_prob is offset a little from
// the exact log-probability so ratios sit strictly inside the clip band;
// the loss is smooth there, which central differences require.
struct ToyProblem {
  PolicyParams params;
  std::vector<Sample> batch;
  TrainConfig config;
};

ToyProblem make_toy(std::uint64_t seed, std::size_t obs_dim = 5,
                    std::size_t act_dim = 3, std::size_t hidden = 4,
                    std::size_t batch_size = 8) {
  RandomStream rng(seed);
  ToyProblem toy;
  toy.params = PolicyParams::init(obs_dim, act_dim, hidden, rng);
  // Non-trivial output weights so value/entropy gradients are not tiny.
  for (double* p : toy.params.parameter_view()) {
    *p += 0.1 * rng.normal();
  }
  toy.config.clip_epsilon = 0.2;
  toy.config.entropy_coef = 0.01;
  toy.config.value_coef = 0.5;

  std::vector<double> advantages(batch_size);
  double mean = 0.0;
  for (double& a : advantages) {
    a = rng.normal();
    mean += a;
  }
  mean /= static_cast<double>(batch_size);
  double var = 0.0;
  for (double a : advantages) var += (a - mean) * (a - mean);
  const double std_dev = std::sqrt(var / static_cast<double>(batch_size));

  for (std::size_t i = 0; i < batch_size; ++i) {
    Sample s;
    s.obs.resize(obs_dim);
    for (double& v : s.obs) v = rng.uniform();
    const PolicyOutput head = policy_forward(toy.params, s.obs);
    const SampledAction sampled = sample_action(head.logits, rng);
    s.bits = sampled.bits;
    s.old_log_prob = sampled.log_prob + 0.08 * (rng.uniform() - 0.5);
    s.advantage = (advantages[i] - mean) / (std_dev > 1e-12 ? std_dev : 1.0);
    s.ret = rng.normal();
    toy.batch.push_back(std::move(s));
  }
  return toy;
}

double loss_at(const PolicyParams& params, const std::vector<Sample>& batch,
               const TrainConfig& config) {
  return ppo_loss(params, batch, config).loss;
}

}  // namespace

TEST_CASE("zero weights give logits 0, probability 0.5, value 0") {
  PolicyParams params;
  params.actor = Mlp::zeros(5, 4, 3);
  params.critic = Mlp::zeros(5, 4, 1);
  const Observation obs = {0.1, 0.2, 0.3, 0.4, 0.5};
  const PolicyOutput out = policy_forward(params, obs);
  for (double l : out.logits) CHECK(l == 0.0);
  CHECK(out.value == 0.0);
  const PolicyOutput again = policy_forward(params, obs);
  CHECK(out.logits == again.logits);
  CHECK(out.value == again.value);
}

TEST_CASE("saturated logits pin their bits") {
  RandomStream rng(1);
  const std::vector<double> logits = {30.0, -30.0, 0.0};
  int ones_first = 0, ones_second = 0;
  for (int i = 0; i < 10000; ++i) {
    const SampledAction a = sample_action(logits, rng);
    ones_first += a.bits[0];
    ones_second += a.bits[1];
  }
  CHECK(ones_first > 9990);
  CHECK(ones_second < 10);
}

TEST_CASE("zero logits behave like fair coins") {
  RandomStream rng(2);
  const std::vector<double> logits(8, 0.0);
  double total = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const SampledAction a = sample_action(logits, rng);
    for (auto b : a.bits) total += b;
  }
  CHECK(std::abs(total / (10000.0 * 8.0) - 0.5) < 0.02);
}

TEST_CASE("sampled log_prob matches an independent recomputation") {
  RandomStream rng(3);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> logits(5);
    for (double& l : logits) l = rng.normal(0.0, 2.0);
    const SampledAction a = sample_action(logits, rng);
    CHECK(a.log_prob <= 0.0);
    CHECK(std::isfinite(a.log_prob));
    CHECK(std::abs(a.log_prob - action_log_prob(logits, a.bits)) < 1e-12);
  }
}

TEST_CASE("mean bit entropy stays within [0, ln 2]") {
  RandomStream rng(4);
  for (int i = 0; i < 1000; ++i) {
    std::vector<double> logits(6);
    for (double& l : logits) l = rng.normal(0.0, 5.0);
    const double h = mean_bit_entropy(logits);
    REQUIRE(h >= 0.0);
    REQUIRE(h <= std::log(2.0) + 1e-15);
  }
  CHECK(mean_bit_entropy({0.0, 0.0}) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("gae collapses to one-step deltas at lambda 0") {
  const std::vector<double> rewards = {1.0, 2.0, 3.0};
  const std::vector<double> values = {0.5, 1.0, 1.5};
  const GaeResult g = compute_gae(rewards, values, 0.0, 0.9, 0.0);
  CHECK(g.advantages[0] == doctest::Approx(1.0 + 0.9 * 1.0 - 0.5));
  CHECK(g.advantages[1] == doctest::Approx(2.0 + 0.9 * 1.5 - 1.0));
  CHECK(g.advantages[2] == doctest::Approx(3.0 - 1.5));
}

TEST_CASE("gae is zero when rewards and values are zero") {
  const GaeResult g = compute_gae({0, 0, 0, 0}, {0, 0, 0, 0}, 0.0, 0.99, 0.95);
  for (double a : g.advantages) CHECK(a == 0.0);
  for (double r : g.returns) CHECK(r == 0.0);
}

TEST_CASE("gae with gamma=lambda=1 and zero values gives suffix sums") {
  RandomStream rng(5);
  std::vector<double> rewards(6);
  for (double& r : rewards) r = rng.normal();
  const GaeResult g =
      compute_gae(rewards, std::vector<double>(6, 0.0), 0.0, 1.0, 1.0);
  for (std::size_t t = 0; t < 6; ++t) {
    double suffix = 0.0;
    for (std::size_t u = t; u < 6; ++u) suffix += rewards[u];
    CHECK(g.advantages[t] == doctest::Approx(suffix).epsilon(1e-12));
  }
}

TEST_CASE("gae matches the brute-force term sums on short episodes") {
  RandomStream rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = static_cast<std::size_t>(rng.uniform_int(1, 6));
    std::vector<double> rewards(n), values(n);
    for (double& r : rewards) r = rng.normal();
    for (double& v : values) v = rng.normal();
    const double gamma = 0.5 + 0.5 * rng.uniform();
    const double lambda = rng.uniform();
    const GaeResult g = compute_gae(rewards, values, 0.0, gamma, lambda);

    for (std::size_t t = 0; t < n; ++t) {
      double advantage = 0.0;
      double weight = 1.0;
      for (std::size_t l = t; l < n; ++l) {
        const double next_value = l + 1 < n ? values[l + 1] : 0.0;
        const double delta = rewards[l] + gamma * next_value - values[l];
        advantage += weight * delta;
        weight *= gamma * lambda;
      }
      REQUIRE(std::abs(g.advantages[t] - advantage) < 1e-10);
      REQUIRE(std::abs(g.returns[t] - (advantage + values[t])) < 1e-10);
    }
  }
}

TEST_CASE("policy term vanishes when the policy has not moved") {
  ToyProblem toy = make_toy(7);
  // exact old log-probs: ratio is exactly 1
  for (Sample& s : toy.batch) {
    const PolicyOutput head = policy_forward(toy.params, s.obs);
    s.old_log_prob = action_log_prob(head.logits, s.bits);
  }
  const LossResult r = ppo_loss(toy.params, toy.batch, toy.config);
  CHECK(std::abs(r.policy_term) < 1e-12);
}

TEST_CASE("a sample pushed past the clip bound stops contributing gradient") {
  ToyProblem toy = make_toy(8, 4, 2, 4, 1);
  Sample& s = toy.batch[0];
  const PolicyOutput head = policy_forward(toy.params, s.obs);
  // ratio = 2, beyond 1+eps, with positive advantage: clipped branch wins
  s.old_log_prob = action_log_prob(head.logits, s.bits) - std::log(2.0);
  s.advantage = 1.0;
  toy.config.entropy_coef = 0.0;
  toy.config.value_coef = 0.0;
  const LossResult r = ppo_loss(toy.params, toy.batch, toy.config);
  for (const double* g : r.grad.actor.parameter_view()) {
    REQUIRE(*g == 0.0);
  }
}

TEST_CASE("clipped loss equals the plain surrogate when ratios are interior") {
  ToyProblem toy = make_toy(9);
  toy.config.entropy_coef = 0.0;
  toy.config.value_coef = 0.0;
  const LossResult clipped = ppo_loss(toy.params, toy.batch, toy.config);
  double plain = 0.0;
  for (const Sample& s : toy.batch) {
    const PolicyOutput head = policy_forward(toy.params, s.obs);
    const double ratio =
        std::exp(action_log_prob(head.logits, s.bits) - s.old_log_prob);
    REQUIRE(ratio > 0.8);
    REQUIRE(ratio < 1.2);
    plain += -ratio * s.advantage / static_cast<double>(toy.batch.size());
  }
  CHECK(clipped.loss == doctest::Approx(plain).epsilon(1e-12));
}

TEST_CASE("analytic gradient matches central finite differences") {
  for (std::uint64_t trial = 0; trial < 3; ++trial) {
    ToyProblem toy = make_toy(100 + trial);
    LossResult analytic = ppo_loss(toy.params, toy.batch, toy.config);

    std::vector<double*> params = toy.params.parameter_view();
    const std::vector<double*> grads = analytic.grad.parameter_view();

    const double h = 1e-5;
    double max_rel = 0.0;
    for (std::size_t i = 0; i < params.size(); ++i) {
      const double saved = *params[i];
      *params[i] = saved + h;
      const double up = loss_at(toy.params, toy.batch, toy.config);
      *params[i] = saved - h;
      const double down = loss_at(toy.params, toy.batch, toy.config);
      *params[i] = saved;
      const double fd = (up - down) / (2.0 * h);
      const double rel = std::abs(*grads[i] - fd) /
                         std::max({1.0, std::abs(*grads[i]), std::abs(fd)});
      max_rel = std::max(max_rel, rel);
    }
    CHECK(max_rel < 1e-4);
  }
}

TEST_CASE("zero learning rate leaves parameters bitwise unchanged") {
  ToyProblem toy = make_toy(10);
  toy.config.learning_rate = 0.0;
  toy.config.minibatch_size = 4;
  toy.config.epochs_per_update = 2;
  TrajectoryBuffer buffer;
  buffer.samples = toy.batch;
  buffer.episode_starts = {0};

  PolicyParams before = toy.params;
  AdamOptimizer adam;
  RandomStream shuffle(1);
  ppo_update(toy.params, adam, buffer, toy.config, shuffle);

  const auto before_view = before.parameter_view();
  const auto after_view = toy.params.parameter_view();
  for (std::size_t i = 0; i < before_view.size(); ++i) {
    REQUIRE(*before_view[i] == *after_view[i]);
  }
}

TEST_CASE("one update moves the loss downhill on a fixed batch") {
  ToyProblem toy = make_toy(11, 5, 3, 8, 32);
  toy.config.learning_rate = 1e-3;
  toy.config.minibatch_size = 32;
  toy.config.epochs_per_update = 1;
  TrajectoryBuffer buffer;
  buffer.samples = toy.batch;
  buffer.episode_starts = {0};

  const double before = loss_at(toy.params, toy.batch, toy.config);
  AdamOptimizer adam;
  RandomStream shuffle(2);
  ppo_update(toy.params, adam, buffer, toy.config, shuffle);
  const double after = loss_at(toy.params, toy.batch, toy.config);
  CHECK(after < before);
}

TEST_CASE("updates are deterministic in the shuffle seed") {
  auto run = [] {
    ToyProblem toy = make_toy(12, 5, 3, 4, 16);
    toy.config.minibatch_size = 8;
    TrajectoryBuffer buffer;
    buffer.samples = toy.batch;
    buffer.episode_starts = {0};
    AdamOptimizer adam;
    RandomStream shuffle(77);
    ppo_update(toy.params, adam, buffer, toy.config, shuffle);
    std::vector<double> flat;
    for (const double* p : toy.params.parameter_view()) flat.push_back(*p);
    return flat;
  };
  CHECK(run() == run());
}

TEST_CASE("short training run records the expected episode count") {
  const NetworkInstance instance = generate_instance(NetworkConfig{});
  TrainConfig config;
  config.total_steps = 1200;  // 12 episodes at horizon 100
  config.seed = 5;
  const TrainResult result = train(instance, DemandParams{}, config);
  CHECK(result.episodes.size() == 12);
  for (const EpisodeMetrics& m : result.episodes) {
    CHECK(std::isfinite(m.reward));
    CHECK(std::isfinite(m.satisfaction));
    CHECK(std::isfinite(m.efficiency));
    CHECK(std::isfinite(m.cost));
    CHECK(std::isfinite(m.inventory));
  }
}

TEST_CASE("training is deterministic in its seed") {
  const NetworkInstance instance = generate_instance(NetworkConfig{});
  TrainConfig config;
  config.total_steps = 400;
  config.seed = 21;
  const TrainResult a = train(instance, DemandParams{}, config);
  const TrainResult b = train(instance, DemandParams{}, config);
  REQUIRE(a.episodes.size() == b.episodes.size());
  for (std::size_t e = 0; e < a.episodes.size(); ++e) {
    CHECK(a.episodes[e].reward == b.episodes[e].reward);
  }
}

TEST_CASE("evaluation never mutates the policy and replays exactly") {
  const NetworkInstance instance = generate_instance(NetworkConfig{});
  const DemandSeries series = generate_series(DemandParams{}, 100, 10);
  RandomStream init(3);
  const PolicyParams params = PolicyParams::init(66, 20, 16, init);
  const PolicyParams snapshot = params;

  RandomStream eval_rng_a(9);
  const auto a = evaluate(params, instance, series, 2, eval_rng_a);
  RandomStream eval_rng_b(9);
  const auto b = evaluate(params, instance, series, 2, eval_rng_b);

  REQUIRE(a.size() == 2);
  REQUIRE(a[0].size() == 100);
  for (std::size_t e = 0; e < a.size(); ++e) {
    for (std::size_t t = 0; t < a[e].size(); ++t) {
      CHECK(a[e][t].reward == b[e][t].reward);
    }
  }
  const auto params_view = params.parameter_view();
  const auto snapshot_view = snapshot.parameter_view();
  for (std::size_t i = 0; i < params_view.size(); ++i) {
    REQUIRE(*params_view[i] == *snapshot_view[i]);
  }
}

TEST_CASE("checkpoints round-trip bitwise") {
  RandomStream rng(14);
  PolicyParams params = PolicyParams::init(7, 4, 8, rng);
  TrainConfig config;
  config.learning_rate = 3e-4;
  config.seed = 99;

  std::stringstream ss;
  save_checkpoint(params, config, ss);
  const Checkpoint loaded = load_checkpoint(ss);

  CHECK(loaded.config.learning_rate == config.learning_rate);
  CHECK(loaded.config.seed == config.seed);
  const auto a = params.parameter_view();
  const auto b = loaded.params.parameter_view();
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(*a[i] == *b[i]);
  }
}

TEST_CASE("loss reports non-finite inputs instead of propagating them") {
  ToyProblem toy = make_toy(15);
  toy.batch[0].old_log_prob = -1e9;  // ratio overflows
  CHECK_THROWS_AS(ppo_loss(toy.params, toy.batch, toy.config),
                  std::runtime_error);
}

TEST_CASE("train config validation") {
  TrainConfig config;
  config.gamma = 0.0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config = TrainConfig{};
  config.clip_epsilon = 0.0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
}
