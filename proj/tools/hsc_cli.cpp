// Command-line front end for the supply chain design workbench: training,
// sensitivity, price sweeps, method comparison, demand generation, replay.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hsc/harness.hpp"
#include "hsc/report.hpp"

namespace {

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> runs;
  std::string out_dir;
  std::string demand_model;
  std::optional<double> clip_max;
  std::string mismatch_mode;
};

void add_common_flags(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "key=value configuration file");
  cmd->add_option("--seed", opts.seed, "master experiment seed");
  cmd->add_option("--runs", opts.runs, "number of training runs");
  cmd->add_option("--out", opts.out_dir, "output directory for CSVs");
  cmd->add_option("--demand", opts.demand_model, "demand model: gbm|poisson|merton");
  cmd->add_option("--clip-max", opts.clip_max, "demand clipping upper bound");
  cmd->add_option("--mismatch-mode", opts.mismatch_mode,
                  "mismatch penalty mode: current|b13");
}

hsc::ExperimentConfig build_config(const CommonOptions& opts) {
  hsc::ExperimentConfig config = opts.config_path.empty()
                                     ? hsc::default_experiment_config()
                                     : hsc::load_config_file(opts.config_path);
  if (opts.seed) hsc::apply_key(config, "seed", std::to_string(*opts.seed));
  if (opts.runs) hsc::apply_key(config, "n_runs", std::to_string(*opts.runs));
  if (!opts.demand_model.empty()) {
    hsc::apply_key(config, "demand_model", opts.demand_model);
  }
  if (opts.clip_max) {
    hsc::apply_key(config, "demand_clip_high", hsc::format_value(*opts.clip_max));
  }
  if (!opts.mismatch_mode.empty()) {
    hsc::apply_key(config, "mismatch_mode", opts.mismatch_mode);
  }
  if (!opts.out_dir.empty()) config.out_dir = opts.out_dir;
  return config;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void maybe_dump_instance(const hsc::ExperimentConfig& config,
                         const std::string& path) {
  if (path.empty()) return;
  hsc::ExperimentConfig finalized = config;
  finalized.finalize();
  const hsc::NetworkInstance instance = hsc::generate_instance(finalized.network);
  std::ostringstream ss;
  hsc::dump_instance(instance, ss);
  hsc::atomic_write(path, ss.str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic humanitarian supply chain design workbench"};
  app.require_subcommand(1);

  CommonOptions train_opts, sens_opts, sweep_opts, compare_opts, demand_opts,
      replay_opts;

  // train
  auto* train_cmd = app.add_subcommand("train", "PPO training experiment");
  add_common_flags(train_cmd, train_opts);
  std::string dump_instance_path;
  train_cmd->add_option("--dump-instance", dump_instance_path,
                        "write the sampled network instance to this path");

  // sensitivity
  auto* sens_cmd =
      app.add_subcommand("sensitivity", "parameter sensitivity suite");
  add_common_flags(sens_cmd, sens_opts);
  std::string variants = "1,2,3,4,5,6,7,8,9";
  sens_cmd->add_option("--variants", variants,
                       "comma-separated variant ids (1..9)");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "price sweep over h and V");
  add_common_flags(sweep_cmd, sweep_opts);
  std::string h_list = "0.5", v_list = "100";
  bool grid = false;
  sweep_cmd->add_option("--h-values", h_list, "comma-separated transport coefficients");
  sweep_cmd->add_option("--v-values", v_list, "comma-separated kit values");
  sweep_cmd->add_flag("--grid", grid, "cross the two lists instead of per-axis");

  // compare
  auto* compare_cmd =
      app.add_subcommand("compare", "PPO vs NSGA-II (BS/BE) vs PSO");
  add_common_flags(compare_cmd, compare_opts);

  // demand
  auto* demand_cmd = app.add_subcommand("demand", "emit a demand series CSV");
  add_common_flags(demand_cmd, demand_opts);
  std::string model = "gbm";
  std::size_t steps = 100, points = 10;
  demand_cmd->add_option("--model", model, "gbm|poisson|merton");
  demand_cmd->add_option("--steps", steps, "number of time steps");
  demand_cmd->add_option("--points", points, "number of demand points");

  // replay
  auto* replay_cmd =
      app.add_subcommand("replay", "re-run a recorded action sequence");
  add_common_flags(replay_cmd, replay_opts);
  std::string actions_path;
  replay_cmd->add_option("--actions", actions_path, "action sequence file")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train_cmd) {
      hsc::ExperimentConfig config = build_config(train_opts);
      config.kind = hsc::ExperimentKind::kTrain;
      maybe_dump_instance(config, dump_instance_path);
      const auto result = hsc::run_training_experiment(config);
      std::cout << "first10=" << result.summary.avg_reward_first10
                << " last10=" << result.summary.avg_reward_last10
                << " std=" << result.summary.reward_std << '\n';
    } else if (*sens_cmd) {
      hsc::ExperimentConfig config = build_config(sens_opts);
      config.kind = hsc::ExperimentKind::kSensitivity;
      if (!sens_opts.runs) config.n_runs = 3;
      const auto rows =
          hsc::run_sensitivity_suite(config, parse_int_list(variants));
      for (const auto& row : rows) {
        std::cout << row.id << " (" << row.label
                  << "): first10=" << row.summary.avg_reward_first10
                  << " last10=" << row.summary.avg_reward_last10
                  << " std=" << row.summary.reward_std << '\n';
      }
    } else if (*sweep_cmd) {
      hsc::ExperimentConfig config = build_config(sweep_opts);
      config.kind = hsc::ExperimentKind::kPriceSweep;
      const auto cells = hsc::run_price_sweep(config, parse_double_list(h_list),
                                              parse_double_list(v_list), grid);
      for (const auto& cell : cells) {
        std::cout << "h=" << cell.transport_coef << " V=" << cell.kit_value
                  << " avg_reward_last10=" << cell.avg_reward_last10 << '\n';
      }
    } else if (*compare_cmd) {
      hsc::ExperimentConfig config = build_config(compare_opts);
      config.kind = hsc::ExperimentKind::kCompare;
      if (!compare_opts.runs) config.n_runs = 3;
      const auto report = hsc::run_comparison(config);
      for (const auto& method : report.methods) {
        std::cout << method.method << ": total_reward=" << method.totals.reward
                  << " total_satisfaction=" << method.totals.satisfaction
                  << " total_cost=" << method.totals.cost << '\n';
      }
    } else if (*demand_cmd) {
      hsc::ExperimentConfig config = build_config(demand_opts);
      config.kind = hsc::ExperimentKind::kDemand;
      hsc::apply_key(config, "demand_model", model);
      if (demand_opts.seed) config.demand.seed = *demand_opts.seed;
      const hsc::DemandSeries series =
          hsc::generate_series(config.demand, steps, points);
      const std::string csv =
          hsc::emit_demand_csv(series, hsc::config_hash(config));
      if (config.out_dir.empty()) {
        std::cout << csv;
      } else {
        hsc::atomic_write(config.out_dir / "demand.csv", csv);
      }
    } else if (*replay_cmd) {
      hsc::ExperimentConfig config = build_config(replay_opts);
      config.finalize();
      const auto actions = hsc::parse_replay(read_file(actions_path));
      if (actions.size() < config.env.horizon) {
        throw std::invalid_argument("replay: fewer actions than the horizon");
      }
      const hsc::NetworkInstance instance = hsc::generate_instance(config.network);
      const hsc::DemandSeries series = hsc::generate_series(
          config.demand, config.env.horizon, config.network.n_points);
      hsc::Environment env(instance, series, config.env);
      hsc::RandomStream rng(config.eval_seed);
      std::vector<hsc::TrajectoryRow> rows;
      env.reset();
      for (std::size_t t = 0; t < config.env.horizon; ++t) {
        auto [obs, outcome, done] = env.step(actions[t], rng);
        (void)obs;
        (void)done;
        double outsourced = 0.0;
        for (double o : outcome.outsourced) outsourced += o;
        rows.push_back({0, 0, t, outcome.reward, outcome.efficiency, outcome.cost,
                        outcome.penalty_mismatch, outcome.penalty_switch,
                        outcome.avg_satisfaction, outcome.avg_inventory,
                        outsourced});
      }
      const std::string csv =
          hsc::emit_trajectory_csv(rows, hsc::config_hash(config));
      if (config.out_dir.empty()) {
        std::cout << csv;
      } else {
        hsc::atomic_write(config.out_dir / "trajectory.csv", csv);
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
