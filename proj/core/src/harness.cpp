#include "hsc/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "hsc/report.hpp"

namespace hsc {

namespace {

std::string kind_to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kTrain: return "train";
    case ExperimentKind::kSensitivity: return "sensitivity";
    case ExperimentKind::kPriceSweep: return "sweep";
    case ExperimentKind::kCompare: return "compare";
    case ExperimentKind::kDemand: return "demand";
  }
  throw std::invalid_argument("unknown experiment kind");
}

ExperimentKind kind_from_string(const std::string& name) {
  if (name == "train") return ExperimentKind::kTrain;
  if (name == "sensitivity") return ExperimentKind::kSensitivity;
  if (name == "sweep") return ExperimentKind::kPriceSweep;
  if (name == "compare") return ExperimentKind::kCompare;
  if (name == "demand") return ExperimentKind::kDemand;
  throw std::invalid_argument("unknown experiment kind: " + name);
}

std::uint64_t parse_u64(const std::string& v) { return std::stoull(v); }
std::size_t parse_size(const std::string& v) { return std::stoul(v); }
double parse_double(const std::string& v) { return std::stod(v); }

std::vector<std::uint64_t> parse_u64_list(const std::string& v) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_u64(item));
  return out;
}

std::string join_u64_list(const std::vector<std::uint64_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

// Every configurable key, shared by apply_key and resolved_config_text.
struct KeyBinding {
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

const std::vector<std::pair<std::string, KeyBinding>>& key_table() {
  static const std::vector<std::pair<std::string, KeyBinding>> table = [] {
    std::vector<std::pair<std::string, KeyBinding>> t;
    auto add = [&t](const std::string& key,
                    std::function<void(ExperimentConfig&, const std::string&)> set,
                    std::function<std::string(const ExperimentConfig&)> get) {
      t.push_back({key, {std::move(set), std::move(get)}});
    };

    // network
    add("n_centers",
        [](ExperimentConfig& c, const std::string& v) { c.network.n_centers = parse_size(v); },
        [](const ExperimentConfig& c) { return std::to_string(c.network.n_centers); });
    add("n_warehouses",
        [](ExperimentConfig& c, const std::string& v) { c.network.n_warehouses = parse_size(v); },
        [](const ExperimentConfig& c) { return std::to_string(c.network.n_warehouses); });
    add("n_points",
        [](ExperimentConfig& c, const std::string& v) { c.network.n_points = parse_size(v); },
        [](const ExperimentConfig& c) { return std::to_string(c.network.n_points); });
    auto add_range = [&add](const std::string& key, IntRange NetworkConfig::*member) {
      add(key + "_min",
          [member](ExperimentConfig& c, const std::string& v) {
            (c.network.*member).low = std::stoll(v);
          },
          [member](const ExperimentConfig& c) {
            return std::to_string((c.network.*member).low);
          });
      add(key + "_max",
          [member](ExperimentConfig& c, const std::string& v) {
            (c.network.*member).high = std::stoll(v);
          },
          [member](const ExperimentConfig& c) {
            return std::to_string((c.network.*member).high);
          });
    };
    add_range("center_cost", &NetworkConfig::center_cost_range);
    add_range("center_capacity", &NetworkConfig::center_capacity_range);
    add_range("warehouse_cost", &NetworkConfig::warehouse_cost_range);
    add_range("warehouse_capacity", &NetworkConfig::warehouse_capacity_range);
    add_range("dist_cw", &NetworkConfig::dist_cw_range);
    add_range("dist_wp", &NetworkConfig::dist_wp_range);
    auto add_net_double = [&add](const std::string& key, double NetworkConfig::*member) {
      add(key,
          [member](ExperimentConfig& c, const std::string& v) {
            c.network.*member = parse_double(v);
          },
          [member](const ExperimentConfig& c) {
            return format_value(c.network.*member);
          });
    };
    add_net_double("transport_coef", &NetworkConfig::transport_coef);
    add_net_double("kit_value", &NetworkConfig::kit_value);
    add_net_double("mismatch_coef", &NetworkConfig::mismatch_coef);
    add_net_double("switch_cost_center", &NetworkConfig::switch_cost_center);
    add_net_double("switch_cost_warehouse", &NetworkConfig::switch_cost_warehouse);

    // demand
    add("demand_model",
        [](ExperimentConfig& c, const std::string& v) {
          c.demand.model = demand_model_from_string(v);
        },
        [](const ExperimentConfig& c) { return to_string(c.demand.model); });
    auto add_demand_double = [&add](const std::string& key, double DemandParams::*member) {
      add(key,
          [member](ExperimentConfig& c, const std::string& v) {
            c.demand.*member = parse_double(v);
          },
          [member](const ExperimentConfig& c) {
            return format_value(c.demand.*member);
          });
    };
    add_demand_double("demand_mu", &DemandParams::mu);
    add_demand_double("demand_sigma", &DemandParams::sigma);
    add_demand_double("demand_shock_std", &DemandParams::shock_std);
    add_demand_double("demand_poisson_rate", &DemandParams::poisson_rate);
    add_demand_double("demand_jump_intensity", &DemandParams::jump_intensity);
    add_demand_double("demand_jump_mean", &DemandParams::jump_mean);
    add_demand_double("demand_jump_std", &DemandParams::jump_std);
    add_demand_double("demand_init_low", &DemandParams::init_low);
    add_demand_double("demand_init_high", &DemandParams::init_high);
    add_demand_double("demand_clip_low", &DemandParams::clip_low);
    add_demand_double("demand_clip_high", &DemandParams::clip_high);
    add("demand_seed",
        [](ExperimentConfig& c, const std::string& v) { c.demand.seed = parse_u64(v); },
        [](const ExperimentConfig& c) { return std::to_string(c.demand.seed); });
    add("demand_mode",
        [](ExperimentConfig& c, const std::string& v) {
          if (v == "stochastic") {
            c.demand_mode = DemandMode::kStochastic;
          } else if (v == "deterministic") {
            c.demand_mode = DemandMode::kDeterministic;
          } else {
            throw std::invalid_argument("demand_mode must be stochastic|deterministic");
          }
        },
        [](const ExperimentConfig& c) {
          return c.demand_mode == DemandMode::kStochastic ? "stochastic"
                                                          : "deterministic";
        });

    // training
    auto add_train_double = [&add](const std::string& key, double TrainConfig::*member) {
      add(key,
          [member](ExperimentConfig& c, const std::string& v) {
            c.train.*member = parse_double(v);
          },
          [member](const ExperimentConfig& c) {
            return format_value(c.train.*member);
          });
    };
    auto add_train_size = [&add](const std::string& key, std::size_t TrainConfig::*member) {
      add(key,
          [member](ExperimentConfig& c, const std::string& v) {
            c.train.*member = parse_size(v);
          },
          [member](const ExperimentConfig& c) {
            return std::to_string(c.train.*member);
          });
    };
    add_train_double("gamma", &TrainConfig::gamma);
    add_train_double("gae_lambda", &TrainConfig::gae_lambda);
    add_train_double("clip_epsilon", &TrainConfig::clip_epsilon);
    add_train_double("learning_rate", &TrainConfig::learning_rate);
    add_train_double("entropy_coef", &TrainConfig::entropy_coef);
    add_train_double("value_coef", &TrainConfig::value_coef);
    add_train_double("max_grad_norm", &TrainConfig::max_grad_norm);
    add_train_size("minibatch_size", &TrainConfig::minibatch_size);
    add_train_size("epochs_per_update", &TrainConfig::epochs_per_update);
    add_train_size("rollout_episodes_per_update",
                   &TrainConfig::rollout_episodes_per_update);
    add_train_size("total_steps", &TrainConfig::total_steps);
    add_train_size("hidden_size", &TrainConfig::hidden_size);

    // environment
    add("horizon",
        [](ExperimentConfig& c, const std::string& v) { c.env.horizon = parse_size(v); },
        [](const ExperimentConfig& c) { return std::to_string(c.env.horizon); });
    add("mismatch_mode",
        [](ExperimentConfig& c, const std::string& v) {
          if (v == "current") {
            c.env.mismatch_mode = MismatchMode::kCurrent;
          } else if (v == "b13") {
            c.env.mismatch_mode = MismatchMode::kWithPrevInventory;
          } else {
            throw std::invalid_argument("mismatch_mode must be current|b13");
          }
        },
        [](const ExperimentConfig& c) {
          return c.env.mismatch_mode == MismatchMode::kCurrent ? "current" : "b13";
        });

    // baselines
    auto add_nsga_size = [&add](const std::string& key, std::size_t Nsga2Config::*member) {
      add(key,
          [member](ExperimentConfig& c, const std::string& v) {
            c.nsga.*member = parse_size(v);
          },
          [member](const ExperimentConfig& c) {
            return std::to_string(c.nsga.*member);
          });
    };
    add_nsga_size("nsga_population", &Nsga2Config::population);
    add_nsga_size("nsga_generations", &Nsga2Config::generations);
    add("nsga_crossover_prob",
        [](ExperimentConfig& c, const std::string& v) {
          c.nsga.crossover_prob = parse_double(v);
        },
        [](const ExperimentConfig& c) { return format_value(c.nsga.crossover_prob); });
    add("nsga_mutation_prob",
        [](ExperimentConfig& c, const std::string& v) {
          c.nsga.mutation_prob = parse_double(v);
        },
        [](const ExperimentConfig& c) { return format_value(c.nsga.mutation_prob); });
    auto add_pso_size = [&add](const std::string& key, std::size_t PsoConfig::*member) {
      add(key,
          [member](ExperimentConfig& c, const std::string& v) {
            c.pso.*member = parse_size(v);
          },
          [member](const ExperimentConfig& c) {
            return std::to_string(c.pso.*member);
          });
    };
    add_pso_size("pso_population", &PsoConfig::population);
    add_pso_size("pso_generations", &PsoConfig::generations);
    auto add_pso_double = [&add](const std::string& key, double PsoConfig::*member) {
      add(key,
          [member](ExperimentConfig& c, const std::string& v) {
            c.pso.*member = parse_double(v);
          },
          [member](const ExperimentConfig& c) { return format_value(c.pso.*member); });
    };
    add_pso_double("pso_inertia", &PsoConfig::inertia);
    add_pso_double("pso_cognitive", &PsoConfig::cognitive);
    add_pso_double("pso_social", &PsoConfig::social);

    // experiment
    add("kind",
        [](ExperimentConfig& c, const std::string& v) { c.kind = kind_from_string(v); },
        [](const ExperimentConfig& c) { return kind_to_string(c.kind); });
    add("seed",
        [](ExperimentConfig& c, const std::string& v) { c.seed = parse_u64(v); },
        [](const ExperimentConfig& c) { return std::to_string(c.seed); });
    add("eval_seed",
        [](ExperimentConfig& c, const std::string& v) { c.eval_seed = parse_u64(v); },
        [](const ExperimentConfig& c) { return std::to_string(c.eval_seed); });
    add("n_runs",
        [](ExperimentConfig& c, const std::string& v) { c.n_runs = parse_size(v); },
        [](const ExperimentConfig& c) { return std::to_string(c.n_runs); });
    add("run_seeds",
        [](ExperimentConfig& c, const std::string& v) { c.run_seeds = parse_u64_list(v); },
        [](const ExperimentConfig& c) { return join_u64_list(c.run_seeds); });
    return t;
  }();
  return table;
}

EpisodeMetrics average_metrics(const std::vector<std::vector<EpisodeMetrics>>& runs,
                               std::size_t episode) {
  EpisodeMetrics avg;
  for (const auto& run : runs) {
    avg.reward += run[episode].reward;
    avg.satisfaction += run[episode].satisfaction;
    avg.efficiency += run[episode].efficiency;
    avg.cost += run[episode].cost;
    avg.inventory += run[episode].inventory;
  }
  const double n = static_cast<double>(runs.size());
  avg.reward /= n;
  avg.satisfaction /= n;
  avg.efficiency /= n;
  avg.cost /= n;
  avg.inventory /= n;
  return avg;
}

StepMetrics totals_of(const std::vector<StepMetrics>& steps) {
  StepMetrics total;
  for (const StepMetrics& s : steps) {
    total.reward += s.reward;
    total.satisfaction += s.satisfaction;
    total.efficiency += s.efficiency;
    total.cost += s.cost;
    total.inventory += s.inventory;
  }
  return total;
}

}  // namespace

void ExperimentConfig::finalize() {
  for (const auto& [key, value] : overrides) {
    apply_key(*this, key, value);  // throws on a name that does not exist
  }
  network.seed = seed;
  if (run_seeds.empty()) {
    run_seeds.reserve(n_runs);
    for (std::size_t i = 0; i < n_runs; ++i) {
      run_seeds.push_back(seed + i);
    }
  }
  n_runs = run_seeds.size();
}

ExperimentConfig default_experiment_config() { return ExperimentConfig{}; }

void apply_key(ExperimentConfig& config, const std::string& key,
               const std::string& value) {
  for (const auto& [name, binding] : key_table()) {
    if (name == key) {
      binding.set(config, value);
      return;
    }
  }
  throw std::invalid_argument("unknown configuration key: " + key);
}

ExperimentConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open config file: " + path.string());
  }
  ExperimentConfig config = default_experiment_config();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument(path.string() + ":" + std::to_string(line_no) +
                                  ": expected key=value");
    }
    apply_key(config, line.substr(0, eq), line.substr(eq + 1));
  }
  return config;
}

std::string resolved_config_text(const ExperimentConfig& config) {
  std::string out;
  for (const auto& [name, binding] : key_table()) {
    out += name;
    out += '=';
    out += binding.get(config);
    out += '\n';
  }
  return out;
}

std::string config_hash(const ExperimentConfig& config) {
  return hash_hex(fnv1a_hash(resolved_config_text(config)));
}

RunSummary summarize(const std::vector<std::vector<double>>& reward_matrix) {
  if (reward_matrix.empty()) {
    throw std::invalid_argument("summarize: no runs");
  }
  const std::size_t episodes = reward_matrix[0].size();
  if (episodes < 10) {
    throw std::invalid_argument("summarize: need at least 10 episodes");
  }
  for (const auto& run : reward_matrix) {
    if (run.size() != episodes) {
      throw std::invalid_argument("summarize: ragged reward matrix");
    }
  }

  std::vector<double> averaged(episodes, 0.0);
  for (const auto& run : reward_matrix) {
    for (std::size_t e = 0; e < episodes; ++e) averaged[e] += run[e];
  }
  for (double& v : averaged) v /= static_cast<double>(reward_matrix.size());

  RunSummary summary;
  for (std::size_t e = 0; e < 10; ++e) {
    summary.avg_reward_first10 += averaged[e];
    summary.avg_reward_last10 += averaged[episodes - 10 + e];
  }
  summary.avg_reward_first10 /= 10.0;
  summary.avg_reward_last10 /= 10.0;

  double mean = 0.0;
  for (double v : averaged) mean += v;
  mean /= static_cast<double>(episodes);
  double var = 0.0;
  for (double v : averaged) var += (v - mean) * (v - mean);
  summary.reward_std = std::sqrt(var / static_cast<double>(episodes));
  return summary;
}

std::string emit_summary_csv(const RunSummary& summary, const std::string& hash) {
  CsvTable table;
  table.config_hash = hash;
  table.header = {"avg_reward_first10", "avg_reward_last10", "reward_std"};
  table.rows.push_back({format_value(summary.avg_reward_first10),
                        format_value(summary.avg_reward_last10),
                        format_value(summary.reward_std)});
  return emit_csv(table);
}

RunSummary parse_summary_csv(const std::string& text) {
  const CsvTable table = parse_csv(text);
  if (table.rows.size() != 1 || table.rows[0].size() != 3) {
    throw std::invalid_argument("summary csv: expected exactly one 3-field row");
  }
  RunSummary summary;
  summary.avg_reward_first10 = std::stod(table.rows[0][0]);
  summary.avg_reward_last10 = std::stod(table.rows[0][1]);
  summary.reward_std = std::stod(table.rows[0][2]);
  return summary;
}

TrainingExperimentResult run_training_experiment(const ExperimentConfig& raw_config) {
  ExperimentConfig config = raw_config;
  config.finalize();
  const NetworkInstance instance = generate_instance(config.network);

  DemandSeries shared_series;
  if (config.demand_mode == DemandMode::kDeterministic) {
    shared_series =
        generate_series(config.demand, config.env.horizon, config.network.n_points);
  }

  TrainingExperimentResult result;
  result.runs.reserve(config.n_runs);
  for (std::size_t r = 0; r < config.n_runs; ++r) {
    TrainConfig train_config = config.train;
    train_config.seed = config.run_seeds[r];
    TrainResult run =
        config.demand_mode == DemandMode::kDeterministic
            ? train(instance, shared_series, train_config, config.env)
            : train(instance, config.demand, train_config, config.env);
    result.runs.push_back(std::move(run.episodes));
    if (r + 1 == config.n_runs) {
      result.final_params = std::move(run.params);
    }
  }

  const std::size_t episodes = result.runs[0].size();
  result.averaged.reserve(episodes);
  for (std::size_t e = 0; e < episodes; ++e) {
    result.averaged.push_back(average_metrics(result.runs, e));
  }

  std::vector<std::vector<double>> reward_matrix;
  reward_matrix.reserve(config.n_runs);
  for (const auto& run : result.runs) {
    std::vector<double> rewards;
    rewards.reserve(run.size());
    for (const EpisodeMetrics& m : run) rewards.push_back(m.reward);
    reward_matrix.push_back(std::move(rewards));
  }
  result.summary = summarize(reward_matrix);

  if (!config.out_dir.empty()) {
    const std::string hash = config_hash(config);
    std::vector<RunEpisodeRow> raw_rows;
    for (std::size_t r = 0; r < result.runs.size(); ++r) {
      for (std::size_t e = 0; e < result.runs[r].size(); ++e) {
        raw_rows.push_back({r, e, result.runs[r][e]});
      }
    }
    atomic_write(config.out_dir / "runs.csv", emit_run_episode_csv(raw_rows, hash));
    atomic_write(config.out_dir / "episodes.csv",
                 emit_avg_episode_csv(result.averaged, hash));
    atomic_write(config.out_dir / "summary.csv",
                 emit_summary_csv(result.summary, hash));
    TrainConfig last_run_config = config.train;
    last_run_config.seed = config.run_seeds.back();
    std::ostringstream ckpt;
    save_checkpoint(result.final_params, last_run_config, ckpt);
    atomic_write(config.out_dir / "policy.ckpt", ckpt.str());
    atomic_write(config.out_dir / "resolved_config.txt",
                 resolved_config_text(config));
  }
  return result;
}

namespace {

struct VariantDef {
  std::string id;
  std::string label;
  std::map<std::string, std::string> overrides;
};

std::vector<VariantDef> variant_definitions(int variant_id) {
  switch (variant_id) {
    case 1:
      return {{"1", "counts 15;5;10",
               {{"n_centers", "15"}, {"n_warehouses", "5"}, {"n_points", "10"}}}};
    case 2:
      return {{"2", "counts 5;10;15",
               {{"n_centers", "5"}, {"n_warehouses", "10"}, {"n_points", "15"}}}};
    case 3:
      return {{"3", "counts 15;10;5",
               {{"n_centers", "15"}, {"n_warehouses", "10"}, {"n_points", "5"}}}};
    case 4:
      return {{"4", "distances 5-100",
               {{"dist_cw_min", "5"},
                {"dist_cw_max", "100"},
                {"dist_wp_min", "5"},
                {"dist_wp_max", "100"}}}};
    case 5:
      return {{"5", "center cost 500-1000 capacity 600-1125; warehouse cost 300-700 capacity 2000-5000",
               {{"center_cost_min", "500"},
                {"center_cost_max", "1000"},
                {"center_capacity_min", "600"},
                {"center_capacity_max", "1125"},
                {"warehouse_cost_min", "300"},
                {"warehouse_cost_max", "700"},
                {"warehouse_capacity_min", "2000"},
                {"warehouse_capacity_max", "5000"}}}};
    case 6:
      return {{"6", "center cost 300-700 capacity 2000-5000; warehouse cost 500-1000 capacity 600-1125",
               {{"center_cost_min", "300"},
                {"center_cost_max", "700"},
                {"center_capacity_min", "2000"},
                {"center_capacity_max", "5000"},
                {"warehouse_cost_min", "500"},
                {"warehouse_cost_max", "1000"},
                {"warehouse_capacity_min", "600"},
                {"warehouse_capacity_max", "1125"}}}};
    case 7: {
      std::vector<VariantDef> defs;
      const char* suffixes[] = {"a", "b", "c"};
      const char* values[] = {"0.5", "15", "20"};
      for (int i = 0; i < 3; ++i) {
        defs.push_back({std::string("7") + suffixes[i],
                        std::string("mismatch_coef ") + values[i],
                        {{"mismatch_coef", values[i]}}});
      }
      return defs;
    }
    case 8: {
      std::vector<VariantDef> defs;
      const char* suffixes[] = {"a", "b", "c"};
      const char* values[] = {"10", "5", "3"};
      for (int i = 0; i < 3; ++i) {
        defs.push_back({std::string("8") + suffixes[i],
                        std::string("switch_cost_center ") + values[i],
                        {{"switch_cost_center", values[i]}}});
      }
      return defs;
    }
    case 9: {
      std::vector<VariantDef> defs;
      const char* suffixes[] = {"a", "b", "c"};
      const char* values[] = {"5", "50", "25"};
      for (int i = 0; i < 3; ++i) {
        defs.push_back({std::string("9") + suffixes[i],
                        std::string("switch_cost_warehouse ") + values[i],
                        {{"switch_cost_warehouse", values[i]}}});
      }
      return defs;
    }
    default:
      throw std::invalid_argument("unknown sensitivity variant: " +
                                  std::to_string(variant_id));
  }
}

}  // namespace

std::vector<SensitivityRow> run_sensitivity_suite(const ExperimentConfig& raw_config,
                                                  const std::vector<int>& variant_ids) {
  ExperimentConfig base = raw_config;
  base.finalize();
  std::vector<SensitivityRow> rows;
  for (int id : variant_ids) {
    for (const VariantDef& def : variant_definitions(id)) {
      ExperimentConfig variant = base;
      variant.out_dir.clear();
      variant.demand_mode = DemandMode::kDeterministic;
      variant.demand.model = DemandModel::kGbm;
      for (const auto& [key, value] : def.overrides) {
        apply_key(variant, key, value);
      }
      const TrainingExperimentResult result = run_training_experiment(variant);
      rows.push_back({def.id, def.label, result.summary});
    }
  }
  if (!base.out_dir.empty()) {
    atomic_write(base.out_dir / "sensitivity.csv",
                 emit_sensitivity_csv(rows, config_hash(base)));
    atomic_write(base.out_dir / "resolved_config.txt", resolved_config_text(base));
  }
  return rows;
}

std::string emit_sensitivity_csv(const std::vector<SensitivityRow>& rows,
                                 const std::string& hash) {
  CsvTable table;
  table.config_hash = hash;
  table.header = {"variant", "label", "avg_reward_first10", "avg_reward_last10",
                  "reward_std"};
  for (const SensitivityRow& r : rows) {
    table.rows.push_back({r.id, r.label, format_value(r.summary.avg_reward_first10),
                          format_value(r.summary.avg_reward_last10),
                          format_value(r.summary.reward_std)});
  }
  return emit_csv(table);
}

std::vector<SweepCell> run_price_sweep(const ExperimentConfig& raw_config,
                                       const std::vector<double>& h_values,
                                       const std::vector<double>& v_values,
                                       bool grid) {
  if (h_values.empty() || v_values.empty()) {
    throw std::invalid_argument("price sweep: value lists must be non-empty");
  }
  ExperimentConfig base = raw_config;
  base.finalize();

  std::vector<std::pair<double, double>> combos;
  if (grid) {
    for (double h : h_values) {
      for (double v : v_values) combos.emplace_back(h, v);
    }
  } else {
    for (double h : h_values) combos.emplace_back(h, base.network.kit_value);
    for (double v : v_values) combos.emplace_back(base.network.transport_coef, v);
  }
  // Collapse duplicate combinations, keeping first occurrence order.
  std::vector<std::pair<double, double>> unique;
  for (const auto& combo : combos) {
    if (std::find(unique.begin(), unique.end(), combo) == unique.end()) {
      unique.push_back(combo);
    }
  }

  std::vector<SweepCell> cells;
  cells.reserve(unique.size());
  for (const auto& [h, v] : unique) {
    ExperimentConfig cell_config = base;
    cell_config.out_dir.clear();
    cell_config.network.transport_coef = h;
    cell_config.network.kit_value = v;
    const TrainingExperimentResult result = run_training_experiment(cell_config);
    cells.push_back({h, v, result.summary.avg_reward_last10});
  }

  if (!base.out_dir.empty()) {
    atomic_write(base.out_dir / "sweep.csv",
                 emit_sweep_csv(cells, config_hash(base)));
    atomic_write(base.out_dir / "resolved_config.txt", resolved_config_text(base));
  }
  return cells;
}

std::string emit_sweep_csv(const std::vector<SweepCell>& cells,
                           const std::string& hash) {
  CsvTable table;
  table.config_hash = hash;
  table.header = {"h", "V", "avg_reward_last10"};
  for (const SweepCell& c : cells) {
    table.rows.push_back({format_value(c.transport_coef), format_value(c.kit_value),
                          format_value(c.avg_reward_last10)});
  }
  return emit_csv(table);
}

ComparisonReport run_comparison(const ExperimentConfig& raw_config) {
  ExperimentConfig config = raw_config;
  config.finalize();
  const NetworkInstance instance = generate_instance(config.network);
  // One series is shared by PPO training, both heuristic searches and all
  // final evaluations.
  const DemandSeries series =
      generate_series(config.demand, config.env.horizon, config.network.n_points);

  ComparisonReport report;

  // PPO: n_runs training runs, then one evaluation of the final agent.
  TrainResult final_run;
  for (std::size_t r = 0; r < config.n_runs; ++r) {
    TrainConfig train_config = config.train;
    train_config.seed = config.run_seeds[r];
    final_run = train(instance, series, train_config, config.env);
  }
  RandomStream ppo_eval_rng(config.eval_seed);
  const auto ppo_series =
      evaluate(final_run.params, instance, series, 1, ppo_eval_rng, config.env);
  report.methods.push_back(
      {"PPO", ppo_series[0], totals_of(ppo_series[0])});

  // NSGA-II with balance-score and best-efficiency selections.
  Nsga2Config nsga = config.nsga;
  nsga.seed = config.seed ^ 0x6e736761ull;  // decorrelate from env streams
  const ParetoFront front =
      nsga2_run(instance, series, nsga, config.eval_seed, config.env);
  const FrontMember& balance = select_balance_score(front);
  const FrontMember& best_eff = select_best_efficiency(front);
  report.methods.push_back(
      {"NSGA2-BS", balance.score.series, totals_of(balance.score.series)});
  report.methods.push_back(
      {"NSGA2-BE", best_eff.score.series, totals_of(best_eff.score.series)});

  // PSO.
  PsoConfig pso = config.pso;
  pso.seed = config.seed ^ 0x70736full;
  const PsoRunResult pso_result =
      pso_run(instance, series, pso, config.eval_seed, config.env);
  report.methods.push_back(
      {"PSO", pso_result.score.series, totals_of(pso_result.score.series)});

  if (!config.out_dir.empty()) {
    const std::string hash = config_hash(config);
    atomic_write(config.out_dir / "comparison_timesteps.csv",
                 emit_comparison_steps_csv(report, hash));
    atomic_write(config.out_dir / "comparison_totals.csv",
                 emit_comparison_totals_csv(report, hash));
    std::size_t balance_index = front.size(), best_index = front.size();
    for (std::size_t i = 0; i < front.size(); ++i) {
      if (&front[i] == &balance) balance_index = i;
      if (&front[i] == &best_eff) best_index = i;
    }
    atomic_write(config.out_dir / "front.csv",
                 emit_front_csv(front, balance_index, best_index, hash));
    std::string schedules;
    auto append_schedule = [&schedules](const char* name,
                                        const std::vector<std::uint8_t>& bits) {
      schedules += name;
      schedules += ',';
      for (auto b : bits) schedules += b ? '1' : '0';
      schedules += '\n';
    };
    append_schedule("NSGA2-BS", balance.schedule.bits);
    append_schedule("NSGA2-BE", best_eff.schedule.bits);
    append_schedule("PSO", pso_result.schedule.bits);
    atomic_write(config.out_dir / "schedules.txt", schedules);
    atomic_write(config.out_dir / "resolved_config.txt",
                 resolved_config_text(config));
  }
  return report;
}

std::string emit_comparison_steps_csv(const ComparisonReport& report,
                                      const std::string& hash) {
  CsvTable table;
  table.config_hash = hash;
  table.header = {"method", "t",    "reward", "avg_satisfaction",
                  "efficiency", "cost", "avg_inventory"};
  for (const MethodSeries& m : report.methods) {
    for (std::size_t t = 0; t < m.steps.size(); ++t) {
      const StepMetrics& s = m.steps[t];
      table.rows.push_back({m.method, std::to_string(t), format_value(s.reward),
                            format_value(s.satisfaction), format_value(s.efficiency),
                            format_value(s.cost), format_value(s.inventory)});
    }
  }
  return emit_csv(table);
}

std::string emit_comparison_totals_csv(const ComparisonReport& report,
                                       const std::string& hash) {
  CsvTable table;
  table.config_hash = hash;
  table.header = {"method", "total_reward", "total_satisfaction",
                  "total_efficiency", "total_cost", "total_inventory"};
  for (const MethodSeries& m : report.methods) {
    table.rows.push_back({m.method, format_value(m.totals.reward),
                          format_value(m.totals.satisfaction),
                          format_value(m.totals.efficiency),
                          format_value(m.totals.cost),
                          format_value(m.totals.inventory)});
  }
  return emit_csv(table);
}

ComparisonReport parse_comparison_steps_csv(const std::string& text) {
  const CsvTable table = parse_csv(text);
  ComparisonReport report;
  for (const auto& fields : table.rows) {
    if (fields.size() != 7) {
      throw std::invalid_argument("comparison csv: bad row width");
    }
    const std::string& method = fields[0];
    if (report.methods.empty() || report.methods.back().method != method) {
      report.methods.push_back({method, {}, {}});
    }
    report.methods.back().steps.push_back(
        {std::stod(fields[2]), std::stod(fields[3]), std::stod(fields[4]),
         std::stod(fields[5]), std::stod(fields[6])});
  }
  for (MethodSeries& m : report.methods) {
    m.totals = totals_of(m.steps);
  }
  return report;
}

}  // namespace hsc
