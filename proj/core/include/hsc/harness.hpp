#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "hsc/baselines.hpp"
#include "hsc/demand.hpp"
#include "hsc/env.hpp"
#include "hsc/network.hpp"
#include "hsc/ppo.hpp"

namespace hsc {

enum class ExperimentKind { kTrain, kSensitivity, kPriceSweep, kCompare, kDemand };

// Stochastic: every run regenerates its own demand series from a run-seed
// substream. Deterministic: one seeded series is generated up front and
// reused unchanged by every run.
enum class DemandMode { kStochastic, kDeterministic };

struct ExperimentConfig {
  NetworkConfig network;
  DemandParams demand;
  TrainConfig train;
  EnvConfig env;
  Nsga2Config nsga;
  PsoConfig pso;
  ExperimentKind kind = ExperimentKind::kTrain;
  DemandMode demand_mode = DemandMode::kStochastic;
  std::uint64_t seed = 42;       // master seed; also network/demand default
  std::uint64_t eval_seed = 424242;
  std::size_t n_runs = 5;
  std::vector<std::uint64_t> run_seeds;  // empty -> seed+0, seed+1, ...
  std::map<std::string, std::string> overrides;
  std::filesystem::path out_dir;  // empty -> no files written

  // Fills run_seeds (when empty) and pushes the master seed into the
  // nested configs that default to it.
  void finalize();
};

ExperimentConfig default_experiment_config();

// Applies one `key=value` setting; throws std::invalid_argument for an
// unknown key or unparsable value.
void apply_key(ExperimentConfig& config, const std::string& key,
               const std::string& value);

// Defaults, then the file's key=value lines ('#' comments allowed).
ExperimentConfig load_config_file(const std::filesystem::path& path);

// Canonical key=value dump of every resolved setting; its FNV-1a hash is
// the config hash stamped into CSVs.
std::string resolved_config_text(const ExperimentConfig& config);
std::string config_hash(const ExperimentConfig& config);

struct RunSummary {
  double avg_reward_first10 = 0.0;
  double avg_reward_last10 = 0.0;
  double reward_std = 0.0;
};

// Averages across runs per episode first; first10/last10 are means of the
// first/last ten entries of that averaged sequence and reward_std is its
// population standard deviation. Throws on fewer than 10 episodes.
RunSummary summarize(const std::vector<std::vector<double>>& reward_matrix);

std::string emit_summary_csv(const RunSummary& summary, const std::string& hash);
RunSummary parse_summary_csv(const std::string& text);

struct TrainingExperimentResult {
  std::vector<std::vector<EpisodeMetrics>> runs;  // [run][episode]
  std::vector<EpisodeMetrics> averaged;           // across runs, per episode
  RunSummary summary;
  PolicyParams final_params;  // agent from the last run
};

// Trains n_runs agents with the configured demand mode; writes runs.csv,
// episodes.csv, summary.csv and the final run's policy.ckpt under out_dir
// when set.
TrainingExperimentResult run_training_experiment(const ExperimentConfig& config);

struct SensitivityRow {
  std::string id;     // "1".."9", with "7a".."9c" for coefficient triples
  std::string label;  // human-readable override description
  RunSummary summary;
};

// Table-2-style suite: each variant id applies its parameter overrides and
// trains config.n_runs runs on a fixed deterministic GBM series.
std::vector<SensitivityRow> run_sensitivity_suite(const ExperimentConfig& config,
                                                  const std::vector<int>& variant_ids);

std::string emit_sensitivity_csv(const std::vector<SensitivityRow>& rows,
                                 const std::string& hash);

struct SweepCell {
  double transport_coef = 0.0;  // h
  double kit_value = 0.0;       // V
  double avg_reward_last10 = 0.0;
};

// Post-training average reward over (h, V) combinations. Per-axis mode
// holds the other price at its configured value; grid mode crosses the
// two lists. Duplicate combinations are collapsed.
std::vector<SweepCell> run_price_sweep(const ExperimentConfig& config,
                                       const std::vector<double>& h_values,
                                       const std::vector<double>& v_values,
                                       bool grid);

std::string emit_sweep_csv(const std::vector<SweepCell>& cells,
                           const std::string& hash);

struct MethodSeries {
  std::string method;  // PPO, NSGA2-BS, NSGA2-BE, PSO
  std::vector<StepMetrics> steps;
  StepMetrics totals;
};

struct ComparisonReport {
  std::vector<MethodSeries> methods;
};

// Four-method protocol: PPO trained n_runs times and the final agent
// evaluated once; NSGA-II run once with balance-score and best-efficiency
// selections; PSO run once. Every evaluation shares the instance, the
// demand series and eval_seed.
ComparisonReport run_comparison(const ExperimentConfig& config);

std::string emit_comparison_steps_csv(const ComparisonReport& report,
                                      const std::string& hash);
std::string emit_comparison_totals_csv(const ComparisonReport& report,
                                       const std::string& hash);
ComparisonReport parse_comparison_steps_csv(const std::string& text);

}  // namespace hsc
