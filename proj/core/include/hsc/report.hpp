#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hsc/baselines.hpp"
#include "hsc/env.hpp"
#include "hsc/ppo.hpp"

namespace hsc {

// Lossless double formatting shared by every emitter (%.17g).
std::string format_value(double v);

// FNV-1a 64-bit, used to stamp emitted CSVs with the resolved config.
std::uint64_t fnv1a_hash(const std::string& text);
std::string hash_hex(std::uint64_t hash);

// Writes via a temp file and rename, so readers never observe a partial
// file.
void atomic_write(const std::filesystem::path& path, const std::string& text);

// Generic CSV surface. Every emitted file starts with a single
// `# config_hash=<hex>` comment, then the header row.
struct CsvTable {
  std::string config_hash;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
std::string emit_csv(const CsvTable& table);
CsvTable parse_csv(const std::string& text);

// --- concrete report rows ---

// Trajectory log of one rolled episode.
struct TrajectoryRow {
  std::size_t run = 0;
  std::size_t episode = 0;
  std::size_t t = 0;
  double reward = 0.0;
  double efficiency = 0.0;
  double cost = 0.0;
  double penalty_mismatch = 0.0;
  double penalty_switch = 0.0;
  double avg_satisfaction = 0.0;
  double avg_inventory = 0.0;
  double total_outsourced = 0.0;
};
std::string emit_trajectory_csv(const std::vector<TrajectoryRow>& rows,
                                const std::string& config_hash);
std::vector<TrajectoryRow> parse_trajectory_csv(const std::string& text);

// Replay file: one `t,<center bits>,<warehouse bits>` line per step.
std::string emit_replay(const std::vector<Action>& actions);
std::vector<Action> parse_replay(const std::string& text);

// Demand series as `t,p0,p1,...`.
std::string emit_demand_csv(const DemandSeries& series, const std::string& config_hash);
Matrix parse_demand_csv(const std::string& text);

// Pareto front export.
std::string emit_front_csv(const ParetoFront& front, std::size_t balance_index,
                           std::size_t best_efficiency_index,
                           const std::string& config_hash);

// Per-run per-episode metrics (the raw matrix behind every summary).
struct RunEpisodeRow {
  std::size_t run = 0;
  std::size_t episode = 0;
  EpisodeMetrics metrics;
};
std::string emit_run_episode_csv(const std::vector<RunEpisodeRow>& rows,
                                 const std::string& config_hash);
std::vector<RunEpisodeRow> parse_run_episode_csv(const std::string& text);

// Cross-run averaged per-episode metrics.
std::string emit_avg_episode_csv(const std::vector<EpisodeMetrics>& episodes,
                                 const std::string& config_hash);
std::vector<EpisodeMetrics> parse_avg_episode_csv(const std::string& text);

}  // namespace hsc
