#include "hsc/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hsc {

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::uint64_t fnv1a_hash(const std::string& text) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

std::string hash_hex(std::uint64_t hash) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

void atomic_write(const std::filesystem::path& path, const std::string& text) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path());
  }
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot open for writing: " + tmp.string());
    }
    out << text;
  }
  fs::rename(tmp, path);
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

void append_row(std::string& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out += ',';
    out += fields[i];
  }
  out += '\n';
}

}  // namespace

std::string emit_csv(const CsvTable& table) {
  std::string out;
  out += "# config_hash=" + table.config_hash + "\n";
  append_row(out, table.header);
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) {
      throw std::invalid_argument("csv: row width does not match header");
    }
    append_row(out, row);
  }
  return out;
}

CsvTable parse_csv(const std::string& text) {
  CsvTable table;
  std::stringstream ss(text);
  std::string line;
  bool header_seen = false;
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string prefix = "# config_hash=";
      if (line.rfind(prefix, 0) == 0) {
        table.config_hash = line.substr(prefix.size());
      }
      continue;
    }
    if (!header_seen) {
      table.header = split_fields(line);
      header_seen = true;
    } else {
      table.rows.push_back(split_fields(line));
    }
  }
  if (!header_seen) {
    throw std::invalid_argument("csv: missing header row");
  }
  return table;
}

std::string emit_trajectory_csv(const std::vector<TrajectoryRow>& rows,
                                const std::string& config_hash) {
  CsvTable table;
  table.config_hash = config_hash;
  table.header = {"run",
                  "episode",
                  "t",
                  "reward",
                  "efficiency",
                  "cost",
                  "penalty_mismatch",
                  "penalty_switch",
                  "avg_satisfaction",
                  "avg_inventory",
                  "total_outsourced"};
  for (const TrajectoryRow& r : rows) {
    table.rows.push_back({std::to_string(r.run), std::to_string(r.episode),
                          std::to_string(r.t), format_value(r.reward),
                          format_value(r.efficiency), format_value(r.cost),
                          format_value(r.penalty_mismatch),
                          format_value(r.penalty_switch),
                          format_value(r.avg_satisfaction),
                          format_value(r.avg_inventory),
                          format_value(r.total_outsourced)});
  }
  return emit_csv(table);
}

std::vector<TrajectoryRow> parse_trajectory_csv(const std::string& text) {
  const CsvTable table = parse_csv(text);
  std::vector<TrajectoryRow> rows;
  for (const auto& fields : table.rows) {
    if (fields.size() != 11) {
      throw std::invalid_argument("trajectory csv: bad row width");
    }
    TrajectoryRow r;
    r.run = std::stoul(fields[0]);
    r.episode = std::stoul(fields[1]);
    r.t = std::stoul(fields[2]);
    r.reward = std::stod(fields[3]);
    r.efficiency = std::stod(fields[4]);
    r.cost = std::stod(fields[5]);
    r.penalty_mismatch = std::stod(fields[6]);
    r.penalty_switch = std::stod(fields[7]);
    r.avg_satisfaction = std::stod(fields[8]);
    r.avg_inventory = std::stod(fields[9]);
    r.total_outsourced = std::stod(fields[10]);
    rows.push_back(r);
  }
  return rows;
}

std::string emit_replay(const std::vector<Action>& actions) {
  std::string out;
  for (std::size_t t = 0; t < actions.size(); ++t) {
    out += std::to_string(t);
    out += ',';
    for (auto b : actions[t].centers) out += b ? '1' : '0';
    out += ',';
    for (auto b : actions[t].warehouses) out += b ? '1' : '0';
    out += '\n';
  }
  return out;
}

std::vector<Action> parse_replay(const std::string& text) {
  std::vector<Action> actions;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    if (line.empty() || line[0] == '#') continue;
    const std::vector<std::string> fields = split_fields(line);
    if (fields.size() != 3) {
      throw std::invalid_argument("replay file: expected t,centers,warehouses");
    }
    if (std::stoul(fields[0]) != actions.size()) {
      throw std::invalid_argument("replay file: non-contiguous time indices");
    }
    Action action;
    for (char c : fields[1]) action.centers.push_back(c == '1' ? 1 : 0);
    for (char c : fields[2]) action.warehouses.push_back(c == '1' ? 1 : 0);
    actions.push_back(std::move(action));
  }
  return actions;
}

std::string emit_demand_csv(const DemandSeries& series,
                            const std::string& config_hash) {
  CsvTable table;
  table.config_hash = config_hash;
  table.header = {"t"};
  for (std::size_t p = 0; p < series.points(); ++p) {
    table.header.push_back("p" + std::to_string(p));
  }
  for (std::size_t t = 0; t < series.steps(); ++t) {
    std::vector<std::string> row = {std::to_string(t)};
    for (std::size_t p = 0; p < series.points(); ++p) {
      row.push_back(format_value(series.values(t, p)));
    }
    table.rows.push_back(std::move(row));
  }
  return emit_csv(table);
}

Matrix parse_demand_csv(const std::string& text) {
  const CsvTable table = parse_csv(text);
  const std::size_t points = table.header.size() - 1;
  Matrix values(table.rows.size(), points);
  for (std::size_t t = 0; t < table.rows.size(); ++t) {
    for (std::size_t p = 0; p < points; ++p) {
      values(t, p) = std::stod(table.rows[t][p + 1]);
    }
  }
  return values;
}

std::string emit_front_csv(const ParetoFront& front, std::size_t balance_index,
                           std::size_t best_efficiency_index,
                           const std::string& config_hash) {
  CsvTable table;
  table.config_hash = config_hash;
  table.header = {"member", "total_efficiency", "total_cost", "total_reward",
                  "selected_by"};
  for (std::size_t i = 0; i < front.size(); ++i) {
    std::string selected = "none";
    if (i == balance_index && i == best_efficiency_index) {
      selected = "BS+BE";
    } else if (i == balance_index) {
      selected = "BS";
    } else if (i == best_efficiency_index) {
      selected = "BE";
    }
    table.rows.push_back({std::to_string(i),
                          format_value(front[i].score.total_efficiency),
                          format_value(front[i].score.total_cost),
                          format_value(front[i].score.total_reward), selected});
  }
  return emit_csv(table);
}

std::string emit_run_episode_csv(const std::vector<RunEpisodeRow>& rows,
                                 const std::string& config_hash) {
  CsvTable table;
  table.config_hash = config_hash;
  table.header = {"run",  "episode",    "reward", "avg_satisfaction",
                  "efficiency", "cost", "avg_inventory"};
  for (const RunEpisodeRow& r : rows) {
    table.rows.push_back({std::to_string(r.run), std::to_string(r.episode),
                          format_value(r.metrics.reward),
                          format_value(r.metrics.satisfaction),
                          format_value(r.metrics.efficiency),
                          format_value(r.metrics.cost),
                          format_value(r.metrics.inventory)});
  }
  return emit_csv(table);
}

std::vector<RunEpisodeRow> parse_run_episode_csv(const std::string& text) {
  const CsvTable table = parse_csv(text);
  std::vector<RunEpisodeRow> rows;
  for (const auto& fields : table.rows) {
    if (fields.size() != 7) {
      throw std::invalid_argument("run episode csv: bad row width");
    }
    RunEpisodeRow r;
    r.run = std::stoul(fields[0]);
    r.episode = std::stoul(fields[1]);
    r.metrics.reward = std::stod(fields[2]);
    r.metrics.satisfaction = std::stod(fields[3]);
    r.metrics.efficiency = std::stod(fields[4]);
    r.metrics.cost = std::stod(fields[5]);
    r.metrics.inventory = std::stod(fields[6]);
    rows.push_back(r);
  }
  return rows;
}

std::string emit_avg_episode_csv(const std::vector<EpisodeMetrics>& episodes,
                                 const std::string& config_hash) {
  CsvTable table;
  table.config_hash = config_hash;
  table.header = {"episode", "reward", "avg_satisfaction", "efficiency", "cost",
                  "avg_inventory"};
  for (std::size_t e = 0; e < episodes.size(); ++e) {
    table.rows.push_back(
        {std::to_string(e), format_value(episodes[e].reward),
         format_value(episodes[e].satisfaction),
         format_value(episodes[e].efficiency), format_value(episodes[e].cost),
         format_value(episodes[e].inventory)});
  }
  return emit_csv(table);
}

std::vector<EpisodeMetrics> parse_avg_episode_csv(const std::string& text) {
  const CsvTable table = parse_csv(text);
  std::vector<EpisodeMetrics> episodes;
  for (const auto& fields : table.rows) {
    if (fields.size() != 6) {
      throw std::invalid_argument("avg episode csv: bad row width");
    }
    EpisodeMetrics m;
    m.reward = std::stod(fields[1]);
    m.satisfaction = std::stod(fields[2]);
    m.efficiency = std::stod(fields[3]);
    m.cost = std::stod(fields[4]);
    m.inventory = std::stod(fields[5]);
    episodes.push_back(m);
  }
  return episodes;
}

}  // namespace hsc
