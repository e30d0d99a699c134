#include "hsc/network.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace hsc {

namespace {

void check_range(const IntRange& r, const char* name) {
  if (r.low > r.high) {
    throw std::invalid_argument(std::string("network: range low > high for ") + name);
  }
  if (r.low <= 0) {
    throw std::invalid_argument(std::string("network: range must be positive for ") + name);
  }
}

std::vector<double> sample_vector(std::size_t n, const IntRange& range,
                                  RandomStream& rng) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = static_cast<double>(rng.uniform_int(range.low, range.high));
  }
  return out;
}

Matrix sample_matrix(std::size_t rows, std::size_t cols, const IntRange& range,
                     RandomStream& rng) {
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      m(r, c) = static_cast<double>(rng.uniform_int(range.low, range.high));
    }
  }
  return m;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_vector(std::ostream& os, const char* name, const std::vector<double>& v) {
  os << name << '=';
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) os << ',';
    os << format_double(v[i]);
  }
  os << '\n';
}

void write_matrix(std::ostream& os, const char* name, const Matrix& m) {
  os << name << '=';
  for (std::size_t i = 0; i < m.data().size(); ++i) {
    if (i > 0) os << ',';
    os << format_double(m.data()[i]);
  }
  os << '\n';
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(std::stod(item));
  }
  return out;
}

}  // namespace

void NetworkConfig::validate() const {
  if (n_centers == 0 || n_warehouses == 0 || n_points == 0) {
    throw std::invalid_argument("network: facility counts must be >= 1");
  }
  check_range(center_cost_range, "center_cost");
  check_range(center_capacity_range, "center_capacity");
  check_range(warehouse_cost_range, "warehouse_cost");
  check_range(warehouse_capacity_range, "warehouse_capacity");
  check_range(dist_cw_range, "dist_cw");
  check_range(dist_wp_range, "dist_wp");
}

double NetworkInstance::max_warehouse_capacity() const {
  return warehouse_capacity.empty()
             ? 0.0
             : *std::max_element(warehouse_capacity.begin(), warehouse_capacity.end());
}

NetworkInstance generate_instance(const NetworkConfig& config) {
  config.validate();
  RandomStream rng = RandomStream(config.seed).substream(RandomStream::kNetworkStream);

  NetworkInstance inst;
  inst.n_centers = config.n_centers;
  inst.n_warehouses = config.n_warehouses;
  inst.n_points = config.n_points;
  inst.dist_cw = sample_matrix(config.n_centers, config.n_warehouses,
                               config.dist_cw_range, rng);
  inst.dist_wp = sample_matrix(config.n_warehouses, config.n_points,
                               config.dist_wp_range, rng);
  inst.center_cost = sample_vector(config.n_centers, config.center_cost_range, rng);
  inst.warehouse_cost =
      sample_vector(config.n_warehouses, config.warehouse_cost_range, rng);
  inst.center_capacity =
      sample_vector(config.n_centers, config.center_capacity_range, rng);
  inst.warehouse_capacity =
      sample_vector(config.n_warehouses, config.warehouse_capacity_range, rng);
  inst.transport_coef = config.transport_coef;
  inst.kit_value = config.kit_value;
  inst.mismatch_coef = config.mismatch_coef;
  inst.switch_cost_center = config.switch_cost_center;
  inst.switch_cost_warehouse = config.switch_cost_warehouse;
  return inst;
}

std::vector<std::string> validate(const NetworkInstance& instance,
                                  const NetworkConfig& config) {
  std::vector<std::string> report;
  auto check_positive = [&report](const std::vector<double>& v, const char* name) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i] <= 0) {
        report.push_back(std::string(name) + "[" + std::to_string(i) +
                         "] is not strictly positive");
      }
    }
  };
  auto check_matrix_positive = [&report](const Matrix& m, const char* name) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
      for (std::size_t c = 0; c < m.cols(); ++c) {
        if (m(r, c) <= 0) {
          report.push_back(std::string(name) + "[" + std::to_string(r) + "," +
                           std::to_string(c) + "] is not strictly positive");
        }
      }
    }
  };
  auto check_shape = [&report](std::size_t got, std::size_t want, const char* what) {
    if (got != want) {
      report.push_back(std::string(what) + ": expected " + std::to_string(want) +
                       ", got " + std::to_string(got));
    }
  };

  check_shape(instance.dist_cw.rows(), config.n_centers, "dist_cw rows");
  check_shape(instance.dist_cw.cols(), config.n_warehouses, "dist_cw cols");
  check_shape(instance.dist_wp.rows(), config.n_warehouses, "dist_wp rows");
  check_shape(instance.dist_wp.cols(), config.n_points, "dist_wp cols");
  check_shape(instance.center_cost.size(), config.n_centers, "center_cost length");
  check_shape(instance.warehouse_cost.size(), config.n_warehouses,
              "warehouse_cost length");
  check_shape(instance.center_capacity.size(), config.n_centers,
              "center_capacity length");
  check_shape(instance.warehouse_capacity.size(), config.n_warehouses,
              "warehouse_capacity length");

  check_matrix_positive(instance.dist_cw, "dist_cw");
  check_matrix_positive(instance.dist_wp, "dist_wp");
  check_positive(instance.center_cost, "center_cost");
  check_positive(instance.warehouse_cost, "warehouse_cost");
  check_positive(instance.center_capacity, "center_capacity");
  check_positive(instance.warehouse_capacity, "warehouse_capacity");
  return report;
}

void dump_instance(const NetworkInstance& instance, std::ostream& os) {
  os << "n_centers=" << instance.n_centers << '\n';
  os << "n_warehouses=" << instance.n_warehouses << '\n';
  os << "n_points=" << instance.n_points << '\n';
  os << "transport_coef=" << format_double(instance.transport_coef) << '\n';
  os << "kit_value=" << format_double(instance.kit_value) << '\n';
  os << "mismatch_coef=" << format_double(instance.mismatch_coef) << '\n';
  os << "switch_cost_center=" << format_double(instance.switch_cost_center) << '\n';
  os << "switch_cost_warehouse=" << format_double(instance.switch_cost_warehouse)
     << '\n';
  write_matrix(os, "dist_cw", instance.dist_cw);
  write_matrix(os, "dist_wp", instance.dist_wp);
  write_vector(os, "center_cost", instance.center_cost);
  write_vector(os, "warehouse_cost", instance.warehouse_cost);
  write_vector(os, "center_capacity", instance.center_capacity);
  write_vector(os, "warehouse_capacity", instance.warehouse_capacity);
}

NetworkInstance parse_instance(std::istream& is) {
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("instance file: missing '=' in line: " + line);
    }
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  auto need = [&kv](const char* key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) {
      throw std::invalid_argument(std::string("instance file: missing key ") + key);
    }
    return it->second;
  };

  NetworkInstance inst;
  inst.n_centers = std::stoul(need("n_centers"));
  inst.n_warehouses = std::stoul(need("n_warehouses"));
  inst.n_points = std::stoul(need("n_points"));
  inst.transport_coef = std::stod(need("transport_coef"));
  inst.kit_value = std::stod(need("kit_value"));
  inst.mismatch_coef = std::stod(need("mismatch_coef"));
  inst.switch_cost_center = std::stod(need("switch_cost_center"));
  inst.switch_cost_warehouse = std::stod(need("switch_cost_warehouse"));

  auto read_matrix = [&need](const char* key, std::size_t rows, std::size_t cols) {
    const std::vector<double> flat = parse_values(need(key));
    if (flat.size() != rows * cols) {
      throw std::invalid_argument(std::string("instance file: bad size for ") + key);
    }
    Matrix m(rows, cols);
    m.data() = flat;
    return m;
  };
  inst.dist_cw = read_matrix("dist_cw", inst.n_centers, inst.n_warehouses);
  inst.dist_wp = read_matrix("dist_wp", inst.n_warehouses, inst.n_points);
  inst.center_cost = parse_values(need("center_cost"));
  inst.warehouse_cost = parse_values(need("warehouse_cost"));
  inst.center_capacity = parse_values(need("center_capacity"));
  inst.warehouse_capacity = parse_values(need("warehouse_capacity"));
  return inst;
}

}  // namespace hsc
