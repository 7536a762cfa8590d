#include "arls/partition.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "arls/text_io.hpp"

namespace arls {

namespace {

void check_quadrature_args(double alpha, double tau, int intervals) {
  if (!std::isfinite(alpha)) {
    throw std::invalid_argument("partition: alpha must be finite");
  }
  if (!std::isfinite(tau) || tau <= 0.0) {
    throw std::invalid_argument("partition: tau must be finite and > 0");
  }
  if (intervals < 2 || intervals % 2 != 0) {
    throw std::invalid_argument("partition: quadrature interval count must be even and >= 2");
  }
}

double snap_to_grid(double value, double resolution) {
  return std::round(value / resolution) * resolution;
}

}  // namespace

double compute_log_partition(double alpha, double tau, int intervals) {
  check_quadrature_args(alpha, tau, intervals);
  const KernelParams params{alpha, 1.0};
  const double h = tau / intervals;
  // Composite Simpson on [0, tau]; endpoints carry weight 1, odd nodes 4,
  // even interior nodes 2. rho(0) = 0 so the left endpoint contributes 1.
  double sum = 1.0 + std::exp(-rho(tau, params));
  for (int i = 1; i < intervals; ++i) {
    sum += (i % 2 == 1 ? 4.0 : 2.0) * std::exp(-rho(i * h, params));
  }
  // The integrand is even, so the full integral is twice the half-line value.
  return std::log(2.0 * (h / 3.0) * sum);
}

double PartitionTable::alpha_at(int i) const {
  if (i < 0 || i >= size()) {
    throw std::out_of_range("partition table index " + std::to_string(i) +
                            " out of range [0, " + std::to_string(size()) + ")");
  }
  if (i == 0) return alpha_min;
  if (i == size() - 1) return alpha_max;
  return snap_to_grid(alpha_min + i * resolution, resolution);
}

int PartitionTable::index_of(double alpha) const {
  if (size() == 1) {
    if (std::abs(alpha - alpha_min) <= 1e-9) return 0;
    throw std::invalid_argument("alpha " + format_double(alpha) +
                                " is not on the partition grid (single point " +
                                format_double(alpha_min) + ")");
  }
  const double raw = (alpha - alpha_min) / resolution;
  const long long i = std::llround(raw);
  if (i < 0 || i >= size() || std::abs(alpha_at(static_cast<int>(i)) - alpha) > 1e-9) {
    throw std::invalid_argument("alpha " + format_double(alpha) +
                                " is not on the partition grid [" +
                                format_double(alpha_min) + ", " + format_double(alpha_max) +
                                "] step " + format_double(resolution));
  }
  return static_cast<int>(i);
}

double PartitionTable::log_z_at(double alpha) const {
  return log_z[static_cast<std::size_t>(index_of(alpha))];
}

void PartitionTable::validate() const {
  if (log_z.empty()) {
    throw std::runtime_error("partition table is empty");
  }
  int expected = 1;
  if (alpha_max > alpha_min) {
    if (!(resolution > 0.0)) {
      throw std::runtime_error("partition table resolution must be > 0");
    }
    const double span = alpha_max - alpha_min;
    const long long steps = std::llround(span / resolution);
    if (steps < 1 || std::abs(alpha_min + steps * resolution - alpha_max) > 1e-9) {
      throw std::runtime_error("partition table resolution does not evenly divide the alpha span");
    }
    expected = static_cast<int>(steps) + 1;
  } else if (alpha_max < alpha_min) {
    throw std::runtime_error("partition table has alpha_max < alpha_min");
  }
  if (size() != expected) {
    throw std::runtime_error("partition table holds " + std::to_string(size()) +
                             " entries but the grid has " + std::to_string(expected));
  }
  for (int i = 0; i < size(); ++i) {
    if (!std::isfinite(log_z[i])) {
      throw std::runtime_error("partition table entry " + std::to_string(i) + " is not finite");
    }
    // Z~ shrinks as alpha grows (lighter tails per the kernel family), so
    // log_z must be non-increasing along the grid.
    if (i > 0 && log_z[i] > log_z[i - 1] + 1e-12) {
      throw std::runtime_error("partition table is not non-increasing at index " +
                               std::to_string(i) + ": " + format_double(log_z[i - 1]) +
                               " -> " + format_double(log_z[i]));
    }
  }
  if (!std::isfinite(tau) || tau <= 0.0) {
    throw std::runtime_error("partition table tau must be finite and > 0");
  }
}

PartitionTable build_table(double alpha_min, double alpha_max, double resolution,
                           double tau, int intervals) {
  if (!std::isfinite(alpha_min) || !std::isfinite(alpha_max) || alpha_min > alpha_max) {
    throw std::invalid_argument("partition: need finite alpha_min <= alpha_max");
  }
  PartitionTable table;
  table.alpha_min = alpha_min;
  table.alpha_max = alpha_max;
  table.resolution = resolution;
  table.tau = tau;
  table.intervals = intervals;
  int count = 1;
  if (alpha_max > alpha_min) {
    if (!std::isfinite(resolution) || resolution <= 0.0) {
      throw std::invalid_argument("partition: resolution must be finite and > 0");
    }
    const long long steps = std::llround((alpha_max - alpha_min) / resolution);
    if (steps < 1 || std::abs(alpha_min + steps * resolution - alpha_max) > 1e-9) {
      throw std::invalid_argument("partition: resolution " + format_double(resolution) +
                                  " does not evenly divide [" + format_double(alpha_min) +
                                  ", " + format_double(alpha_max) + "]");
    }
    count = static_cast<int>(steps) + 1;
  }
  table.log_z.resize(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    table.log_z[static_cast<std::size_t>(i)] =
        compute_log_partition(table.alpha_at(i), tau, intervals);
  }
  table.validate();
  return table;
}

void PartitionTable::save(const std::string& path) const {
  std::string out;
  out += "arls-partition-table v1\n";
  out += "alpha_min " + format_double(alpha_min) + "\n";
  out += "alpha_max " + format_double(alpha_max) + "\n";
  out += "resolution " + format_double(resolution) + "\n";
  out += "tau " + format_double(tau) + "\n";
  out += "intervals " + std::to_string(intervals) + "\n";
  out += "count " + std::to_string(size()) + "\n";
  for (double v : log_z) {
    out += format_double(v) + "\n";
  }
  write_file(path, out);
}

PartitionTable PartitionTable::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open partition table file: " + path);
  }
  auto fail = [&path](int line, const std::string& what) -> std::runtime_error {
    return std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
  };
  std::string line;
  int line_no = 1;
  if (!std::getline(in, line) || line != "arls-partition-table v1") {
    throw fail(1, "not a partition table file (bad header)");
  }
  PartitionTable table;
  int count = 0;
  const char* keys[6] = {"alpha_min", "alpha_max", "resolution", "tau", "intervals", "count"};
  for (const char* key : keys) {
    ++line_no;
    if (!std::getline(in, line)) {
      throw fail(line_no, std::string("missing '") + key + "' line");
    }
    std::istringstream ss(line);
    std::string name;
    ss >> name;
    if (name != key) {
      throw fail(line_no, "expected '" + std::string(key) + "', got '" + name + "'");
    }
    std::string value;
    if (!(ss >> value)) {
      throw fail(line_no, std::string("missing value for '") + key + "'");
    }
    try {
      if (key == std::string("alpha_min")) table.alpha_min = parse_double(value);
      else if (key == std::string("alpha_max")) table.alpha_max = parse_double(value);
      else if (key == std::string("resolution")) table.resolution = parse_double(value);
      else if (key == std::string("tau")) table.tau = parse_double(value);
      else if (key == std::string("intervals")) table.intervals = static_cast<int>(parse_int(value));
      else count = static_cast<int>(parse_int(value));
    } catch (const std::exception& e) {
      throw fail(line_no, e.what());
    }
  }
  if (count <= 0) {
    throw fail(line_no, "count must be positive");
  }
  table.log_z.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    ++line_no;
    if (!std::getline(in, line)) {
      throw fail(line_no, "expected " + std::to_string(count) + " entries, file ends after " +
                              std::to_string(i));
    }
    try {
      table.log_z.push_back(parse_double(line));
    } catch (const std::exception& e) {
      throw fail(line_no, e.what());
    }
  }
  try {
    table.validate();
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  return table;
}

bool in_support(double r, const KernelParams& params, const PartitionTable& table) {
  validate(params);
  return std::abs(r) <= table.tau * params.c;
}

double log_density(double r, const KernelParams& params, const PartitionTable& table) {
  if (!in_support(r, params, table)) {
    return -std::numeric_limits<double>::infinity();
  }
  return -rho(r, params) - std::log(params.c) - table.log_z_at(params.alpha);
}

double truncated_loss(double r, const KernelParams& params, const PartitionTable& table) {
  validate(params);
  return rho(r, params) + std::log(params.c) + table.log_z_at(params.alpha);
}

}  // namespace arls
