#include "arls/config.hpp"

#include <cerrno>
#include <climits>
#include <cstdlib>
#include <set>
#include <sstream>

#include "arls/text_io.hpp"

namespace arls {
namespace {

std::string trim(const std::string& s) {
  const std::size_t begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const std::size_t end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::uint64_t parse_uint64(const std::string& token) {
  if (token.empty() || token[0] == '-' || token[0] == '+') {
    throw std::runtime_error("expected an unsigned integer, got '" + token + "'");
  }
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(token.c_str(), &end, 10);
  if (errno == ERANGE) throw std::runtime_error("integer out of range: '" + token + "'");
  if (end == token.c_str() || *end != '\0') {
    throw std::runtime_error("expected an unsigned integer, got '" + token + "'");
  }
  return v;
}

/// Parses one `key = value` line's value with path:line error messages.
class LineContext {
 public:
  LineContext(const std::string& origin, int line) : origin_(origin), line_(line) {}

  [[noreturn]] void fail(const std::string& message) const {
    throw ConfigError(origin_ + ":" + std::to_string(line_) + ": " + message);
  }

  double number(const std::string& value) const {
    try {
      return parse_double(value);
    } catch (const std::exception& e) {
      fail(e.what());
    }
  }

  int int32(const std::string& value) const {
    long long v = 0;
    try {
      v = parse_int(value);
    } catch (const std::exception& e) {
      fail(e.what());
    }
    if (v < INT_MIN || v > INT_MAX) fail("integer out of range: '" + value + "'");
    return static_cast<int>(v);
  }

  std::uint64_t uint64(const std::string& value) const {
    try {
      return parse_uint64(value);
    } catch (const std::exception& e) {
      fail(e.what());
    }
  }

  PolicySpec policy(const std::string& value) const {
    try {
      return parse_policy(value);
    } catch (const std::exception& e) {
      fail(e.what());
    }
  }

  std::vector<std::string> list(const std::string& value) const {
    std::vector<std::string> items;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = value.find(',', start);
      const std::string item =
          trim(comma == std::string::npos ? value.substr(start)
                                          : value.substr(start, comma - start));
      if (item.empty()) fail("empty item in list '" + value + "'");
      items.push_back(item);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return items;
  }

  std::vector<double> number_list(const std::string& value) const {
    std::vector<double> numbers;
    for (const std::string& item : list(value)) numbers.push_back(number(item));
    return numbers;
  }

  std::vector<PolicySpec> policy_list(const std::string& value) const {
    std::vector<PolicySpec> policies;
    for (const std::string& item : list(value)) policies.push_back(policy(item));
    return policies;
  }

 private:
  const std::string& origin_;
  int line_;
};

void apply_problem(RunConfig& config, const std::string& key, const std::string& value,
                   const LineContext& ctx) {
  if (key == "kind") {
    if (value != "line" && value != "icp" && value != "ba") {
      ctx.fail("unknown problem kind '" + value + "' (expected line, icp, or ba)");
    }
    config.problem = value;
  } else if (key == "seed") {
    config.seed = ctx.uint64(value);
  } else if (key == "count") {
    config.count = ctx.int32(value);
  } else if (key == "x_min") {
    config.x_min = ctx.number(value);
  } else if (key == "x_max") {
    config.x_max = ctx.number(value);
  } else if (key == "slope") {
    config.slope = ctx.number(value);
  } else if (key == "intercept") {
    config.intercept = ctx.number(value);
  } else if (key == "noise_sigma") {
    config.noise_sigma = ctx.number(value);
  } else if (key == "yaw_degrees") {
    config.yaw_degrees = ctx.number(value);
  } else if (key == "translation") {
    const std::vector<double> xyz = ctx.number_list(value);
    if (xyz.size() != 3) ctx.fail("translation needs exactly three components");
    config.translation = {xyz[0], xyz[1], xyz[2]};
  } else if (key == "cameras") {
    config.cameras = ctx.int32(value);
  } else if (key == "landmarks") {
    config.landmarks = ctx.int32(value);
  } else if (key == "pixel_noise") {
    config.pixel_noise = ctx.number(value);
  } else {
    ctx.fail("unknown key '" + key + "' in [problem]");
  }
}

void apply_outliers(RunConfig& config, const std::string& key, const std::string& value,
                    const LineContext& ctx) {
  OutlierSpec& outliers = config.outliers;
  if (key == "fraction") {
    outliers.fraction = ctx.number(value);
  } else if (key == "model") {
    try {
      outliers.model = parse_outlier_model(value);
    } catch (const std::exception& e) {
      ctx.fail(e.what());
    }
  } else if (key == "range_min") {
    outliers.range_min = ctx.number(value);
  } else if (key == "range_max") {
    outliers.range_max = ctx.number(value);
  } else if (key == "offset") {
    outliers.offset_magnitude = ctx.number(value);
  } else if (key == "cluster_size") {
    outliers.cluster_size = ctx.int32(value);
  } else {
    ctx.fail("unknown key '" + key + "' in [outliers]");
  }
}

void apply_solver(RunConfig& config, const std::string& key, const std::string& value,
                  const LineContext& ctx) {
  SolverConfig& solver = config.solver;
  if (key == "c") {
    solver.c = ctx.number(value);
  } else if (key == "alpha_min") {
    solver.alpha_min = ctx.number(value);
  } else if (key == "alpha_max") {
    solver.alpha_max = ctx.number(value);
  } else if (key == "alpha_resolution") {
    solver.alpha_resolution = ctx.number(value);
  } else if (key == "tau") {
    solver.tau = ctx.number(value);
  } else if (key == "max_em_iterations") {
    solver.max_em_iterations = ctx.int32(value);
  } else if (key == "max_irls_iterations") {
    solver.max_irls_iterations = ctx.int32(value);
  } else if (key == "lambda_init") {
    solver.lambda_init = ctx.number(value);
  } else if (key == "lambda_up") {
    solver.lambda_up = ctx.number(value);
  } else if (key == "lambda_down") {
    solver.lambda_down = ctx.number(value);
  } else if (key == "lambda_max") {
    solver.lambda_max = ctx.number(value);
  } else if (key == "step_tolerance") {
    solver.step_tolerance = ctx.number(value);
  } else if (key == "cost_tolerance") {
    solver.cost_tolerance = ctx.number(value);
  } else if (key == "estep_subsample_cap") {
    const int cap = ctx.int32(value);
    if (cap < 1) ctx.fail("estep_subsample_cap must be positive");
    solver.estep_subsample_cap = static_cast<std::size_t>(cap);
  } else if (key == "estep_seed") {
    solver.estep_seed = ctx.uint64(value);
  } else if (key == "threads") {
    solver.threads = ctx.int32(value);
  } else {
    ctx.fail("unknown key '" + key + "' in [solver]");
  }
}

void apply_policy(RunConfig& config, const std::string& key, const std::string& value,
                  const LineContext& ctx) {
  if (key == "policy") {
    config.policy = ctx.policy(value);
  } else if (key == "compare") {
    config.compare = ctx.policy_list(value);
  } else {
    ctx.fail("unknown key '" + key + "' in [policy]");
  }
}

void apply_icp(RunConfig& config, const std::string& key, const std::string& value,
               const LineContext& ctx) {
  IcpConfig& icp = config.icp;
  if (key == "variant") {
    if (value == "point_to_plane") {
      icp.variant = RegistrationVariant::kPointToPlane;
    } else if (value == "point_to_point") {
      icp.variant = RegistrationVariant::kPointToPoint;
    } else {
      ctx.fail("unknown variant '" + value +
               "' (expected point_to_plane or point_to_point)");
    }
  } else if (key == "cadence") {
    if (value == "per_iteration") {
      icp.cadence = AlphaCadence::kPerIteration;
    } else if (value == "on_convergence") {
      icp.cadence = AlphaCadence::kOnConvergence;
    } else {
      ctx.fail("unknown cadence '" + value +
               "' (expected per_iteration or on_convergence)");
    }
  } else if (key == "max_iterations") {
    icp.max_iterations = ctx.int32(value);
  } else if (key == "rotation_tolerance_deg") {
    icp.rotation_tolerance_deg = ctx.number(value);
  } else if (key == "translation_tolerance") {
    icp.translation_tolerance = ctx.number(value);
  } else {
    ctx.fail("unknown key '" + key + "' in [icp]");
  }
}

void apply_sweep(RunConfig& config, const std::string& key, const std::string& value,
                 const LineContext& ctx) {
  if (key == "sigmas") {
    config.sweep_sigmas = ctx.number_list(value);
  } else if (key == "samples") {
    config.sweep_samples = ctx.int32(value);
  } else if (key == "policies") {
    config.sweep_policies = ctx.policy_list(value);
  } else if (key == "rotation_noise") {
    config.sweep_rotation_noise = ctx.number(value);
  } else if (key == "success_rms") {
    config.sweep_success_rms = ctx.number(value);
  } else {
    ctx.fail("unknown key '" + key + "' in [sweep]");
  }
}

void apply_output(RunConfig& config, const std::string& key, const std::string& value,
                  const LineContext& ctx) {
  if (key == "directory") {
    config.output_directory = value;
  } else {
    ctx.fail("unknown key '" + key + "' in [output]");
  }
}

}  // namespace

RunConfig::RunConfig() {
  policy = parse_policy("adaptive");
  sweep_policies = {parse_policy("adaptive"), parse_policy("squared")};
}

RunConfig RunConfig::load(const std::string& path) {
  return parse(read_file(path), path);
}

RunConfig RunConfig::parse(const std::string& text, const std::string& origin) {
  RunConfig config;
  std::set<std::string> seen;
  std::string section;
  std::istringstream stream(text);
  std::string raw;
  int line_number = 0;
  while (std::getline(stream, raw)) {
    ++line_number;
    const LineContext ctx(origin, line_number);
    std::string line = raw;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') ctx.fail("malformed section header '" + line + "'");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "problem" && section != "outliers" && section != "solver" &&
          section != "policy" && section != "icp" && section != "sweep" &&
          section != "output") {
        ctx.fail("unknown section '[" + section + "]'");
      }
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) ctx.fail("expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) ctx.fail("missing key before '='");
    if (value.empty()) ctx.fail("missing value for key '" + key + "'");
    if (section.empty()) ctx.fail("key '" + key + "' appears before any [section]");
    if (!seen.insert(section + "." + key).second) {
      ctx.fail("duplicate key '" + key + "' in [" + section + "]");
    }

    if (section == "problem") {
      apply_problem(config, key, value, ctx);
    } else if (section == "outliers") {
      apply_outliers(config, key, value, ctx);
    } else if (section == "solver") {
      apply_solver(config, key, value, ctx);
    } else if (section == "policy") {
      apply_policy(config, key, value, ctx);
    } else if (section == "icp") {
      apply_icp(config, key, value, ctx);
    } else if (section == "sweep") {
      apply_sweep(config, key, value, ctx);
    } else {
      apply_output(config, key, value, ctx);
    }
  }
  return config;
}

}  // namespace arls
