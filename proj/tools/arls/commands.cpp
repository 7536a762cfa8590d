#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <utility>
#include <vector>

#include "arls/adaptive.hpp"
#include "arls/basin_sweep.hpp"
#include "arls/bundle_adjustment.hpp"
#include "arls/config.hpp"
#include "arls/icp.hpp"
#include "arls/line_fit.hpp"
#include "arls/partition.hpp"
#include "arls/point_cloud.hpp"
#include "arls/solver.hpp"
#include "arls/synthetic.hpp"
#include "arls/text_io.hpp"

namespace arls::cli {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Applies flag/environment/config precedence (flag wins, then environment,
/// then the config file, then built-in defaults).
RunConfig load_run_config(const RunArgs& args) {
  RunConfig config = args.config.empty() ? RunConfig() : RunConfig::load(args.config);
  if (args.seed) config.seed = *args.seed;
  if (!args.policy.empty()) config.policy = parse_policy(args.policy);
  if (!args.compare.empty()) {
    config.compare.clear();
    std::istringstream stream(args.compare);
    std::string item;
    while (std::getline(stream, item, ',')) {
      if (item.empty()) throw ConfigError("--compare: empty policy name");
      config.compare.push_back(parse_policy(item));
    }
    if (config.compare.empty()) throw ConfigError("--compare: no policies given");
  }
  if (const char* env = std::getenv("ARLS_OUTPUT_DIR"); env != nullptr && *env != '\0') {
    config.output_directory = env;
  }
  if (!args.output_dir.empty()) config.output_directory = args.output_dir;
  if (const char* env = std::getenv("ARLS_THREADS"); env != nullptr && *env != '\0') {
    try {
      config.solver.threads = static_cast<int>(parse_int(env));
    } catch (const std::exception& e) {
      throw ConfigError(std::string("ARLS_THREADS: ") + e.what());
    }
  }
  if (args.threads) config.solver.threads = *args.threads;
  return config;
}

/// Creates the output directory up front and writes the wall-time sidecar at
/// the end. Timing and timestamps live only here, never in primary outputs.
class RunLog {
 public:
  RunLog(std::string command, std::string directory)
      : command_(std::move(command)), directory_(std::move(directory)) {
    std::filesystem::create_directories(directory_);
  }

  const std::string& directory() const { return directory_; }

  void write(const std::string& name, const std::string& content) const {
    write_file(directory_ + "/" + name, content);
  }

  void finish() const {
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    const std::time_t now = std::time(nullptr);
    char stamp[32] = {0};
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    write_file(directory_ + "/run.log", "command: " + command_ + "\nfinished: " + stamp +
                                            "\nwall_time_seconds: " + format_double(wall) +
                                            "\n");
  }

 private:
  std::string command_;
  std::string directory_;
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

/// Policies a run executes: the compare list when present, else the single
/// configured policy.
std::vector<PolicySpec> run_policies(const RunConfig& config, bool* compare_mode) {
  *compare_mode = !config.compare.empty();
  return *compare_mode ? config.compare : std::vector<PolicySpec>{config.policy};
}

std::optional<PartitionTable> maybe_build_table(const std::vector<PolicySpec>& policies,
                                                const SolverConfig& solver) {
  const bool adaptive = std::any_of(policies.begin(), policies.end(), [](const PolicySpec& p) {
    return p.kind == PolicyKind::kAdaptive;
  });
  if (!adaptive) return std::nullopt;
  return build_table(solver.alpha_min, solver.alpha_max, solver.alpha_resolution, solver.tau);
}

/// Policy name as a filename fragment (':' is the only awkward character).
std::string file_tag(const std::string& policy_name) {
  std::string tag = policy_name;
  std::replace(tag.begin(), tag.end(), ':', '_');
  return tag;
}

SolveReport run_solve(const Problem& problem, const Eigen::VectorXd& theta0,
                      const PolicySpec& policy, const SolverConfig& solver,
                      const PartitionTable* table) {
  try {
    return solve_with_policy(problem, theta0, policy, solver, table);
  } catch (const std::invalid_argument&) {
    throw;  // configuration mistakes keep exit code 1
  } catch (const std::exception& e) {
    throw SolverFailure(e.what());
  }
}

std::vector<double> read_residuals_file(const std::string& path) {
  const std::string content = read_file(path);
  std::vector<double> residuals;
  std::istringstream stream(content);
  std::string line;
  int line_number = 0;
  while (std::getline(stream, line)) {
    ++line_number;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    for (const std::string& token : split_tokens(line)) {
      try {
        residuals.push_back(parse_double(token));
      } catch (const std::exception& e) {
        throw std::runtime_error(path + ":" + std::to_string(line_number) + ": " + e.what());
      }
    }
  }
  if (residuals.empty()) {
    throw std::runtime_error(path + ": no residual values found");
  }
  return residuals;
}

std::vector<Eigen::Vector2d> read_xy_file(const std::string& path) {
  const std::string content = read_file(path);
  std::vector<Eigen::Vector2d> points;
  std::istringstream stream(content);
  std::string line;
  int line_number = 0;
  while (std::getline(stream, line)) {
    ++line_number;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const std::vector<std::string> tokens = split_tokens(line);
    if (tokens.empty()) continue;
    if (tokens.size() != 2) {
      throw std::runtime_error(path + ":" + std::to_string(line_number) +
                               ": expected 'x y', got " + std::to_string(tokens.size()) +
                               " values");
    }
    try {
      points.emplace_back(parse_double(tokens[0]), parse_double(tokens[1]));
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_number) + ": " + e.what());
    }
  }
  if (points.empty()) {
    throw std::runtime_error(path + ": no data points found");
  }
  return points;
}

Pose3 true_transform_from(const RunConfig& config) {
  Pose3 transform;
  const double yaw = config.yaw_degrees * std::numbers::pi / 180.0;
  transform.q = Eigen::Quaterniond(Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()));
  transform.translation = config.translation;
  return transform;
}

std::string transform_txt(const Pose3& pose) {
  const Eigen::Matrix3d rotation = pose.rotation();
  std::string out;
  for (int i = 0; i < 3; ++i) {
    out += format_double(rotation(i, 0)) + " " + format_double(rotation(i, 1)) + " " +
           format_double(rotation(i, 2)) + " " + format_double(pose.translation[i]) + "\n";
  }
  out += "0 0 0 1\n";
  return out;
}

std::string params_txt(const Eigen::VectorXd& parameters) {
  std::string out;
  for (Eigen::Index i = 0; i < parameters.size(); ++i) {
    out += format_double(parameters[i]) + "\n";
  }
  return out;
}

void check_problem_kind(const RunConfig& config, const std::string& expected,
                        const std::string& command) {
  if (!config.problem.empty() && config.problem != expected) {
    throw ConfigError("config selects problem kind '" + config.problem + "' but the command is " +
                      command);
  }
}

void print_summary(const std::string& command, const std::string& policy,
                   const SolveReport& report, const std::string& extra) {
  std::cout << command << ": policy=" << policy << " converged=" << (report.converged ? 1 : 0)
            << " reason=" << to_string(report.reason)
            << " final_alpha=" << format_double(report.final_alpha)
            << " final_cost=" << format_double(report.final_robust_cost)
            << " iterations=" << report.iterations.size() << extra << "\n";
}

}  // namespace

int cmd_partition_table(const PartitionTableArgs& args) {
  if (args.out.empty() == args.verify.empty()) {
    throw std::runtime_error(
        "partition-table needs exactly one of --out (build) or --verify (check)");
  }

  if (!args.out.empty()) {
    const PartitionTable table =
        build_table(args.alpha_min, args.alpha_max, args.resolution, args.tau);
    table.save(args.out);
    std::cout << "wrote " << table.size() << "-entry table to " << args.out << "\n";
    return 0;
  }

  if (!std::filesystem::exists(args.verify)) {
    throw std::runtime_error("cannot open '" + args.verify + "'");
  }
  PartitionTable table;
  try {
    table = PartitionTable::load(args.verify);
  } catch (const std::exception& e) {
    throw VerificationFailure(e.what());
  }
  double max_deviation = 0.0;
  for (int i = 0; i < table.size(); ++i) {
    const double refined =
        compute_log_partition(table.alpha_at(i), table.tau, table.intervals * 2);
    max_deviation = std::max(max_deviation, std::abs(refined - table.log_z[i]));
  }
  std::cout << "max deviation against a halved quadrature step: " << format_double(max_deviation)
            << "\n";
  if (!(max_deviation <= args.tolerance)) {
    throw VerificationFailure("quadrature deviation " + format_double(max_deviation) +
                              " exceeds tolerance " + format_double(args.tolerance));
  }
  std::cout << "table verified: " << table.size() << " entries\n";
  return 0;
}

int cmd_estimate_alpha(const EstimateAlphaArgs& args) {
  const std::vector<double> residuals = read_residuals_file(args.residuals);
  const PartitionTable table =
      args.table.empty() ? build_table(args.alpha_min, args.alpha_max, args.resolution, args.tau)
                         : PartitionTable::load(args.table);
  EStepOptions options;
  if (args.seed) options.subsample_seed = *args.seed;
  const AlphaEstimate estimate = estimate_alpha(residuals, args.c, table, options);
  const std::string json = to_json(estimate, args.c) + "\n";
  if (args.out.empty()) {
    std::cout << json;
  } else {
    write_file(args.out, json);
  }
  return 0;
}

int cmd_fit(const RunArgs& args) {
  const RunConfig config = load_run_config(args);
  check_problem_kind(config, "line", "fit");
  config.solver.validate();
  RunLog log("fit", config.output_directory);

  std::vector<Eigen::Vector2d> points;
  bool have_truth = false;
  if (!args.data.empty()) {
    points = read_xy_file(args.data);
  } else {
    const LineDataset dataset =
        make_line_dataset(config.count, config.x_min, config.x_max, config.slope,
                          config.intercept, config.noise_sigma, config.outliers, config.seed);
    points.reserve(dataset.xs.size());
    for (std::size_t i = 0; i < dataset.xs.size(); ++i) {
      points.emplace_back(dataset.xs[i], dataset.ys[i]);
    }
    have_truth = true;
  }
  const auto problem = line_fit_problem(std::move(points));
  const Eigen::VectorXd theta0 = problem->least_squares_fit();

  bool compare_mode = false;
  const std::vector<PolicySpec> policies = run_policies(config, &compare_mode);
  const std::optional<PartitionTable> table = maybe_build_table(policies, config.solver);
  const PartitionTable* table_ptr = table ? &*table : nullptr;

  int exit_code = 0;
  std::string compare_csv = "policy,converged,iterations,final_alpha,final_cost,param_rms_error\n";
  for (const PolicySpec& policy : policies) {
    const SolveReport report = run_solve(*problem, theta0, policy, config.solver, table_ptr);
    if (report.reason == TerminationReason::kSingularSystem) exit_code = 3;

    double param_rms = kNaN;
    if (have_truth) {
      const Eigen::Vector2d delta =
          report.final_parameters - Eigen::Vector2d(config.slope, config.intercept);
      param_rms = std::sqrt(delta.squaredNorm() / 2.0);
    }
    if (compare_mode) {
      const std::string tag = file_tag(policy.name());
      log.write("report_" + tag + ".json", to_json(report, policy.name()));
      log.write("trace_" + tag + ".csv", trace_csv(report));
      compare_csv += policy.name() + "," + std::to_string(report.converged ? 1 : 0) + "," +
                     std::to_string(report.iterations.size()) + "," +
                     format_double(report.final_alpha) + "," +
                     format_double(report.final_robust_cost) + "," + format_double(param_rms) +
                     "\n";
    } else {
      log.write("report.json", to_json(report, policy.name()));
      log.write("trace.csv", trace_csv(report));
      log.write("params.txt", params_txt(report.final_parameters));
    }
    print_summary("fit", policy.name(), report,
                  " param_rms_error=" + format_double(param_rms));
  }
  if (compare_mode) log.write("compare.csv", compare_csv);
  log.finish();
  return exit_code;
}

int cmd_icp(const RunArgs& args) {
  const RunConfig config = load_run_config(args);
  check_problem_kind(config, "icp", "icp");
  config.solver.validate();
  if (args.source.empty() != args.target.empty()) {
    throw ConfigError("icp needs both --source and --target, or neither (synthetic data)");
  }
  RunLog log("icp", config.output_directory);

  PointCloud source;
  PointCloud target;
  bool have_truth = false;
  Pose3 truth;
  if (!args.source.empty()) {
    source = PointCloud::load(args.source);
    target = PointCloud::load(args.target);
  } else {
    RegistrationDataset dataset =
        make_registration_dataset(config.count, config.noise_sigma, true_transform_from(config),
                                  config.outliers, config.seed);
    source = std::move(dataset.source);
    target = std::move(dataset.target);
    truth = dataset.true_transform;
    have_truth = true;
  }

  bool compare_mode = false;
  const std::vector<PolicySpec> policies = run_policies(config, &compare_mode);
  const std::optional<PartitionTable> table = maybe_build_table(policies, config.solver);
  const PartitionTable* table_ptr = table ? &*table : nullptr;

  IcpConfig icp = config.icp;
  icp.solver = config.solver;

  std::string compare_csv =
      "policy,converged,iterations,final_alpha,final_cost,rotation_error_deg,translation_error\n";
  for (const PolicySpec& policy : policies) {
    icp.policy = policy;
    IcpResult result;
    try {
      result = icp_pipeline(source, target, Pose3{}, icp, table_ptr);
    } catch (const std::invalid_argument&) {
      throw;
    } catch (const std::exception& e) {
      throw SolverFailure(e.what());
    }

    double rotation_error = kNaN;
    double translation_error = kNaN;
    if (have_truth) {
      std::tie(rotation_error, translation_error) = pose_error(result.transform, truth);
    }
    if (compare_mode) {
      const std::string tag = file_tag(policy.name());
      log.write("report_" + tag + ".json", to_json(result, policy.name()));
      log.write("trace_" + tag + ".csv", trace_csv(result));
      compare_csv += policy.name() + "," + std::to_string(result.converged ? 1 : 0) + "," +
                     std::to_string(result.iterations.size()) + "," +
                     format_double(result.final_alpha) + "," +
                     format_double(result.final_robust_cost) + "," +
                     format_double(rotation_error) + "," + format_double(translation_error) +
                     "\n";
    } else {
      log.write("report.json", to_json(result, policy.name()));
      log.write("trace.csv", trace_csv(result));
      log.write("transform.txt", transform_txt(result.transform));
    }
    std::cout << "icp: policy=" << policy.name() << " converged=" << (result.converged ? 1 : 0)
              << " final_alpha=" << format_double(result.final_alpha)
              << " final_cost=" << format_double(result.final_robust_cost)
              << " iterations=" << result.iterations.size()
              << " rotation_error_deg=" << format_double(rotation_error)
              << " translation_error=" << format_double(translation_error) << "\n";
  }
  if (compare_mode) log.write("compare.csv", compare_csv);
  log.finish();
  return 0;
}

int cmd_ba(const RunArgs& args) {
  const RunConfig config = load_run_config(args);
  check_problem_kind(config, "ba", "ba");
  config.solver.validate();
  RunLog log("ba", config.output_directory);

  BAScene scene;
  if (!args.scene.empty()) {
    scene = BAScene::load(args.scene);
  } else {
    scene = make_ba_scene(config.cameras, config.landmarks, config.pixel_noise, config.outliers,
                          config.seed)
                .scene;
  }
  const auto problem = ba_problem(scene);
  const Eigen::VectorXd theta0 = problem->initial_parameters();

  bool compare_mode = false;
  const std::vector<PolicySpec> policies = run_policies(config, &compare_mode);
  const std::optional<PartitionTable> table = maybe_build_table(policies, config.solver);
  const PartitionTable* table_ptr = table ? &*table : nullptr;

  int exit_code = 0;
  // center_rms is against the input scene; for synthetic runs that is the
  // ground truth.
  std::string compare_csv = "policy,converged,iterations,final_alpha,final_cost,center_rms\n";
  for (const PolicySpec& policy : policies) {
    const SolveReport report = run_solve(*problem, theta0, policy, config.solver, table_ptr);
    if (report.reason == TerminationReason::kSingularSystem) exit_code = 3;

    const BAScene refined = problem->scene_at(report.final_parameters);
    const double center_rms = camera_center_rms(refined, scene);
    if (compare_mode) {
      const std::string tag = file_tag(policy.name());
      log.write("report_" + tag + ".json", to_json(report, policy.name()));
      log.write("trace_" + tag + ".csv", trace_csv(report));
      compare_csv += policy.name() + "," + std::to_string(report.converged ? 1 : 0) + "," +
                     std::to_string(report.iterations.size()) + "," +
                     format_double(report.final_alpha) + "," +
                     format_double(report.final_robust_cost) + "," + format_double(center_rms) +
                     "\n";
    } else {
      log.write("report.json", to_json(report, policy.name()));
      log.write("trace.csv", trace_csv(report));
      refined.save(log.directory() + "/scene.txt");
    }
    print_summary("ba", policy.name(), report, " center_rms=" + format_double(center_rms));
  }
  if (compare_mode) log.write("compare.csv", compare_csv);
  log.finish();
  return exit_code;
}

int cmd_basin_sweep(const RunArgs& args) {
  const RunConfig config = load_run_config(args);
  check_problem_kind(config, "ba", "basin-sweep");
  config.solver.validate();
  RunLog log("basin-sweep", config.output_directory);

  BAScene scene;
  if (!args.scene.empty()) {
    scene = BAScene::load(args.scene);
  } else {
    scene = make_ba_scene(config.cameras, config.landmarks, config.pixel_noise, config.outliers,
                          config.seed)
                .scene;
  }

  BasinSweepConfig sweep;
  sweep.sigmas = config.sweep_sigmas;
  sweep.samples = config.sweep_samples;
  sweep.policies = config.sweep_policies;
  if (!args.policy.empty()) sweep.policies = {parse_policy(args.policy)};
  if (!args.compare.empty()) sweep.policies = config.compare;  // --compare wins
  sweep.rotation_noise = config.sweep_rotation_noise;
  sweep.success_rms = config.sweep_success_rms;
  sweep.master_seed = config.seed;
  sweep.solver = config.solver;
  sweep.threads = config.solver.threads;

  const PartitionTable table = build_table(config.solver.alpha_min, config.solver.alpha_max,
                                           config.solver.alpha_resolution, config.solver.tau);
  const BasinSweepResult result = basin_sweep(scene, sweep, table);

  log.write("sweep.csv", sweep_csv(result));
  log.write("summary.csv", sweep_summary_csv(result));
  for (const PolicySpec& policy : sweep.policies) {
    std::cout << "basin-sweep: policy=" << policy.name() << " success_rate="
              << format_double(aggregate_success_rate(result, policy.name())) << "\n";
  }
  log.finish();
  return 0;
}

}  // namespace arls::cli
