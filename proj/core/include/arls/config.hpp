#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "arls/icp.hpp"
#include "arls/solver.hpp"
#include "arls/synthetic.hpp"

namespace arls {

/// Configuration-file problem. The message carries "path:line: ..." whenever
/// a specific line is at fault.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Settings for the experiment commands, read from a sectioned `key = value`
/// text file ('#' starts a comment, sections are [problem], [outliers],
/// [solver], [policy], [icp], [sweep], [output]). Every field has a default;
/// unknown sections or keys and duplicate keys are rejected with their line
/// number. docs/example.cfg is the annotated reference.
struct RunConfig {
  // [problem] — synthetic-data selection and generation.
  std::string problem;  // "", "line", "icp", or "ba"; commands check it
  std::uint64_t seed = 1;
  int count = 200;  // points (line and icp)
  double x_min = 0.0;
  double x_max = 10.0;
  double slope = 1.0;
  double intercept = 0.0;
  double noise_sigma = 0.1;  // measurement noise (line: y units, icp: meters)
  // True source-to-target transform for icp.
  double yaw_degrees = 10.0;
  Eigen::Vector3d translation = {0.3, 0.1, 0.0};
  // ba scene size.
  int cameras = 8;
  int landmarks = 150;
  double pixel_noise = 0.5;

  // [outliers]
  OutlierSpec outliers;

  // [solver]
  SolverConfig solver;

  // [policy]
  PolicySpec policy;                // single-policy runs
  std::vector<PolicySpec> compare;  // side-by-side runs when non-empty

  // [icp] — kernel policy and solver come from the sections above.
  IcpConfig icp;

  // [sweep]
  std::vector<double> sweep_sigmas = {0.1, 0.5, 1.0, 2.0, 5.0};
  int sweep_samples = 20;
  std::vector<PolicySpec> sweep_policies;  // defaults to adaptive,squared
  double sweep_rotation_noise = 0.0;
  double sweep_success_rms = 0.01;

  // [output]
  std::string output_directory = "out";

  RunConfig();

  static RunConfig load(const std::string& path);
  /// `origin` names the source in error messages (a path, or e.g. "<inline>").
  static RunConfig parse(const std::string& text, const std::string& origin);
};

}  // namespace arls
