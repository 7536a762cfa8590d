#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace arls::cli {

/// A solve failed hard (non-finite state, singular normal equations). Maps to
/// exit code 3.
class SolverFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A verification check failed (partition-table --verify). Maps to exit
/// code 2.
class VerificationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PartitionTableArgs {
  std::string out;     // build mode: destination path
  std::string verify;  // verify mode: table to check
  double alpha_min = -10.0;
  double alpha_max = 2.0;
  double resolution = 0.1;
  double tau = 10.0;
  double tolerance = 1e-8;  // verify: allowed quadrature self-deviation
};
int cmd_partition_table(const PartitionTableArgs& args);

struct EstimateAlphaArgs {
  std::string residuals;  // required input file
  std::string table;      // optional prebuilt partition table
  std::string out;        // JSON destination; stdout when empty
  double c = 1.0;
  double alpha_min = -10.0;
  double alpha_max = 2.0;
  double resolution = 0.1;
  double tau = 10.0;
  std::optional<std::uint64_t> seed;  // subsample seed override
};
int cmd_estimate_alpha(const EstimateAlphaArgs& args);

/// Shared flags for the experiment commands (fit, icp, ba, basin-sweep).
/// Empty/absent fields fall back to the config file, environment, then
/// built-in defaults.
struct RunArgs {
  std::string config;      // config file path
  std::string output_dir;  // overrides ARLS_OUTPUT_DIR and the config
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;  // overrides ARLS_THREADS and the config
  std::string policy;          // single-policy override
  std::string compare;         // comma-separated policy list override
  std::string data;            // fit: x/y data file
  std::string source;          // icp: source cloud
  std::string target;          // icp: target cloud
  std::string scene;           // ba / basin-sweep: scene file
};
int cmd_fit(const RunArgs& args);
int cmd_icp(const RunArgs& args);
int cmd_ba(const RunArgs& args);
int cmd_basin_sweep(const RunArgs& args);

}  // namespace arls::cli
