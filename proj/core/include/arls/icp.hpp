#pragma once

#include "arls/registration.hpp"
#include "arls/solver.hpp"

namespace arls {

/// When the shape parameter is re-estimated during adaptive ICP.
enum class AlphaCadence {
  /// One E-step + one M-step per ICP iteration (alpha anneals as the
  /// alignment improves). Default.
  kPerIteration,
  /// Keep alpha frozen while the pose iterates; re-estimate only after the
  /// pose increment drops below tolerance, and stop once alpha repeats.
  kOnConvergence,
};

struct IcpConfig {
  SolverConfig solver;
  PolicySpec policy;
  RegistrationVariant variant = RegistrationVariant::kPointToPlane;
  AlphaCadence cadence = AlphaCadence::kPerIteration;
  int max_iterations = 30;
  /// Converged when one ICP iteration moves the pose less than both bounds.
  double rotation_tolerance_deg = 1e-4;
  double translation_tolerance = 1e-6;
};

struct IcpIterationRecord {
  int iteration = 0;
  double alpha = 2.0;
  double robust_cost = 0.0;
  /// Largest parameter step accepted inside the iteration's solve.
  double max_step = 0.0;
  /// Pose increment produced by the iteration.
  double rotation_increment_deg = 0.0;
  double translation_increment = 0.0;
};

struct IcpResult {
  Pose3 transform;
  bool converged = false;
  std::vector<IcpIterationRecord> iterations;
  double final_alpha = 2.0;
  double final_robust_cost = 0.0;
  double wall_time_seconds = 0.0;
};

/// Iterative closest point: re-associates nearest neighbors, solves the
/// fixed-correspondence alignment under the configured kernel policy, and
/// repeats until the pose stops moving. The partition table is required for
/// the adaptive policy and ignored otherwise.
IcpResult icp_pipeline(const PointCloud& source, const PointCloud& target, const Pose3& init,
                       const IcpConfig& config, const PartitionTable* table);

/// Report JSON (schema: docs/schemas/icp-report.schema.json).
std::string to_json(const IcpResult& result, const std::string& policy_name,
                    bool include_timing = false);

/// Per-ICP-iteration trace with header "iteration,alpha,robust_cost,max_step".
std::string trace_csv(const IcpResult& result);

}  // namespace arls
