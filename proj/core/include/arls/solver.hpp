#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "arls/adaptive.hpp"
#include "arls/kernel.hpp"
#include "arls/partition.hpp"
#include "arls/problem.hpp"

namespace arls {

/// Fixed kernel used by one IRLS solve: either generalized-kernel parameters
/// or a named classical kernel.
struct KernelSpec {
  enum class Tag { kParams, kNamed };
  Tag tag = Tag::kParams;
  KernelParams params;
  NamedKernel named = NamedKernel::kSquaredL2;
  double named_c = 1.0;

  static KernelSpec fixed(KernelParams p);
  static KernelSpec named_kernel(NamedKernel kernel, double c);
  /// Squared loss, expressed as the generalized kernel clamped at alpha = 2 so
  /// it shares every code path (and therefore every bit) with an adaptive
  /// solve whose grid is pinned to alpha = 2.
  static KernelSpec squared(double c);

  double rho(double r) const;
  double weight(double r) const;
  /// Shape value for reporting; -inf for Welsch.
  double alpha() const;
  double scale() const;
};

/// Which kernel a solve should use.
enum class PolicyKind { kAdaptive, kSquared, kFixed, kNamed };

struct PolicySpec {
  PolicyKind kind = PolicyKind::kAdaptive;
  double fixed_alpha = 2.0;              // kFixed
  NamedKernel named = NamedKernel::kSquaredL2;  // kNamed

  std::string name() const;
};

/// Parses "adaptive", "squared", "fixed:<alpha>", or a named kernel
/// ("huber", "cauchy", "geman_mcclure", "welsch", "squared_l2").
PolicySpec parse_policy(const std::string& text);

KernelSpec to_kernel_spec(const PolicySpec& policy, double c);

struct SolverConfig {
  double c = 1.0;

  // alpha grid for the adaptive policy (the partition table must match).
  double alpha_min = -10.0;
  double alpha_max = 2.0;
  double alpha_resolution = 0.1;
  /// Truncation limit in normalized residual units (the support is tau * c).
  double tau = 10.0;

  int max_em_iterations = 50;
  /// IRLS budget per M-step (and total budget for fixed-kernel solves).
  int max_irls_iterations = 20;

  // Levenberg-Marquardt damping schedule.
  double lambda_init = 1e-4;
  double lambda_up = 10.0;
  double lambda_down = 10.0;
  double lambda_max = 1e10;

  /// Converged when the max |delta| of a step falls below this.
  double step_tolerance = 1e-10;
  /// Converged when the relative robust-cost decrease falls below this.
  double cost_tolerance = 1e-10;

  std::size_t estep_subsample_cap = 200000;
  std::uint64_t estep_seed = 0x51ab5f2e8c9d1fb3ull;

  /// Worker threads for experiment sweeps (0 = hardware concurrency). Has no
  /// effect on results, only on wall time.
  int threads = 1;

  void validate() const;
};

enum class TerminationReason {
  kStepTolerance,
  kCostTolerance,
  kMaxIterations,
  kAlphaFixedPoint,   // EM: alpha repeated and the inner solve converged
  kSingularSystem,    // normal equations not solvable (non-finite H/g or LLT failure)
  kNoDecrease,        // LM stalled: lambda_max reached with no accepted step
};

const char* to_string(TerminationReason reason);

/// One outer-iteration record (IRLS iteration for fixed-kernel solves, EM
/// iteration for adaptive solves).
struct IterationRecord {
  int iteration = 0;
  double alpha = 2.0;
  /// Sum of rho over valid block norms after the iteration.
  double robust_cost = 0.0;
  /// robust_cost plus n_valid * log(c * Z~(alpha)); the EM objective.
  /// NaN when no partition table is in play (fixed-kernel solves).
  double truncated_cost = 0.0;
  /// Sum of w_i * |r_i|^2 after the iteration.
  double weighted_squared_cost = 0.0;
  /// IRLS iterations consumed (1 for plain IRLS records).
  int irls_iterations = 0;
  /// Largest |delta| component accepted during the iteration.
  double max_step = 0.0;
  int invalid_blocks = 0;
};

struct SolveReport {
  Eigen::VectorXd final_parameters;
  bool converged = false;
  TerminationReason reason = TerminationReason::kMaxIterations;
  std::vector<IterationRecord> iterations;

  double final_robust_cost = 0.0;
  double final_truncated_cost = 0.0;
  int final_invalid_blocks = 0;
  /// Total accepted IRLS iterations across the whole solve.
  int total_irls_iterations = 0;
  /// Shape used by the last iteration (grid argmax for adaptive solves).
  double final_alpha = 2.0;
  bool estep_degenerate = false;
  double wall_time_seconds = 0.0;
};

/// Report JSON (schema: docs/schemas/solve-report.schema.json). Timing is
/// excluded by default so primary outputs stay byte-stable.
std::string to_json(const SolveReport& report, const std::string& policy_name,
                    bool include_timing = false);

/// Per-iteration trace with the exact header
/// "iteration,alpha,robust_cost,max_step".
std::string trace_csv(const SolveReport& report);

/// Robust cost sum_i rho(|r_i|) at theta over valid blocks. Throws
/// std::runtime_error on non-finite residuals (message names the block).
double robust_cost(const Problem& problem, const Eigen::VectorXd& theta,
                   const KernelSpec& kernel, int* invalid_blocks = nullptr);

/// Iteratively reweighted least squares with Levenberg-Marquardt damping and
/// a fixed kernel. Steps are accepted only when the robust cost strictly
/// decreases.
SolveReport irls_solve(const Problem& problem, const Eigen::VectorXd& theta0,
                       const KernelSpec& kernel, const SolverConfig& config);

/// Alternating estimation: E-step picks the grid alpha maximizing the
/// truncated likelihood of the current residual norms, M-step runs IRLS with
/// that alpha frozen. Terminates when alpha repeats and the M-step converged
/// (alpha starts from the grid point nearest 2). The table must be built on
/// the config's alpha grid with matching tau.
SolveReport em_solve(const Problem& problem, const Eigen::VectorXd& theta0,
                     const SolverConfig& config, const PartitionTable& table);

/// Dispatches on the policy: kAdaptive runs em_solve (table required),
/// everything else runs irls_solve with the corresponding fixed kernel.
SolveReport solve_with_policy(const Problem& problem, const Eigen::VectorXd& theta0,
                              const PolicySpec& policy, const SolverConfig& config,
                              const PartitionTable* table);

}  // namespace arls
