#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "arls/bundle_adjustment.hpp"
#include "arls/solver.hpp"

namespace arls {

/// Convergence-basin experiment: perturb camera translations with increasing
/// noise, re-triangulate landmarks, solve under several kernel policies, and
/// measure how often each policy returns to the true scene.
struct BasinSweepConfig {
  std::vector<double> sigmas = {0.1, 0.5, 1.0, 2.0, 5.0};
  int samples = 20;
  std::vector<PolicySpec> policies;
  /// Std-dev (radians) of an optional rotation perturbation; 0 disables it.
  double rotation_noise = 0.0;
  /// A run succeeds when the camera-center RMS error is below this (meters).
  double success_rms = 0.01;
  std::uint64_t master_seed = 1;
  SolverConfig solver;

  /// Worker threads (0 = hardware concurrency). Results are identical for
  /// any thread count: every cell derives its own seed and writes its own
  /// result slot.
  int threads = 1;
};

struct BasinSweepRecord {
  std::string policy;
  double sigma = 0.0;
  int sample = 0;
  std::uint64_t seed = 0;
  bool success = false;
  double rms_error = 0.0;
  double final_alpha = 2.0;
  /// Outer iterations of the solve (EM iterations for adaptive, IRLS
  /// iterations otherwise).
  int iterations = 0;
};

struct BasinSweepResult {
  std::vector<BasinSweepRecord> records;
};

/// Perturbs camera translations (cameras 1..n-1) with N(0, sigma^2 I) noise,
/// optionally perturbs their rotations, resets the gauge translation
/// component of camera 1 to its true value, and re-triangulates every
/// landmark by the midpoint method from its two observing cameras whose true
/// centers are nearest the true landmark. Camera 0 is never touched.
BAScene perturb_scene(const BAScene& scene, double sigma, double rotation_noise,
                      int gauge_component, std::uint64_t seed);

/// Runs the full grid policies x sigmas x samples. The perturbation seed
/// depends only on (sigma, sample), so every policy faces identical starts.
BasinSweepResult basin_sweep(const BAScene& scene, const BasinSweepConfig& config,
                             const PartitionTable& table);

/// Per-run CSV with header "policy,sigma,sample,seed,success,rms_error,final_alpha,iterations".
std::string sweep_csv(const BasinSweepResult& result);

/// Success rates per policy and noise level plus per-policy aggregate rows
/// (sigma column "all"); header "policy,sigma,successes,samples,success_rate".
std::string sweep_summary_csv(const BasinSweepResult& result);

/// Fraction of successful runs for one policy across all sigmas and samples.
double aggregate_success_rate(const BasinSweepResult& result, const std::string& policy);

}  // namespace arls
