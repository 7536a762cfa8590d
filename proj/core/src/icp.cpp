#include "arls/icp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "arls/text_io.hpp"

namespace arls {

namespace {

/// Residual block norms of a problem at theta (valid blocks only).
std::vector<double> residual_norms(const Problem& problem, const Eigen::VectorXd& theta) {
  std::vector<double> norms;
  norms.reserve(static_cast<std::size_t>(problem.block_count()));
  Eigen::VectorXd r;
  for (int b = 0; b < problem.block_count(); ++b) {
    if (problem.evaluate(b, theta, r)) {
      norms.push_back(r.norm());
    }
  }
  return norms;
}

double nearest_grid_alpha(const PartitionTable& table, double alpha) {
  if (table.size() == 1) return table.alpha_at(0);
  const double raw = (alpha - table.alpha_min) / table.resolution;
  const long long idx =
      std::llround(std::clamp(raw, 0.0, static_cast<double>(table.size() - 1)));
  return table.alpha_at(static_cast<int>(idx));
}

}  // namespace

IcpResult icp_pipeline(const PointCloud& source, const PointCloud& target, const Pose3& init,
                       const IcpConfig& config, const PartitionTable* table) {
  config.solver.validate();
  if (config.max_iterations < 1) {
    throw std::invalid_argument("icp: max_iterations must be >= 1");
  }
  const bool adaptive = config.policy.kind == PolicyKind::kAdaptive;
  if (adaptive && table == nullptr) {
    throw std::invalid_argument("icp: the adaptive policy requires a partition table");
  }
  source.validate();
  target.validate();

  const auto t0 = std::chrono::steady_clock::now();
  IcpResult result;
  Pose3 pose = init;

  EStepOptions estep;
  estep.subsample_cap = config.solver.estep_subsample_cap;
  estep.subsample_seed = config.solver.estep_seed;

  // Frozen shape for the on-convergence cadence; starts at the grid point
  // nearest 2 like the EM loop does.
  double frozen_alpha = adaptive ? nearest_grid_alpha(*table, 2.0) : 2.0;

  for (int it = 1; it <= config.max_iterations; ++it) {
    const std::vector<int> correspondences = nearest_correspondences(source, target, pose);
    const RegistrationProblem problem(source, target, correspondences, config.variant);
    const Eigen::VectorXd theta0 = pose_to_params(pose);

    SolveReport report;
    if (adaptive && config.cadence == AlphaCadence::kPerIteration) {
      // One E-step + one M-step; the ICP outer loop supplies the alternation.
      SolverConfig one_round = config.solver;
      one_round.max_em_iterations = 1;
      report = em_solve(problem, theta0, one_round, *table);
    } else if (adaptive) {
      report = irls_solve(problem, theta0,
                          KernelSpec::fixed(KernelParams{frozen_alpha, config.solver.c}),
                          config.solver);
    } else {
      report = irls_solve(problem, theta0, to_kernel_spec(config.policy, config.solver.c),
                          config.solver);
    }

    const Pose3 updated = params_to_pose(report.final_parameters);
    const auto [rot_inc_deg, trans_inc] = pose_error(updated, pose);
    pose = updated;

    IcpIterationRecord rec;
    rec.iteration = it;
    rec.alpha = report.final_alpha;
    rec.robust_cost = report.final_robust_cost;
    double max_step = 0.0;
    for (const IterationRecord& inner : report.iterations) {
      max_step = std::max(max_step, inner.max_step);
    }
    rec.max_step = max_step;
    rec.rotation_increment_deg = rot_inc_deg;
    rec.translation_increment = trans_inc;
    result.iterations.push_back(rec);
    result.final_alpha = report.final_alpha;
    result.final_robust_cost = report.final_robust_cost;

    const bool pose_settled = rot_inc_deg < config.rotation_tolerance_deg &&
                              trans_inc < config.translation_tolerance;
    if (!pose_settled) continue;

    if (adaptive && config.cadence == AlphaCadence::kOnConvergence) {
      // Pose stopped moving under the frozen shape: re-estimate and keep
      // going unless the shape is stable too.
      const std::vector<double> norms = residual_norms(problem, pose_to_params(pose));
      if (norms.empty()) {
        throw std::runtime_error("icp: no valid residuals for the shape estimate");
      }
      const AlphaEstimate estimate = estimate_alpha(norms, config.solver.c, *table, estep);
      if (estimate.alpha != frozen_alpha) {
        frozen_alpha = estimate.alpha;
        continue;
      }
      result.final_alpha = frozen_alpha;
    }
    result.converged = true;
    break;
  }

  result.transform = pose;
  result.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

std::string to_json(const IcpResult& result, const std::string& policy_name,
                    bool include_timing) {
  JsonWriter w;
  w.begin_object();
  w.field("policy", policy_name);
  w.field("converged", result.converged);
  w.field("final_alpha", result.final_alpha);
  w.field("final_robust_cost", result.final_robust_cost);
  w.key("transform");
  w.begin_object();
  w.field("qw", result.transform.q.w());
  w.field("qx", result.transform.q.x());
  w.field("qy", result.transform.q.y());
  w.field("qz", result.transform.q.z());
  w.field("tx", result.transform.translation.x());
  w.field("ty", result.transform.translation.y());
  w.field("tz", result.transform.translation.z());
  w.end_object();
  w.begin_array("iterations");
  for (const IcpIterationRecord& rec : result.iterations) {
    w.begin_object();
    w.field("iteration", rec.iteration);
    w.field("alpha", rec.alpha);
    w.field("robust_cost", rec.robust_cost);
    w.field("max_step", rec.max_step);
    w.field("rotation_increment_deg", rec.rotation_increment_deg);
    w.field("translation_increment", rec.translation_increment);
    w.end_object();
  }
  w.end_array();
  if (include_timing) {
    w.field("wall_time_seconds", result.wall_time_seconds);
  }
  w.end_object();
  return w.str() + "\n";
}

std::string trace_csv(const IcpResult& result) {
  std::string out = "iteration,alpha,robust_cost,max_step\n";
  for (const IcpIterationRecord& rec : result.iterations) {
    out += std::to_string(rec.iteration) + "," + format_double(rec.alpha) + "," +
           format_double(rec.robust_cost) + "," + format_double(rec.max_step) + "\n";
  }
  return out;
}

}  // namespace arls
