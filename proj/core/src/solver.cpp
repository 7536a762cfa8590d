#include "arls/solver.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "arls/text_io.hpp"

namespace arls {

KernelSpec KernelSpec::fixed(KernelParams p) {
  validate(p);
  KernelSpec spec;
  spec.tag = Tag::kParams;
  spec.params = p;
  return spec;
}

KernelSpec KernelSpec::named_kernel(NamedKernel kernel, double c) {
  if (!std::isfinite(c) || c <= 0.0) {
    throw std::invalid_argument("kernel scale c must be finite and > 0");
  }
  KernelSpec spec;
  spec.tag = Tag::kNamed;
  spec.named = kernel;
  spec.named_c = c;
  return spec;
}

KernelSpec KernelSpec::squared(double c) { return fixed(KernelParams{2.0, c}); }

double KernelSpec::rho(double r) const {
  return tag == Tag::kParams ? arls::rho(r, params) : named_rho(r, named, named_c);
}

double KernelSpec::weight(double r) const {
  return tag == Tag::kParams ? arls::weight(r, params) : named_weight(r, named, named_c);
}

double KernelSpec::alpha() const {
  return tag == Tag::kParams ? params.alpha : named_kernel_alpha(named);
}

double KernelSpec::scale() const { return tag == Tag::kParams ? params.c : named_c; }

std::string PolicySpec::name() const {
  switch (kind) {
    case PolicyKind::kAdaptive: return "adaptive";
    case PolicyKind::kSquared: return "squared";
    case PolicyKind::kFixed: return "fixed:" + format_double(fixed_alpha);
    case PolicyKind::kNamed: return to_string(named);
  }
  return "unknown";
}

PolicySpec parse_policy(const std::string& text) {
  PolicySpec policy;
  if (text == "adaptive") {
    policy.kind = PolicyKind::kAdaptive;
    return policy;
  }
  if (text == "squared") {
    policy.kind = PolicyKind::kSquared;
    return policy;
  }
  if (text.rfind("fixed:", 0) == 0) {
    policy.kind = PolicyKind::kFixed;
    policy.fixed_alpha = parse_double(text.substr(6));
    if (!std::isfinite(policy.fixed_alpha)) {
      throw std::invalid_argument("fixed policy alpha must be finite: '" + text + "'");
    }
    return policy;
  }
  policy.kind = PolicyKind::kNamed;
  if (text == "squared_l2") policy.named = NamedKernel::kSquaredL2;
  else if (text == "huber" || text == "pseudo_huber") policy.named = NamedKernel::kPseudoHuber;
  else if (text == "cauchy") policy.named = NamedKernel::kCauchy;
  else if (text == "geman_mcclure") policy.named = NamedKernel::kGemanMcClure;
  else if (text == "welsch") policy.named = NamedKernel::kWelsch;
  else {
    throw std::invalid_argument(
        "unknown policy '" + text +
        "' (expected adaptive, squared, fixed:<alpha>, squared_l2, huber, cauchy, "
        "geman_mcclure, or welsch)");
  }
  return policy;
}

KernelSpec to_kernel_spec(const PolicySpec& policy, double c) {
  switch (policy.kind) {
    case PolicyKind::kAdaptive:
      throw std::invalid_argument("the adaptive policy has no fixed kernel; use em_solve");
    case PolicyKind::kSquared: return KernelSpec::squared(c);
    case PolicyKind::kFixed: return KernelSpec::fixed(KernelParams{policy.fixed_alpha, c});
    case PolicyKind::kNamed: return KernelSpec::named_kernel(policy.named, c);
  }
  throw std::invalid_argument("unknown policy kind");
}

void SolverConfig::validate() const {
  if (!std::isfinite(c) || c <= 0.0) throw std::invalid_argument("solver: c must be > 0");
  if (!std::isfinite(alpha_min) || !std::isfinite(alpha_max) || alpha_min > alpha_max) {
    throw std::invalid_argument("solver: need finite alpha_min <= alpha_max");
  }
  if (alpha_max > alpha_min && (!std::isfinite(alpha_resolution) || alpha_resolution <= 0.0)) {
    throw std::invalid_argument("solver: alpha_resolution must be > 0");
  }
  if (!std::isfinite(tau) || tau <= 0.0) throw std::invalid_argument("solver: tau must be > 0");
  if (max_em_iterations < 1) throw std::invalid_argument("solver: max_em_iterations must be >= 1");
  if (max_irls_iterations < 1) {
    throw std::invalid_argument("solver: max_irls_iterations must be >= 1");
  }
  if (!(lambda_init > 0.0) || !(lambda_up > 1.0) || !(lambda_down > 1.0) ||
      !(lambda_max >= lambda_init)) {
    throw std::invalid_argument("solver: lambda schedule must satisfy lambda_init > 0, "
                                "lambda_up > 1, lambda_down > 1, lambda_max >= lambda_init");
  }
  if (!(step_tolerance > 0.0) || !(cost_tolerance >= 0.0)) {
    throw std::invalid_argument("solver: tolerances must be positive");
  }
  if (estep_subsample_cap == 0) {
    throw std::invalid_argument("solver: estep_subsample_cap must be > 0");
  }
  if (threads < 0) throw std::invalid_argument("solver: threads must be >= 0");
}

const char* to_string(TerminationReason reason) {
  switch (reason) {
    case TerminationReason::kStepTolerance: return "step_tolerance";
    case TerminationReason::kCostTolerance: return "cost_tolerance";
    case TerminationReason::kMaxIterations: return "max_iterations";
    case TerminationReason::kAlphaFixedPoint: return "alpha_fixed_point";
    case TerminationReason::kSingularSystem: return "singular_system";
    case TerminationReason::kNoDecrease: return "no_decrease";
  }
  return "unknown";
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Residuals of every block at one state.
struct Evaluation {
  std::vector<Eigen::VectorXd> residuals;
  std::vector<char> valid;
  std::vector<double> norms;
  int invalid_count = 0;
};

/// Evaluates all blocks. With throw_on_nonfinite the offending block is named
/// (used at states the solver must stand on: theta0 and accepted iterates);
/// trial states instead report failure so the step can be rejected.
bool evaluate_blocks(const Problem& problem, const Eigen::VectorXd& theta, Evaluation& ev,
                     bool throw_on_nonfinite) {
  const int nb = problem.block_count();
  ev.residuals.resize(static_cast<std::size_t>(nb));
  ev.valid.assign(static_cast<std::size_t>(nb), 0);
  ev.norms.assign(static_cast<std::size_t>(nb), 0.0);
  ev.invalid_count = 0;
  for (int b = 0; b < nb; ++b) {
    Eigen::VectorXd& r = ev.residuals[static_cast<std::size_t>(b)];
    if (!problem.evaluate(b, theta, r)) {
      ++ev.invalid_count;
      continue;
    }
    if (!r.allFinite()) {
      if (throw_on_nonfinite) {
        throw std::runtime_error("non-finite residual in block " + std::to_string(b));
      }
      return false;
    }
    ev.valid[static_cast<std::size_t>(b)] = 1;
    ev.norms[static_cast<std::size_t>(b)] = r.norm();
  }
  return true;
}

double cost_of(const Evaluation& ev, const KernelSpec& kernel) {
  double cost = 0.0;
  for (std::size_t b = 0; b < ev.norms.size(); ++b) {
    if (ev.valid[b]) cost += kernel.rho(ev.norms[b]);
  }
  return cost;
}

double weighted_squared_of(const Evaluation& ev, const KernelSpec& kernel) {
  double cost = 0.0;
  for (std::size_t b = 0; b < ev.norms.size(); ++b) {
    if (ev.valid[b]) cost += kernel.weight(ev.norms[b]) * ev.norms[b] * ev.norms[b];
  }
  return cost;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

double robust_cost(const Problem& problem, const Eigen::VectorXd& theta,
                   const KernelSpec& kernel, int* invalid_blocks) {
  Evaluation ev;
  evaluate_blocks(problem, theta, ev, /*throw_on_nonfinite=*/true);
  if (invalid_blocks != nullptr) *invalid_blocks = ev.invalid_count;
  return cost_of(ev, kernel);
}

SolveReport irls_solve(const Problem& problem, const Eigen::VectorXd& theta0,
                       const KernelSpec& kernel, const SolverConfig& config) {
  config.validate();
  if (theta0.size() != problem.ambient_size()) {
    throw std::invalid_argument("irls_solve: theta0 has " + std::to_string(theta0.size()) +
                                " entries, problem expects " +
                                std::to_string(problem.ambient_size()));
  }
  const auto t0 = std::chrono::steady_clock::now();

  SolveReport report;
  report.final_alpha = kernel.alpha();
  report.reason = TerminationReason::kMaxIterations;

  Eigen::VectorXd theta = theta0;
  Evaluation ev;
  evaluate_blocks(problem, theta, ev, /*throw_on_nonfinite=*/true);
  if (ev.invalid_count == problem.block_count()) {
    throw std::runtime_error("irls_solve: no valid residual blocks at the initial state");
  }
  double cost = cost_of(ev, kernel);
  if (!std::isfinite(cost)) {
    throw std::runtime_error("irls_solve: non-finite robust cost at the initial state");
  }

  const int nt = problem.tangent_size();
  Eigen::MatrixXd hess(nt, nt);
  Eigen::VectorXd grad(nt);
  Eigen::MatrixXd jac;
  Eigen::MatrixXd damped(nt, nt);
  Evaluation trial;
  double lambda = config.lambda_init;
  bool stop = false;

  for (int it = 1; it <= config.max_irls_iterations && !stop; ++it) {
    hess.setZero();
    grad.setZero();
    for (int b = 0; b < problem.block_count(); ++b) {
      if (!ev.valid[static_cast<std::size_t>(b)]) continue;
      const std::vector<int>& support = problem.block_support(b);
      problem.jacobian(b, theta, jac);
      const double w = kernel.weight(ev.norms[static_cast<std::size_t>(b)]);
      const Eigen::MatrixXd hb = w * (jac.transpose() * jac);
      const Eigen::VectorXd gb =
          w * (jac.transpose() * ev.residuals[static_cast<std::size_t>(b)]);
      const int k = static_cast<int>(support.size());
      for (int i = 0; i < k; ++i) {
        grad[support[static_cast<std::size_t>(i)]] += gb[i];
        for (int j = 0; j < k; ++j) {
          hess(support[static_cast<std::size_t>(i)], support[static_cast<std::size_t>(j)]) +=
              hb(i, j);
        }
      }
    }
    if (!hess.allFinite() || !grad.allFinite()) {
      report.reason = TerminationReason::kSingularSystem;
      break;
    }

    // Levenberg-Marquardt inner loop: retry with more damping until a step
    // strictly decreases the robust cost or the damping range is exhausted.
    while (true) {
      damped = hess;
      damped.diagonal().array() += lambda;
      Eigen::LLT<Eigen::MatrixXd> llt(damped);
      Eigen::VectorXd delta;
      bool solvable = llt.info() == Eigen::Success;
      if (solvable) {
        delta = llt.solve(-grad);
        solvable = delta.allFinite();
      }
      if (!solvable) {
        lambda *= config.lambda_up;
        if (lambda > config.lambda_max) {
          report.reason = TerminationReason::kSingularSystem;
          stop = true;
          break;
        }
        continue;
      }

      const double max_step = delta.cwiseAbs().maxCoeff();
      if (max_step <= config.step_tolerance) {
        IterationRecord rec;
        rec.iteration = it;
        rec.alpha = kernel.alpha();
        rec.robust_cost = cost;
        rec.truncated_cost = kNaN;
        rec.weighted_squared_cost = weighted_squared_of(ev, kernel);
        rec.irls_iterations = 1;
        rec.max_step = max_step;
        rec.invalid_blocks = ev.invalid_count;
        report.iterations.push_back(rec);
        report.reason = TerminationReason::kStepTolerance;
        report.converged = true;
        stop = true;
        break;
      }

      const Eigen::VectorXd theta_trial = problem.plus(theta, delta);
      bool usable = theta_trial.size() == theta.size() && theta_trial.allFinite() &&
                    evaluate_blocks(problem, theta_trial, trial, /*throw_on_nonfinite=*/false);
      double trial_cost = kNaN;
      if (usable && trial.invalid_count < problem.block_count()) {
        trial_cost = cost_of(trial, kernel);
        usable = std::isfinite(trial_cost);
      } else {
        usable = false;
      }

      if (usable && trial_cost < cost) {
        const double previous = cost;
        theta = theta_trial;
        std::swap(ev, trial);
        cost = trial_cost;
        lambda = std::max(lambda / config.lambda_down, 1e-18);

        IterationRecord rec;
        rec.iteration = it;
        rec.alpha = kernel.alpha();
        rec.robust_cost = cost;
        rec.truncated_cost = kNaN;
        rec.weighted_squared_cost = weighted_squared_of(ev, kernel);
        rec.irls_iterations = 1;
        rec.max_step = max_step;
        rec.invalid_blocks = ev.invalid_count;
        report.iterations.push_back(rec);
        ++report.total_irls_iterations;

        if (previous - cost <= config.cost_tolerance * std::max(std::abs(previous), 1e-300)) {
          report.reason = TerminationReason::kCostTolerance;
          report.converged = true;
          stop = true;
        }
        break;
      }

      lambda *= config.lambda_up;
      if (lambda > config.lambda_max) {
        report.reason = TerminationReason::kNoDecrease;
        stop = true;
        break;
      }
    }
  }

  report.final_parameters = theta;
  report.final_robust_cost = cost;
  report.final_truncated_cost = kNaN;
  report.final_invalid_blocks = ev.invalid_count;
  report.wall_time_seconds = seconds_since(t0);
  return report;
}

SolveReport em_solve(const Problem& problem, const Eigen::VectorXd& theta0,
                     const SolverConfig& config, const PartitionTable& table) {
  config.validate();
  if (std::abs(table.alpha_min - config.alpha_min) > 1e-12 ||
      std::abs(table.alpha_max - config.alpha_max) > 1e-12 ||
      (table.size() > 1 && std::abs(table.resolution - config.alpha_resolution) > 1e-12) ||
      std::abs(table.tau - config.tau) > 1e-12) {
    throw std::invalid_argument("em_solve: partition table grid does not match solver config");
  }
  const auto t0 = std::chrono::steady_clock::now();

  SolveReport report;
  report.reason = TerminationReason::kMaxIterations;
  Eigen::VectorXd theta = theta0;

  // The shape path starts from the grid point nearest 2 (exactly 2 on the
  // default grid), so the first M-step behaves like a damped least squares.
  double alpha_prev;
  if (table.size() == 1) {
    alpha_prev = table.alpha_at(0);
  } else {
    const double raw = (2.0 - table.alpha_min) / table.resolution;
    const long long idx = std::llround(std::clamp(raw, 0.0, static_cast<double>(table.size() - 1)));
    alpha_prev = table.alpha_at(static_cast<int>(idx));
  }

  EStepOptions estep;
  estep.subsample_cap = config.estep_subsample_cap;
  estep.subsample_seed = config.estep_seed;

  const double log_c = std::log(config.c);
  Evaluation ev;
  std::vector<double> norms;
  bool stop = false;

  for (int t = 1; t <= config.max_em_iterations && !stop; ++t) {
    evaluate_blocks(problem, theta, ev, /*throw_on_nonfinite=*/true);
    norms.clear();
    for (std::size_t b = 0; b < ev.norms.size(); ++b) {
      if (ev.valid[b]) norms.push_back(ev.norms[b]);
    }
    if (norms.empty()) {
      throw std::runtime_error("em_solve: no valid residual blocks");
    }

    const AlphaEstimate estimate = estimate_alpha(norms, config.c, table, estep);
    report.estep_degenerate = report.estep_degenerate || estimate.degenerate;
    const double alpha = estimate.alpha;

    const SolveReport m =
        irls_solve(problem, theta, KernelSpec::fixed(KernelParams{alpha, config.c}), config);
    theta = m.final_parameters;

    IterationRecord rec;
    rec.iteration = t;
    rec.alpha = alpha;
    rec.robust_cost = m.final_robust_cost;
    const int n_valid = problem.block_count() - m.final_invalid_blocks;
    rec.truncated_cost = m.final_robust_cost + n_valid * (log_c + table.log_z_at(alpha));
    rec.weighted_squared_cost =
        m.iterations.empty() ? kNaN : m.iterations.back().weighted_squared_cost;
    rec.irls_iterations = m.total_irls_iterations;
    double max_step = 0.0;
    for (const IterationRecord& inner : m.iterations) {
      max_step = std::max(max_step, inner.max_step);
    }
    rec.max_step = max_step;
    rec.invalid_blocks = m.final_invalid_blocks;
    report.iterations.push_back(rec);
    report.total_irls_iterations += m.total_irls_iterations;
    report.final_alpha = alpha;

    if (m.reason == TerminationReason::kSingularSystem) {
      report.reason = TerminationReason::kSingularSystem;
      stop = true;
    } else if (alpha == alpha_prev && m.converged) {
      report.reason = TerminationReason::kAlphaFixedPoint;
      report.converged = true;
      stop = true;
    }
    alpha_prev = alpha;
  }

  report.final_parameters = theta;
  report.final_robust_cost = report.iterations.back().robust_cost;
  report.final_truncated_cost = report.iterations.back().truncated_cost;
  report.final_invalid_blocks = report.iterations.back().invalid_blocks;
  report.wall_time_seconds = seconds_since(t0);
  return report;
}

SolveReport solve_with_policy(const Problem& problem, const Eigen::VectorXd& theta0,
                              const PolicySpec& policy, const SolverConfig& config,
                              const PartitionTable* table) {
  if (policy.kind == PolicyKind::kAdaptive) {
    if (table == nullptr) {
      throw std::invalid_argument("adaptive policy requires a partition table");
    }
    return em_solve(problem, theta0, config, *table);
  }
  return irls_solve(problem, theta0, to_kernel_spec(policy, config.c), config);
}

std::string to_json(const SolveReport& report, const std::string& policy_name,
                    bool include_timing) {
  JsonWriter w;
  w.begin_object();
  w.field("policy", policy_name);
  w.field("converged", report.converged);
  w.field("termination_reason", to_string(report.reason));
  w.field("final_alpha", report.final_alpha);
  w.field("final_robust_cost", report.final_robust_cost);
  w.field("final_truncated_cost", report.final_truncated_cost);
  w.field("final_invalid_blocks", report.final_invalid_blocks);
  w.field("total_irls_iterations", report.total_irls_iterations);
  w.field("estep_degenerate", report.estep_degenerate);
  w.begin_array("final_parameters");
  for (Eigen::Index i = 0; i < report.final_parameters.size(); ++i) {
    w.value(report.final_parameters[i]);
  }
  w.end_array();
  w.begin_array("iterations");
  for (const IterationRecord& rec : report.iterations) {
    w.begin_object();
    w.field("iteration", rec.iteration);
    w.field("alpha", rec.alpha);
    w.field("robust_cost", rec.robust_cost);
    w.field("truncated_cost", rec.truncated_cost);
    w.field("weighted_squared_cost", rec.weighted_squared_cost);
    w.field("irls_iterations", rec.irls_iterations);
    w.field("max_step", rec.max_step);
    w.field("invalid_blocks", rec.invalid_blocks);
    w.end_object();
  }
  w.end_array();
  if (include_timing) {
    w.field("wall_time_seconds", report.wall_time_seconds);
  }
  w.end_object();
  return w.str() + "\n";
}

std::string trace_csv(const SolveReport& report) {
  std::string out = "iteration,alpha,robust_cost,max_step\n";
  for (const IterationRecord& rec : report.iterations) {
    out += std::to_string(rec.iteration) + "," + format_double(rec.alpha) + "," +
           format_double(rec.robust_cost) + "," + format_double(rec.max_step) + "\n";
  }
  return out;
}

}  // namespace arls
