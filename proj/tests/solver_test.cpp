#include "arls/solver.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "arls/kernel.hpp"
#include "arls/line_fit.hpp"
#include "arls/partition.hpp"
#include "arls/synthetic.hpp"

namespace arls {
namespace {

// Scalar location problem: residual_i = theta - z_i. The simplest nontrivial
// robust estimation problem; its cost landscape can be scanned densely.
class MeanProblem : public Problem {
 public:
  explicit MeanProblem(std::vector<double> samples) : samples_(std::move(samples)) {}

  int ambient_size() const override { return 1; }
  int tangent_size() const override { return 1; }
  int block_count() const override { return static_cast<int>(samples_.size()); }
  int block_size(int) const override { return 1; }
  const std::vector<int>& block_support(int) const override { return support_; }

  bool evaluate(int block, const Eigen::VectorXd& theta,
                Eigen::VectorXd& residual) const override {
    residual.resize(1);
    residual[0] = theta[0] - samples_[static_cast<std::size_t>(block)];
    return true;
  }

  void jacobian(int, const Eigen::VectorXd&, Eigen::MatrixXd& jac) const override {
    jac.resize(1, 1);
    jac(0, 0) = 1.0;
  }

  Eigen::VectorXd plus(const Eigen::VectorXd& theta,
                       const Eigen::VectorXd& delta) const override {
    return theta + delta;
  }

 private:
  std::vector<double> samples_;
  std::vector<int> support_{0};
};

// A problem whose Jacobian poisons the normal equations; the solver must
// fail over to the singular-system exit instead of propagating NaNs.
class NanJacobianProblem : public MeanProblem {
 public:
  NanJacobianProblem() : MeanProblem({0.0, 1.0}) {}
  void jacobian(int, const Eigen::VectorXd&, Eigen::MatrixXd& jac) const override {
    jac.resize(1, 1);
    jac(0, 0) = std::numeric_limits<double>::quiet_NaN();
  }
};

const PartitionTable& default_table() {
  static const PartitionTable table = build_table();
  return table;
}

LineFitProblem contaminated_line(int seed) {
  OutlierSpec spec;
  spec.fraction = 0.3;
  spec.model = OutlierModel::kUniformReplacement;
  spec.range_min = -50.0;
  spec.range_max = 50.0;
  const LineDataset data = make_line_dataset(200, 0.0, 10.0, 1.0, 0.0, 0.1, spec, seed);
  std::vector<Eigen::Vector2d> points;
  for (std::size_t i = 0; i < data.xs.size(); ++i) {
    points.emplace_back(data.xs[i], data.ys[i]);
  }
  return LineFitProblem(std::move(points));
}

TEST(Solver, CauchyMeanMatchesDenseGridScan) {
  const std::vector<double> samples{0.0, 0.0, 0.0, 0.0, 100.0};
  MeanProblem problem(samples);
  SolverConfig config;
  config.c = 1.0;
  Eigen::VectorXd theta0(1);
  theta0 << 10.0;
  const SolveReport report =
      solve_with_policy(problem, theta0, parse_policy("cauchy"), config, nullptr);

  const KernelSpec kernel = to_kernel_spec(parse_policy("cauchy"), config.c);
  double best_theta = 0.0;
  double best_cost = std::numeric_limits<double>::infinity();
  Eigen::VectorXd probe(1);
  for (double t = -1.0; t <= 101.0; t += 1e-4) {
    probe[0] = t;
    const double cost = robust_cost(problem, probe, kernel);
    if (cost < best_cost) {
      best_cost = cost;
      best_theta = t;
    }
  }
  EXPECT_NEAR(report.final_parameters[0], best_theta, 0.05);
  EXPECT_LE(report.final_robust_cost, best_cost + 1e-9);
}

TEST(Solver, SquaredPolicyRecoversTheMean) {
  const std::vector<double> samples{1.0, 2.0, 3.0, 4.0, 91.0};
  const double mean = (1.0 + 2.0 + 3.0 + 4.0 + 91.0) / 5.0;
  MeanProblem problem(samples);
  SolverConfig config;
  Eigen::VectorXd theta0(1);
  theta0 << 0.0;
  const SolveReport report =
      solve_with_policy(problem, theta0, parse_policy("squared"), config, nullptr);
  EXPECT_TRUE(report.converged);
  EXPECT_NEAR(report.final_parameters[0], mean, 1e-8);
}

TEST(Solver, ZeroResidualStartStopsImmediately) {
  MeanProblem problem({5.0, 5.0, 5.0});
  SolverConfig config;
  Eigen::VectorXd theta0(1);
  theta0 << 5.0;
  const SolveReport report =
      irls_solve(problem, theta0, KernelSpec::squared(1.0), config);
  EXPECT_TRUE(report.converged);
  EXPECT_EQ(report.final_robust_cost, 0.0);
  EXPECT_LE(report.iterations.size(), 2u);
}

TEST(Solver, FixedKernelCostIsMonotone) {
  LineFitProblem problem = contaminated_line(0);
  SolverConfig config;
  config.c = 0.1;
  Eigen::VectorXd theta0(2);
  theta0 << 0.0, 0.0;
  const SolveReport report =
      irls_solve(problem, theta0, KernelSpec::named_kernel(NamedKernel::kCauchy, 0.1),
                 config);
  ASSERT_GE(report.iterations.size(), 2u);
  for (std::size_t i = 1; i < report.iterations.size(); ++i) {
    EXPECT_LE(report.iterations[i].robust_cost,
              report.iterations[i - 1].robust_cost * (1.0 + 1e-12) + 1e-12)
        << "round " << i;
  }
}

TEST(Solver, AdaptiveTruncatedCostIsMonotone) {
  for (int seed : {0, 1, 2}) {
    LineFitProblem problem = contaminated_line(seed);
    SolverConfig config;
    config.c = 0.1;
    Eigen::VectorXd theta0(2);
    theta0 << 1.0, 0.0;
    const SolveReport report =
        em_solve(problem, theta0, config, default_table());
    ASSERT_GE(report.iterations.size(), 1u);
    double previous = std::numeric_limits<double>::infinity();
    for (const IterationRecord& rec : report.iterations) {
      ASSERT_TRUE(std::isfinite(rec.truncated_cost));
      EXPECT_LE(rec.truncated_cost, previous + 1e-9 * std::abs(previous))
          << "seed " << seed << " round " << rec.iteration;
      previous = rec.truncated_cost;
    }
    EXPECT_EQ(report.final_truncated_cost, report.iterations.back().truncated_cost);
  }
}

TEST(Solver, AdaptiveWithSingleSquaredGridPointMatchesSquaredSolve) {
  // A one-point shape grid pinned at 2 turns the adaptive policy into plain
  // squared IRLS; both paths must produce identical iterates bit for bit.
  LineFitProblem problem = contaminated_line(3);
  const PartitionTable pinned = build_table(2.0, 2.0, 0.1, 10.0, 1 << 14);
  SolverConfig config;
  config.c = 0.1;
  config.alpha_min = 2.0;
  config.alpha_max = 2.0;
  Eigen::VectorXd theta0(2);
  theta0 << 0.5, 0.2;
  const SolveReport adaptive =
      solve_with_policy(problem, theta0, parse_policy("adaptive"), config, &pinned);
  const SolveReport squared =
      solve_with_policy(problem, theta0, parse_policy("squared"), config, nullptr);
  ASSERT_EQ(adaptive.final_parameters.size(), squared.final_parameters.size());
  for (Eigen::Index i = 0; i < adaptive.final_parameters.size(); ++i) {
    EXPECT_EQ(adaptive.final_parameters[i], squared.final_parameters[i]);
  }
  EXPECT_EQ(adaptive.final_robust_cost, squared.final_robust_cost);
  EXPECT_DOUBLE_EQ(adaptive.final_alpha, 2.0);
}

TEST(Solver, NanSystemExitsAsSingular) {
  NanJacobianProblem problem;
  SolverConfig config;
  Eigen::VectorXd theta0(1);
  theta0 << 3.0;
  const SolveReport report =
      irls_solve(problem, theta0, KernelSpec::squared(1.0), config);
  EXPECT_FALSE(report.converged);
  EXPECT_EQ(report.reason, TerminationReason::kSingularSystem);
}

TEST(Solver, EmIterationCapIsHonored) {
  LineFitProblem problem = contaminated_line(4);
  SolverConfig config;
  config.c = 0.1;
  config.max_em_iterations = 1;
  Eigen::VectorXd theta0(2);
  theta0 << 0.0, 0.0;
  const SolveReport report = em_solve(problem, theta0, config, default_table());
  EXPECT_EQ(report.iterations.size(), 1u);
  EXPECT_EQ(report.reason, TerminationReason::kMaxIterations);
  EXPECT_FALSE(report.converged);
}

TEST(Solver, TraceCsvShape) {
  MeanProblem problem({0.0, 1.0, 2.0});
  SolverConfig config;
  Eigen::VectorXd theta0(1);
  theta0 << 0.0;
  const SolveReport report =
      solve_with_policy(problem, theta0, parse_policy("squared"), config, nullptr);
  const std::string csv = trace_csv(report);
  ASSERT_EQ(csv.rfind("iteration,alpha,robust_cost,max_step\n", 0), 0u);
  const std::size_t rows = static_cast<std::size_t>(
      std::count(csv.begin(), csv.end(), '\n'));
  EXPECT_EQ(rows, report.iterations.size() + 1);
}

TEST(Solver, PolicyParsingRoundTrip) {
  EXPECT_EQ(parse_policy("adaptive").kind, PolicyKind::kAdaptive);
  EXPECT_EQ(parse_policy("squared").kind, PolicyKind::kSquared);
  const PolicySpec fixed = parse_policy("fixed:-3.5");
  EXPECT_EQ(fixed.kind, PolicyKind::kFixed);
  EXPECT_DOUBLE_EQ(fixed.fixed_alpha, -3.5);
  const PolicySpec huber = parse_policy("huber");
  EXPECT_EQ(huber.kind, PolicyKind::kNamed);
  EXPECT_EQ(huber.named, NamedKernel::kPseudoHuber);
  EXPECT_EQ(huber.name(), "pseudo_huber");
  EXPECT_EQ(parse_policy("geman_mcclure").named, NamedKernel::kGemanMcClure);
  EXPECT_THROW(parse_policy("bogus"), std::exception);
  EXPECT_THROW(parse_policy("fixed:abc"), std::exception);
}

TEST(Solver, ConfigValidation) {
  SolverConfig config;
  EXPECT_NO_THROW(config.validate());
  config.c = 0.0;
  EXPECT_THROW(config.validate(), std::exception);
  config = SolverConfig{};
  config.alpha_min = 3.0;  // above alpha_max
  EXPECT_THROW(config.validate(), std::exception);
  config = SolverConfig{};
  config.alpha_resolution = -0.1;
  EXPECT_THROW(config.validate(), std::exception);
  config = SolverConfig{};
  config.max_em_iterations = 0;
  EXPECT_THROW(config.validate(), std::exception);
}

TEST(Solver, AdaptiveRequiresTable) {
  MeanProblem problem({0.0, 1.0});
  SolverConfig config;
  Eigen::VectorXd theta0(1);
  theta0 << 0.0;
  EXPECT_THROW(
      solve_with_policy(problem, theta0, parse_policy("adaptive"), config, nullptr),
      std::exception);
}

}  // namespace
}  // namespace arls
