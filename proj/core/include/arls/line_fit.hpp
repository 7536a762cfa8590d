#pragma once

#include <memory>

#include "arls/problem.hpp"

namespace arls {

/// Scalar-residual line fit: theta = [m, b], one block per point with
/// residual r_i = (m * x_i + b) - y_i.
class LineFitProblem : public Problem {
 public:
  /// points: (x_i, y_i) pairs; at least two are required.
  explicit LineFitProblem(std::vector<Eigen::Vector2d> points);

  int ambient_size() const override { return 2; }
  int tangent_size() const override { return 2; }
  int block_count() const override { return static_cast<int>(points_.size()); }
  int block_size(int) const override { return 1; }
  const std::vector<int>& block_support(int) const override { return support_; }
  bool evaluate(int block, const Eigen::VectorXd& theta,
                Eigen::VectorXd& residual) const override;
  void jacobian(int block, const Eigen::VectorXd& theta, Eigen::MatrixXd& jac) const override;
  Eigen::VectorXd plus(const Eigen::VectorXd& theta,
                       const Eigen::VectorXd& delta) const override;

  /// Ordinary least-squares estimate of [m, b]; the usual starting point.
  Eigen::Vector2d least_squares_fit() const;

 private:
  std::vector<Eigen::Vector2d> points_;
  std::vector<int> support_;
};

std::unique_ptr<LineFitProblem> line_fit_problem(std::vector<Eigen::Vector2d> points);

}  // namespace arls
