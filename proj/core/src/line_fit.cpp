#include "arls/line_fit.hpp"

#include <stdexcept>

namespace arls {

LineFitProblem::LineFitProblem(std::vector<Eigen::Vector2d> points)
    : points_(std::move(points)), support_{0, 1} {
  if (points_.size() < 2) {
    throw std::invalid_argument("line fit needs at least two points, got " +
                                std::to_string(points_.size()));
  }
}

bool LineFitProblem::evaluate(int block, const Eigen::VectorXd& theta,
                              Eigen::VectorXd& residual) const {
  const Eigen::Vector2d& p = points_[static_cast<std::size_t>(block)];
  residual.resize(1);
  residual[0] = theta[0] * p.x() + theta[1] - p.y();
  return true;
}

void LineFitProblem::jacobian(int block, const Eigen::VectorXd&, Eigen::MatrixXd& jac) const {
  const Eigen::Vector2d& p = points_[static_cast<std::size_t>(block)];
  jac.resize(1, 2);
  jac(0, 0) = p.x();
  jac(0, 1) = 1.0;
}

Eigen::VectorXd LineFitProblem::plus(const Eigen::VectorXd& theta,
                                     const Eigen::VectorXd& delta) const {
  return theta + delta;
}

Eigen::Vector2d LineFitProblem::least_squares_fit() const {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(points_.size());
  for (const Eigen::Vector2d& p : points_) {
    sx += p.x();
    sy += p.y();
    sxx += p.x() * p.x();
    sxy += p.x() * p.y();
  }
  const double det = n * sxx - sx * sx;
  if (det == 0.0) {
    throw std::runtime_error("line fit: degenerate x values (vertical line)");
  }
  const double m = (n * sxy - sx * sy) / det;
  const double b = (sy - m * sx) / n;
  return {m, b};
}

std::unique_ptr<LineFitProblem> line_fit_problem(std::vector<Eigen::Vector2d> points) {
  return std::make_unique<LineFitProblem>(std::move(points));
}

}  // namespace arls
