#include "arls/validation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace arls {

namespace {

struct WorstEntry {
  double error = 0.0;
  int block = -1;
  int row = -1;
  int tangent = -1;
  double analytic = 0.0;
  double numeric = 0.0;
};

WorstEntry scan(const Problem& problem, const Eigen::VectorXd& theta, double step) {
  if (theta.size() != problem.ambient_size()) {
    throw std::invalid_argument("jacobian check: theta size does not match the problem");
  }
  const int nt = problem.tangent_size();
  WorstEntry worst;
  Eigen::VectorXd delta = Eigen::VectorXd::Zero(nt);
  Eigen::VectorXd r_plus, r_minus, r_base;
  Eigen::MatrixXd jac;

  for (int b = 0; b < problem.block_count(); ++b) {
    if (!problem.evaluate(b, theta, r_base)) continue;
    const std::vector<int>& support = problem.block_support(b);
    problem.jacobian(b, theta, jac);
    if (jac.rows() != r_base.size() ||
        jac.cols() != static_cast<Eigen::Index>(support.size())) {
      throw std::runtime_error("jacobian check: block " + std::to_string(b) +
                               " returned a " + std::to_string(jac.rows()) + "x" +
                               std::to_string(jac.cols()) + " jacobian, expected " +
                               std::to_string(r_base.size()) + "x" +
                               std::to_string(support.size()));
    }

    for (int k = 0; k < nt; ++k) {
      delta[k] = step;
      const bool ok_plus = problem.evaluate(b, problem.plus(theta, delta), r_plus);
      delta[k] = -step;
      const bool ok_minus = problem.evaluate(b, problem.plus(theta, delta), r_minus);
      delta[k] = 0.0;
      if (!ok_plus || !ok_minus) continue;  // block invalid under perturbation

      const auto it = std::find(support.begin(), support.end(), k);
      for (Eigen::Index row = 0; row < r_base.size(); ++row) {
        const double numeric = (r_plus[row] - r_minus[row]) / (2.0 * step);
        const double analytic =
            it == support.end() ? 0.0
                                : jac(row, static_cast<Eigen::Index>(it - support.begin()));
        const double scale = std::max({1.0, std::abs(numeric), std::abs(analytic)});
        const double error = std::abs(numeric - analytic) / scale;
        if (error > worst.error) {
          worst = {error, b, static_cast<int>(row), k, analytic, numeric};
        }
      }
    }
  }
  return worst;
}

}  // namespace

double max_jacobian_error(const Problem& problem, const Eigen::VectorXd& theta, double step) {
  return scan(problem, theta, step).error;
}

bool check_jacobians(const Problem& problem, const Eigen::VectorXd& theta, double tolerance,
                     std::ostream* log) {
  const WorstEntry worst = scan(problem, theta, 1e-6);
  if (worst.error <= tolerance) return true;
  if (log != nullptr) {
    *log << "jacobian mismatch: block " << worst.block << " row " << worst.row
         << " tangent " << worst.tangent << " analytic " << worst.analytic << " numeric "
         << worst.numeric << " (error " << worst.error << ", tolerance " << tolerance
         << ")\n";
  }
  return false;
}

}  // namespace arls
