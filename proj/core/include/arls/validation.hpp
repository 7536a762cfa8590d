#pragma once

#include <ostream>

#include "arls/problem.hpp"

namespace arls {

/// Largest mixed absolute/relative deviation between the analytic Jacobian
/// and central finite differences of evaluate(), taken over every valid block
/// and every tangent direction at theta:
///   |fd - analytic| / max(1, |fd|, |analytic|).
/// Directions outside a block's support are checked against zero, which
/// catches support lists that are too narrow. Invalid blocks are skipped.
double max_jacobian_error(const Problem& problem, const Eigen::VectorXd& theta,
                          double step = 1e-6);

/// Convenience wrapper: true when max_jacobian_error <= tolerance; on failure
/// writes the worst block/column to log (when given).
bool check_jacobians(const Problem& problem, const Eigen::VectorXd& theta,
                     double tolerance = 1e-5, std::ostream* log = nullptr);

}  // namespace arls
