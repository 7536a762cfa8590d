#pragma once

#include <Eigen/Core>
#include <vector>

namespace arls {

/// A block-structured nonlinear least-squares problem.
///
/// Parameters live in an ambient vector (e.g. 7 doubles for a quaternion
/// pose) while optimization steps live in a tangent space of possibly lower
/// dimension; plus() retracts a tangent step onto the ambient representation.
/// Residuals come in blocks (one per measurement) that the robust loss treats
/// as units: the kernel is applied to each block's Euclidean norm.
class Problem {
 public:
  virtual ~Problem() = default;

  virtual int ambient_size() const = 0;
  virtual int tangent_size() const = 0;

  virtual int block_count() const = 0;
  virtual int block_size(int block) const = 0;

  /// Tangent indices whose Jacobian columns can be nonzero for this block.
  /// The solver only accumulates these entries into the normal equations.
  virtual const std::vector<int>& block_support(int block) const = 0;

  /// Evaluates one residual block at theta. Returning false marks the block
  /// invalid at this state (e.g. a point behind the camera); invalid blocks
  /// get zero weight and are counted in the solve diagnostics.
  virtual bool evaluate(int block, const Eigen::VectorXd& theta,
                        Eigen::VectorXd& residual) const = 0;

  /// Jacobian of the block residual with respect to the tangent perturbation
  /// at delta = 0, restricted to the block's support columns:
  /// jac is block_size(block) x block_support(block).size().
  /// Only called for states where evaluate() returned true.
  virtual void jacobian(int block, const Eigen::VectorXd& theta,
                        Eigen::MatrixXd& jac) const = 0;

  /// Retraction: applies a tangent-space step to the ambient parameters
  /// (plain addition for Euclidean parameters, exponential-map composition
  /// for poses).
  virtual Eigen::VectorXd plus(const Eigen::VectorXd& theta,
                               const Eigen::VectorXd& delta) const = 0;
};

}  // namespace arls
