#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <utility>

namespace arls {

using Vector6d = Eigen::Matrix<double, 6, 1>;

/// 3x3 cross-product matrix: skew(v) * w == v.cross(w).
Eigen::Matrix3d skew(const Eigen::Vector3d& v);

/// Rigid transform in the plane, stored as heading angle + translation.
struct Pose2 {
  double angle = 0.0;
  Eigen::Vector2d translation = Eigen::Vector2d::Zero();

  Eigen::Matrix2d rotation() const;
  Eigen::Vector2d apply(const Eigen::Vector2d& p) const;
  Pose2 compose(const Pose2& other) const;  // this * other
  Pose2 inverse() const;

  /// Exponential map from a tangent vector [dx, dy, dphi] (translation part
  /// first, matching the solver's perturbation layout).
  static Pose2 exp(const Eigen::Vector3d& xi);
};

/// Rigid transform in space, stored as unit quaternion + translation.
struct Pose3 {
  Eigen::Quaterniond q = Eigen::Quaterniond::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  Eigen::Matrix3d rotation() const { return q.toRotationMatrix(); }
  Eigen::Vector3d apply(const Eigen::Vector3d& p) const { return q * p + translation; }
  Pose3 compose(const Pose3& other) const;  // this * other
  Pose3 inverse() const;

  /// Exponential map from a twist [rho, omega] (translation block first,
  /// rotation block second). Uses closed-form Rodrigues terms with Taylor
  /// fallbacks below 1e-8 rad.
  static Pose3 exp(const Vector6d& xi);
};

/// (rotation error in degrees, translation error in meters) between two
/// transforms: geodesic angle of q_a * q_b^-1 and |t_a - t_b|.
std::pair<double, double> pose_error(const Pose3& a, const Pose3& b);

/// Geodesic angle of a rotation in radians, from its quaternion.
double rotation_angle(const Eigen::Quaterniond& q);

}  // namespace arls
