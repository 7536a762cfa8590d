#include "arls/geometry.hpp"

#include <cmath>

namespace arls {

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
      -v.y(), v.x(), 0.0;
  return m;
}

Eigen::Matrix2d Pose2::rotation() const {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Eigen::Matrix2d r;
  r << c, -s, s, c;
  return r;
}

Eigen::Vector2d Pose2::apply(const Eigen::Vector2d& p) const {
  return rotation() * p + translation;
}

Pose2 Pose2::compose(const Pose2& other) const {
  Pose2 out;
  out.angle = angle + other.angle;
  out.translation = rotation() * other.translation + translation;
  return out;
}

Pose2 Pose2::inverse() const {
  Pose2 out;
  out.angle = -angle;
  out.translation = -(out.rotation() * translation);
  return out;
}

Pose2 Pose2::exp(const Eigen::Vector3d& xi) {
  const double phi = xi.z();
  Pose2 out;
  out.angle = phi;
  // t = V(phi) * rho with the planar Jacobian V; series below 1e-8 rad.
  double a, b;  // V = [[a, -b], [b, a]]
  if (std::abs(phi) < 1e-8) {
    a = 1.0 - phi * phi / 6.0;
    b = 0.5 * phi - phi * phi * phi / 24.0;
  } else {
    a = std::sin(phi) / phi;
    b = (1.0 - std::cos(phi)) / phi;
  }
  out.translation.x() = a * xi.x() - b * xi.y();
  out.translation.y() = b * xi.x() + a * xi.y();
  return out;
}

Pose3 Pose3::compose(const Pose3& other) const {
  Pose3 out;
  out.q = (q * other.q).normalized();
  out.translation = q * other.translation + translation;
  return out;
}

Pose3 Pose3::inverse() const {
  Pose3 out;
  out.q = q.conjugate();
  out.translation = -(out.q * translation);
  return out;
}

Pose3 Pose3::exp(const Vector6d& xi) {
  const Eigen::Vector3d rho_part = xi.head<3>();
  const Eigen::Vector3d omega = xi.tail<3>();
  const double theta2 = omega.squaredNorm();
  const double theta = std::sqrt(theta2);

  // Rodrigues coefficients B = (1 - cos t)/t^2 and C = (t - sin t)/t^3 for the
  // translation Jacobian V = I + B [w]x + C [w]x^2; Taylor below 1e-8 rad.
  double b, c;
  if (theta < 1e-8) {
    b = 0.5 - theta2 / 24.0;
    c = 1.0 / 6.0 - theta2 / 120.0;
  } else {
    b = (1.0 - std::cos(theta)) / theta2;
    c = (theta - std::sin(theta)) / (theta2 * theta);
  }

  Pose3 out;
  if (theta < 1e-8) {
    out.q = Eigen::Quaterniond(1.0, 0.5 * omega.x(), 0.5 * omega.y(), 0.5 * omega.z())
                .normalized();
  } else {
    out.q = Eigen::Quaterniond(Eigen::AngleAxisd(theta, omega / theta));
  }
  const Eigen::Matrix3d w = skew(omega);
  const Eigen::Matrix3d v = Eigen::Matrix3d::Identity() + b * w + c * w * w;
  out.translation = v * rho_part;
  return out;
}

double rotation_angle(const Eigen::Quaterniond& q) {
  return 2.0 * std::atan2(q.vec().norm(), std::abs(q.w()));
}

std::pair<double, double> pose_error(const Pose3& a, const Pose3& b) {
  const Eigen::Quaterniond dq = a.q * b.q.conjugate();
  const double deg = rotation_angle(dq) * 180.0 / M_PI;
  const double trans = (a.translation - b.translation).norm();
  return {deg, trans};
}

}  // namespace arls
