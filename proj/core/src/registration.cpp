#include "arls/registration.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace arls {

std::vector<int> nearest_correspondences(const PointCloud& source, const PointCloud& target,
                                         const Pose3& transform) {
  if (target.size() == 0) {
    throw std::invalid_argument("nearest_correspondences: target cloud is empty");
  }
  std::vector<int> out(source.size());
  for (std::size_t i = 0; i < source.size(); ++i) {
    const Eigen::Vector3d p = transform.apply(source.points[i]);
    double best = std::numeric_limits<double>::infinity();
    int best_j = 0;
    for (std::size_t j = 0; j < target.size(); ++j) {
      const double d = (target.points[j] - p).squaredNorm();
      if (d < best) {
        best = d;
        best_j = static_cast<int>(j);
      }
    }
    out[i] = best_j;
  }
  return out;
}

Eigen::VectorXd pose_to_params(const Pose3& pose) {
  Eigen::VectorXd theta(7);
  theta << pose.q.w(), pose.q.x(), pose.q.y(), pose.q.z(), pose.translation.x(),
      pose.translation.y(), pose.translation.z();
  return theta;
}

Pose3 params_to_pose(const Eigen::VectorXd& theta) {
  if (theta.size() != 7) {
    throw std::invalid_argument("pose parameters must have 7 entries [qw qx qy qz tx ty tz]");
  }
  Pose3 pose;
  pose.q = Eigen::Quaterniond(theta[0], theta[1], theta[2], theta[3]).normalized();
  pose.translation = theta.segment<3>(4);
  return pose;
}

namespace {

void check_correspondences(const std::vector<int>& correspondences, std::size_t source_size,
                           std::size_t target_size) {
  if (correspondences.size() != source_size) {
    throw std::invalid_argument("registration: " + std::to_string(correspondences.size()) +
                                " correspondences for " + std::to_string(source_size) +
                                " source points");
  }
  for (std::size_t i = 0; i < correspondences.size(); ++i) {
    if (correspondences[i] < 0 ||
        static_cast<std::size_t>(correspondences[i]) >= target_size) {
      throw std::invalid_argument("registration: correspondence " + std::to_string(i) +
                                  " points at target index " +
                                  std::to_string(correspondences[i]) + ", target has " +
                                  std::to_string(target_size) + " points");
    }
  }
}

}  // namespace

RegistrationProblem::RegistrationProblem(const PointCloud& source, const PointCloud& target,
                                         std::vector<int> correspondences,
                                         RegistrationVariant variant)
    : source_(source),
      target_(target),
      correspondences_(std::move(correspondences)),
      variant_(variant),
      support_{0, 1, 2, 3, 4, 5} {
  source_.validate();
  target_.validate();
  check_correspondences(correspondences_, source_.size(), target_.size());
  if (variant_ == RegistrationVariant::kPointToPlane && !target_.has_normals()) {
    throw std::invalid_argument("point-to-plane registration needs target normals");
  }
}

bool RegistrationProblem::evaluate(int block, const Eigen::VectorXd& theta,
                                   Eigen::VectorXd& residual) const {
  const Pose3 pose = params_to_pose(theta);
  const std::size_t i = static_cast<std::size_t>(block);
  const std::size_t j = static_cast<std::size_t>(correspondences_[i]);
  const Eigen::Vector3d diff = pose.apply(source_.points[i]) - target_.points[j];
  if (variant_ == RegistrationVariant::kPointToPlane) {
    residual.resize(1);
    residual[0] = target_.normals[j].dot(diff);
  } else {
    residual = diff;
  }
  return true;
}

void RegistrationProblem::jacobian(int block, const Eigen::VectorXd& theta,
                                   Eigen::MatrixXd& jac) const {
  const Pose3 pose = params_to_pose(theta);
  const std::size_t i = static_cast<std::size_t>(block);
  const std::size_t j = static_cast<std::size_t>(correspondences_[i]);
  const Eigen::Vector3d tp = pose.apply(source_.points[i]);
  // Left perturbation exp([dt, dw]) * T: d(Tp)/dt = I, d(Tp)/dw = -[Tp]x.
  if (variant_ == RegistrationVariant::kPointToPlane) {
    const Eigen::Vector3d& n = target_.normals[j];
    jac.resize(1, 6);
    jac.block<1, 3>(0, 0) = n.transpose();
    jac.block<1, 3>(0, 3) = tp.cross(n).transpose();
  } else {
    jac.resize(3, 6);
    jac.block<3, 3>(0, 0) = Eigen::Matrix3d::Identity();
    jac.block<3, 3>(0, 3) = -skew(tp);
  }
}

Eigen::VectorXd RegistrationProblem::plus(const Eigen::VectorXd& theta,
                                          const Eigen::VectorXd& delta) const {
  const Pose3 updated = Pose3::exp(delta).compose(params_to_pose(theta));
  return pose_to_params(updated);
}

std::unique_ptr<RegistrationProblem> registration_problem(const PointCloud& source,
                                                          const PointCloud& target,
                                                          std::vector<int> correspondences,
                                                          RegistrationVariant variant) {
  return std::make_unique<RegistrationProblem>(source, target, std::move(correspondences),
                                               variant);
}

Registration2Problem::Registration2Problem(std::vector<Eigen::Vector2d> source,
                                           std::vector<Eigen::Vector2d> target,
                                           std::vector<int> correspondences)
    : source_(std::move(source)),
      target_(std::move(target)),
      correspondences_(std::move(correspondences)),
      support_{0, 1, 2} {
  check_correspondences(correspondences_, source_.size(), target_.size());
}

bool Registration2Problem::evaluate(int block, const Eigen::VectorXd& theta,
                                    Eigen::VectorXd& residual) const {
  const Pose2 pose = params_to_pose2(theta);
  const std::size_t i = static_cast<std::size_t>(block);
  const std::size_t j = static_cast<std::size_t>(correspondences_[i]);
  residual = pose.apply(source_[i]) - target_[j];
  return true;
}

void Registration2Problem::jacobian(int block, const Eigen::VectorXd& theta,
                                    Eigen::MatrixXd& jac) const {
  const Pose2 pose = params_to_pose2(theta);
  const std::size_t i = static_cast<std::size_t>(block);
  const Eigen::Vector2d tp = pose.apply(source_[i]);
  // Left perturbation: the rotation column is the 90-degree rotation of Tp.
  jac.resize(2, 3);
  jac << 1.0, 0.0, -tp.y(),
         0.0, 1.0, tp.x();
}

Eigen::VectorXd Registration2Problem::plus(const Eigen::VectorXd& theta,
                                           const Eigen::VectorXd& delta) const {
  const Pose2 updated = Pose2::exp(delta).compose(params_to_pose2(theta));
  return pose2_to_params(updated);
}

Eigen::VectorXd pose2_to_params(const Pose2& pose) {
  Eigen::VectorXd theta(3);
  theta << pose.translation.x(), pose.translation.y(), pose.angle;
  return theta;
}

Pose2 params_to_pose2(const Eigen::VectorXd& theta) {
  if (theta.size() != 3) {
    throw std::invalid_argument("planar pose parameters must have 3 entries [tx ty phi]");
  }
  Pose2 pose;
  pose.translation = theta.head<2>();
  pose.angle = theta[2];
  return pose;
}

std::unique_ptr<Registration2Problem> registration_problem_2d(
    std::vector<Eigen::Vector2d> source, std::vector<Eigen::Vector2d> target,
    std::vector<int> correspondences) {
  return std::make_unique<Registration2Problem>(std::move(source), std::move(target),
                                                std::move(correspondences));
}

}  // namespace arls
