#pragma once

#include <memory>

#include "arls/geometry.hpp"
#include "arls/point_cloud.hpp"
#include "arls/problem.hpp"

namespace arls {

enum class RegistrationVariant { kPointToPoint, kPointToPlane };

/// Index of the nearest target point for every source point, after mapping
/// the source through the transform. Brute force; fine for the scan sizes
/// this project works at.
std::vector<int> nearest_correspondences(const PointCloud& source, const PointCloud& target,
                                         const Pose3& transform);

/// Pose3 <-> solver parameter vector [qw qx qy qz tx ty tz].
Eigen::VectorXd pose_to_params(const Pose3& pose);
Pose3 params_to_pose(const Eigen::VectorXd& theta);

/// Rigid SE(3) alignment with fixed correspondences. One block per source
/// point: point-to-point residual T*p - q (3-vector) or point-to-plane
/// residual n . (T*p - q) (scalar, needs target normals). The tangent space
/// is the 6-dof twist [dt, dw] applied as a left perturbation exp(delta) * T.
/// The problem keeps references to both clouds; they must outlive it.
class RegistrationProblem : public Problem {
 public:
  RegistrationProblem(const PointCloud& source, const PointCloud& target,
                      std::vector<int> correspondences, RegistrationVariant variant);

  int ambient_size() const override { return 7; }
  int tangent_size() const override { return 6; }
  int block_count() const override { return static_cast<int>(correspondences_.size()); }
  int block_size(int) const override {
    return variant_ == RegistrationVariant::kPointToPlane ? 1 : 3;
  }
  const std::vector<int>& block_support(int) const override { return support_; }
  bool evaluate(int block, const Eigen::VectorXd& theta,
                Eigen::VectorXd& residual) const override;
  void jacobian(int block, const Eigen::VectorXd& theta, Eigen::MatrixXd& jac) const override;
  Eigen::VectorXd plus(const Eigen::VectorXd& theta,
                       const Eigen::VectorXd& delta) const override;

 private:
  const PointCloud& source_;
  const PointCloud& target_;
  std::vector<int> correspondences_;
  RegistrationVariant variant_;
  std::vector<int> support_;
};

std::unique_ptr<RegistrationProblem> registration_problem(const PointCloud& source,
                                                          const PointCloud& target,
                                                          std::vector<int> correspondences,
                                                          RegistrationVariant variant);

/// Planar point-to-point alignment with fixed correspondences:
/// theta = [tx, ty, phi], residual R(phi) * p_i + t - q_i.
class Registration2Problem : public Problem {
 public:
  Registration2Problem(std::vector<Eigen::Vector2d> source, std::vector<Eigen::Vector2d> target,
                       std::vector<int> correspondences);

  int ambient_size() const override { return 3; }
  int tangent_size() const override { return 3; }
  int block_count() const override { return static_cast<int>(correspondences_.size()); }
  int block_size(int) const override { return 2; }
  const std::vector<int>& block_support(int) const override { return support_; }
  bool evaluate(int block, const Eigen::VectorXd& theta,
                Eigen::VectorXd& residual) const override;
  void jacobian(int block, const Eigen::VectorXd& theta, Eigen::MatrixXd& jac) const override;
  Eigen::VectorXd plus(const Eigen::VectorXd& theta,
                       const Eigen::VectorXd& delta) const override;

 private:
  std::vector<Eigen::Vector2d> source_;
  std::vector<Eigen::Vector2d> target_;
  std::vector<int> correspondences_;
  std::vector<int> support_;
};

Eigen::VectorXd pose2_to_params(const Pose2& pose);
Pose2 params_to_pose2(const Eigen::VectorXd& theta);

std::unique_ptr<Registration2Problem> registration_problem_2d(
    std::vector<Eigen::Vector2d> source, std::vector<Eigen::Vector2d> target,
    std::vector<int> correspondences);

}  // namespace arls
