#pragma once

#include <memory>
#include <string>

#include "arls/geometry.hpp"
#include "arls/problem.hpp"

namespace arls {

struct CameraIntrinsics {
  double fx = 500.0;
  double fy = 500.0;
  double cx = 320.0;
  double cy = 240.0;
};

struct BAObservation {
  int camera = 0;
  int landmark = 0;
  Eigen::Vector2d pixel = Eigen::Vector2d::Zero();
};

/// A bundle-adjustment scene: pinhole cameras with world-to-camera poses,
/// 3-D landmarks, and pixel observations.
///
/// Text format (docs/file-formats.md): CAMERAS/POSES/LANDMARKS/OBSERVATIONS
/// sections, each header carrying a count, followed by that many data lines.
struct BAScene {
  std::vector<CameraIntrinsics> intrinsics;  // one per camera
  std::vector<Pose3> poses;                  // world-to-camera
  std::vector<Eigen::Vector3d> landmarks;
  std::vector<BAObservation> observations;

  int camera_count() const { return static_cast<int>(poses.size()); }
  int landmark_count() const { return static_cast<int>(landmarks.size()); }

  /// Optical center in world coordinates: -R^T t.
  Eigen::Vector3d camera_center(int camera) const;

  /// Throws std::runtime_error on count mismatches, out-of-range observation
  /// indices, non-finite values, or non-unit quaternions.
  void validate() const;

  static BAScene load(const std::string& path);
  void save(const std::string& path) const;
};

/// Projects a world point through a world-to-camera pose. Returns false when
/// the point is not safely in front of the camera (depth <= 1e-6).
bool project(const CameraIntrinsics& intrinsics, const Pose3& pose, const Eigen::Vector3d& point,
             Eigen::Vector2d* pixel);

/// Reprojection problem over all observations. One block per observation with
/// residual predicted_pixel - observed_pixel (2-vector).
///
/// Parameters: poses as [qw qx qy qz tx ty tz] per camera, then landmarks.
/// Camera perturbations split rotation and translation: R' = exp(dw) R,
/// t' = t + dt, so freezing a translation coordinate pins it exactly.
/// Gauge handling: camera 0 is fully fixed and one translation component of
/// camera 1 is fixed — by default the largest-magnitude component of its
/// translation in the scene the problem was built from, overridable so
/// perturbed copies of a scene keep the gauge of the original.
class BAProblem : public Problem {
 public:
  explicit BAProblem(BAScene scene, int gauge_component = -1);

  int ambient_size() const override;
  int tangent_size() const override { return tangent_size_; }
  int block_count() const override { return static_cast<int>(scene_.observations.size()); }
  int block_size(int) const override { return 2; }
  const std::vector<int>& block_support(int block) const override;
  bool evaluate(int block, const Eigen::VectorXd& theta,
                Eigen::VectorXd& residual) const override;
  void jacobian(int block, const Eigen::VectorXd& theta, Eigen::MatrixXd& jac) const override;
  Eigen::VectorXd plus(const Eigen::VectorXd& theta,
                       const Eigen::VectorXd& delta) const override;

  /// Parameter vector for the scene the problem was built from.
  Eigen::VectorXd initial_parameters() const;
  /// Scene with poses/landmarks replaced by the given parameters.
  BAScene scene_at(const Eigen::VectorXd& theta) const;
  const BAScene& scene() const { return scene_; }
  int gauge_component() const { return gauge_component_; }

 private:
  Pose3 pose_at(const Eigen::VectorXd& theta, int camera) const;

  BAScene scene_;
  int gauge_component_ = 0;
  /// First tangent index of each camera's block (-1 for the fixed camera 0).
  std::vector<int> camera_offset_;
  int landmark_offset_ = 0;
  int tangent_size_ = 0;
  std::vector<std::vector<int>> supports_;
};

std::unique_ptr<BAProblem> ba_problem(BAScene scene, int gauge_component = -1);

/// Root-mean-square distance between corresponding camera centers.
double camera_center_rms(const BAScene& estimate, const BAScene& truth);

/// Midpoint of the closest approach between the two pixel rays; the standard
/// cheap triangulation for (re)initializing landmarks.
Eigen::Vector3d midpoint_triangulate(const CameraIntrinsics& intrinsics_a, const Pose3& pose_a,
                                     const Eigen::Vector2d& pixel_a,
                                     const CameraIntrinsics& intrinsics_b, const Pose3& pose_b,
                                     const Eigen::Vector2d& pixel_b);

}  // namespace arls
