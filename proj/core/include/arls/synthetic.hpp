#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "arls/bundle_adjustment.hpp"
#include "arls/geometry.hpp"
#include "arls/point_cloud.hpp"

namespace arls {

/// How synthetic datasets are contaminated.
enum class OutlierModel {
  /// Replace the value with a uniform draw (scalar data and point clouds).
  kUniformReplacement,
  /// Rewire an observation to a different random landmark; the pixel keeps
  /// measuring the original one (projection data).
  kCorrespondenceShuffle,
  /// Displace spatial clusters of points by a fixed distance in a random
  /// direction (point clouds).
  kClusteredOffset,
};

const char* to_string(OutlierModel model);
/// Accepts "uniform_replacement", "correspondence_shuffle", "clustered_offset".
OutlierModel parse_outlier_model(const std::string& text);

struct OutlierSpec {
  /// Fraction of items contaminated (count rounds to nearest).
  double fraction = 0.0;
  OutlierModel model = OutlierModel::kUniformReplacement;

  // kUniformReplacement: replacement range (per coordinate for points).
  double range_min = -1.0;
  double range_max = 1.0;

  // kClusteredOffset: displacement distance and points per cluster
  // (cluster_size <= 1 displaces points independently).
  double offset_magnitude = 1.0;
  int cluster_size = 0;

  void validate() const;  // throws std::invalid_argument
};

/// Replaces a round(fraction * size) subset of values with uniform draws in
/// [range_min, range_max]. Only kUniformReplacement applies to scalars.
/// Returns the affected indices, ascending.
std::vector<int> inject_outliers(std::vector<double>& values, const OutlierSpec& spec,
                                 std::uint64_t seed);

/// Rewires a round(fraction * size) subset of observations to a different
/// uniformly chosen landmark index in [0, landmark_count). Only
/// kCorrespondenceShuffle applies to observations. Returns the affected
/// indices, ascending.
std::vector<int> inject_outliers(std::vector<BAObservation>& observations,
                                 int landmark_count, const OutlierSpec& spec,
                                 std::uint64_t seed);

/// Contaminates a round(fraction * size) subset of points, either replacing
/// them uniformly or displacing nearest-neighbor clusters by offset_magnitude
/// along a per-cluster random unit direction. Normals are left untouched.
/// Returns the affected indices, ascending.
std::vector<int> inject_outliers(PointCloud& cloud, const OutlierSpec& spec,
                                 std::uint64_t seed);

struct LineDataset {
  std::vector<double> xs;
  std::vector<double> ys;
  std::vector<int> outlier_indices;
};

/// y = slope * x + intercept with N(0, noise_sigma^2) noise, x equally spaced
/// on [x_min, x_max], then contaminated per the outlier spec.
LineDataset make_line_dataset(int count, double x_min, double x_max, double slope,
                              double intercept, double noise_sigma,
                              const OutlierSpec& outliers, std::uint64_t seed);

struct RegistrationDataset {
  /// Clean scan with per-point normals; three mutually orthogonal unit-square
  /// faces meeting at a corner.
  PointCloud target;
  /// The same surface sampled in a displaced frame, with noise and outliers.
  PointCloud source;
  /// Maps source points onto the target frame: target ~= transform(source).
  Pose3 true_transform;
  /// Indices into source.points.
  std::vector<int> outlier_indices;
};

RegistrationDataset make_registration_dataset(int count, double noise_sigma,
                                              const Pose3& true_transform,
                                              const OutlierSpec& outliers,
                                              std::uint64_t seed);

struct BADataset {
  /// True poses and landmarks with noisy (and possibly rewired) observations.
  BAScene scene;
  /// Indices into scene.observations.
  std::vector<int> outlier_observations;
};

/// Cameras on a 120-degree arc of radius 10 m looking at the origin
/// (alternating +-0.4 m height, fx=fy=500, 640x480), landmarks uniform in
/// [-4,4] x [-4,4] x [-2,2] resampled until each is seen by at least two
/// cameras, observations perturbed by pixel_noise and contaminated per the
/// outlier spec.
BADataset make_ba_scene(int camera_count, int landmark_count, double pixel_noise,
                        const OutlierSpec& outliers, std::uint64_t seed);

}  // namespace arls
