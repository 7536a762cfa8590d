#include "arls/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>

#include "arls/rng.hpp"

namespace arls {
namespace {

/// round(fraction * size) distinct indices, ascending.
std::vector<int> pick_indices(std::size_t size, double fraction, std::mt19937_64& rng) {
  const int count = static_cast<int>(std::lround(fraction * static_cast<double>(size)));
  std::vector<int> indices(size);
  std::iota(indices.begin(), indices.end(), 0);
  std::shuffle(indices.begin(), indices.end(), rng);
  indices.resize(std::min<std::size_t>(count, size));
  std::sort(indices.begin(), indices.end());
  return indices;
}

Eigen::Vector3d random_unit_vector(std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::Vector3d v;
  do {
    v = Eigen::Vector3d(normal(rng), normal(rng), normal(rng));
  } while (v.norm() < 1e-9);
  return v.normalized();
}

/// World-to-camera pose for a camera at `center` whose optical axis points at
/// `aim`, with the image x-axis orthogonal to `up`.
Pose3 look_at(const Eigen::Vector3d& center, const Eigen::Vector3d& aim,
              const Eigen::Vector3d& up) {
  const Eigen::Vector3d forward = (aim - center).normalized();
  Eigen::Vector3d right = up.cross(forward);
  if (right.norm() < 1e-9) {
    throw std::invalid_argument("look_at: view direction parallel to up vector");
  }
  right.normalize();
  const Eigen::Vector3d down = forward.cross(right);
  Eigen::Matrix3d rotation;
  rotation.row(0) = right;
  rotation.row(1) = down;
  rotation.row(2) = forward;
  Pose3 pose;
  pose.q = Eigen::Quaterniond(rotation).normalized();
  pose.translation = -(rotation * center);
  return pose;
}

}  // namespace

const char* to_string(OutlierModel model) {
  switch (model) {
    case OutlierModel::kUniformReplacement: return "uniform_replacement";
    case OutlierModel::kCorrespondenceShuffle: return "correspondence_shuffle";
    case OutlierModel::kClusteredOffset: return "clustered_offset";
  }
  return "unknown";
}

OutlierModel parse_outlier_model(const std::string& text) {
  if (text == "uniform_replacement") return OutlierModel::kUniformReplacement;
  if (text == "correspondence_shuffle") return OutlierModel::kCorrespondenceShuffle;
  if (text == "clustered_offset") return OutlierModel::kClusteredOffset;
  throw std::invalid_argument("unknown outlier model '" + text +
                              "' (expected uniform_replacement, correspondence_shuffle, "
                              "or clustered_offset)");
}

void OutlierSpec::validate() const {
  if (!(fraction >= 0.0) || !(fraction < 1.0)) {
    throw std::invalid_argument("outlier fraction must be in [0, 1)");
  }
  if (model == OutlierModel::kUniformReplacement && !(range_max > range_min)) {
    throw std::invalid_argument("outlier range_max must exceed range_min");
  }
  if (model == OutlierModel::kClusteredOffset && !(offset_magnitude > 0.0)) {
    throw std::invalid_argument("outlier offset_magnitude must be positive");
  }
  if (cluster_size < 0) {
    throw std::invalid_argument("outlier cluster_size must be non-negative");
  }
}

std::vector<int> inject_outliers(std::vector<double>& values, const OutlierSpec& spec,
                                 std::uint64_t seed) {
  spec.validate();
  if (spec.model != OutlierModel::kUniformReplacement) {
    throw std::invalid_argument(
        "inject_outliers: scalar data supports only uniform_replacement");
  }
  if (spec.fraction == 0.0 || values.empty()) return {};
  std::mt19937_64 rng(seed);
  const std::vector<int> indices = pick_indices(values.size(), spec.fraction, rng);
  std::uniform_real_distribution<double> replacement(spec.range_min, spec.range_max);
  for (int i : indices) values[i] = replacement(rng);
  return indices;
}

std::vector<int> inject_outliers(std::vector<BAObservation>& observations,
                                 int landmark_count, const OutlierSpec& spec,
                                 std::uint64_t seed) {
  spec.validate();
  if (spec.model == OutlierModel::kUniformReplacement) {
    throw std::invalid_argument(
        "inject_outliers: observations support correspondence_shuffle and clustered_offset");
  }
  if (spec.fraction == 0.0 || observations.empty()) return {};
  std::mt19937_64 rng(seed);
  const std::vector<int> indices = pick_indices(observations.size(), spec.fraction, rng);

  if (spec.model == OutlierModel::kCorrespondenceShuffle) {
    if (landmark_count < 2) {
      throw std::invalid_argument(
          "inject_outliers: correspondence_shuffle needs at least two landmarks");
    }
    std::uniform_int_distribution<int> pick(0, landmark_count - 1);
    for (int i : indices) {
      int rewired = pick(rng);
      while (rewired == observations[i].landmark) rewired = pick(rng);
      observations[i].landmark = rewired;
    }
    return indices;
  }

  // Clustered offset: groups of contaminated observations share one pixel
  // displacement of fixed magnitude and random direction, like features on a
  // rigidly moving object. The picked set is shuffled before grouping so a
  // cluster spans cameras instead of forming a coherent per-camera shift
  // (which a rotation update could partially absorb). cluster_size <= 0 puts
  // every contaminated observation in a single group.
  std::vector<int> grouped = indices;
  std::shuffle(grouped.begin(), grouped.end(), rng);
  const std::size_t group = spec.cluster_size > 0
                                ? static_cast<std::size_t>(spec.cluster_size)
                                : grouped.size();
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  for (std::size_t start = 0; start < grouped.size(); start += group) {
    const double phi = angle(rng);
    const Eigen::Vector2d dir(std::cos(phi), std::sin(phi));
    const std::size_t end = std::min(start + group, grouped.size());
    for (std::size_t j = start; j < end; ++j) {
      observations[static_cast<std::size_t>(grouped[j])].pixel +=
          spec.offset_magnitude * dir;
    }
  }
  return indices;
}

std::vector<int> inject_outliers(PointCloud& cloud, const OutlierSpec& spec,
                                 std::uint64_t seed) {
  spec.validate();
  if (spec.fraction == 0.0 || cloud.points.empty()) return {};
  std::mt19937_64 rng(seed);

  if (spec.model == OutlierModel::kUniformReplacement) {
    const std::vector<int> indices = pick_indices(cloud.size(), spec.fraction, rng);
    std::uniform_real_distribution<double> replacement(spec.range_min, spec.range_max);
    for (int i : indices) {
      for (int k = 0; k < 3; ++k) cloud.points[i][k] = replacement(rng);
    }
    return indices;
  }
  if (spec.model != OutlierModel::kClusteredOffset) {
    throw std::invalid_argument(
        "inject_outliers: point clouds support uniform_replacement or clustered_offset");
  }

  const int size = static_cast<int>(cloud.size());
  const int target = static_cast<int>(std::lround(spec.fraction * size));
  const int cluster = std::max(1, spec.cluster_size);
  std::vector<char> displaced(size, 0);
  std::vector<int> result;
  result.reserve(target);
  std::uniform_int_distribution<int> pick(0, size - 1);

  std::vector<int> order(size);
  while (static_cast<int>(result.size()) < target) {
    int anchor = pick(rng);
    for (int attempts = 0; displaced[anchor] && attempts < 64; ++attempts) {
      anchor = pick(rng);
    }
    while (displaced[anchor]) anchor = (anchor + 1) % size;  // guaranteed to exist

    const Eigen::Vector3d shift = spec.offset_magnitude * random_unit_vector(rng);
    // The cluster is the anchor plus its nearest not-yet-displaced neighbors.
    std::iota(order.begin(), order.end(), 0);
    const Eigen::Vector3d& anchor_point = cloud.points[anchor];
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return (cloud.points[a] - anchor_point).squaredNorm() <
             (cloud.points[b] - anchor_point).squaredNorm();
    });
    int taken = 0;
    for (int i : order) {
      if (taken == cluster || static_cast<int>(result.size()) == target) break;
      if (displaced[i]) continue;
      displaced[i] = 1;
      cloud.points[i] += shift;
      result.push_back(i);
      ++taken;
    }
  }
  std::sort(result.begin(), result.end());
  return result;
}

LineDataset make_line_dataset(int count, double x_min, double x_max, double slope,
                              double intercept, double noise_sigma,
                              const OutlierSpec& outliers, std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("make_line_dataset: count must be positive");
  if (!(x_max >= x_min)) throw std::invalid_argument("make_line_dataset: x_max < x_min");
  if (!(noise_sigma >= 0.0)) {
    throw std::invalid_argument("make_line_dataset: noise_sigma must be non-negative");
  }

  LineDataset data;
  data.xs.resize(count);
  data.ys.resize(count);
  std::mt19937_64 rng(derive_seed(seed, 1));
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int i = 0; i < count; ++i) {
    const double x =
        count == 1 ? x_min : x_min + i * (x_max - x_min) / static_cast<double>(count - 1);
    data.xs[i] = x;
    data.ys[i] = slope * x + intercept;
    if (noise_sigma > 0.0) data.ys[i] += noise_sigma * noise(rng);
  }
  if (outliers.fraction > 0.0) {
    data.outlier_indices = inject_outliers(data.ys, outliers, derive_seed(seed, 2));
  }
  return data;
}

RegistrationDataset make_registration_dataset(int count, double noise_sigma,
                                              const Pose3& true_transform,
                                              const OutlierSpec& outliers,
                                              std::uint64_t seed) {
  if (count < 3) {
    throw std::invalid_argument("make_registration_dataset: count must be at least 3");
  }
  if (!(noise_sigma >= 0.0)) {
    throw std::invalid_argument(
        "make_registration_dataset: noise_sigma must be non-negative");
  }

  RegistrationDataset data;
  data.true_transform = true_transform;
  std::mt19937_64 rng(derive_seed(seed, 1));
  std::uniform_real_distribution<double> coord(0.0, 1.0);

  // Three unit-square faces meeting at the origin corner, normals inward
  // along the coordinate axes; the corner pins all six degrees of freedom.
  const Eigen::Vector3d face_normals[3] = {
      {0.0, 0.0, 1.0}, {1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}};
  for (int face = 0; face < 3; ++face) {
    const int n = count / 3 + (face < count % 3 ? 1 : 0);
    for (int i = 0; i < n; ++i) {
      const double u = coord(rng);
      const double v = coord(rng);
      Eigen::Vector3d p;
      if (face == 0) p = {u, v, 0.0};
      else if (face == 1) p = {0.0, u, v};
      else p = {u, 0.0, v};
      data.target.points.push_back(p);
      data.target.normals.push_back(face_normals[face]);
    }
  }

  const Pose3 to_source = true_transform.inverse();
  std::normal_distribution<double> noise(0.0, 1.0);
  data.source.points.reserve(data.target.points.size());
  for (const Eigen::Vector3d& p : data.target.points) {
    Eigen::Vector3d s = to_source.apply(p);
    if (noise_sigma > 0.0) {
      s += noise_sigma * Eigen::Vector3d(noise(rng), noise(rng), noise(rng));
    }
    data.source.points.push_back(s);
  }
  if (outliers.fraction > 0.0) {
    data.outlier_indices = inject_outliers(data.source, outliers, derive_seed(seed, 2));
  }
  return data;
}

BADataset make_ba_scene(int camera_count, int landmark_count, double pixel_noise,
                        const OutlierSpec& outliers, std::uint64_t seed) {
  if (camera_count < 2) {
    throw std::invalid_argument("make_ba_scene: needs at least two cameras");
  }
  if (landmark_count < 2) {
    throw std::invalid_argument("make_ba_scene: needs at least two landmarks");
  }
  if (!(pixel_noise >= 0.0)) {
    throw std::invalid_argument("make_ba_scene: pixel_noise must be non-negative");
  }

  BADataset data;
  BAScene& scene = data.scene;
  const CameraIntrinsics intrinsics;  // fx = fy = 500, 640x480
  const double width = 2.0 * intrinsics.cx;
  const double height = 2.0 * intrinsics.cy;

  // Cameras on a 120-degree arc of radius 10 m around the origin, alternating
  // +-0.4 m in height so no two share a center, all aimed at the origin.
  // Cameras 0 and 1 take the two arc ends: they anchor the gauge (camera 0
  // frozen, one translation coordinate of camera 1 frozen), and the widest
  // baseline makes that frozen coordinate maximally sensitive to the scale
  // direction, which keeps the scale gauge stiff.
  const double arc = 2.0 * std::numbers::pi / 3.0;
  for (int i = 0; i < camera_count; ++i) {
    const int slot = i == 0 ? 0 : (i == 1 ? camera_count - 1 : i - 1);
    const double angle = -arc / 2.0 + arc * slot / static_cast<double>(camera_count - 1);
    const Eigen::Vector3d center(10.0 * std::sin(angle), slot % 2 == 0 ? 0.4 : -0.4,
                                 -10.0 * std::cos(angle));
    scene.intrinsics.push_back(intrinsics);
    scene.poses.push_back(look_at(center, Eigen::Vector3d::Zero(), {0.0, 1.0, 0.0}));
  }

  const auto visible = [&](const Eigen::Vector3d& point, int camera,
                           Eigen::Vector2d* pixel) {
    if (!project(scene.intrinsics[camera], scene.poses[camera], point, pixel)) return false;
    return (*pixel)[0] >= 0.0 && (*pixel)[0] <= width && (*pixel)[1] >= 0.0 &&
           (*pixel)[1] <= height;
  };

  // Landmarks uniform in a box in front of the arc; redraw any landmark seen
  // by fewer than two cameras so every column of the problem is constrained.
  std::mt19937_64 rng(derive_seed(seed, 1));
  std::uniform_real_distribution<double> lateral(-4.0, 4.0);
  std::uniform_real_distribution<double> axial(-2.0, 2.0);
  scene.landmarks.reserve(landmark_count);
  for (int j = 0; j < landmark_count; ++j) {
    Eigen::Vector3d point;
    int views = 0;
    for (int attempt = 0; attempt < 1000 && views < 2; ++attempt) {
      point = {lateral(rng), lateral(rng), axial(rng)};
      views = 0;
      Eigen::Vector2d pixel;
      for (int i = 0; i < camera_count; ++i) {
        if (visible(point, i, &pixel)) ++views;
      }
    }
    if (views < 2) {
      throw std::runtime_error("make_ba_scene: failed to place a landmark with two views");
    }
    scene.landmarks.push_back(point);
  }

  // Camera-major observation order; noise is drawn in that order.
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int i = 0; i < camera_count; ++i) {
    for (int j = 0; j < landmark_count; ++j) {
      Eigen::Vector2d pixel;
      if (!visible(scene.landmarks[j], i, &pixel)) continue;
      if (pixel_noise > 0.0) {
        pixel += pixel_noise * Eigen::Vector2d(noise(rng), noise(rng));
      }
      scene.observations.push_back({i, j, pixel});
    }
  }
  if (outliers.fraction > 0.0) {
    data.outlier_observations = inject_outliers(scene.observations, landmark_count,
                                                outliers, derive_seed(seed, 2));
  }
  return data;
}

}  // namespace arls
