#include "arls/bundle_adjustment.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "arls/text_io.hpp"

namespace arls {

namespace {

constexpr double kMinDepth = 1e-6;

}  // namespace

Eigen::Vector3d BAScene::camera_center(int camera) const {
  const Pose3& pose = poses[static_cast<std::size_t>(camera)];
  return -(pose.q.conjugate() * pose.translation);
}

void BAScene::validate() const {
  if (intrinsics.size() != poses.size()) {
    throw std::runtime_error("scene has " + std::to_string(poses.size()) + " poses but " +
                             std::to_string(intrinsics.size()) + " intrinsics");
  }
  for (std::size_t i = 0; i < intrinsics.size(); ++i) {
    const CameraIntrinsics& k = intrinsics[i];
    if (!std::isfinite(k.fx) || !std::isfinite(k.fy) || k.fx <= 0.0 || k.fy <= 0.0 ||
        !std::isfinite(k.cx) || !std::isfinite(k.cy)) {
      throw std::runtime_error("camera " + std::to_string(i) + " has invalid intrinsics");
    }
  }
  for (std::size_t i = 0; i < poses.size(); ++i) {
    if (!poses[i].translation.allFinite() || !poses[i].q.coeffs().allFinite()) {
      throw std::runtime_error("pose " + std::to_string(i) + " is not finite");
    }
    if (std::abs(poses[i].q.norm() - 1.0) > 1e-6) {
      throw std::runtime_error("pose " + std::to_string(i) + " quaternion is not unit length");
    }
  }
  for (std::size_t i = 0; i < landmarks.size(); ++i) {
    if (!landmarks[i].allFinite()) {
      throw std::runtime_error("landmark " + std::to_string(i) + " is not finite");
    }
  }
  for (std::size_t i = 0; i < observations.size(); ++i) {
    const BAObservation& obs = observations[i];
    if (obs.camera < 0 || obs.camera >= camera_count()) {
      throw std::runtime_error("observation " + std::to_string(i) + " references camera " +
                               std::to_string(obs.camera) + " of " +
                               std::to_string(camera_count()));
    }
    if (obs.landmark < 0 || obs.landmark >= landmark_count()) {
      throw std::runtime_error("observation " + std::to_string(i) + " references landmark " +
                               std::to_string(obs.landmark) + " of " +
                               std::to_string(landmark_count()));
    }
    if (!obs.pixel.allFinite()) {
      throw std::runtime_error("observation " + std::to_string(i) + " pixel is not finite");
    }
  }
}

bool project(const CameraIntrinsics& intrinsics, const Pose3& pose, const Eigen::Vector3d& point,
             Eigen::Vector2d* pixel) {
  const Eigen::Vector3d cam = pose.apply(point);
  if (!(cam.z() > kMinDepth)) {
    return false;
  }
  if (pixel != nullptr) {
    pixel->x() = intrinsics.fx * cam.x() / cam.z() + intrinsics.cx;
    pixel->y() = intrinsics.fy * cam.y() / cam.z() + intrinsics.cy;
  }
  return true;
}

BAProblem::BAProblem(BAScene scene, int gauge_component) : scene_(std::move(scene)) {
  scene_.validate();
  if (scene_.camera_count() < 2) {
    throw std::invalid_argument("bundle adjustment needs at least two cameras");
  }
  if (scene_.landmark_count() < 1 || scene_.observations.empty()) {
    throw std::invalid_argument("bundle adjustment needs landmarks and observations");
  }

  if (gauge_component < 0) {
    // Freezing one coordinate of t1 is what pins the overall scale, so pick
    // the coordinate that moves most under a scale change about camera 0's
    // center: scaling maps C1 to C0 + s (C1 - C0), i.e. dt1 = -R1 (C1 - C0).
    // Falls back to the largest-magnitude component of t1 when the two
    // centers coincide.
    Eigen::Vector3d coupling =
        scene_.poses[1].q * (scene_.camera_center(1) - scene_.camera_center(0));
    if (coupling.norm() < 1e-12) coupling = scene_.poses[1].translation;
    const Eigen::Vector3d t = coupling.cwiseAbs();
    gauge_component_ = 0;
    for (int j = 1; j < 3; ++j) {
      if (t[j] > t[gauge_component_]) gauge_component_ = j;
    }
  } else if (gauge_component <= 2) {
    gauge_component_ = gauge_component;
  } else {
    throw std::invalid_argument("gauge component must be 0, 1, or 2");
  }

  // Tangent layout: camera 1 first (translation minus the gauge component,
  // then rotation), cameras 2.. (translation, rotation), then landmarks.
  // Camera 0 owns no tangent directions.
  const int n_cams = scene_.camera_count();
  camera_offset_.assign(static_cast<std::size_t>(n_cams), -1);
  int next = 0;
  for (int cam = 1; cam < n_cams; ++cam) {
    camera_offset_[static_cast<std::size_t>(cam)] = next;
    next += cam == 1 ? 5 : 6;
  }
  landmark_offset_ = next;
  tangent_size_ = next + 3 * scene_.landmark_count();

  supports_.resize(scene_.observations.size());
  for (std::size_t i = 0; i < scene_.observations.size(); ++i) {
    const BAObservation& obs = scene_.observations[i];
    std::vector<int>& support = supports_[i];
    const int base = camera_offset_[static_cast<std::size_t>(obs.camera)];
    if (base >= 0) {
      const int cols = obs.camera == 1 ? 5 : 6;
      for (int j = 0; j < cols; ++j) support.push_back(base + j);
    }
    const int lm = landmark_offset_ + 3 * obs.landmark;
    support.push_back(lm);
    support.push_back(lm + 1);
    support.push_back(lm + 2);
  }
}

int BAProblem::ambient_size() const {
  return 7 * scene_.camera_count() + 3 * scene_.landmark_count();
}

const std::vector<int>& BAProblem::block_support(int block) const {
  return supports_[static_cast<std::size_t>(block)];
}

Pose3 BAProblem::pose_at(const Eigen::VectorXd& theta, int camera) const {
  const int base = 7 * camera;
  Pose3 pose;
  pose.q = Eigen::Quaterniond(theta[base], theta[base + 1], theta[base + 2], theta[base + 3])
               .normalized();
  pose.translation = theta.segment<3>(base + 4);
  return pose;
}

bool BAProblem::evaluate(int block, const Eigen::VectorXd& theta,
                         Eigen::VectorXd& residual) const {
  const BAObservation& obs = scene_.observations[static_cast<std::size_t>(block)];
  const Pose3 pose = pose_at(theta, obs.camera);
  const Eigen::Vector3d point =
      theta.segment<3>(7 * scene_.camera_count() + 3 * obs.landmark);
  Eigen::Vector2d pixel;
  if (!project(scene_.intrinsics[static_cast<std::size_t>(obs.camera)], pose, point, &pixel)) {
    return false;
  }
  residual.resize(2);
  residual = pixel - obs.pixel;
  return true;
}

void BAProblem::jacobian(int block, const Eigen::VectorXd& theta, Eigen::MatrixXd& jac) const {
  const BAObservation& obs = scene_.observations[static_cast<std::size_t>(block)];
  const Pose3 pose = pose_at(theta, obs.camera);
  const Eigen::Vector3d point =
      theta.segment<3>(7 * scene_.camera_count() + 3 * obs.landmark);
  const Eigen::Vector3d cam = pose.apply(point);
  const double inv_z = 1.0 / cam.z();
  const CameraIntrinsics& k = scene_.intrinsics[static_cast<std::size_t>(obs.camera)];

  Eigen::Matrix<double, 2, 3> j_proj;
  j_proj << k.fx * inv_z, 0.0, -k.fx * cam.x() * inv_z * inv_z,
            0.0, k.fy * inv_z, -k.fy * cam.y() * inv_z * inv_z;

  const Eigen::Matrix3d r = pose.rotation();
  const int base = camera_offset_[static_cast<std::size_t>(obs.camera)];
  const int cam_cols = base < 0 ? 0 : (obs.camera == 1 ? 5 : 6);
  jac.resize(2, cam_cols + 3);

  if (cam_cols > 0) {
    // Translation columns: d(cam)/d(dt_j) = e_j, skipping the gauge
    // component for camera 1. Rotation columns: d(cam)/d(dw) = -[R p]x.
    int col = 0;
    for (int j = 0; j < 3; ++j) {
      if (obs.camera == 1 && j == gauge_component_) continue;
      jac.col(col++) = j_proj.col(j);
    }
    const Eigen::Matrix<double, 2, 3> j_rot = -j_proj * skew(r * point);
    jac.block<2, 3>(0, col) = j_rot;
  }
  jac.block<2, 3>(0, cam_cols) = j_proj * r;
}

Eigen::VectorXd BAProblem::plus(const Eigen::VectorXd& theta,
                                const Eigen::VectorXd& delta) const {
  Eigen::VectorXd out = theta;
  for (int cam = 1; cam < scene_.camera_count(); ++cam) {
    const int base = camera_offset_[static_cast<std::size_t>(cam)];
    const int pbase = 7 * cam;
    Eigen::Vector3d dt = Eigen::Vector3d::Zero();
    Eigen::Vector3d dw;
    if (cam == 1) {
      int col = base;
      for (int j = 0; j < 3; ++j) {
        if (j == gauge_component_) continue;
        dt[j] = delta[col++];
      }
      dw = delta.segment<3>(col);
    } else {
      dt = delta.segment<3>(base);
      dw = delta.segment<3>(base + 3);
    }
    const Eigen::Quaterniond q(theta[pbase], theta[pbase + 1], theta[pbase + 2],
                               theta[pbase + 3]);
    const Eigen::Quaterniond updated = (Pose3::exp((Vector6d() << 0, 0, 0, dw).finished()).q * q)
                                           .normalized();
    out[pbase] = updated.w();
    out[pbase + 1] = updated.x();
    out[pbase + 2] = updated.y();
    out[pbase + 3] = updated.z();
    out.segment<3>(pbase + 4) += dt;
  }
  const int lm_base = 7 * scene_.camera_count();
  out.segment(lm_base, 3 * scene_.landmark_count()) +=
      delta.segment(landmark_offset_, 3 * scene_.landmark_count());
  return out;
}

Eigen::VectorXd BAProblem::initial_parameters() const {
  Eigen::VectorXd theta(ambient_size());
  for (int cam = 0; cam < scene_.camera_count(); ++cam) {
    const Pose3& pose = scene_.poses[static_cast<std::size_t>(cam)];
    theta.segment<7>(7 * cam) << pose.q.w(), pose.q.x(), pose.q.y(), pose.q.z(),
        pose.translation.x(), pose.translation.y(), pose.translation.z();
  }
  const int base = 7 * scene_.camera_count();
  for (int lm = 0; lm < scene_.landmark_count(); ++lm) {
    theta.segment<3>(base + 3 * lm) = scene_.landmarks[static_cast<std::size_t>(lm)];
  }
  return theta;
}

BAScene BAProblem::scene_at(const Eigen::VectorXd& theta) const {
  if (theta.size() != ambient_size()) {
    throw std::invalid_argument("scene_at: parameter vector has wrong size");
  }
  BAScene out = scene_;
  for (int cam = 0; cam < scene_.camera_count(); ++cam) {
    out.poses[static_cast<std::size_t>(cam)] = pose_at(theta, cam);
  }
  const int base = 7 * scene_.camera_count();
  for (int lm = 0; lm < scene_.landmark_count(); ++lm) {
    out.landmarks[static_cast<std::size_t>(lm)] = theta.segment<3>(base + 3 * lm);
  }
  return out;
}

std::unique_ptr<BAProblem> ba_problem(BAScene scene, int gauge_component) {
  return std::make_unique<BAProblem>(std::move(scene), gauge_component);
}

double camera_center_rms(const BAScene& estimate, const BAScene& truth) {
  if (estimate.camera_count() != truth.camera_count()) {
    throw std::invalid_argument("camera_center_rms: camera counts differ");
  }
  double sum = 0.0;
  for (int i = 0; i < truth.camera_count(); ++i) {
    sum += (estimate.camera_center(i) - truth.camera_center(i)).squaredNorm();
  }
  return std::sqrt(sum / truth.camera_count());
}

Eigen::Vector3d midpoint_triangulate(const CameraIntrinsics& intrinsics_a, const Pose3& pose_a,
                                     const Eigen::Vector2d& pixel_a,
                                     const CameraIntrinsics& intrinsics_b, const Pose3& pose_b,
                                     const Eigen::Vector2d& pixel_b) {
  const auto ray = [](const CameraIntrinsics& k, const Pose3& pose, const Eigen::Vector2d& px,
                      Eigen::Vector3d* origin) {
    const Eigen::Vector3d dir_cam((px.x() - k.cx) / k.fx, (px.y() - k.cy) / k.fy, 1.0);
    *origin = -(pose.q.conjugate() * pose.translation);
    return (pose.q.conjugate() * dir_cam).normalized();
  };
  Eigen::Vector3d ca, cb;
  const Eigen::Vector3d da = ray(intrinsics_a, pose_a, pixel_a, &ca);
  const Eigen::Vector3d db = ray(intrinsics_b, pose_b, pixel_b, &cb);
  const Eigen::Vector3d w = cb - ca;
  const double g = da.dot(db);
  const double det = 1.0 - g * g;
  if (std::abs(det) < 1e-12) {
    // Parallel rays: fall back to a nominal depth along both.
    return 0.5 * ((ca + 10.0 * da) + (cb + 10.0 * db));
  }
  const double sa = (w.dot(da) - g * w.dot(db)) / det;
  const double sb = (g * w.dot(da) - w.dot(db)) / det;
  return 0.5 * ((ca + sa * da) + (cb + sb * db));
}

namespace {

std::runtime_error scene_error(const std::string& path, int line, const std::string& what) {
  return std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

BAScene BAScene::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open scene file: " + path);
  }
  BAScene scene;
  std::string line;
  int line_no = 0;
  const auto next_data_line = [&](std::vector<std::string>* tokens) {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      *tokens = split_tokens(line);
      if (!tokens->empty()) return true;
    }
    return false;
  };

  const char* sections[4] = {"CAMERAS", "POSES", "LANDMARKS", "OBSERVATIONS"};
  for (const char* section : sections) {
    std::vector<std::string> tokens;
    if (!next_data_line(&tokens)) {
      throw scene_error(path, line_no, std::string("missing ") + section + " section");
    }
    if (tokens.size() != 2 || tokens[0] != section) {
      throw scene_error(path, line_no, std::string("expected '") + section + " <count>'");
    }
    long long count = 0;
    try {
      count = parse_int(tokens[1]);
    } catch (const std::exception& e) {
      throw scene_error(path, line_no, e.what());
    }
    if (count < 0) {
      throw scene_error(path, line_no, "negative count");
    }
    for (long long i = 0; i < count; ++i) {
      std::vector<std::string> row;
      if (!next_data_line(&row)) {
        throw scene_error(path, line_no, std::string(section) + ": expected " +
                                             std::to_string(count) + " entries, file ended at " +
                                             std::to_string(i));
      }
      try {
        if (section == std::string("CAMERAS")) {
          if (row.size() != 4) throw std::runtime_error("expected 'fx fy cx cy'");
          CameraIntrinsics k;
          k.fx = parse_double(row[0]);
          k.fy = parse_double(row[1]);
          k.cx = parse_double(row[2]);
          k.cy = parse_double(row[3]);
          scene.intrinsics.push_back(k);
        } else if (section == std::string("POSES")) {
          if (row.size() != 7) throw std::runtime_error("expected 'qw qx qy qz tx ty tz'");
          Pose3 pose;
          pose.q = Eigen::Quaterniond(parse_double(row[0]), parse_double(row[1]),
                                      parse_double(row[2]), parse_double(row[3]));
          pose.translation << parse_double(row[4]), parse_double(row[5]), parse_double(row[6]);
          scene.poses.push_back(pose);
        } else if (section == std::string("LANDMARKS")) {
          if (row.size() != 3) throw std::runtime_error("expected 'x y z'");
          scene.landmarks.emplace_back(parse_double(row[0]), parse_double(row[1]),
                                       parse_double(row[2]));
        } else {
          if (row.size() != 4) throw std::runtime_error("expected 'camera landmark u v'");
          BAObservation obs;
          obs.camera = static_cast<int>(parse_int(row[0]));
          obs.landmark = static_cast<int>(parse_int(row[1]));
          obs.pixel << parse_double(row[2]), parse_double(row[3]);
          scene.observations.push_back(obs);
        }
      } catch (const std::exception& e) {
        throw scene_error(path, line_no, e.what());
      }
    }
  }
  try {
    scene.validate();
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  return scene;
}

void BAScene::save(const std::string& path) const {
  validate();
  std::string out;
  out += "CAMERAS " + std::to_string(camera_count()) + "\n";
  for (const CameraIntrinsics& k : intrinsics) {
    out += format_double(k.fx) + " " + format_double(k.fy) + " " + format_double(k.cx) + " " +
           format_double(k.cy) + "\n";
  }
  out += "POSES " + std::to_string(camera_count()) + "\n";
  for (const Pose3& pose : poses) {
    out += format_double(pose.q.w()) + " " + format_double(pose.q.x()) + " " +
           format_double(pose.q.y()) + " " + format_double(pose.q.z()) + " " +
           format_double(pose.translation.x()) + " " + format_double(pose.translation.y()) +
           " " + format_double(pose.translation.z()) + "\n";
  }
  out += "LANDMARKS " + std::to_string(landmark_count()) + "\n";
  for (const Eigen::Vector3d& lm : landmarks) {
    out += format_double(lm.x()) + " " + format_double(lm.y()) + " " + format_double(lm.z()) +
           "\n";
  }
  out += "OBSERVATIONS " + std::to_string(observations.size()) + "\n";
  for (const BAObservation& obs : observations) {
    out += std::to_string(obs.camera) + " " + std::to_string(obs.landmark) + " " +
           format_double(obs.pixel.x()) + " " + format_double(obs.pixel.y()) + "\n";
  }
  write_file(path, out);
}

}  // namespace arls
