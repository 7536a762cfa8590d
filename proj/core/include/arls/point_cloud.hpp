#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace arls {

/// 3-D point set, optionally with per-point unit normals.
///
/// Text format: one point per line, `x y z` or `x y z nx ny nz`; the first
/// data line fixes the arity for the whole file. Blank lines and lines
/// starting with '#' are ignored.
struct PointCloud {
  std::vector<Eigen::Vector3d> points;
  std::vector<Eigen::Vector3d> normals;

  std::size_t size() const { return points.size(); }
  bool has_normals() const { return !normals.empty(); }

  /// Throws std::runtime_error when normals are present but mismatched in
  /// count, not finite, or not unit length within 1e-6; or when points are
  /// not finite.
  void validate() const;

  static PointCloud load(const std::string& path);
  void save(const std::string& path) const;
};

}  // namespace arls
