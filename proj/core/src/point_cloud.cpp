#include "arls/point_cloud.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "arls/text_io.hpp"

namespace arls {

void PointCloud::validate() const {
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!points[i].allFinite()) {
      throw std::runtime_error("point " + std::to_string(i) + " is not finite");
    }
  }
  if (normals.empty()) return;
  if (normals.size() != points.size()) {
    throw std::runtime_error("cloud has " + std::to_string(points.size()) + " points but " +
                             std::to_string(normals.size()) + " normals");
  }
  for (std::size_t i = 0; i < normals.size(); ++i) {
    if (!normals[i].allFinite()) {
      throw std::runtime_error("normal " + std::to_string(i) + " is not finite");
    }
    if (std::abs(normals[i].norm() - 1.0) > 1e-6) {
      throw std::runtime_error("normal " + std::to_string(i) + " is not unit length (|n| = " +
                               format_double(normals[i].norm()) + ")");
    }
  }
}

PointCloud PointCloud::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open point cloud file: " + path);
  }
  PointCloud cloud;
  std::string line;
  int line_no = 0;
  int arity = 0;  // 3 or 6, fixed by the first data line
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::vector<std::string> tokens = split_tokens(line);
    if (tokens.empty()) continue;
    if (arity == 0) {
      if (tokens.size() != 3 && tokens.size() != 6) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": expected 3 (x y z) or 6 (x y z nx ny nz) values, got " +
                                 std::to_string(tokens.size()));
      }
      arity = static_cast<int>(tokens.size());
    } else if (tokens.size() != static_cast<std::size_t>(arity)) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected " +
                               std::to_string(arity) + " values, got " +
                               std::to_string(tokens.size()));
    }
    double v[6] = {0, 0, 0, 0, 0, 0};
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      try {
        v[i] = parse_double(tokens[i]);
      } catch (const std::exception& e) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + e.what());
      }
    }
    cloud.points.emplace_back(v[0], v[1], v[2]);
    if (arity == 6) {
      cloud.normals.emplace_back(v[3], v[4], v[5]);
    }
  }
  try {
    cloud.validate();
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  return cloud;
}

void PointCloud::save(const std::string& path) const {
  validate();
  std::string out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    out += format_double(points[i].x()) + " " + format_double(points[i].y()) + " " +
           format_double(points[i].z());
    if (has_normals()) {
      out += " " + format_double(normals[i].x()) + " " + format_double(normals[i].y()) + " " +
             format_double(normals[i].z());
    }
    out += "\n";
  }
  write_file(path, out);
}

}  // namespace arls
