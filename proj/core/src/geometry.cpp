#include "gasd/geometry.hpp"

#include "gasd/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace gasd {

void CameraIntrinsics::validate_for(int width, int height) const {
  if (!(fx > 0.0) || !(fy > 0.0) || !std::isfinite(fx) || !std::isfinite(fy)) {
    std::ostringstream msg;
    msg << "intrinsics: focal lengths must be positive (fx=" << fx << ", fy=" << fy << ")";
    throw InvalidInput(msg.str());
  }
  if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height)) {
    std::ostringstream msg;
    msg << "intrinsics: principal point (" << cx << ", " << cy << ") outside " << width << "x"
        << height << " image";
    throw InvalidInput(msg.str());
  }
}

DepthMap::DepthMap(int width, int height) : width_(width), height_(height) {
  if (width < 0 || height < 0) {
    throw InvalidInput("depth map: negative dimensions");
  }
  const auto n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  values_.assign(n, 0.0);
  mask_.assign(n, 0);
}

DepthMap DepthMap::from_values(int width, int height, std::vector<double> values) {
  DepthMap map(width, height);
  if (values.size() != map.size()) {
    throw InvalidInput("depth map: expected " + std::to_string(map.size()) + " values, got " +
                       std::to_string(values.size()));
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    map.set(i, values[i]);
  }
  return map;
}

void DepthMap::set(std::size_t i, double depth) {
  if (depth == 0.0) {
    invalidate(i);
    return;
  }
  if (!std::isfinite(depth) || depth < 0.0) {
    throw InvalidInput("depth map: depth must be finite and >= 0 (got " + std::to_string(depth) +
                       " at index " + std::to_string(i) + ")");
  }
  values_[i] = depth;
  mask_[i] = 1;
}

std::size_t DepthMap::valid_count() const noexcept {
  return static_cast<std::size_t>(std::count(mask_.begin(), mask_.end(), std::uint8_t{1}));
}

std::size_t PointCloud::valid_count() const noexcept {
  return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), std::uint8_t{1}));
}

Point3 backproject_pixel(int u, int v, double depth, const CameraIntrinsics& intrinsics) {
  if (!std::isfinite(depth) || !(depth > 0.0)) {
    throw InvalidInput("backproject: depth must be finite and positive (got " +
                       std::to_string(depth) + ")");
  }
  if (u < 0 || v < 0) {
    throw InvalidInput("backproject: negative pixel index");
  }
  return {depth * (u - intrinsics.cx) / intrinsics.fx,
          depth * (v - intrinsics.cy) / intrinsics.fy, depth};
}

PointCloud backproject_map(const DepthMap& depth, const CameraIntrinsics& intrinsics) {
  intrinsics.validate_for(depth.width(), depth.height());

  PointCloud cloud;
  cloud.width = depth.width();
  cloud.height = depth.height();
  cloud.points.assign(depth.size(), Point3::Zero());
  cloud.valid = depth.mask();

  for (int v = 0; v < depth.height(); ++v) {
    for (int u = 0; u < depth.width(); ++u) {
      const std::size_t i = depth.index(u, v);
      if (depth.valid(i)) {
        cloud.points[i] = backproject_pixel(u, v, depth.value(i), intrinsics);
      }
    }
  }
  return cloud;
}

Eigen::Vector2d project(const Point3& p, const CameraIntrinsics& intrinsics) noexcept {
  return {intrinsics.fx * p.x() / p.z() + intrinsics.cx,
          intrinsics.fy * p.y() / p.z() + intrinsics.cy};
}

}  // namespace gasd
