#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace gasd {

using Point3 = Eigen::Vector3d;
using Mask = std::vector<std::uint8_t>;

/// Pinhole intrinsics. Parsing never validates; `validate_for` runs when the
/// intrinsics are paired with an image.
struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;

  /// Throws InvalidInput unless fx, fy > 0 and the principal point lies
  /// inside a width x height image.
  void validate_for(int width, int height) const;
};

/// Metric depth image with an explicit validity mask. Value 0 means missing;
/// every valid pixel holds a finite depth > 0.
class DepthMap {
 public:
  DepthMap() = default;
  /// All-invalid map.
  DepthMap(int width, int height);

  /// Builds a map from raw meters; 0 marks a hole. Negative or non-finite
  /// values throw InvalidInput.
  static DepthMap from_values(int width, int height, std::vector<double> values);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::size_t index(int u, int v) const noexcept {
    return static_cast<std::size_t>(v) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(u);
  }

  double value(std::size_t i) const noexcept { return values_[i]; }
  double at(int u, int v) const noexcept { return values_[index(u, v)]; }
  bool valid(std::size_t i) const noexcept { return mask_[i] != 0; }

  /// Sets a valid depth; 0 invalidates. Anything else non-positive throws.
  void set(std::size_t i, double depth);
  void invalidate(std::size_t i) noexcept {
    values_[i] = 0.0;
    mask_[i] = 0;
  }

  std::span<const double> values() const noexcept { return values_; }
  const Mask& mask() const noexcept { return mask_; }
  std::size_t valid_count() const noexcept;

  bool operator==(const DepthMap&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> values_;
  Mask mask_;
};

/// Organized cloud: one camera-frame point per pixel of the source depth map.
struct PointCloud {
  int width = 0;
  int height = 0;
  std::vector<Point3> points;
  Mask valid;

  std::size_t index(int u, int v) const noexcept {
    return static_cast<std::size_t>(v) * static_cast<std::size_t>(width) +
           static_cast<std::size_t>(u);
  }
  std::size_t size() const noexcept { return points.size(); }
  std::size_t valid_count() const noexcept;
};

/// depth * K^-1 * (u, v, 1). Pixel coordinates are used as-is, no half-pixel
/// offset. Throws InvalidInput for non-positive or non-finite depth.
Point3 backproject_pixel(int u, int v, double depth, const CameraIntrinsics& intrinsics);

/// Back-projects every valid pixel; invalid pixels stay invalid (point zero).
PointCloud backproject_map(const DepthMap& depth, const CameraIntrinsics& intrinsics);

/// Pinhole projection of a camera-frame point with z > 0.
Eigen::Vector2d project(const Point3& p, const CameraIntrinsics& intrinsics) noexcept;

}  // namespace gasd
