#pragma once

#include "gasd/geometry.hpp"
#include "gasd/normals.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace gasd {

/// Plane {p : normal . p + offset = 0}. With a camera-facing unit normal the
/// offset is the plane's distance from the camera center.
struct PlaneSpec {
  Eigen::Vector3d normal{0.0, 0.0, -1.0};
  double offset = 1.0;
};

enum class SceneKind { plane, sphere, corner };

/// Which of the two corner planes is visible along a ray hitting both.
enum class CornerJoin { nearest, farthest };

struct SceneSpec {
  SceneKind kind = SceneKind::plane;
  int width = 640;
  int height = 480;
  CameraIntrinsics intrinsics{525.0, 525.0, 319.5, 239.5};

  PlaneSpec plane;

  Point3 sphere_center{0.0, 0.0, 2.0};
  double sphere_radius = 0.5;

  PlaneSpec corner_a;
  PlaneSpec corner_b;
  CornerJoin corner_join = CornerJoin::nearest;

  void validate() const;
};

/// Plane whose normal is tilted by `tilt` radians about the camera x axis
/// from the frontal normal (0, 0, -1), passing through (0, 0, distance).
PlaneSpec tilted_plane(double tilt, double distance);

struct RenderedScene {
  DepthMap depth;
  NormalMap normals;
};

/// Ray-cast z-depth and camera-oriented analytic normals. Pixels whose ray
/// misses the surface are invalid. Throws InvalidInput for a spec that fails
/// validation or renders no valid pixel.
RenderedScene render_scene(const SceneSpec& spec);

/// Reads `kind`, `width`, `height`, `fx` ... from a key-value text file.
SceneSpec read_scene_spec(const std::filesystem::path& path);

/// Incidence-dependent depth noise:
/// sigma(theta) = sigma0 * min(1 + angle_gain * tan^2(theta), 100).
struct NoiseModel {
  double sigma0 = 0.0;
  double angle_gain = 0.0;
  double dropout_angle = 1.5707963267948966;
  std::uint64_t seed = 0;

  void validate() const;
  double sigma(double theta) const noexcept;
};

struct NoisyFrame {
  DepthMap depth;
  /// |noisy - clean| per pixel, 0 where the noisy frame is invalid.
  std::vector<double> error;
};

/// Adds zero-mean Gaussian noise with std sigma(theta) to every valid pixel,
/// theta being the angle between the normal and the viewing ray. Pixels past
/// `dropout_angle`, or pushed to non-positive depth, are dropped. Pixels
/// without a valid normal are treated as normal incidence.
NoisyFrame apply_noise(const DepthMap& depth, const NormalMap& gt_normals,
                       const PointCloud& cloud, const NoiseModel& model);

}  // namespace gasd
