#pragma once

#include "gasd/geometry.hpp"

#include <Eigen/Core>

#include <optional>
#include <span>
#include <vector>

namespace gasd {

/// Neighborhood = k x k pixel window around the query pixel, intersected
/// with a 3D ball of `radius` meters around the query point.
struct NeighborhoodConfig {
  int window = 5;
  double radius = 0.005;
  int min_points = 5;

  void validate() const;
};

struct NormalMap {
  int width = 0;
  int height = 0;
  std::vector<Eigen::Vector3d> normals;
  std::vector<double> curvature;
  Mask valid;

  static NormalMap invalid(int width, int height);

  std::size_t size() const noexcept { return normals.size(); }
  std::size_t valid_count() const noexcept;
};

/// Eigenpairs of a symmetric 3x3 matrix; values ascending, column j of
/// `vectors` belongs to `values[j]`.
struct EigenDecomposition3 {
  Eigen::Vector3d values;
  Eigen::Matrix3d vectors;
};

struct MeanCovariance {
  Point3 mean;
  Eigen::Matrix3d covariance;
};

struct SurfaceEstimate {
  Eigen::Vector3d normal;
  double curvature = 0.0;
};

/// Valid points of the window around (u, v) within `radius` of the center
/// point, center included. Empty when (u, v) itself is invalid.
std::vector<Point3> gather_neighborhood(const PointCloud& cloud, int u, int v,
                                        const NeighborhoodConfig& config);

/// Centroid and population covariance (1/N normalization).
MeanCovariance local_mean_and_covariance(std::span<const Point3> points);

/// Householder tridiagonalization followed by implicit QL. Eigenvalues
/// ascending; each eigenvector's largest-magnitude component is positive
/// (first index wins ties). Eigenvalues in [-1e-12, 0) are clamped to 0.
/// Throws InvalidInput if any |C(i,j) - C(j,i)| > 1e-9.
EigenDecomposition3 eigen_symmetric3(const Eigen::Matrix3d& c);

/// Flips n so that it faces the camera at the origin: n is kept only when
/// n.p < 0, so the n.p == 0 boundary flips. A point at the origin has no
/// viewing direction; n is returned unchanged and `degenerate` is set.
Eigen::Vector3d orient_to_camera(const Eigen::Vector3d& n, const Point3& p,
                                 bool* degenerate = nullptr) noexcept;

/// Least-variance direction of the neighborhood, oriented toward the camera,
/// with curvature lambda1 / (lambda1 + lambda2 + lambda3). Returns nullopt
/// for fewer than `min_points` points, a zero-trace covariance, or a
/// collinear neighborhood (lambda2 / lambda3 < 1e-6).
std::optional<SurfaceEstimate> estimate_normal(std::span<const Point3> points,
                                               const Point3& center,
                                               std::size_t min_points);

NormalMap estimate_normal_map(const PointCloud& cloud, const NeighborhoodConfig& config);

}  // namespace gasd
