#pragma once

#include "gasd/geometry.hpp"
#include "gasd/normals.hpp"

#include <cstddef>
#include <vector>

namespace gasd {

struct ReliabilityConfig {
  /// Grazing-angle exponent, >= 1.
  double beta = 2.0;
  /// Opt-in planarity factor max(0, 1 - kappa / kappa_max).
  bool curvature_gate = false;
  double kappa_max = 1.0 / 3.0;

  void validate() const;
};

struct ReliabilityMap {
  int width = 0;
  int height = 0;
  std::vector<double> scores;
  Mask valid;

  std::size_t size() const noexcept { return scores.size(); }
  std::size_t valid_count() const noexcept;
};

/// Pixel indices with their sampling probabilities.
struct ProbabilityVector {
  std::vector<std::size_t> indices;
  std::vector<double> probs;
  /// Set when every score was zero and probabilities fell back to uniform.
  bool uniform_fallback = false;
};

/// p / |p|. Throws InvalidInput for the zero vector.
Eigen::Vector3d viewing_direction(const Point3& p);

/// |n . v| clamped to [0, 1]. Both inputs must be unit length within 1e-6.
double incidence_cosine(const Eigen::Vector3d& n, const Eigen::Vector3d& v);

/// cos_theta ^ beta.
double angle_score(double cos_theta, double beta);

/// Per-pixel |n . v|^beta, optionally times the curvature gate. Pixels
/// invalid in either input score 0 and are invalid.
ReliabilityMap reliability_map(const NormalMap& normals, const PointCloud& cloud,
                               const ReliabilityConfig& config);

/// r_i / sum r over valid pixels with r > 0. When the sum is zero the result
/// is uniform over all valid pixels and `uniform_fallback` is set. Throws
/// InvalidInput when no pixel is valid.
ProbabilityVector to_probabilities(const ReliabilityMap& reliability);

}  // namespace gasd
