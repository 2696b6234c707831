#include "gasd/reliability.hpp"

#include "gasd/error.hpp"
#include "gasd/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gasd {

namespace {
constexpr double kUnitTolerance = 1e-6;
}

void ReliabilityConfig::validate() const {
  if (!(beta >= 1.0) || !std::isfinite(beta)) {
    throw InvalidInput("reliability: beta must be >= 1 (got " + std::to_string(beta) + ")");
  }
  if (curvature_gate && !(kappa_max > 0.0)) {
    throw InvalidInput("reliability: kappa_max must be positive");
  }
}

std::size_t ReliabilityMap::valid_count() const noexcept {
  return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), std::uint8_t{1}));
}

Eigen::Vector3d viewing_direction(const Point3& p) {
  const double norm = p.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw InvalidInput("viewing_direction: point must be finite and away from the origin");
  }
  return p / norm;
}

double incidence_cosine(const Eigen::Vector3d& n, const Eigen::Vector3d& v) {
  if (std::abs(n.norm() - 1.0) > kUnitTolerance || std::abs(v.norm() - 1.0) > kUnitTolerance) {
    throw InvalidInput("incidence_cosine: inputs must be unit vectors");
  }
  return std::clamp(std::abs(n.dot(v)), 0.0, 1.0);
}

double angle_score(double cos_theta, double beta) {
  return std::pow(std::clamp(cos_theta, 0.0, 1.0), beta);
}

ReliabilityMap reliability_map(const NormalMap& normals, const PointCloud& cloud,
                               const ReliabilityConfig& config) {
  config.validate();
  if (normals.width != cloud.width || normals.height != cloud.height ||
      normals.size() != cloud.size()) {
    throw InvalidInput("reliability_map: normal map and cloud shapes differ");
  }

  ReliabilityMap out;
  out.width = cloud.width;
  out.height = cloud.height;
  out.scores.assign(cloud.size(), 0.0);
  out.valid.assign(cloud.size(), 0);

  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (!cloud.valid[i] || !normals.valid[i]) continue;
    const Eigen::Vector3d view = viewing_direction(cloud.points[i]);
    double r = angle_score(incidence_cosine(normals.normals[i], view), config.beta);
    if (config.curvature_gate) {
      r *= std::max(0.0, 1.0 - normals.curvature[i] / config.kappa_max);
    }
    out.scores[i] = r;
    out.valid[i] = 1;
  }
  return out;
}

ProbabilityVector to_probabilities(const ReliabilityMap& reliability) {
  CompensatedSum total;
  std::size_t valid = 0;
  for (std::size_t i = 0; i < reliability.size(); ++i) {
    if (!reliability.valid[i]) continue;
    ++valid;
    total.add(reliability.scores[i]);
  }
  if (valid == 0) {
    throw InvalidInput("to_probabilities: no valid pixel");
  }

  ProbabilityVector out;
  const double sum = total.value();
  if (!(sum > 0.0)) {
    out.uniform_fallback = true;
    out.indices.reserve(valid);
    for (std::size_t i = 0; i < reliability.size(); ++i) {
      if (reliability.valid[i]) out.indices.push_back(i);
    }
    out.probs.assign(valid, 1.0 / static_cast<double>(valid));
    return out;
  }

  for (std::size_t i = 0; i < reliability.size(); ++i) {
    if (reliability.valid[i] && reliability.scores[i] > 0.0) {
      out.indices.push_back(i);
      out.probs.push_back(reliability.scores[i] / sum);
    }
  }
  return out;
}

}  // namespace gasd
