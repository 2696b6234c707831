#include "gasd/synthetic.hpp"

#include "gasd/error.hpp"
#include "gasd/io.hpp"
#include "gasd/random.hpp"
#include "gasd/reliability.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>

namespace gasd {

namespace {

constexpr double kMaxSigmaFactor = 100.0;

void validate_plane(const PlaneSpec& plane, const char* name) {
  if (!plane.normal.allFinite() || !std::isfinite(plane.offset)) {
    throw InvalidInput(std::string(name) + ": non-finite plane parameters");
  }
  if (std::abs(plane.normal.norm() - 1.0) > 1e-6) {
    throw InvalidInput(std::string(name) + ": plane normal must be unit length");
  }
}

std::optional<double> intersect_plane(const PlaneSpec& plane, const Eigen::Vector3d& ray) {
  const double denom = plane.normal.dot(ray);
  if (denom == 0.0) return std::nullopt;
  const double z = -plane.offset / denom;
  if (!std::isfinite(z) || !(z > 0.0)) return std::nullopt;
  return z;
}

std::optional<double> intersect_sphere(const Point3& center, double radius,
                                       const Eigen::Vector3d& ray) {
  const double a = ray.squaredNorm();
  const double b = ray.dot(center);
  const double c = center.squaredNorm() - radius * radius;
  const double disc = b * b - a * c;
  if (disc < 0.0) return std::nullopt;
  const double z = (b - std::sqrt(disc)) / a;
  if (!(z > 0.0)) return std::nullopt;
  return z;
}

PlaneSpec plane_from(const KeyValueFile& kv, const std::string& prefix) {
  PlaneSpec plane;
  if (kv.contains(prefix + "_tilt_deg")) {
    return tilted_plane(kv.number(prefix + "_tilt_deg") * std::numbers::pi / 180.0,
                        kv.number(prefix + "_distance"));
  }
  const std::vector<double> n = kv.numbers(prefix + "_normal");
  if (n.size() != 3) {
    throw ParseError(prefix + "_normal", prefix + "_normal: expected 3 numbers");
  }
  plane.normal = Eigen::Vector3d(n[0], n[1], n[2]);
  const double norm = plane.normal.norm();
  if (!(norm > 0.0)) throw ParseError(prefix + "_normal", prefix + "_normal: zero vector");
  plane.normal /= norm;
  plane.offset = kv.number(prefix + "_offset");
  return plane;
}

}  // namespace

void SceneSpec::validate() const {
  if (width <= 0 || height <= 0) {
    throw InvalidInput("scene: image size must be positive");
  }
  intrinsics.validate_for(width, height);
  switch (kind) {
    case SceneKind::plane:
      validate_plane(plane, "scene plane");
      break;
    case SceneKind::sphere:
      if (!sphere_center.allFinite() || !(sphere_radius > 0.0) || !std::isfinite(sphere_radius)) {
        throw InvalidInput("scene sphere: center must be finite and radius positive");
      }
      if (!(sphere_center.z() - sphere_radius > 0.0)) {
        throw InvalidInput("scene sphere: sphere must lie entirely in front of the camera");
      }
      break;
    case SceneKind::corner:
      validate_plane(corner_a, "scene corner_a");
      validate_plane(corner_b, "scene corner_b");
      break;
  }
}

PlaneSpec tilted_plane(double tilt, double distance) {
  PlaneSpec plane;
  plane.normal = Eigen::Vector3d(0.0, std::sin(tilt), -std::cos(tilt));
  plane.offset = distance * std::cos(tilt);
  return plane;
}

RenderedScene render_scene(const SceneSpec& spec) {
  spec.validate();
  RenderedScene out{DepthMap(spec.width, spec.height),
                    NormalMap::invalid(spec.width, spec.height)};
  const CameraIntrinsics& k = spec.intrinsics;

  for (int v = 0; v < spec.height; ++v) {
    for (int u = 0; u < spec.width; ++u) {
      const Eigen::Vector3d ray((u - k.cx) / k.fx, (v - k.cy) / k.fy, 1.0);
      std::optional<double> z;
      Eigen::Vector3d normal = Eigen::Vector3d::Zero();

      switch (spec.kind) {
        case SceneKind::plane:
          z = intersect_plane(spec.plane, ray);
          normal = spec.plane.normal;
          break;
        case SceneKind::sphere:
          z = intersect_sphere(spec.sphere_center, spec.sphere_radius, ray);
          if (z) normal = (*z * ray - spec.sphere_center) / spec.sphere_radius;
          break;
        case SceneKind::corner: {
          const auto za = intersect_plane(spec.corner_a, ray);
          const auto zb = intersect_plane(spec.corner_b, ray);
          bool use_a = za.has_value();
          if (za && zb) {
            use_a = spec.corner_join == CornerJoin::nearest ? *za <= *zb : *za >= *zb;
          }
          if (use_a) {
            z = za;
            normal = spec.corner_a.normal;
          } else if (zb) {
            z = zb;
            normal = spec.corner_b.normal;
          }
          break;
        }
      }
      if (!z) continue;

      const std::size_t i = out.depth.index(u, v);
      out.depth.set(i, *z);
      out.normals.normals[i] = orient_to_camera(normal.normalized(), *z * ray);
      out.normals.curvature[i] = 0.0;
      out.normals.valid[i] = 1;
    }
  }

  if (out.depth.valid_count() == 0) {
    throw InvalidInput("scene: surface is not visible from the camera");
  }
  return out;
}

SceneSpec read_scene_spec(const std::filesystem::path& path) {
  const KeyValueFile kv = KeyValueFile::load(path);
  SceneSpec spec;

  const std::string kind = kv.text("kind");
  if (kind == "plane") {
    spec.kind = SceneKind::plane;
  } else if (kind == "sphere") {
    spec.kind = SceneKind::sphere;
  } else if (kind == "corner") {
    spec.kind = SceneKind::corner;
  } else {
    throw ParseError("kind", "kind: expected plane, sphere or corner (got '" + kind + "')");
  }

  spec.width = static_cast<int>(kv.number("width"));
  spec.height = static_cast<int>(kv.number("height"));
  spec.intrinsics = {kv.number("fx"), kv.number("fy"), kv.number("cx"), kv.number("cy")};

  switch (spec.kind) {
    case SceneKind::plane:
      spec.plane = plane_from(kv, "plane");
      break;
    case SceneKind::sphere: {
      const std::vector<double> c = kv.numbers("sphere_center");
      if (c.size() != 3) throw ParseError("sphere_center", "sphere_center: expected 3 numbers");
      spec.sphere_center = Point3(c[0], c[1], c[2]);
      spec.sphere_radius = kv.number("sphere_radius");
      break;
    }
    case SceneKind::corner: {
      spec.corner_a = plane_from(kv, "corner_a");
      spec.corner_b = plane_from(kv, "corner_b");
      const std::string join = kv.find("corner_join").value_or("nearest");
      if (join == "nearest") {
        spec.corner_join = CornerJoin::nearest;
      } else if (join == "farthest") {
        spec.corner_join = CornerJoin::farthest;
      } else {
        throw ParseError("corner_join", "corner_join: expected nearest or farthest");
      }
      break;
    }
  }
  return spec;
}

void NoiseModel::validate() const {
  if (!(sigma0 >= 0.0) || !std::isfinite(sigma0)) {
    throw InvalidInput("noise: sigma0 must be >= 0");
  }
  if (!(angle_gain >= 0.0) || !std::isfinite(angle_gain)) {
    throw InvalidInput("noise: angle_gain must be >= 0");
  }
  if (!(dropout_angle > 0.0 && dropout_angle <= std::numbers::pi / 2.0)) {
    throw InvalidInput("noise: dropout_angle must lie in (0, pi/2]");
  }
}

double NoiseModel::sigma(double theta) const noexcept {
  const double t = std::tan(theta);
  return sigma0 * std::min(1.0 + angle_gain * t * t, kMaxSigmaFactor);
}

NoisyFrame apply_noise(const DepthMap& depth, const NormalMap& gt_normals,
                       const PointCloud& cloud, const NoiseModel& model) {
  model.validate();
  if (gt_normals.size() != depth.size() || cloud.size() != depth.size() ||
      gt_normals.width != depth.width() || cloud.width != depth.width()) {
    throw InvalidInput("apply_noise: depth, normals and cloud shapes differ");
  }

  NoisyFrame out{depth, std::vector<double>(depth.size(), 0.0)};
  for (std::size_t i = 0; i < depth.size(); ++i) {
    if (!depth.valid(i)) continue;

    double theta = 0.0;
    if (gt_normals.valid[i] && cloud.valid[i]) {
      const double c = incidence_cosine(gt_normals.normals[i], viewing_direction(cloud.points[i]));
      theta = std::acos(c);
    }
    if (theta > model.dropout_angle) {
      out.depth.invalidate(i);
      continue;
    }

    KeyedStream stream(model.seed, i);
    const double clean = depth.value(i);
    const double noisy = clean + model.sigma(theta) * stream.normal();
    if (!(noisy > 0.0) || !std::isfinite(noisy)) {
      out.depth.invalidate(i);
      continue;
    }
    out.depth.set(i, noisy);
    out.error[i] = std::abs(noisy - clean);
  }
  return out;
}

}  // namespace gasd
