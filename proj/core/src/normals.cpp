#include "gasd/normals.hpp"

#include "gasd/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace gasd {

namespace {

using Mat3 = std::array<std::array<double, 3>, 3>;
using Vec3 = std::array<double, 3>;

constexpr int kN = 3;
constexpr double kSymmetryTolerance = 1e-9;
constexpr double kNegativeClamp = 1e-12;
constexpr double kCollinearRatio = 1e-6;
constexpr int kMaxQlIterations = 64;

// Householder reduction of the symmetric matrix held in `v` to tridiagonal
// form. On return `d` is the diagonal, `e` the subdiagonal (e[0] unused) and
// `v` the accumulated orthogonal transform. Adapted from the EISPACK tred2
// routine via its public-domain JAMA translation.
void tridiagonalize(Mat3& v, Vec3& d, Vec3& e) {
  for (int j = 0; j < kN; ++j) d[j] = v[kN - 1][j];

  for (int i = kN - 1; i > 0; --i) {
    double scale = 0.0;
    double h = 0.0;
    for (int k = 0; k < i; ++k) scale += std::abs(d[k]);

    if (scale == 0.0) {
      e[i] = d[i - 1];
      for (int j = 0; j < i; ++j) {
        d[j] = v[i - 1][j];
        v[i][j] = 0.0;
        v[j][i] = 0.0;
      }
    } else {
      for (int k = 0; k < i; ++k) {
        d[k] /= scale;
        h += d[k] * d[k];
      }
      double f = d[i - 1];
      double g = std::sqrt(h);
      if (f > 0) g = -g;
      e[i] = scale * g;
      h -= f * g;
      d[i - 1] = f - g;
      for (int j = 0; j < i; ++j) e[j] = 0.0;

      for (int j = 0; j < i; ++j) {
        f = d[j];
        v[j][i] = f;
        g = e[j] + v[j][j] * f;
        for (int k = j + 1; k <= i - 1; ++k) {
          g += v[k][j] * d[k];
          e[k] += v[k][j] * f;
        }
        e[j] = g;
      }
      f = 0.0;
      for (int j = 0; j < i; ++j) {
        e[j] /= h;
        f += e[j] * d[j];
      }
      const double hh = f / (h + h);
      for (int j = 0; j < i; ++j) e[j] -= hh * d[j];
      for (int j = 0; j < i; ++j) {
        f = d[j];
        g = e[j];
        for (int k = j; k <= i - 1; ++k) v[k][j] -= (f * e[k] + g * d[k]);
        d[j] = v[i - 1][j];
        v[i][j] = 0.0;
      }
    }
    d[i] = h;
  }

  for (int i = 0; i < kN - 1; ++i) {
    v[kN - 1][i] = v[i][i];
    v[i][i] = 1.0;
    const double h = d[i + 1];
    if (h != 0.0) {
      for (int k = 0; k <= i; ++k) d[k] = v[k][i + 1] / h;
      for (int j = 0; j <= i; ++j) {
        double g = 0.0;
        for (int k = 0; k <= i; ++k) g += v[k][i + 1] * v[k][j];
        for (int k = 0; k <= i; ++k) v[k][j] -= g * d[k];
      }
    }
    for (int k = 0; k <= i; ++k) v[k][i + 1] = 0.0;
  }
  for (int j = 0; j < kN; ++j) {
    d[j] = v[kN - 1][j];
    v[kN - 1][j] = 0.0;
  }
  v[kN - 1][kN - 1] = 1.0;
  e[0] = 0.0;
}

// Implicit QL with Wilkinson-style shifts on the tridiagonal (d, e),
// accumulating rotations into `v` (tql2).
void ql_implicit(Mat3& v, Vec3& d, Vec3& e) {
  for (int i = 1; i < kN; ++i) e[i - 1] = e[i];
  e[kN - 1] = 0.0;

  double f = 0.0;
  double tst1 = 0.0;
  constexpr double eps = std::numeric_limits<double>::epsilon();

  for (int l = 0; l < kN; ++l) {
    tst1 = std::max(tst1, std::abs(d[l]) + std::abs(e[l]));
    int m = l;
    while (m < kN - 1 && std::abs(e[m]) > eps * tst1) ++m;

    if (m > l) {
      int iter = 0;
      do {
        if (++iter > kMaxQlIterations) {
          throw InvalidInput("eigen_symmetric3: QL iteration did not converge");
        }
        double g = d[l];
        double p = (d[l + 1] - g) / (2.0 * e[l]);
        double r = std::hypot(p, 1.0);
        if (p < 0) r = -r;
        d[l] = e[l] / (p + r);
        d[l + 1] = e[l] * (p + r);
        const double dl1 = d[l + 1];
        double h = g - d[l];
        for (int i = l + 2; i < kN; ++i) d[i] -= h;
        f += h;

        p = d[m];
        double c = 1.0;
        double c2 = c;
        double c3 = c;
        const double el1 = e[l + 1];
        double s = 0.0;
        double s2 = 0.0;
        for (int i = m - 1; i >= l; --i) {
          c3 = c2;
          c2 = c;
          s2 = s;
          g = c * e[i];
          h = c * p;
          r = std::hypot(p, e[i]);
          e[i + 1] = s * r;
          s = e[i] / r;
          c = p / r;
          p = c * d[i] - s * g;
          d[i + 1] = h + s * (c * g + s * d[i]);
          for (int k = 0; k < kN; ++k) {
            h = v[k][i + 1];
            v[k][i + 1] = s * v[k][i] + c * h;
            v[k][i] = c * v[k][i] - s * h;
          }
        }
        p = -s * s2 * c3 * el1 * e[l] / dl1;
        e[l] = s * p;
        d[l] = c * p;
      } while (std::abs(e[l]) > eps * tst1);
    }
    d[l] += f;
    e[l] = 0.0;
  }
}

// v^T C v / v^T v in extended precision. Second order in the eigenvector
// error, so small eigenvalues of ill-conditioned matrices keep their
// relative accuracy.
double rayleigh_quotient(const Mat3& c, const Mat3& v, int col) {
  long double num = 0.0L;
  long double den = 0.0L;
  for (int i = 0; i < kN; ++i) {
    const long double vi = v[i][col];
    den += vi * vi;
    for (int j = 0; j < kN; ++j) {
      num += vi * static_cast<long double>(c[i][j]) * static_cast<long double>(v[j][col]);
    }
  }
  return static_cast<double>(num / den);
}

void gather_into(const PointCloud& cloud, int u, int v, const NeighborhoodConfig& config,
                 std::vector<Point3>& out) {
  out.clear();
  const std::size_t center_index = cloud.index(u, v);
  if (!cloud.valid[center_index]) return;

  const Point3& center = cloud.points[center_index];
  const double radius2 = config.radius * config.radius;
  const int half = config.window / 2;
  const int v0 = std::max(0, v - half);
  const int v1 = std::min(cloud.height - 1, v + half);
  const int u0 = std::max(0, u - half);
  const int u1 = std::min(cloud.width - 1, u + half);

  for (int row = v0; row <= v1; ++row) {
    for (int col = u0; col <= u1; ++col) {
      const std::size_t i = cloud.index(col, row);
      if (cloud.valid[i] && (cloud.points[i] - center).squaredNorm() <= radius2) {
        out.push_back(cloud.points[i]);
      }
    }
  }
}

}  // namespace

void NeighborhoodConfig::validate() const {
  if (window < 3 || window % 2 == 0) {
    throw InvalidInput("neighborhood: window must be odd and >= 3 (got " +
                       std::to_string(window) + ")");
  }
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw InvalidInput("neighborhood: radius must be positive");
  }
  if (min_points < 3) {
    throw InvalidInput("neighborhood: min_points must be >= 3 (got " +
                       std::to_string(min_points) + ")");
  }
}

NormalMap NormalMap::invalid(int width, int height) {
  NormalMap map;
  map.width = width;
  map.height = height;
  const auto n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  map.normals.assign(n, Eigen::Vector3d::Zero());
  map.curvature.assign(n, 0.0);
  map.valid.assign(n, 0);
  return map;
}

std::size_t NormalMap::valid_count() const noexcept {
  return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), std::uint8_t{1}));
}

std::vector<Point3> gather_neighborhood(const PointCloud& cloud, int u, int v,
                                        const NeighborhoodConfig& config) {
  if (u < 0 || v < 0 || u >= cloud.width || v >= cloud.height) {
    throw InvalidInput("gather_neighborhood: pixel outside the cloud");
  }
  std::vector<Point3> out;
  gather_into(cloud, u, v, config, out);
  return out;
}

MeanCovariance local_mean_and_covariance(std::span<const Point3> points) {
  if (points.empty()) {
    throw InvalidInput("local_mean_and_covariance: empty neighborhood");
  }
  const double inv_n = 1.0 / static_cast<double>(points.size());

  // Accumulate relative to the first point; the centroid is translation
  // equivariant and this keeps the sums small for far-away patches.
  const Point3& origin = points.front();
  Point3 offset_mean = Point3::Zero();
  for (const Point3& p : points) offset_mean += p - origin;
  offset_mean *= inv_n;

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const Point3& p : points) {
    const Point3 d = (p - origin) - offset_mean;
    cov.noalias() += d * d.transpose();
  }
  cov *= inv_n;
  // Exact symmetry regardless of accumulation rounding.
  cov = 0.5 * (cov + cov.transpose()).eval();
  return {origin + offset_mean, cov};
}

EigenDecomposition3 eigen_symmetric3(const Eigen::Matrix3d& c) {
  if (!c.allFinite()) {
    throw InvalidInput("eigen_symmetric3: non-finite matrix entry");
  }
  for (int i = 0; i < kN; ++i) {
    for (int j = i + 1; j < kN; ++j) {
      if (std::abs(c(i, j) - c(j, i)) > kSymmetryTolerance) {
        throw InvalidInput("eigen_symmetric3: matrix is not symmetric at (" + std::to_string(i) +
                           ", " + std::to_string(j) + ")");
      }
    }
  }

  Mat3 v{};
  for (int i = 0; i < kN; ++i) {
    for (int j = 0; j < kN; ++j) v[i][j] = 0.5 * (c(i, j) + c(j, i));
  }
  const Mat3 sym = v;
  Vec3 d{};
  Vec3 e{};
  tridiagonalize(v, d, e);
  ql_implicit(v, d, e);
  for (int col = 0; col < kN; ++col) d[col] = rayleigh_quotient(sym, v, col);

  std::array<int, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return d[a] < d[b]; });

  EigenDecomposition3 out;
  for (int col = 0; col < kN; ++col) {
    const int src = order[col];
    double lambda = d[src];
    if (lambda < 0.0 && lambda >= -kNegativeClamp) lambda = 0.0;
    out.values[col] = lambda;

    Eigen::Vector3d vec(v[0][src], v[1][src], v[2][src]);
    vec.normalize();
    int dominant = 0;
    for (int k = 1; k < kN; ++k) {
      if (std::abs(vec[k]) > std::abs(vec[dominant])) dominant = k;
    }
    if (vec[dominant] < 0.0) vec = -vec;
    out.vectors.col(col) = vec;
  }
  return out;
}

Eigen::Vector3d orient_to_camera(const Eigen::Vector3d& n, const Point3& p,
                                 bool* degenerate) noexcept {
  const bool at_origin = p.isZero(0.0);
  if (degenerate != nullptr) *degenerate = at_origin;
  if (at_origin) return n;
  return n.dot(p) < 0.0 ? n : Eigen::Vector3d(-n);
}

std::optional<SurfaceEstimate> estimate_normal(std::span<const Point3> points,
                                               const Point3& center,
                                               std::size_t min_points) {
  if (points.empty() || points.size() < min_points) return std::nullopt;

  const MeanCovariance stats = local_mean_and_covariance(points);
  const EigenDecomposition3 eig = eigen_symmetric3(stats.covariance);

  const double l1 = std::max(eig.values[0], 0.0);
  const double l2 = std::max(eig.values[1], 0.0);
  const double l3 = std::max(eig.values[2], 0.0);
  const double trace = l1 + l2 + l3;
  if (!(trace > 0.0)) return std::nullopt;
  if (l2 < kCollinearRatio * l3) return std::nullopt;

  SurfaceEstimate out;
  out.normal = orient_to_camera(eig.vectors.col(0).normalized(), center);
  out.curvature = std::clamp(l1 / trace, 0.0, 1.0 / 3.0);
  return out;
}

NormalMap estimate_normal_map(const PointCloud& cloud, const NeighborhoodConfig& config) {
  config.validate();
  NormalMap out = NormalMap::invalid(cloud.width, cloud.height);
  const auto min_points = static_cast<std::size_t>(config.min_points);

  std::vector<Point3> neighborhood;
  neighborhood.reserve(static_cast<std::size_t>(config.window) *
                       static_cast<std::size_t>(config.window));

  for (int v = 0; v < cloud.height; ++v) {
    for (int u = 0; u < cloud.width; ++u) {
      const std::size_t i = cloud.index(u, v);
      if (!cloud.valid[i]) continue;
      gather_into(cloud, u, v, config, neighborhood);
      const auto estimate = estimate_normal(neighborhood, cloud.points[i], min_points);
      if (!estimate) continue;
      out.normals[i] = estimate->normal;
      out.curvature[i] = estimate->curvature;
      out.valid[i] = 1;
    }
  }
  return out;
}

}  // namespace gasd
