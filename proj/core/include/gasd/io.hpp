#pragma once

#include "gasd/geometry.hpp"
#include "gasd/normals.hpp"
#include "gasd/reliability.hpp"
#include "gasd/sampler.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gasd {

/// 16-bit integer depth: stored value = round(depth * scale).
struct DepthEncoding {
  double scale = 1000.0;

  double max_depth() const noexcept { return 65535.0 / scale; }
};

/// Single-channel 16-bit PNG; 0 is a hole. Throws FormatError naming the
/// offending property for anything else.
DepthMap read_depth_png(const std::filesystem::path& path, const DepthEncoding& encoding = {});

/// Round half away from zero; invalid pixels store 0. Throws RangeError for
/// a depth above encoding.max_depth() or one that would quantize to 0.
void write_depth_png(const DepthMap& depth, const std::filesystem::path& path,
                     const DepthEncoding& encoding = {});

/// 32-bit little-endian float image: 8-byte magic, uint32 width, uint32
/// height, then width*height floats row-major.
void write_float_image(const std::filesystem::path& path, int width, int height,
                       std::span<const double> values);
std::vector<float> read_float_image(const std::filesystem::path& path, int& width, int& height);

/// Lossless depth exchange through the float image format; 0 is a hole.
void write_depth_float(const DepthMap& depth, const std::filesystem::path& path);
DepthMap read_depth_float(const std::filesystem::path& path);

/// Dispatches on extension: `.png` is 16-bit integer, anything else float.
DepthMap read_depth(const std::filesystem::path& path, const DepthEncoding& encoding = {});
void write_depth(const DepthMap& depth, const std::filesystem::path& path,
                 const DepthEncoding& encoding = {});

/// Plain text, one `key value` (or `key = value`) per line, `#` comments.
class KeyValueFile {
 public:
  static KeyValueFile parse(std::istream& in);
  static KeyValueFile load(const std::filesystem::path& path);

  bool contains(const std::string& key) const { return entries_.contains(key); }
  /// Throws ParseError naming the key when it is missing or not a number.
  double number(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;
  /// Whitespace- or comma-separated numbers.
  std::vector<double> numbers(const std::string& key) const;
  std::string text(const std::string& key) const;
  std::optional<std::string> find(const std::string& key) const;

 private:
  std::map<std::string, std::string> entries_;
};

/// Keys fx, fy, cx, cy. Values are not validated here.
CameraIntrinsics read_intrinsics(const std::filesystem::path& path);
void write_intrinsics(const CameraIntrinsics& intrinsics, const std::filesystem::path& path);

/// 8-bit grayscale, round(255 r), invalid pixels 0.
void write_reliability_png(const ReliabilityMap& reliability, const std::filesystem::path& path);
void write_reliability_float(const ReliabilityMap& reliability,
                             const std::filesystem::path& path);

/// Record stream: per pixel one valid byte, then nx, ny, nz, kappa as
/// little-endian float32, row-major, no header.
void write_normal_map(const NormalMap& normals, const std::filesystem::path& path);
NormalMap read_normal_map(const std::filesystem::path& path, int width, int height);

/// RGB PNG with each channel (n + 1) / 2; invalid pixels black.
void write_normal_rgb_png(const NormalMap& normals, const std::filesystem::path& path);
/// 8-bit grayscale of kappa scaled by 3 (kappa = 1/3 -> 255).
void write_curvature_png(const NormalMap& normals, const std::filesystem::path& path);

/// One `u v depth_m` line per sample, depth with 6 significant digits.
void write_sample_list(std::ostream& out, const SampleSet& samples, int width);
void write_sample_list(const SampleSet& samples, int width, const std::filesystem::path& path);

}  // namespace gasd
