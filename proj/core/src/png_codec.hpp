#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace gasd::detail {

struct PngImage {
  int width = 0;
  int height = 0;
  int bit_depth = 0;  // 8 or 16
  int channels = 0;   // 1 or 3
  /// Row-major, channel-interleaved samples in native integers.
  std::vector<std::uint16_t> samples;
};

/// Throws FormatError with a diagnostic; palette, alpha and sub-byte images
/// are reported as such rather than converted.
PngImage read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const PngImage& image);

}  // namespace gasd::detail
