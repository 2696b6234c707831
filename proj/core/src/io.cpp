#include "gasd/io.hpp"

#include "gasd/error.hpp"
#include "gasd/numeric.hpp"
#include "png_codec.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

namespace gasd {

namespace {

constexpr std::array<char, 8> kFloatMagic{'G', 'A', 'S', 'D', 'F', 'L', 'T', '1'};

static_assert(std::numeric_limits<float>::is_iec559);

void put_u32(std::ostream& out, std::uint32_t x) {
  const char bytes[4] = {static_cast<char>(x & 0xff), static_cast<char>((x >> 8) & 0xff),
                         static_cast<char>((x >> 16) & 0xff), static_cast<char>(x >> 24)};
  out.write(bytes, 4);
}

void put_f32(std::ostream& out, float f) { put_u32(out, std::bit_cast<std::uint32_t>(f)); }

std::uint32_t get_u32(std::istream& in, const std::filesystem::path& path) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) {
    throw FormatError(path.string() + ": truncated file");
  }
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

float get_f32(std::istream& in, const std::filesystem::path& path) {
  return std::bit_cast<float>(get_u32(in, path));
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError(path.string() + ": cannot open for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path.string() + ": cannot open for reading");
  return in;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw FormatError(path.string() + ": write failed");
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::optional<double> to_number(std::string_view s) {
  double x = 0.0;
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, x);
  if (ec != std::errc() || ptr != end || !std::isfinite(x)) return std::nullopt;
  return x;
}

void write_gray8(const std::filesystem::path& path, int width, int height,
                 const std::vector<std::uint16_t>& samples) {
  detail::PngImage img{width, height, 8, 1, samples};
  detail::write_png(path, img);
}

}  // namespace

DepthMap read_depth_png(const std::filesystem::path& path, const DepthEncoding& encoding) {
  if (!(encoding.scale > 0.0)) throw InvalidInput("depth encoding: scale must be positive");
  const detail::PngImage img = detail::read_png(path);
  if (img.channels != 1) {
    throw FormatError(path.string() + ": depth PNG must have 1 channel, found " +
                      std::to_string(img.channels));
  }
  if (img.bit_depth != 16) {
    throw FormatError(path.string() + ": depth PNG must be 16-bit, found " +
                      std::to_string(img.bit_depth) + "-bit");
  }
  DepthMap out(img.width, img.height);
  for (std::size_t i = 0; i < img.samples.size(); ++i) {
    if (img.samples[i] != 0) out.set(i, img.samples[i] / encoding.scale);
  }
  return out;
}

void write_depth_png(const DepthMap& depth, const std::filesystem::path& path,
                     const DepthEncoding& encoding) {
  if (!(encoding.scale > 0.0)) throw InvalidInput("depth encoding: scale must be positive");
  detail::PngImage img{depth.width(), depth.height(), 16, 1,
                       std::vector<std::uint16_t>(depth.size(), 0)};
  for (std::size_t i = 0; i < depth.size(); ++i) {
    if (!depth.valid(i)) continue;
    const double q = round_half_away(depth.value(i) * encoding.scale);
    if (q > 65535.0) {
      throw RangeError(path.string() + ": depth " + std::to_string(depth.value(i)) +
                       " m exceeds the encodable maximum " +
                       std::to_string(encoding.max_depth()) + " m");
    }
    if (q < 1.0) {
      throw RangeError(path.string() + ": depth " + std::to_string(depth.value(i)) +
                       " m quantizes to 0 and would read back as a hole");
    }
    img.samples[i] = static_cast<std::uint16_t>(q);
  }
  detail::write_png(path, img);
}

void write_float_image(const std::filesystem::path& path, int width, int height,
                       std::span<const double> values) {
  if (width < 0 || height < 0 ||
      values.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw InvalidInput(path.string() + ": float image size mismatch");
  }
  std::ofstream out = open_out(path);
  out.write(kFloatMagic.data(), kFloatMagic.size());
  put_u32(out, static_cast<std::uint32_t>(width));
  put_u32(out, static_cast<std::uint32_t>(height));
  for (const double v : values) put_f32(out, static_cast<float>(v));
  finish(out, path);
}

std::vector<float> read_float_image(const std::filesystem::path& path, int& width,
                                    int& height) {
  std::ifstream in = open_in(path);
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kFloatMagic) {
    throw FormatError(path.string() + ": bad magic, expected GASDFLT1 float image");
  }
  const std::uint32_t w = get_u32(in, path);
  const std::uint32_t h = get_u32(in, path);
  if (w > (1u << 16) || h > (1u << 16)) {
    throw FormatError(path.string() + ": implausible image size " + std::to_string(w) + "x" +
                      std::to_string(h));
  }
  std::vector<float> values(static_cast<std::size_t>(w) * h);
  for (float& v : values) v = get_f32(in, path);
  if (in.peek() != std::char_traits<char>::eof()) {
    throw FormatError(path.string() + ": trailing bytes after float image payload");
  }
  width = static_cast<int>(w);
  height = static_cast<int>(h);
  return values;
}

void write_depth_float(const DepthMap& depth, const std::filesystem::path& path) {
  write_float_image(path, depth.width(), depth.height(), depth.values());
}

DepthMap read_depth_float(const std::filesystem::path& path) {
  int w = 0;
  int h = 0;
  const std::vector<float> values = read_float_image(path, w, h);
  DepthMap out(w, h);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]) || values[i] < 0.0f) {
      throw FormatError(path.string() + ": depth value at index " + std::to_string(i) +
                        " is negative or non-finite");
    }
    out.set(i, values[i]);
  }
  return out;
}

DepthMap read_depth(const std::filesystem::path& path, const DepthEncoding& encoding) {
  return path.extension() == ".png" ? read_depth_png(path, encoding) : read_depth_float(path);
}

void write_depth(const DepthMap& depth, const std::filesystem::path& path,
                 const DepthEncoding& encoding) {
  if (path.extension() == ".png") {
    write_depth_png(depth, path, encoding);
  } else {
    write_depth_float(depth, path);
  }
}

KeyValueFile KeyValueFile::parse(std::istream& in) {
  KeyValueFile kv;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto sep = body.find_first_of(" \t=:");
    std::string key = body.substr(0, sep);
    std::string value;
    if (sep != std::string::npos) {
      value = trim(body.substr(sep));
      if (!value.empty() && (value.front() == '=' || value.front() == ':')) {
        value = trim(value.substr(1));
      }
    }
    if (kv.entries_.contains(key)) {
      throw ParseError(key, key + ": duplicate key");
    }
    kv.entries_.emplace(std::move(key), std::move(value));
  }
  return kv;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError(path.string() + ": cannot open for reading");
  return parse(in);
}

std::optional<std::string> KeyValueFile::find(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::string KeyValueFile::text(const std::string& key) const {
  auto value = find(key);
  if (!value) throw ParseError(key, key + ": missing key");
  return *value;
}

double KeyValueFile::number(const std::string& key) const {
  const std::string value = text(key);
  const auto x = to_number(value);
  if (!x) throw ParseError(key, key + ": not a number ('" + value + "')");
  return *x;
}

double KeyValueFile::number_or(const std::string& key, double fallback) const {
  return contains(key) ? number(key) : fallback;
}

std::vector<double> KeyValueFile::numbers(const std::string& key) const {
  std::string value = text(key);
  std::replace(value.begin(), value.end(), ',', ' ');
  std::istringstream in(value);
  std::vector<double> out;
  std::string token;
  while (in >> token) {
    const auto x = to_number(token);
    if (!x) throw ParseError(key, key + ": not a number ('" + token + "')");
    out.push_back(*x);
  }
  return out;
}

CameraIntrinsics read_intrinsics(const std::filesystem::path& path) {
  const KeyValueFile kv = KeyValueFile::load(path);
  return {kv.number("fx"), kv.number("fy"), kv.number("cx"), kv.number("cy")};
}

void write_intrinsics(const CameraIntrinsics& intrinsics, const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  char buf[160];
  std::snprintf(buf, sizeof buf, "fx %.17g\nfy %.17g\ncx %.17g\ncy %.17g\n", intrinsics.fx,
                intrinsics.fy, intrinsics.cx, intrinsics.cy);
  out << buf;
  finish(out, path);
}

void write_reliability_png(const ReliabilityMap& reliability,
                           const std::filesystem::path& path) {
  std::vector<std::uint16_t> samples(reliability.size(), 0);
  for (std::size_t i = 0; i < reliability.size(); ++i) {
    if (!reliability.valid[i]) continue;
    const double r = std::clamp(reliability.scores[i], 0.0, 1.0);
    samples[i] = static_cast<std::uint16_t>(round_half_away(255.0 * r));
  }
  write_gray8(path, reliability.width, reliability.height, samples);
}

void write_reliability_float(const ReliabilityMap& reliability,
                             const std::filesystem::path& path) {
  write_float_image(path, reliability.width, reliability.height, reliability.scores);
}

void write_normal_map(const NormalMap& normals, const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  for (std::size_t i = 0; i < normals.size(); ++i) {
    const bool valid = normals.valid[i] != 0;
    out.put(valid ? 1 : 0);
    const Eigen::Vector3d n = valid ? normals.normals[i] : Eigen::Vector3d::Zero();
    put_f32(out, static_cast<float>(n.x()));
    put_f32(out, static_cast<float>(n.y()));
    put_f32(out, static_cast<float>(n.z()));
    put_f32(out, static_cast<float>(valid ? normals.curvature[i] : 0.0));
  }
  finish(out, path);
}

NormalMap read_normal_map(const std::filesystem::path& path, int width, int height) {
  constexpr std::uintmax_t kRecord = 17;
  const std::uintmax_t expected =
      kRecord * static_cast<std::uintmax_t>(width) * static_cast<std::uintmax_t>(height);
  if (std::filesystem::file_size(path) != expected) {
    throw FormatError(path.string() + ": expected " + std::to_string(expected) +
                      " bytes for a " + std::to_string(width) + "x" + std::to_string(height) +
                      " normal map");
  }
  std::ifstream in = open_in(path);
  NormalMap out = NormalMap::invalid(width, height);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const int flag = in.get();
    if (flag != 0 && flag != 1) {
      throw FormatError(path.string() + ": bad valid flag at record " + std::to_string(i));
    }
    const float nx = get_f32(in, path);
    const float ny = get_f32(in, path);
    const float nz = get_f32(in, path);
    const float kappa = get_f32(in, path);
    out.valid[i] = static_cast<std::uint8_t>(flag);
    out.normals[i] = Eigen::Vector3d(nx, ny, nz);
    out.curvature[i] = kappa;
  }
  return out;
}

void write_normal_rgb_png(const NormalMap& normals, const std::filesystem::path& path) {
  detail::PngImage img{normals.width, normals.height, 8, 3,
                       std::vector<std::uint16_t>(3 * normals.size(), 0)};
  for (std::size_t i = 0; i < normals.size(); ++i) {
    if (!normals.valid[i]) continue;
    for (int c = 0; c < 3; ++c) {
      const double x = std::clamp((normals.normals[i][c] + 1.0) / 2.0, 0.0, 1.0);
      img.samples[3 * i + c] = static_cast<std::uint16_t>(round_half_away(255.0 * x));
    }
  }
  detail::write_png(path, img);
}

void write_curvature_png(const NormalMap& normals, const std::filesystem::path& path) {
  std::vector<std::uint16_t> samples(normals.size(), 0);
  for (std::size_t i = 0; i < normals.size(); ++i) {
    if (!normals.valid[i]) continue;
    const double x = std::clamp(3.0 * normals.curvature[i], 0.0, 1.0);
    samples[i] = static_cast<std::uint16_t>(round_half_away(255.0 * x));
  }
  write_gray8(path, normals.width, normals.height, samples);
}

void write_sample_list(std::ostream& out, const SampleSet& samples, int width) {
  if (width <= 0) throw InvalidInput("write_sample_list: width must be positive");
  const auto w = static_cast<std::size_t>(width);
  char buf[96];
  for (std::size_t j = 0; j < samples.size(); ++j) {
    const std::size_t i = samples.indices[j];
    std::snprintf(buf, sizeof buf, "%zu %zu %.6g\n", i % w, i / w, samples.depths[j]);
    out << buf;
  }
}

void write_sample_list(const SampleSet& samples, int width, const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  write_sample_list(out, samples, width);
  finish(out, path);
}

}  // namespace gasd
