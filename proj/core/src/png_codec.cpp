#include "png_codec.hpp"

#include "gasd/error.hpp"

#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <memory>
#include <string>

namespace gasd::detail {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const noexcept { std::fclose(f); }
};
using File = std::unique_ptr<std::FILE, FileCloser>;

struct ErrorSink {
  char message[256] = {};
};

void on_error(png_structp png, png_const_charp msg) {
  auto* sink = static_cast<ErrorSink*>(png_get_error_ptr(png));
  std::snprintf(sink->message, sizeof sink->message, "%s", msg);
  png_longjmp(png, 1);
}

void on_warning(png_structp, png_const_charp) {}

const char* color_type_name(int type) {
  switch (type) {
    case PNG_COLOR_TYPE_GRAY:
      return "grayscale";
    case PNG_COLOR_TYPE_GRAY_ALPHA:
      return "grayscale+alpha";
    case PNG_COLOR_TYPE_RGB:
      return "RGB";
    case PNG_COLOR_TYPE_RGB_ALPHA:
      return "RGBA";
    case PNG_COLOR_TYPE_PALETTE:
      return "palette";
  }
  return "unknown";
}

// libpng reports errors by longjmp; nothing with a destructor may live in
// this frame between setjmp and the last libpng call.
bool decode(std::FILE* fp, PngImage& out, ErrorSink& sink, int& color_type) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &sink, on_error, on_warning);
  if (png == nullptr) return false;
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }

  png_init_io(png, fp);
  png_read_info(png, info);
  out.width = static_cast<int>(png_get_image_width(png, info));
  out.height = static_cast<int>(png_get_image_height(png, info));
  out.bit_depth = png_get_bit_depth(png, info);
  color_type = png_get_color_type(png, info);
  out.channels = png_get_channels(png, info);

  if ((out.bit_depth == 8 || out.bit_depth == 16) &&
      (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_RGB)) {
    const std::size_t row_samples =
        static_cast<std::size_t>(out.width) * static_cast<std::size_t>(out.channels);
    const std::size_t bytes_per_sample = out.bit_depth == 16 ? 2 : 1;
    out.samples.resize(row_samples * static_cast<std::size_t>(out.height));
    png_bytep row = static_cast<png_bytep>(png_malloc(png, row_samples * bytes_per_sample));
    for (int y = 0; y < out.height; ++y) {
      png_read_row(png, row, nullptr);
      std::uint16_t* dst = out.samples.data() + static_cast<std::size_t>(y) * row_samples;
      for (std::size_t x = 0; x < row_samples; ++x) {
        // PNG stores 16-bit samples big-endian.
        dst[x] = bytes_per_sample == 2
                     ? static_cast<std::uint16_t>((row[2 * x] << 8) | row[2 * x + 1])
                     : row[x];
      }
    }
    png_free(png, row);
    png_read_end(png, nullptr);
  }
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

bool encode(std::FILE* fp, const PngImage& image, ErrorSink& sink, png_bytep row) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &sink, on_error, on_warning);
  if (png == nullptr) return false;
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }

  png_init_io(png, fp);
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width),
               static_cast<png_uint_32>(image.height), image.bit_depth,
               image.channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  const std::size_t row_samples =
      static_cast<std::size_t>(image.width) * static_cast<std::size_t>(image.channels);
  for (int y = 0; y < image.height; ++y) {
    const std::uint16_t* src = image.samples.data() + static_cast<std::size_t>(y) * row_samples;
    for (std::size_t x = 0; x < row_samples; ++x) {
      if (image.bit_depth == 16) {
        row[2 * x] = static_cast<png_byte>(src[x] >> 8);
        row[2 * x + 1] = static_cast<png_byte>(src[x] & 0xff);
      } else {
        row[x] = static_cast<png_byte>(src[x]);
      }
    }
    png_write_row(png, row);
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

}  // namespace

PngImage read_png(const std::filesystem::path& path) {
  File fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw FormatError(path.string() + ": cannot open for reading");

  png_byte signature[8] = {};
  if (std::fread(signature, 1, 8, fp.get()) != 8 || png_sig_cmp(signature, 0, 8) != 0) {
    throw FormatError(path.string() + ": not a PNG file");
  }
  std::rewind(fp.get());

  PngImage out;
  ErrorSink sink;
  int color_type = 0;
  if (!decode(fp.get(), out, sink, color_type)) {
    throw FormatError(path.string() + ": PNG decode failed: " + sink.message);
  }
  if (color_type != PNG_COLOR_TYPE_GRAY && color_type != PNG_COLOR_TYPE_RGB) {
    throw FormatError(path.string() + ": unsupported color type " +
                      color_type_name(color_type) + " (" + std::to_string(out.channels) +
                      " channels)");
  }
  if (out.bit_depth != 8 && out.bit_depth != 16) {
    throw FormatError(path.string() + ": unsupported bit depth " +
                      std::to_string(out.bit_depth));
  }
  return out;
}

void write_png(const std::filesystem::path& path, const PngImage& image) {
  if ((image.bit_depth != 8 && image.bit_depth != 16) ||
      (image.channels != 1 && image.channels != 3) || image.width <= 0 || image.height <= 0 ||
      image.samples.size() != static_cast<std::size_t>(image.width) *
                                  static_cast<std::size_t>(image.height) *
                                  static_cast<std::size_t>(image.channels)) {
    throw InvalidInput(path.string() + ": malformed image buffer for PNG output");
  }
  File fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw FormatError(path.string() + ": cannot open for writing");

  std::vector<png_byte> row(static_cast<std::size_t>(image.width) *
                            static_cast<std::size_t>(image.channels) *
                            static_cast<std::size_t>(image.bit_depth / 8));
  ErrorSink sink;
  if (!encode(fp.get(), image, sink, row.data())) {
    throw FormatError(path.string() + ": PNG encode failed: " + sink.message);
  }
}

}  // namespace gasd::detail
