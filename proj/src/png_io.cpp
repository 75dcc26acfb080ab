#include "rcgan/png_io.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <memory>
#include <vector>

#include "rcgan/errors.hpp"

namespace rcgan {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void png_error_fn(png_structp, png_const_charp msg) {
  throw IoError(std::string("png: ") + msg);
}

void png_warn_fn(png_structp, png_const_charp) {}

}  // namespace

ImageTensor read_png(const std::filesystem::path& path) {
  FilePtr file(std::fopen(path.string().c_str(), "rb"));
  if (!file) throw IoError("cannot open PNG: " + path.string());

  png_byte sig[8];
  if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0)
    throw IoError("not a PNG file: " + path.string());

  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_fn, png_warn_fn);
  if (!png) throw IoError("png: read struct allocation failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("png: info struct allocation failed");
  }

  try {
    png_init_io(png, file.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    const png_uint_32 width = png_get_image_width(png, info);
    const png_uint_32 height = png_get_image_height(png, info);
    const png_byte color_type = png_get_color_type(png, info);
    const png_byte bit_depth = png_get_bit_depth(png, info);

    if (bit_depth == 16) png_set_strip_16(png);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color_type == PNG_COLOR_TYPE_RGB_ALPHA || color_type == PNG_COLOR_TYPE_GRAY_ALPHA ||
        png_get_valid(png, info, PNG_INFO_tRNS))
      png_set_strip_alpha(png);
    png_read_update_info(png, info);

    const int channels = png_get_channels(png, info);
    if (channels != 1 && channels != 3)
      throw IoError("png: unsupported channel count after normalization in " + path.string());

    const std::size_t row_bytes = png_get_rowbytes(png, info);
    std::vector<png_byte> pixels(row_bytes * height);
    std::vector<png_bytep> rows(height);
    for (png_uint_32 y = 0; y < height; ++y) rows[y] = pixels.data() + y * row_bytes;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    ImageTensor img;
    img.space = ImageSpace::Pixel;
    img.data = Tensor({channels, static_cast<int>(height), static_cast<int>(width)});
    for (png_uint_32 y = 0; y < height; ++y)
      for (png_uint_32 x = 0; x < width; ++x)
        for (int c = 0; c < channels; ++c)
          img.data.at(c, static_cast<int>(y), static_cast<int>(x)) =
              static_cast<double>(pixels[y * row_bytes + x * channels + c]);
    return img;
  } catch (...) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw;
  }
}

void write_png(const std::filesystem::path& path, const ImageTensor& img) {
  if (img.space != ImageSpace::Pixel)
    throw std::invalid_argument("write_png: image must be pixel space");
  const int channels = img.channels();
  if (channels != 1 && channels != 3)
    throw std::invalid_argument("write_png: expected 1 or 3 channels, got " +
                                std::to_string(channels));
  if (!img.data.all_finite()) throw NumericError("write_png: non-finite pixel value");

  FilePtr file(std::fopen(path.string().c_str(), "wb"));
  if (!file) throw IoError("cannot write PNG: " + path.string());

  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_fn, png_warn_fn);
  if (!png) throw IoError("png: write struct allocation failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("png: info struct allocation failed");
  }

  try {
    png_init_io(png, file.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width()),
                 static_cast<png_uint_32>(img.height()), 8,
                 channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    const int h = img.height(), w = img.width();
    std::vector<png_byte> row(static_cast<std::size_t>(w) * channels);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x)
        for (int c = 0; c < channels; ++c) {
          double v = std::lround(img.data.at(c, y, x));
          v = v < 0.0 ? 0.0 : (v > 255.0 ? 255.0 : v);
          row[static_cast<std::size_t>(x) * channels + c] = static_cast<png_byte>(v);
        }
      png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
  } catch (...) {
    png_destroy_write_struct(&png, &info);
    throw;
  }
}

}  // namespace rcgan
