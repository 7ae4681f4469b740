#include "core/png_io.hpp"

#include <png.h>

#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <memory>

#include "core/error.hpp"

namespace hyperbolize {

float srgb_to_linear(float v) {
  return v <= 0.04045f ? v / 12.92f : std::pow((v + 0.055f) / 1.055f, 2.4f);
}

float linear_to_srgb(float v) {
  if (v <= 0.0f) return 0.0f;
  if (v >= 1.0f) return 1.0f;
  return v <= 0.0031308f ? 12.92f * v : 1.055f * std::pow(v, 1.0f / 2.4f) - 0.055f;
}

RasterImage read_png(const std::string& path) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&img, path.c_str()))
    throw Error(ErrorCode::Io, "cannot read PNG '" + path + "': " + img.message);
  if (img.width == 0 || img.height == 0 || img.width > 32768 || img.height > 32768) {
    png_image_free(&img);
    throw Error(ErrorCode::Format, "unsupported PNG size in '" + path + "'");
  }
  // Decoded as 8-bit sRGB and linearized here; libpng's own linear output
  // uses a plain 2.2 power rather than the sRGB curve.
  img.format = PNG_FORMAT_RGB;
  const png_color black{0, 0, 0};
  std::vector<png_byte> buf(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, &black, buf.data(), 0, nullptr)) {
    const std::string msg = img.message;
    png_image_free(&img);
    throw Error(ErrorCode::Format, "cannot decode PNG '" + path + "': " + msg);
  }
  RasterImage out;
  out.width = static_cast<int>(img.width);
  out.height = static_cast<int>(img.height);
  out.rgb.resize(buf.size());
  float lut[256];
  for (int k = 0; k < 256; ++k) lut[k] = srgb_to_linear(k / 255.0f);
  for (std::size_t i = 0; i < buf.size(); ++i) out.rgb[i] = lut[buf[i]];
  return out;
}

namespace {

// Kept free of C++ objects so that longjmp cannot skip destructors.
bool write_png_raw(FILE* fp, int width, int height, const std::uint8_t* rgb8, png_text* chunks, int n_chunks) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, width, height, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_set_sRGB_gAMA_and_cHRM(png, info, PNG_sRGB_INTENT_PERCEPTUAL);
  if (n_chunks > 0) png_set_text(png, info, chunks, n_chunks);
  png_write_info(png, info);
  for (int y = 0; y < height; ++y) png_write_row(png, const_cast<png_bytep>(rgb8 + static_cast<std::size_t>(y) * width * 3));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

}  // namespace

void write_png(const std::string& path, int width, int height, const std::vector<std::uint8_t>& rgb8,
               const std::vector<std::pair<std::string, std::string>>& text) {
  if (width <= 0 || height <= 0 || rgb8.size() != static_cast<std::size_t>(width) * height * 3)
    throw Error(ErrorCode::InvalidArgument, "pixel buffer size mismatch");
  std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.c_str(), "wb"), &std::fclose);
  if (!fp) throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
  std::vector<png_text> chunks(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    chunks[i].compression = PNG_TEXT_COMPRESSION_NONE;
    chunks[i].key = const_cast<char*>(text[i].first.c_str());
    chunks[i].text = const_cast<char*>(text[i].second.c_str());
  }
  if (!write_png_raw(fp.get(), width, height, rgb8.data(), chunks.data(), static_cast<int>(chunks.size())))
    throw Error(ErrorCode::Io, "failed writing PNG '" + path + "'");
  if (std::fflush(fp.get()) != 0) throw Error(ErrorCode::Io, "failed flushing '" + path + "'");
}

}  // namespace hyperbolize
