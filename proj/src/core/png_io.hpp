#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace hyperbolize {

/// Linear-light RGB raster, row 0 at the top.
struct RasterImage {
  int width = 0, height = 0;
  std::vector<float> rgb;  // 3 floats per pixel

  const float* at(int x, int y) const { return &rgb[3 * (static_cast<std::size_t>(y) * width + x)]; }
};

float srgb_to_linear(float v);
float linear_to_srgb(float v);

/// Reads gray/RGB(A) PNG into linear RGB at 8-bit precision (alpha composited on black).
RasterImage read_png(const std::string& path);

/// Writes 8-bit sRGB with tEXt chunks.
void write_png(const std::string& path, int width, int height, const std::vector<std::uint8_t>& rgb8,
               const std::vector<std::pair<std::string, std::string>>& text);

}  // namespace hyperbolize
