#pragma once

// Pulls a Euclidean ornament back through the symmetric extension of the
// solved map onto the Poincare disk.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "core/png_io.hpp"
#include "core/solver.hpp"
#include "core/symmetry.hpp"

namespace hyperbolize {

struct Rgb {
  float r = 0.0f, g = 0.0f, b = 0.0f;
};

enum class OrnamentKind { Raster, Checkerboard, CoordinateGrid, CornerLabels, Constant };
enum class Wrap { Group, Tile };

/// Image pixel (u, v) lands at origin + u * e1 + v * e2 in the plane of T_E.
struct AffineFrame {
  Complex origin{0.0}, e1{1.0}, e2{0.0, 1.0};
  Complex to_plane(double u, double v) const { return origin + u * e1 + v * e2; }
  /// Throws InvalidArgument when e1, e2 are degenerate.
  std::pair<double, double> to_pixel(Complex w) const;
};

struct OrnamentSampler {
  OrnamentKind kind = OrnamentKind::Constant;
  std::shared_ptr<const RasterImage> image;
  AffineFrame frame;
  Wrap wrap = Wrap::Group;
  ReflectionGroup g_e;
  Complex shift{0.0};  // sampled at w + shift; nonzero only for controls
  Rgb constant{0.5f, 0.5f, 0.5f};

  /// Linear colour at w; `footprint` is the radius, in the plane of T_E, of
  /// the area one output sample covers (used for prefiltering).
  Rgb sample(Complex w, double footprint) const;
};

OrnamentSampler synthesize_test_ornament(OrnamentKind kind, const ReflectionGroup& g_e);
OrnamentSampler constant_ornament(Rgb colour);
/// Raster ornament; without an explicit frame the image spans the bounding box of T_E.
OrnamentSampler raster_ornament(RasterImage image, const ReflectionGroup& g_e, Wrap wrap,
                                const AffineFrame* frame = nullptr);
OrnamentKind parse_ornament_kind(const std::string& name);

struct RenderConfig {
  int resolution = 1024;
  int supersampling = 2;  // per axis: 1, 2 or 4
  int max_word_length = 200;
  Rgb background{1.0f, 1.0f, 1.0f};  // linear
  double disk_margin = 0.0;
  bool force = false;
};

/// sRGB-encoded float image, row 0 at the top, covering [-1, 1]^2.
struct Image {
  int width = 0, height = 0;
  std::vector<float> rgb;

  Rgb at(int x, int y) const;
  /// Bilinear between pixel centres at continuous pixel coordinates.
  Rgb bilinear(double x, double y) const;
  std::vector<std::uint8_t> to_rgb8() const;
};

Complex pixel_to_disk(double x, double y, int resolution);
std::pair<double, double> disk_to_pixel(Complex z, int resolution);

struct RenderStats {
  std::size_t capped_samples = 0;  // samples that hit the word cap
  std::size_t disk_samples = 0;
};

/// Colour of the pulled-back ornament at disk point z; `footprint` is the
/// sample radius at z. Empty when folding exceeds the word cap (flagged in
/// `capped`) or the folded point has no interpolation cell.
std::optional<Rgb> pullback(const SolverState& solved, const ReflectionGroup& g_h, const ReflectionGroup& g_e,
                            const OrnamentSampler& sampler, Complex z, int max_word_length, double footprint,
                            bool* capped = nullptr);

/// Refuses unconverged maps unless cfg.force.
Image render(const SolverState& solved, const ReflectionGroup& g_h, const ReflectionGroup& g_e,
             const OrnamentSampler& sampler, const RenderConfig& cfg, RenderStats* stats = nullptr);

struct SymmetryCheck {
  double max_mismatch = 0.0;
  double mean_mismatch = 0.0;
  std::size_t probes = 0;
};

/// Max per-channel colour difference between z and phi(z) over random disk
/// points and every generator phi, skipping points within two pixels of the
/// rendered rim.
SymmetryCheck symmetry_check(const Image& image, const std::vector<Motion>& generators, std::size_t samples,
                             std::uint64_t seed = 1, double disk_margin = 0.0);

void write_image_png(const std::string& path, const Image& image,
                     const std::vector<std::pair<std::string, std::string>>& text);

}  // namespace hyperbolize
