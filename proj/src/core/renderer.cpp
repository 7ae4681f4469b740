#include "core/renderer.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "core/error.hpp"

namespace hyperbolize {

namespace {

constexpr int kFoldCap = 100000;

Rgb mix(Rgb a, Rgb b, float s) { return {a.r + s * (b.r - a.r), a.g + s * (b.g - a.g), a.b + s * (b.b - a.b)}; }

// Coordinates of z relative to the target cell: barycentric for triangles,
// (x / w, y / h) plus their complements for rectangles.
struct CellCoords {
  double c[4];
  double scale[4];  // plane distance per unit of c[k]
};

CellCoords cell_coords(const CellSpec& cell, Complex z) {
  CellCoords out{};
  if (cell.size() == 3) {
    const Complex a = cell.vertices[0], b = cell.vertices[1], c = cell.vertices[2];
    const Complex ab = b - a, ac = c - a, r = z - a;
    const double det = ab.real() * ac.imag() - ab.imag() * ac.real();
    const double l1 = (r.real() * ac.imag() - r.imag() * ac.real()) / det;
    const double l2 = (ab.real() * r.imag() - ab.imag() * r.real()) / det;
    out.c[0] = 1.0 - l1 - l2;
    out.c[1] = l1;
    out.c[2] = l2;
    out.c[3] = 0.0;
    for (int k = 0; k < 3; ++k) {
      // Altitude from vertex k.
      const Complex p = cell.vertices[(k + 1) % 3], q = cell.vertices[(k + 2) % 3];
      out.scale[k] = std::abs(det) / std::abs(q - p);
    }
    out.scale[3] = 0.0;
    return out;
  }
  const double w = std::abs(cell.vertices[1] - cell.vertices[0]);
  const double h = std::abs(cell.vertices[3] - cell.vertices[0]);
  const Complex r = z - cell.vertices[0];
  out.c[0] = r.real() / w;
  out.c[1] = r.imag() / h;
  out.c[2] = 1.0 - out.c[0];
  out.c[3] = 1.0 - out.c[1];
  out.scale[0] = out.scale[2] = w;
  out.scale[1] = out.scale[3] = h;
  return out;
}

const Rgb kOrange{0.85f, 0.40f, 0.05f};
const Rgb kPetrol{0.01f, 0.16f, 0.22f};
const Rgb kPaper{0.92f, 0.90f, 0.85f};
const Rgb kInk{0.02f, 0.02f, 0.05f};
const Rgb kCorner[4] = {{0.80f, 0.08f, 0.06f}, {0.05f, 0.45f, 0.12f}, {0.06f, 0.12f, 0.70f}, {0.75f, 0.62f, 0.04f}};

// Gaussian prefilter of a periodic pattern: detail narrower than the sample
// footprint fades to the mean colour.
float detail_gain(double footprint, double cell_scale) {
  const double q = footprint / (0.35 * cell_scale);
  return static_cast<float>(std::exp(-q * q));
}

Rgb bilinear_raster(const RasterImage& img, double x, double y, bool tile) {
  // x, y in pixel units with pixel k covering [k, k + 1).
  const double fx = x - 0.5, fy = y - 0.5;
  const double x0f = std::floor(fx), y0f = std::floor(fy);
  const float tx = static_cast<float>(fx - x0f), ty = static_cast<float>(fy - y0f);
  auto idx = [&](long long v, int n) {
    if (tile) {
      long long m = v % n;
      return static_cast<int>(m < 0 ? m + n : m);
    }
    return static_cast<int>(std::clamp<long long>(v, 0, n - 1));
  };
  const long long xi = static_cast<long long>(x0f), yi = static_cast<long long>(y0f);
  const int xa = idx(xi, img.width), xb = idx(xi + 1, img.width);
  const int ya = idx(yi, img.height), yb = idx(yi + 1, img.height);
  const float* p00 = img.at(xa, ya);
  const float* p10 = img.at(xb, ya);
  const float* p01 = img.at(xa, yb);
  const float* p11 = img.at(xb, yb);
  float c[3];
  for (int k = 0; k < 3; ++k) {
    const float top = p00[k] + tx * (p10[k] - p00[k]);
    const float bot = p01[k] + tx * (p11[k] - p01[k]);
    c[k] = top + ty * (bot - top);
  }
  return {c[0], c[1], c[2]};
}

}  // namespace

std::pair<double, double> AffineFrame::to_pixel(Complex w) const {
  const double det = e1.real() * e2.imag() - e1.imag() * e2.real();
  if (!(std::abs(det) > 1e-300)) throw Error(ErrorCode::InvalidArgument, "degenerate image frame");
  const Complex r = w - origin;
  const double u = (r.real() * e2.imag() - r.imag() * e2.real()) / det;
  const double v = (e1.real() * r.imag() - e1.imag() * r.real()) / det;
  return {u, v};
}

Rgb OrnamentSampler::sample(Complex w, double footprint) const {
  if (kind == OrnamentKind::Constant) return constant;
  w += shift;
  Complex z = w;
  if (kind != OrnamentKind::Raster || wrap == Wrap::Group) {
    Located loc;
    if (try_locate(g_e, w, kFoldCap, loc)) z = loc.z_in;
  }
  if (kind == OrnamentKind::Raster) {
    const auto [u, v] = frame.to_pixel(z);
    return bilinear_raster(*image, u, v, wrap == Wrap::Tile);
  }

  const CellSpec& cell = g_e.cell;
  const double diam = euclidean_diameter(cell);
  const CellCoords cc = cell_coords(cell, z);
  const float gain = detail_gain(footprint, diam);
  switch (kind) {
    case OrnamentKind::Checkerboard: {
      // Two-tone split from corner 0 across the cell; mirror images of the
      // cell show the split reversed, so neighbouring cells alternate.
      const double h = cell.size() == 3 ? (cc.c[1] - cc.c[2]) * 0.5 * diam : (cc.c[0] - cc.c[1]) * 0.5 * diam;
      const double width = std::sqrt(std::pow(0.06 * diam, 2) + footprint * footprint);
      const float s = static_cast<float>(0.5 + 0.5 * std::tanh(h / width));
      const Rgb mean = mix(kOrange, kPetrol, 0.5f);
      return mix(mean, mix(kOrange, kPetrol, s), gain);
    }
    case OrnamentKind::CoordinateGrid: {
      const int n = cell.size() == 3 ? 3 : 4;
      const double line = 0.006 * diam;
      const double eff = std::sqrt(line * line + footprint * footprint);
      double ink = 0.0;
      for (int k = 0; k < n; ++k) {
        const double f = cc.c[k] * 8.0;
        const double d = std::abs(f - std::round(f)) / 8.0 * cc.scale[k];
        ink = std::max(ink, (line / eff) * std::exp(-(d / eff) * (d / eff)));
      }
      // Mean ink density of the line pattern, for fully blurred samples.
      const double coverage = std::min(1.0, 2.0 * line * 8.0 * n / diam);
      const double v = gain * ink + (1.0 - gain) * coverage;
      return mix(kPaper, kInk, static_cast<float>(std::clamp(v, 0.0, 1.0)));
    }
    case OrnamentKind::CornerLabels: {
      Rgb out = kPaper;
      for (std::size_t k = 0; k < cell.size(); ++k) {
        const double d = std::abs(z - cell.vertices[k]) / (0.3 * diam);
        out = mix(out, kCorner[k], static_cast<float>(gain * std::exp(-d * d * d * d)));
      }
      return out;
    }
    default:
      return constant;
  }
}

OrnamentSampler synthesize_test_ornament(OrnamentKind kind, const ReflectionGroup& g_e) {
  if (kind == OrnamentKind::Raster) throw Error(ErrorCode::InvalidArgument, "raster ornaments need an image");
  OrnamentSampler s;
  s.kind = kind;
  s.g_e = g_e;
  return s;
}

OrnamentSampler constant_ornament(Rgb colour) {
  OrnamentSampler s;
  s.kind = OrnamentKind::Constant;
  s.constant = colour;
  return s;
}

OrnamentSampler raster_ornament(RasterImage image, const ReflectionGroup& g_e, Wrap wrap, const AffineFrame* frame) {
  if (image.width <= 0 || image.height <= 0) throw Error(ErrorCode::InvalidArgument, "empty ornament image");
  OrnamentSampler s;
  s.kind = OrnamentKind::Raster;
  s.g_e = g_e;
  s.wrap = wrap;
  if (frame) {
    s.frame = *frame;
  } else {
    const Box b = bounding_box(g_e.cell);
    s.frame.origin = {b.xmin, b.ymax};
    s.frame.e1 = {(b.xmax - b.xmin) / image.width, 0.0};
    s.frame.e2 = {0.0, -(b.ymax - b.ymin) / image.height};
  }
  (void)s.frame.to_pixel(0.0);  // rejects degenerate frames
  s.image = std::make_shared<const RasterImage>(std::move(image));
  return s;
}

OrnamentKind parse_ornament_kind(const std::string& name) {
  if (name == "checkerboard") return OrnamentKind::Checkerboard;
  if (name == "grid" || name == "coordinate_grid") return OrnamentKind::CoordinateGrid;
  if (name == "corners" || name == "corner_labels") return OrnamentKind::CornerLabels;
  throw Error(ErrorCode::InvalidArgument, "unknown ornament '" + name + "' (checkerboard, grid, corners)");
}

Rgb Image::at(int x, int y) const {
  const float* p = &rgb[3 * (static_cast<std::size_t>(y) * width + x)];
  return {p[0], p[1], p[2]};
}

Rgb Image::bilinear(double x, double y) const {
  const double fx = std::clamp(x - 0.5, 0.0, width - 1.0), fy = std::clamp(y - 0.5, 0.0, height - 1.0);
  const int x0 = std::min(static_cast<int>(fx), width - 2), y0 = std::min(static_cast<int>(fy), height - 2);
  const float tx = static_cast<float>(fx - x0), ty = static_cast<float>(fy - y0);
  const Rgb a = at(x0, y0), b = at(x0 + 1, y0), c = at(x0, y0 + 1), d = at(x0 + 1, y0 + 1);
  return mix(mix(a, b, tx), mix(c, d, tx), ty);
}

std::vector<std::uint8_t> Image::to_rgb8() const {
  std::vector<std::uint8_t> out(rgb.size());
  for (std::size_t i = 0; i < rgb.size(); ++i)
    out[i] = static_cast<std::uint8_t>(std::lround(std::clamp(rgb[i], 0.0f, 1.0f) * 255.0f));
  return out;
}

Complex pixel_to_disk(double x, double y, int resolution) {
  return {2.0 * x / resolution - 1.0, 1.0 - 2.0 * y / resolution};
}

std::pair<double, double> disk_to_pixel(Complex z, int resolution) {
  return {(z.real() + 1.0) * 0.5 * resolution, (1.0 - z.imag()) * 0.5 * resolution};
}

std::optional<Rgb> pullback(const SolverState& solved, const ReflectionGroup& g_h, const ReflectionGroup& g_e,
                            const OrnamentSampler& sampler, Complex z, int max_word_length, double footprint,
                            bool* capped) {
  if (capped) *capped = false;
  Located loc;
  if (!try_locate(g_h, z, max_word_length, loc)) {
    if (capped) *capped = true;
    return std::nullopt;
  }
  std::array<std::int32_t, 4> idx{};
  std::array<double, 4> w{};
  if (!try_interpolation_cell(solved, loc.z_in, idx, w)) return std::nullopt;
  const Complex p00 = solved.p[idx[0]], p10 = solved.p[idx[1]], p01 = solved.p[idx[2]], p11 = solved.p[idx[3]];
  const Complex v = w[0] * p00 + w[1] * p10 + w[2] * p01 + w[3] * p11;

  // Scale factor of the fold at z and of the solved map at the folded point.
  double fold_scale = 1.0;
  Complex q = z;
  for (std::uint8_t label : loc.word.labels) {
    const GenCircle& e = g_h.cell.edges[label];
    if (!e.is_line()) fold_scale *= std::pow(e.as_circle().radius, 2) / std::norm(q - e.as_circle().center);
    q = invert(e, q);
  }
  const double l = w[1] + w[3], m = w[2] + w[3];
  const Complex dx = ((1.0 - m) * (p10 - p00) + m * (p11 - p01)) / solved.delta;
  const Complex dy = ((1.0 - l) * (p01 - p00) + l * (p11 - p10)) / solved.delta;
  const double psi_scale = std::sqrt(0.5 * (std::norm(dx) + std::norm(dy)));

  // Undo the fold with the matching Euclidean reflections, last one first.
  Complex u = v;
  for (auto it = loc.word.labels.rbegin(); it != loc.word.labels.rend(); ++it) u = invert(g_e.cell.edges[*it], u);
  return sampler.sample(u, footprint * fold_scale * psi_scale);
}

Image render(const SolverState& solved, const ReflectionGroup& g_h, const ReflectionGroup& g_e,
             const OrnamentSampler& sampler, const RenderConfig& cfg, RenderStats* stats) {
  if (!solved.converged && !cfg.force)
    throw Error(ErrorCode::NotConverged, "map not converged; rendering refused without force");
  if (cfg.resolution < 16 || cfg.resolution > 16384)
    throw Error(ErrorCode::InvalidArgument, "resolution must lie in [16, 16384]");
  if (cfg.supersampling != 1 && cfg.supersampling != 2 && cfg.supersampling != 4)
    throw Error(ErrorCode::InvalidArgument, "supersampling must be 1, 2 or 4");
  if (cfg.max_word_length < 1) throw Error(ErrorCode::InvalidArgument, "word cap must be at least 1");
  if (!(cfg.disk_margin >= 0.0 && cfg.disk_margin < 0.5))
    throw Error(ErrorCode::InvalidArgument, "disk margin must lie in [0, 0.5)");

  const int res = cfg.resolution, ss = cfg.supersampling;
  const double radius = 1.0 - cfg.disk_margin;
  // Half the spacing of supersamples, in disk units.
  const double base_footprint = 1.0 / (res * ss);
  Image img;
  img.width = img.height = res;
  img.rgb.assign(static_cast<std::size_t>(res) * res * 3, 0.0f);
  std::size_t capped = 0, in_disk = 0;

  auto shade = [&](Complex z, std::size_t& n_capped, std::size_t& n_disk) -> Rgb {
    if (!(std::abs(z) < radius)) return cfg.background;
    ++n_disk;
    bool hit_cap = false;
    const auto c = pullback(solved, g_h, g_e, sampler, z, cfg.max_word_length, base_footprint, &hit_cap);
    n_capped += hit_cap;
    return c ? *c : cfg.background;
  };

#pragma omp parallel for schedule(dynamic, 4) reduction(+ : capped, in_disk)
  for (int y = 0; y < res; ++y) {
    for (int x = 0; x < res; ++x) {
      double acc[3] = {0.0, 0.0, 0.0};
      for (int sy = 0; sy < ss; ++sy) {
        for (int sx = 0; sx < ss; ++sx) {
          const Complex z = pixel_to_disk(x + (sx + 0.5) / ss, y + (sy + 0.5) / ss, res);
          const Rgb c = shade(z, capped, in_disk);
          acc[0] += c.r;
          acc[1] += c.g;
          acc[2] += c.b;
        }
      }
      float* out = &img.rgb[3 * (static_cast<std::size_t>(y) * res + x)];
      for (int k = 0; k < 3; ++k) out[k] = linear_to_srgb(static_cast<float>(acc[k] / (ss * ss)));
    }
  }
  if (stats) {
    stats->capped_samples = capped;
    stats->disk_samples = in_disk;
  }
  return img;
}

SymmetryCheck symmetry_check(const Image& image, const std::vector<Motion>& generators, std::size_t samples,
                             std::uint64_t seed, double disk_margin) {
  SymmetryCheck out;
  if (image.width < 2 || samples == 0) return out;
  const int res = image.width;
  const double limit = 1.0 - disk_margin - 2.0 * (2.0 / res);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  double total = 0.0;
  std::size_t compared = 0;
  auto diff = [&](Complex a, Complex b) {
    const auto [ax, ay] = disk_to_pixel(a, res);
    const auto [bx, by] = disk_to_pixel(b, res);
    const Rgb ca = image.bilinear(ax, ay), cb = image.bilinear(bx, by);
    return std::max({std::abs(ca.r - cb.r), std::abs(ca.g - cb.g), std::abs(ca.b - cb.b)});
  };
  while (out.probes < samples) {
    const Complex z{coord(rng), coord(rng)};
    if (!(std::abs(z) < limit)) continue;
    ++out.probes;
    for (const Motion& phi : generators) {
      Complex w;
      try {
        w = phi(z);
      } catch (const Error&) {
        continue;
      }
      if (!(std::abs(w) < limit)) continue;
      const double d = diff(z, w);
      out.max_mismatch = std::max(out.max_mismatch, d);
      total += d;
      ++compared;
    }
  }
  out.mean_mismatch = compared ? total / compared : 0.0;
  return out;
}

void write_image_png(const std::string& path, const Image& image,
                     const std::vector<std::pair<std::string, std::string>>& text) {
  write_png(path, image.width, image.height, image.to_rgb8(), text);
}

}  // namespace hyperbolize
