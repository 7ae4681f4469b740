#pragma once

// Plane geometry for both worlds: the Euclidean plane and the unit Poincare
// disk. Lines and circles share one type so that reflection code has a single
// entry point; Motions cover Moebius and anti-Moebius maps.

#include <array>
#include <complex>
#include <cstddef>
#include <variant>
#include <vector>

namespace hyperbolize {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Real inner product of two plane vectors.
inline double dot(Complex u, Complex v) { return u.real() * v.real() + u.imag() * v.imag(); }

struct Line {
  Complex anchor;
  Complex unit_normal;
};

struct Circle {
  Complex center;
  double radius;
};

/// A line or a circle. Circles with radius above kMaxRadius collapse to lines.
class GenCircle {
 public:
  static constexpr double kMaxRadius = 1e8;

  static GenCircle line(Complex anchor, Complex normal);
  static GenCircle circle(Complex center, double radius);
  /// Unique generalized circle through three distinct points.
  static GenCircle through(Complex a, Complex b, Complex c);

  bool is_line() const { return std::holds_alternative<Line>(shape_); }
  const Line& as_line() const { return std::get<Line>(shape_); }
  const Circle& as_circle() const { return std::get<Circle>(shape_); }

  /// Signed offset of z from the carrier: dot(z - anchor, normal) for lines,
  /// |z - center| - radius for circles.
  double offset(Complex z) const;
  double distance(Complex z) const;

  /// Unit tangent of the carrier at z (z assumed on the carrier), pointing
  /// along the minor arc toward `toward`.
  Complex tangent_toward(Complex z, Complex toward) const;

 private:
  explicit GenCircle(std::variant<Line, Circle> s) : shape_(s) {}
  std::variant<Line, Circle> shape_;
};

/// Reflection in a line or inversion in a circle. Throws InversionPole at the center.
Complex invert(const GenCircle& c, Complex z);

/// z -> (a w + b) / (c w + d) with w = z or conj(z).
struct Motion {
  Complex a{1.0}, b{0.0}, c{0.0}, d{1.0};
  bool conjugating = false;

  static Motion identity() { return {}; }
  /// The (anti-holomorphic) reflection fixing a carrier pointwise.
  static Motion reflection(const GenCircle& carrier);
  /// Disk automorphism moving `point` to the origin with positive derivative there.
  static Motion disk_translation(Complex point);
  static Motion rotation(double angle);

  Complex operator()(Complex z) const;
  Complex determinant() const { return a * d - b * c; }
  /// True when c == 0, i.e. the motion is an affine map of the plane.
  bool is_affine(double tol = 1e-12) const;
};

Complex apply(const Motion& m, Complex z);
/// outer after inner.
Motion compose(const Motion& outer, const Motion& inner);
Motion inverse(const Motion& m);
Motion normalized(Motion m);

Motion mobius_from_three_points(const std::array<Complex, 3>& src, const std::array<Complex, 3>& dst);

Complex cross_ratio(Complex z1, Complex z2, Complex z3, Complex z4);

double hyperbolic_distance(Complex z, Complex w);

enum class GeometryKind { Euclidean, Hyperbolic };

/// A fundamental cell: vertices counterclockwise, edge i joins vertex i to
/// vertex i+1, and the angle at vertex i is pi / corner_orders[i].
struct CellSpec {
  std::vector<Complex> vertices;
  std::vector<GenCircle> edges;
  std::vector<int> corner_orders;
  GeometryKind kind = GeometryKind::Euclidean;
  // +1 / -1 per edge so that side(k, z) > 0 on the interior side.
  std::vector<double> interior_sign;

  std::size_t size() const { return vertices.size(); }
  double side(std::size_t edge, Complex z) const { return interior_sign[edge] * edges[edge].offset(z); }
};

/// Builds a cell and fixes the interior orientation of every edge.
CellSpec make_cell(std::vector<Complex> vertices, std::vector<GenCircle> edges, std::vector<int> corner_orders,
                   GeometryKind kind);

/// Checks every CellSpec invariant; throws InvalidArgument with the first violation.
void validate(const CellSpec& cell);

/// Interior angle at vertex k measured from the two edge tangents.
double interior_angle(const CellSpec& cell, std::size_t k);

/// Point on edge k at parameter s in [0, 1] (arc-length proportional on arcs).
Complex edge_point(const CellSpec& cell, std::size_t k, double s);

/// Closed containment with slack `tol` (tol < 0 demands strict interior).
bool contains(const CellSpec& cell, Complex z, double tol = 1e-12);

/// Largest Euclidean distance between two vertices.
double euclidean_diameter(const CellSpec& cell);

/// Axis-aligned box of the cell including arc bulges.
struct Box {
  double xmin, xmax, ymin, ymax;
};
Box bounding_box(const CellSpec& cell);

CellSpec euclidean_triangle(int p, int q, int r);
CellSpec euclidean_rectangle(double width, double height);
CellSpec hyperbolic_triangle(int p, int q, int r, const Motion& placement = Motion::identity());
CellSpec hyperbolic_quadrilateral(const std::array<int, 4>& orders, double t);

/// Geodesic of the Poincare disk through two interior points.
GenCircle geodesic_through(Complex v1, Complex v2);

/// Moves every vertex of a hyperbolic cell by a disk automorphism.
CellSpec transformed(const CellSpec& cell, const Motion& m);

}  // namespace hyperbolize
