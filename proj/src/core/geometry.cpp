#include "core/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "core/error.hpp"

namespace hyperbolize {

namespace {

constexpr Complex kI{0.0, 1.0};

bool nearly_same(Complex a, Complex b) {
  return std::abs(a - b) <= 1e-14 * std::max({1.0, std::abs(a), std::abs(b)});
}

// Radius in the unit disk of a point at hyperbolic distance acosh(cosh_len) from 0.
double disk_radius_from_cosh(double cosh_len) { return std::sqrt((cosh_len - 1.0) / (cosh_len + 1.0)); }

// cosh of the side joining the vertices with angles a and b, opposite angle c.
double cosh_side(double a, double b, double c) {
  return (std::cos(a) * std::cos(b) + std::cos(c)) / (std::sin(a) * std::sin(b));
}

GenCircle line_through(Complex p, Complex q) { return GenCircle::line(p, kI * (q - p)); }

}  // namespace

GenCircle GenCircle::line(Complex anchor, Complex normal) {
  const double n = std::abs(normal);
  if (!(n > 0.0) || !std::isfinite(n)) throw Error(ErrorCode::InvalidArgument, "line normal must be nonzero");
  return GenCircle(Line{anchor, normal / n});
}

GenCircle GenCircle::circle(Complex center, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw Error(ErrorCode::InvalidArgument, "circle radius must be positive");
  if (radius > kMaxRadius) {
    const double c = std::abs(center);
    const Complex dir = c > 0.0 ? center / c : Complex{1.0, 0.0};
    return line(center - radius * dir, dir);
  }
  return GenCircle(Circle{center, radius});
}

GenCircle GenCircle::through(Complex a, Complex b, Complex c) {
  if (nearly_same(a, b) || nearly_same(b, c) || nearly_same(a, c))
    throw Error(ErrorCode::DegenerateTriple, "degenerate triple: points must be distinct");
  const double scale = std::max({std::abs(a - b), std::abs(b - c), std::abs(a - c)});
  const double ax = a.real(), ay = a.imag(), bx = b.real(), by = b.imag(), cx = c.real(), cy = c.imag();
  const double d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by));
  auto collinear_line = [&] {
    // Anchor on the widest pair for the best-conditioned normal.
    const double ab = std::abs(a - b), bc = std::abs(b - c), ac = std::abs(a - c);
    if (ab >= bc && ab >= ac) return line_through(a, b);
    if (bc >= ac) return line_through(b, c);
    return line_through(a, c);
  };
  if (std::abs(d) <= 1e-14 * scale * scale) return collinear_line();
  const double a2 = ax * ax + ay * ay, b2 = bx * bx + by * by, c2 = cx * cx + cy * cy;
  const Complex center{(a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d,
                       (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d};
  const double r = std::abs(a - center);
  if (r > kMaxRadius) return collinear_line();
  return GenCircle(Circle{center, r});
}

double GenCircle::offset(Complex z) const {
  if (is_line()) {
    const auto& l = as_line();
    return dot(z - l.anchor, l.unit_normal);
  }
  const auto& c = as_circle();
  return std::abs(z - c.center) - c.radius;
}

double GenCircle::distance(Complex z) const { return std::abs(offset(z)); }

Complex GenCircle::tangent_toward(Complex z, Complex toward) const {
  Complex t;
  if (is_line()) {
    t = kI * as_line().unit_normal;
  } else {
    const Complex r = z - as_circle().center;
    t = kI * r / std::abs(r);
  }
  return dot(t, toward - z) >= 0.0 ? t : -t;
}

Complex invert(const GenCircle& c, Complex z) {
  if (c.is_line()) {
    const auto& l = c.as_line();
    return z - 2.0 * dot(z - l.anchor, l.unit_normal) * l.unit_normal;
  }
  const auto& circ = c.as_circle();
  const Complex r = z - circ.center;
  if (std::abs(r) <= 1e-14 * circ.radius) throw Error(ErrorCode::InversionPole, "inversion pole: point at circle center");
  return circ.center + circ.radius * circ.radius / std::conj(r);
}

Motion Motion::reflection(const GenCircle& carrier) {
  Motion m;
  m.conjugating = true;
  if (carrier.is_line()) {
    const auto& l = carrier.as_line();
    const Complex n2 = l.unit_normal * l.unit_normal;
    m.a = -n2;
    m.b = l.anchor + n2 * std::conj(l.anchor);
    m.c = 0.0;
    m.d = 1.0;
  } else {
    const auto& c = carrier.as_circle();
    m.a = c.center;
    m.b = c.radius * c.radius - std::norm(c.center);
    m.c = 1.0;
    m.d = -std::conj(c.center);
  }
  return normalized(m);
}

Motion Motion::disk_translation(Complex point) {
  if (!(std::abs(point) < 1.0)) throw Error(ErrorCode::InvalidArgument, "disk translation needs a point inside the unit disk");
  Motion m;
  m.a = 1.0;
  m.b = -point;
  m.c = -std::conj(point);
  m.d = 1.0;
  return normalized(m);
}

Motion Motion::rotation(double angle) {
  Motion m;
  m.a = std::polar(1.0, angle);
  return m;
}

Complex Motion::operator()(Complex z) const {
  const Complex w = conjugating ? std::conj(z) : z;
  const Complex num = a * w + b;
  const Complex den = c * w + d;
  if (std::abs(den) <= 1e-15 * (std::abs(c * w) + std::abs(d)))
    throw Error(ErrorCode::PointAtInfinity, "motion sends point to infinity");
  return num / den;
}

bool Motion::is_affine(double tol) const { return std::abs(c) <= tol * std::abs(d); }

Complex apply(const Motion& m, Complex z) { return m(z); }

Motion normalized(Motion m) {
  const double det = std::abs(m.determinant());
  if (!(det > 0.0) || !std::isfinite(det)) throw Error(ErrorCode::InvalidArgument, "singular motion");
  const double s = std::sqrt(det);
  m.a /= s;
  m.b /= s;
  m.c /= s;
  m.d /= s;
  return m;
}

Motion compose(const Motion& outer, const Motion& inner) {
  Complex ia = inner.a, ib = inner.b, ic = inner.c, id = inner.d;
  if (outer.conjugating) {
    ia = std::conj(ia);
    ib = std::conj(ib);
    ic = std::conj(ic);
    id = std::conj(id);
  }
  Motion m;
  m.a = outer.a * ia + outer.b * ic;
  m.b = outer.a * ib + outer.b * id;
  m.c = outer.c * ia + outer.d * ic;
  m.d = outer.c * ib + outer.d * id;
  m.conjugating = outer.conjugating != inner.conjugating;
  return normalized(m);
}

Motion inverse(const Motion& m) {
  Motion r;
  r.a = m.d;
  r.b = -m.b;
  r.c = -m.c;
  r.d = m.a;
  r.conjugating = m.conjugating;
  if (m.conjugating) {
    r.a = std::conj(r.a);
    r.b = std::conj(r.b);
    r.c = std::conj(r.c);
    r.d = std::conj(r.d);
  }
  return normalized(r);
}

namespace {

// Sends z1 -> 0, z2 -> 1, z3 -> infinity.
Motion to_zero_one_infinity(const std::array<Complex, 3>& z) {
  Motion m;
  m.a = z[1] - z[2];
  m.b = -z[0] * (z[1] - z[2]);
  m.c = z[1] - z[0];
  m.d = -z[2] * (z[1] - z[0]);
  return normalized(m);
}

void require_distinct(const std::array<Complex, 3>& z) {
  if (nearly_same(z[0], z[1]) || nearly_same(z[1], z[2]) || nearly_same(z[0], z[2]))
    throw Error(ErrorCode::DegenerateTriple, "degenerate triple: points must be distinct");
}

}  // namespace

Motion mobius_from_three_points(const std::array<Complex, 3>& src, const std::array<Complex, 3>& dst) {
  require_distinct(src);
  require_distinct(dst);
  return compose(inverse(to_zero_one_infinity(dst)), to_zero_one_infinity(src));
}

Complex cross_ratio(Complex z1, Complex z2, Complex z3, Complex z4) {
  const std::array<Complex, 4> z{z1, z2, z3, z4};
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (nearly_same(z[i], z[j])) throw Error(ErrorCode::DegenerateCrossRatio, "degenerate cross ratio: coincident points");
  return ((z1 - z3) * (z2 - z4)) / ((z1 - z4) * (z2 - z3));
}

double hyperbolic_distance(Complex z, Complex w) {
  return 2.0 * std::atanh(std::abs(z - w) / std::abs(1.0 - std::conj(z) * w));
}

CellSpec make_cell(std::vector<Complex> vertices, std::vector<GenCircle> edges, std::vector<int> corner_orders,
                   GeometryKind kind) {
  const std::size_t n = vertices.size();
  if ((n != 3 && n != 4) || edges.size() != n || corner_orders.size() != n)
    throw Error(ErrorCode::InvalidArgument, "a cell needs 3 or 4 vertices with matching edges and corner orders");
  CellSpec cell{std::move(vertices), std::move(edges), std::move(corner_orders), kind, {}};
  cell.interior_sign.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    // The vertex two steps ahead never lies on edge k of a convex cell.
    const double off = cell.edges[k].offset(cell.vertices[(k + 2) % n]);
    if (std::abs(off) < 1e-14) throw Error(ErrorCode::InvalidArgument, "degenerate cell: vertex on opposite edge");
    cell.interior_sign[k] = off > 0.0 ? 1.0 : -1.0;
  }
  return cell;
}

double interior_angle(const CellSpec& cell, std::size_t k) {
  const std::size_t n = cell.size();
  const Complex v = cell.vertices[k];
  const Complex next = cell.vertices[(k + 1) % n];
  const Complex prev = cell.vertices[(k + n - 1) % n];
  const Complex t1 = cell.edges[k].tangent_toward(v, next);
  const Complex t2 = cell.edges[(k + n - 1) % n].tangent_toward(v, prev);
  return std::atan2(std::abs(t1.real() * t2.imag() - t1.imag() * t2.real()), dot(t1, t2));
}

void validate(const CellSpec& cell) {
  const std::size_t n = cell.size();
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidArgument, "invalid cell: " + msg); };
  if ((n != 3 && n != 4) || cell.edges.size() != n || cell.corner_orders.size() != n || cell.interior_sign.size() != n)
    fail("inconsistent sizes");
  for (int order : cell.corner_orders)
    if (order < 2) fail("corner order below 2");
  for (std::size_t k = 0; k < n; ++k) {
    const Complex v = cell.vertices[k];
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) fail("non-finite vertex");
    if (cell.edges[k].distance(v) > 1e-10 || cell.edges[(k + n - 1) % n].distance(v) > 1e-10)
      fail("vertex " + std::to_string(k) + " off its edge carriers");
  }
  double angle_sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double target = kPi / cell.corner_orders[k];
    const double angle = interior_angle(cell, k);
    if (std::abs(angle - target) > 1e-9) fail("angle at vertex " + std::to_string(k) + " differs from pi/order");
    angle_sum += target;
  }
  const double flat = (n == 3) ? kPi : 2.0 * kPi;
  if (cell.kind == GeometryKind::Euclidean) {
    if (std::abs(angle_sum - flat) > 1e-9) fail("Euclidean angle sum mismatch");
    return;
  }
  if (!(angle_sum < flat)) fail("hyperbolic angle sum too large");
  for (std::size_t k = 0; k < n; ++k) {
    if (!(std::abs(cell.vertices[k]) < 1.0)) fail("vertex outside the unit disk");
    const GenCircle& e = cell.edges[k];
    if (e.is_line()) {
      if (e.distance(0.0) > 1e-10) fail("straight edge misses the origin");
    } else {
      const auto& c = e.as_circle();
      // Cosine of the crossing angle with the unit circle.
      const double cosine = (std::norm(c.center) - c.radius * c.radius - 1.0) / (2.0 * c.radius);
      if (std::abs(cosine) > 1e-10) fail("edge not orthogonal to the unit circle");
    }
  }
}

Complex edge_point(const CellSpec& cell, std::size_t k, double s) {
  const Complex a = cell.vertices[k];
  const Complex b = cell.vertices[(k + 1) % cell.size()];
  const GenCircle& e = cell.edges[k];
  if (e.is_line()) return a + s * (b - a);
  const auto& c = e.as_circle();
  const double ta = std::arg(a - c.center);
  const double span = std::remainder(std::arg(b - c.center) - ta, 2.0 * kPi);
  return c.center + std::polar(c.radius, ta + s * span);
}

bool contains(const CellSpec& cell, Complex z, double tol) {
  if (cell.kind == GeometryKind::Hyperbolic && !(std::abs(z) < 1.0)) return false;
  for (std::size_t k = 0; k < cell.size(); ++k) {
    const double s = cell.side(k, z);
    if (tol >= 0.0 ? s < -tol : s <= -tol) return false;
  }
  return true;
}

double euclidean_diameter(const CellSpec& cell) {
  double d = 0.0;
  for (std::size_t i = 0; i < cell.size(); ++i)
    for (std::size_t j = i + 1; j < cell.size(); ++j) d = std::max(d, std::abs(cell.vertices[i] - cell.vertices[j]));
  return d;
}

Box bounding_box(const CellSpec& cell) {
  Box b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
        std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (std::size_t k = 0; k < cell.size(); ++k) {
    for (int s = 0; s <= 64; ++s) {
      const Complex z = edge_point(cell, k, s / 64.0);
      b.xmin = std::min(b.xmin, z.real());
      b.xmax = std::max(b.xmax, z.real());
      b.ymin = std::min(b.ymin, z.imag());
      b.ymax = std::max(b.ymax, z.imag());
    }
  }
  return b;
}

CellSpec euclidean_triangle(int p, int q, int r) {
  const std::array<int, 3> orders{p, q, r};
  for (int o : orders)
    if (o < 2) throw Error(ErrorCode::NotEuclideanSignature, "not a Euclidean signature: corner orders must be at least 2");
  // 1/p + 1/q + 1/r == 1 in exact integer arithmetic.
  if (q * r + p * r + p * q != p * q * r)
    throw Error(ErrorCode::NotEuclideanSignature, "not a Euclidean signature: angle sum differs from pi");

  // The largest angle sits opposite the longest edge, which goes on [0, 1].
  std::size_t k = 0;
  for (std::size_t i = 1; i < 3; ++i)
    if (orders[i] < orders[k]) k = i;
  const std::size_t k1 = (k + 1) % 3, k2 = (k + 2) % 3;
  const double angle_k = kPi / orders[k], angle_k1 = kPi / orders[k1], angle_k2 = kPi / orders[k2];
  std::vector<Complex> v(3);
  v[k1] = 0.0;
  v[k2] = 1.0;
  v[k] = std::polar(std::sin(angle_k2) / std::sin(angle_k), angle_k1);
  std::vector<GenCircle> edges;
  for (std::size_t i = 0; i < 3; ++i) edges.push_back(line_through(v[i], v[(i + 1) % 3]));
  return make_cell(std::move(v), std::move(edges), {p, q, r}, GeometryKind::Euclidean);
}

CellSpec euclidean_rectangle(double width, double height) {
  if (!(width > 0.0) || !(height > 0.0)) throw Error(ErrorCode::InvalidArgument, "rectangle sides must be positive");
  std::vector<Complex> v{{0.0, 0.0}, {width, 0.0}, {width, height}, {0.0, height}};
  std::vector<GenCircle> edges;
  for (std::size_t i = 0; i < 4; ++i) edges.push_back(line_through(v[i], v[(i + 1) % 4]));
  return make_cell(std::move(v), std::move(edges), {2, 2, 2, 2}, GeometryKind::Euclidean);
}

GenCircle geodesic_through(Complex v1, Complex v2) {
  if (nearly_same(v1, v2)) throw Error(ErrorCode::DegenerateGeodesic, "degenerate geodesic: coincident points");
  if (!(std::abs(v1) < 1.0) || !(std::abs(v2) < 1.0))
    throw Error(ErrorCode::InvalidArgument, "geodesic endpoints must lie inside the unit disk");
  const double cross = v1.real() * v2.imag() - v1.imag() * v2.real();
  const double scale = std::max(std::abs(v1), std::abs(v2));
  if (std::abs(cross) <= 1e-14 * scale) {
    const Complex dir = std::abs(v1) >= std::abs(v2) ? v1 : v2;
    return GenCircle::line(0.0, kI * dir);
  }
  // The carrier also passes through the mirror image of either point in the unit circle.
  const Complex far = std::abs(v1) >= std::abs(v2) ? v1 : v2;
  const GenCircle g = GenCircle::through(v1, v2, 1.0 / std::conj(far));
  if (g.is_line()) return GenCircle::line(0.0, kI * far);
  return g;
}

namespace {

void require_disk_automorphism(const Motion& m) {
  if (m.conjugating) throw Error(ErrorCode::InvalidArgument, "placement must preserve orientation");
  for (int k = 0; k < 3; ++k) {
    if (std::abs(std::abs(m(std::polar(1.0, 2.0 * kPi * k / 3.0))) - 1.0) > 1e-9)
      throw Error(ErrorCode::InvalidArgument, "placement must map the unit circle to itself");
  }
  if (!(std::abs(m(0.0)) < 1.0)) throw Error(ErrorCode::InvalidArgument, "placement must preserve the unit disk");
}

CellSpec hyperbolic_cell(std::vector<Complex> v, std::vector<int> orders) {
  std::vector<GenCircle> edges;
  for (std::size_t i = 0; i < v.size(); ++i) edges.push_back(geodesic_through(v[i], v[(i + 1) % v.size()]));
  return make_cell(std::move(v), std::move(edges), std::move(orders), GeometryKind::Hyperbolic);
}

}  // namespace

CellSpec transformed(const CellSpec& cell, const Motion& m) {
  if (cell.kind == GeometryKind::Hyperbolic) {
    require_disk_automorphism(m);
    std::vector<Complex> v;
    for (Complex z : cell.vertices) v.push_back(m(z));
    return hyperbolic_cell(std::move(v), cell.corner_orders);
  }
  if (m.conjugating || !m.is_affine()) throw Error(ErrorCode::InvalidArgument, "Euclidean cells move by direct similarities only");
  std::vector<Complex> v;
  for (Complex z : cell.vertices) v.push_back(m(z));
  std::vector<GenCircle> edges;
  for (std::size_t i = 0; i < v.size(); ++i) edges.push_back(line_through(v[i], v[(i + 1) % v.size()]));
  return make_cell(std::move(v), std::move(edges), cell.corner_orders, GeometryKind::Euclidean);
}

CellSpec hyperbolic_triangle(int p, int q, int r, const Motion& placement) {
  if (p < 2 || q < 2 || r < 2) throw Error(ErrorCode::InvalidArgument, "corner orders must be at least 2");
  // 1/p + 1/q + 1/r < 1 in integers.
  if (!(q * r + p * r + p * q < p * q * r))
    throw Error(ErrorCode::NotHyperbolic, "not hyperbolic: angle sum is at least pi");
  const double alpha = kPi / p, beta = kPi / q, gamma = kPi / r;
  const double v1 = disk_radius_from_cosh(cosh_side(alpha, beta, gamma));
  const double v2 = disk_radius_from_cosh(cosh_side(alpha, gamma, beta));
  std::vector<Complex> v{0.0, v1, std::polar(v2, alpha)};
  CellSpec cell = hyperbolic_cell(std::move(v), {p, q, r});
  if (placement.conjugating || std::abs(placement.b) > 0.0 || std::abs(placement.c) > 0.0 ||
      std::abs(placement.a - placement.d) > 0.0)
    return transformed(cell, placement);
  return cell;
}

CellSpec hyperbolic_quadrilateral(const std::array<int, 4>& orders, double t) {
  for (int o : orders)
    if (o < 2) throw Error(ErrorCode::InvalidArgument, "corner orders must be at least 2");
  std::array<double, 4> a{};
  for (int k = 0; k < 4; ++k) a[k] = kPi / orders[k];
  // Sum of 1/orders < 2, exactly.
  {
    long long num = 0, den = 1;
    for (int o : orders) den *= o;
    for (int o : orders) num += den / o;
    if (!(num < 2 * den)) throw Error(ErrorCode::NotHyperbolic, "not hyperbolic: angle sum is at least 2 pi");
  }
  if (!(t > 0.0 && t < 1.0)) throw Error(ErrorCode::InvalidArgument, "family parameter t must lie in (0, 1)");

  // The diagonal v0-v2 splits the cell into triangles (v0,v1,v2) with angles
  // (x, a1, y) and (v0,v2,v3) with angles (a0-x, a2-y, a3). t fixes the split
  // x at v0; y follows from both triangles agreeing on the diagonal length.
  const double x = t * a[0];
  const double xr = a[0] - x;
  auto f1 = [&](double y) { return cosh_side(x, y, a[1]); };
  auto diag2 = [&](double y) { return cosh_side(xr, a[2] - y, a[3]); };
  double lo = 0.0, hi = a[2];
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f1(mid) - diag2(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  const double y = 0.5 * (lo + hi);
  const double cosh_diag = f1(y);
  const double cosh_01 = cosh_side(x, a[1], y);
  const double cosh_03 = cosh_side(xr, a[3], a[2] - y);

  std::vector<Complex> v{0.0, disk_radius_from_cosh(cosh_01), std::polar(disk_radius_from_cosh(cosh_diag), x),
                         std::polar(disk_radius_from_cosh(cosh_03), a[0])};
  // Centre the diagonal v0-v2 on the real axis, its hyperbolic midpoint at 0.
  const double half = std::tanh(0.25 * std::acosh(cosh_diag));
  const Motion place = compose(Motion::rotation(-x), Motion::disk_translation(std::polar(half, x)));
  for (Complex& z : v) z = place(z);
  v[0] = Complex{v[0].real(), 0.0};
  v[2] = Complex{v[2].real(), 0.0};
  return hyperbolic_cell(std::move(v), {orders[0], orders[1], orders[2], orders[3]});
}

}  // namespace hyperbolize
