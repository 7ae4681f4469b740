#include "core/solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "core/error.hpp"

namespace hyperbolize {

namespace {

constexpr double kStrict = 1e-12;      // inner points: side > kStrict on every edge
constexpr double kCellSlack = 1e-9;    // closed-cell slack for the active-set test
constexpr std::int64_t kMaxWindow = 60'000'000;

// Neighbour offsets in summation order: +d, -d, +id, -id.
constexpr int kDi[4] = {1, -1, 0, 0};
constexpr int kDj[4] = {0, 0, 1, -1};

bool in_box(Complex z, double x0, double x1, double y0, double y1, double tol) {
  return z.real() >= x0 - tol && z.real() <= x1 + tol && z.imag() >= y0 - tol && z.imag() <= y1 + tol;
}

// Crossings of a carrier with the axis-parallel segment {coord = c, lo <= other <= hi}.
void crossings(const GenCircle& e, bool vertical, double c, double lo, double hi, std::vector<Complex>& out) {
  auto push = [&](double along) {
    if (along < lo || along > hi) return;
    out.push_back(vertical ? Complex{c, along} : Complex{along, c});
  };
  if (e.is_line()) {
    const auto& l = e.as_line();
    // dot(z - anchor, n) = 0 with one coordinate fixed.
    const double nx = l.unit_normal.real(), ny = l.unit_normal.imag();
    if (vertical) {
      if (std::abs(ny) > 1e-15) push(l.anchor.imag() - nx * (c - l.anchor.real()) / ny);
    } else {
      if (std::abs(nx) > 1e-15) push(l.anchor.real() - ny * (c - l.anchor.imag()) / nx);
    }
    return;
  }
  const auto& ci = e.as_circle();
  const double off = vertical ? c - ci.center.real() : c - ci.center.imag();
  const double h2 = ci.radius * ci.radius - off * off;
  if (h2 < 0.0) return;
  const double h = std::sqrt(h2);
  const double mid = vertical ? ci.center.imag() : ci.center.real();
  push(mid - h);
  push(mid + h);
}

// Exact test whether the closed cell meets the closed box.
bool box_meets_cell(const CellSpec& cell, double x0, double x1, double y0, double y1, double tol) {
  const Complex corners[4] = {{x0, y0}, {x1, y0}, {x0, y1}, {x1, y1}};
  for (Complex c : corners)
    if (contains(cell, c, tol)) return true;
  for (Complex v : cell.vertices)
    if (in_box(v, x0, x1, y0, y1, tol)) return true;
  std::vector<Complex> pts;
  for (const GenCircle& e : cell.edges) {
    pts.clear();
    crossings(e, true, x0, y0, y1, pts);
    crossings(e, true, x1, y0, y1, pts);
    crossings(e, false, y0, x0, x1, pts);
    crossings(e, false, y1, x0, x1, pts);
    for (Complex q : pts)
      if (contains(cell, q, tol)) return true;
  }
  return false;
}

std::int32_t window_pos(const SolverState& s, int i, int j) {
  const int a = i - s.i0, b = j - s.j0;
  if (a < 0 || b < 0 || a >= s.width || b >= s.height) return -1;
  return b * s.width + a;
}

int default_word_cap(const CellSpec& cell) {
  int m = 2;
  for (int o : cell.corner_orders) m = std::max(m, o);
  return 4 * m;
}

// Projective map sending four source points to four target points.
Eigen::Matrix3d homography(const std::vector<Complex>& src, const std::vector<Complex>& dst) {
  Eigen::Matrix<double, 8, 8> a;
  Eigen::Matrix<double, 8, 1> b;
  for (int k = 0; k < 4; ++k) {
    const double x = src[k].real(), y = src[k].imag(), u = dst[k].real(), v = dst[k].imag();
    a.row(2 * k) << x, y, 1, 0, 0, 0, -u * x, -u * y;
    a.row(2 * k + 1) << 0, 0, 0, x, y, 1, -v * x, -v * y;
    b(2 * k) = u;
    b(2 * k + 1) = v;
  }
  const Eigen::Matrix<double, 8, 1> h = a.fullPivLu().solve(b);
  Eigen::Matrix3d m;
  m << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), 1.0;
  return m;
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  return 0.5 * (hi + *std::max_element(v.begin(), v.begin() + mid));
}

}  // namespace

std::size_t SolverState::inner_count() const {
  return static_cast<std::size_t>(std::count(inner.begin(), inner.end(), std::uint8_t{1}));
}

std::int32_t SolverState::index_of(GridIndex g) const {
  const std::int32_t w = window_pos(*this, g.i, g.j);
  return w < 0 ? -1 : slot[w];
}

std::int32_t SolverState::ghost_index_of(GridIndex g) const {
  const std::int32_t w = window_pos(*this, g.i, g.j);
  return w < 0 || ghost_slot.empty() ? -1 : ghost_slot[w];
}

bool SolverState::is_inner(GridIndex g) const {
  const std::int32_t k = index_of(g);
  return k >= 0 && inner[k] != 0;
}

Complex extended_map(const SolverState& s, const ReflectionGroup& g_source, const ReflectionGroup& g_target,
                     Complex z, int word_cap) {
  std::array<std::int32_t, 4> idx;
  std::array<double, 4> w;
  if (try_interpolation_cell(s, z, idx, w)) return w[0] * s.p[idx[0]] + w[1] * s.p[idx[1]] + w[2] * s.p[idx[2]] + w[3] * s.p[idx[3]];
  const Located l = locate(g_source, z, word_cap);
  return inverse(corresponding_word(l.word, g_target))(interpolate(s, l.z_in));
}

std::array<double, 4> bilinear_weights(double l, double m) {
  return {(1.0 - l) * (1.0 - m), l * (1.0 - m), (1.0 - l) * m, l * m};
}

SolverState build_grid(const CellSpec& source, double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw Error(ErrorCode::InvalidArgument, "delta must be positive");
  const Box box = bounding_box(source);
  const double slack = kCellSlack * std::max(1.0, delta);
  const int ia = static_cast<int>(std::floor((box.xmin - slack) / delta)) - 1;
  const int ib = static_cast<int>(std::ceil((box.xmax + slack) / delta)) + 1;
  const int ja = static_cast<int>(std::floor((box.ymin - slack) / delta)) - 1;
  const int jb = static_cast<int>(std::ceil((box.ymax + slack) / delta)) + 1;
  if (static_cast<std::int64_t>(ib - ia + 5) * (jb - ja + 5) > kMaxWindow)
    throw Error(ErrorCode::TooLarge, "grid too large for delta " + std::to_string(delta));

  SolverState s;
  s.delta = delta;
  s.source = source;
  s.i0 = ia - 2;
  s.j0 = ja - 2;
  s.width = ib - ia + 5;
  s.height = jb - ja + 5;
  std::vector<std::uint8_t> active(static_cast<std::size_t>(s.width) * s.height, 0);
  for (int j = ja; j < jb; ++j) {
    for (int i = ia; i < ib; ++i) {
      if (!box_meets_cell(source, delta * i, delta * (i + 1), delta * j, delta * (j + 1), slack)) continue;
      for (int dj = 0; dj < 2; ++dj)
        for (int di = 0; di < 2; ++di) active[window_pos(s, i + di, j + dj)] = 1;
    }
  }
  s.slot.assign(active.size(), -1);
  for (int j = 0; j < s.height; ++j) {
    for (int i = 0; i < s.width; ++i) {
      const std::size_t w = static_cast<std::size_t>(j) * s.width + i;
      if (!active[w]) continue;
      const GridIndex g{s.i0 + i, s.j0 + j};
      s.slot[w] = static_cast<std::int32_t>(s.points.size());
      s.points.push_back(g);
      s.inner.push_back(contains(source, g.point(delta), -kStrict) ? 1 : 0);
    }
  }

  const std::size_t n_inner = s.inner_count();
  if (n_inner == 0) throw Error(ErrorCode::GridTooCoarse, "grid too coarse: no grid point inside the cell");
  for (std::size_t k = 0; k < source.size(); ++k) {
    double reach = std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < source.size(); ++l)
      if (l != k) reach = std::min(reach, std::abs(source.vertices[k] - source.vertices[l]));
    reach *= 0.25;
    int count = 0;
    for (std::size_t q = 0; q < s.points.size(); ++q)
      if (s.inner[q] && std::abs(s.points[q].point(delta) - source.vertices[k]) <= reach) ++count;
    if (count < 4)
      throw Error(ErrorCode::GridTooCoarse,
                  "grid too coarse: fewer than 4 inner points near vertex " + std::to_string(k));
  }
  return s;
}

bool try_interpolation_cell(const SolverState& s, Complex z, std::array<std::int32_t, 4>& idx,
                            std::array<double, 4>& w, GridIndex* corner) {
  double x = z.real() / s.delta, y = z.imag() / s.delta;
  if (!std::isfinite(x) || !std::isfinite(y)) return false;
  // Grid points reproduce their value exactly.
  if (std::abs(x - std::round(x)) < 1e-10) x = std::round(x);
  if (std::abs(y - std::round(y)) < 1e-10) y = std::round(y);
  const double fx = std::floor(x), fy = std::floor(y);
  if (std::abs(fx) > 1e9 || std::abs(fy) > 1e9) return false;
  const int bi = static_cast<int>(fx), bj = static_cast<int>(fy);
  const double l0 = x - fx, m0 = y - fy;
  // Points on a cell side may belong to the neighbouring complete cell.
  const int si = l0 < 1e-9 ? 2 : 1, sj = m0 < 1e-9 ? 2 : 1;
  for (int a = 0; a < sj; ++a) {
    for (int b = 0; b < si; ++b) {
      const int ci = bi - b, cj = bj - a;
      const std::int32_t c00 = s.index_of({ci, cj}), c10 = s.index_of({ci + 1, cj});
      const std::int32_t c01 = s.index_of({ci, cj + 1}), c11 = s.index_of({ci + 1, cj + 1});
      if (c00 < 0 || c10 < 0 || c01 < 0 || c11 < 0) continue;
      idx = {c00, c10, c01, c11};
      w = bilinear_weights(std::min(l0 + b, 1.0), std::min(m0 + a, 1.0));
      if (corner) *corner = {ci, cj};
      return true;
    }
  }
  return false;
}

std::pair<std::array<std::int32_t, 4>, std::array<double, 4>> interpolation_cell(const SolverState& s, Complex z,
                                                                                  GridIndex* corner) {
  std::array<std::int32_t, 4> idx{};
  std::array<double, 4> w{};
  if (!try_interpolation_cell(s, z, idx, w, corner))
    throw Error(ErrorCode::OutsideInterpolationDomain, "outside interpolation domain");
  return {idx, w};
}

Complex interpolate(const SolverState& s, Complex z) {
  const auto [idx, w] = interpolation_cell(s, z);
  Complex v = w[0] * s.p[idx[0]];
  v += w[1] * s.p[idx[1]];
  v += w[2] * s.p[idx[2]];
  v += w[3] * s.p[idx[3]];
  return v;
}

void build_ghost_rules(SolverState& s, const ReflectionGroup& gh, const ReflectionGroup& ge, int word_cap) {
  if (gh.generators.size() != ge.generators.size())
    throw Error(ErrorCode::LabelMismatch, "label mismatch: source and target groups differ in edge count");
  s.target = ge.cell;
  const int cap = word_cap > 0 ? word_cap : default_word_cap(gh.cell);
  const std::int32_t m = static_cast<std::int32_t>(s.size());

  std::vector<std::uint8_t> needed(s.slot.size(), 0);
  for (const GridIndex& g : s.points) {
    for (int d = 0; d < 4; ++d) {
      const GridIndex w{g.i + kDi[d], g.j + kDj[d]};
      if (!s.is_inner(w)) needed[window_pos(s, w.i, w.j)] = 1;
    }
  }

  s.ghosts.clear();
  s.ghost_slot.assign(s.slot.size(), -1);
  for (int j = 0; j < s.height; ++j) {
    for (int i = 0; i < s.width; ++i) {
      const std::size_t pos = static_cast<std::size_t>(j) * s.width + i;
      if (!needed[pos]) continue;
      GhostRule r;
      r.source = {s.i0 + i, s.j0 + j};
      const Complex z = r.source.point(s.delta);
      Located loc;
      if (gh.cell.kind == GeometryKind::Hyperbolic && !(std::abs(z) < 1.0))
        throw Error(ErrorCode::GridTooCoarse, "grid too coarse: ghost point outside the unit disk");
      if (!try_locate(gh, z, cap, loc) || loc.word.distinct_labels() > 2)
        throw Error(ErrorCode::GridTooCoarseNearCorner,
                    "grid too coarse near corner: ghost fold needs more than two mirrors");
      r.fold_word = loc.word;
      std::array<std::int32_t, 4> idx{};
      if (!try_interpolation_cell(s, loc.z_in, idx, r.weights, &r.cell_corner))
        throw Error(ErrorCode::OutsideInterpolationDomain, "outside interpolation domain while folding a ghost");
      r.corners = idx;
      r.back_motion = inverse(corresponding_word(loc.word, ge));
      if (!r.back_motion.is_affine(1e-12))
        throw Error(ErrorCode::Unsupported, "target group must act by Euclidean motions");
      r.rot = r.back_motion.a / r.back_motion.d;
      r.shift = r.back_motion.b / r.back_motion.d;
      r.conjugating = r.back_motion.conjugating;
      s.ghost_slot[pos] = static_cast<std::int32_t>(s.ghosts.size());
      s.ghosts.push_back(std::move(r));
    }
  }

  s.stencil.resize(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    const GridIndex g = s.points[k];
    for (int d = 0; d < 4; ++d) {
      const GridIndex w{g.i + kDi[d], g.j + kDj[d]};
      s.stencil[k][d] = s.is_inner(w) ? s.index_of(w) : m + s.ghost_index_of(w);
    }
  }
  s.buffer.assign(s.size() + s.ghosts.size(), Complex{});
  s.next.assign(s.size(), Complex{});
}

void init_state(SolverState& s, const CellSpec& source, const CellSpec& target) {
  if (source.size() != target.size())
    throw Error(ErrorCode::InvalidArgument, "source and target cells need the same number of corners");
  s.p.resize(s.size());
  if (source.size() == 3) {
    const Complex a = source.vertices[0], b = source.vertices[1], c = source.vertices[2];
    const Complex ab = b - a, ac = c - a;
    const double det = ab.real() * ac.imag() - ab.imag() * ac.real();
    for (std::size_t k = 0; k < s.size(); ++k) {
      const Complex r = s.points[k].point(s.delta) - a;
      const double l1 = (r.real() * ac.imag() - r.imag() * ac.real()) / det;
      const double l2 = (ab.real() * r.imag() - ab.imag() * r.real()) / det;
      s.p[k] = (1.0 - l1 - l2) * target.vertices[0] + l1 * target.vertices[1] + l2 * target.vertices[2];
    }
  } else {
    const Eigen::Matrix3d h = homography(source.vertices, target.vertices);
    for (std::size_t k = 0; k < s.size(); ++k) {
      const Complex z = s.points[k].point(s.delta);
      const Eigen::Vector3d q = h * Eigen::Vector3d(z.real(), z.imag(), 1.0);
      s.p[k] = {q(0) / q(2), q(1) / q(2)};
    }
  }
  s.iterations = 0;
  s.residual = std::numeric_limits<double>::infinity();
  s.converged = false;
  s.history.clear();
}

void init_from(SolverState& s, const SolverState& coarse) {
  init_state(s, s.source, s.target);
  const ReflectionGroup gh = reflection_group(coarse.source);
  const ReflectionGroup ge = reflection_group(coarse.target);
  const int cap = default_word_cap(coarse.source);
  for (std::size_t k = 0; k < s.size(); ++k) {
    Located loc;
    if (!try_locate(gh, s.points[k].point(s.delta), cap, loc)) continue;
    std::array<std::int32_t, 4> idx{};
    std::array<double, 4> w{};
    if (!try_interpolation_cell(coarse, loc.z_in, idx, w)) continue;
    const Complex v = w[0] * coarse.p[idx[0]] + w[1] * coarse.p[idx[1]] + w[2] * coarse.p[idx[2]] + w[3] * coarse.p[idx[3]];
    s.p[k] = loc.word.empty() ? v : inverse(corresponding_word(loc.word, ge))(v);
  }
}

namespace {

inline Complex ghost_value(const GhostRule& r, const std::vector<Complex>& p) {
  Complex v = r.weights[0] * p[r.corners[0]];
  v += r.weights[1] * p[r.corners[1]];
  v += r.weights[2] * p[r.corners[2]];
  v += r.weights[3] * p[r.corners[3]];
  if (r.conjugating) v = std::conj(v);
  return r.rot * v + r.shift;
}

}  // namespace

void evaluate_ghosts(const SolverState& s, const std::vector<Complex>& p, std::vector<Complex>& out) {
  out.resize(s.ghosts.size());
  const std::int64_t n = static_cast<std::int64_t>(s.ghosts.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t g = 0; g < n; ++g) out[g] = ghost_value(s.ghosts[g], p);
}

namespace {

void fill_buffer(const SolverState& s, const std::vector<Complex>& p, std::vector<Complex>& buf) {
  const std::size_t m = s.size();
  buf.resize(m + s.ghosts.size());
  std::copy(p.begin(), p.end(), buf.begin());
  const std::int64_t n = static_cast<std::int64_t>(s.ghosts.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t g = 0; g < n; ++g) buf[m + g] = ghost_value(s.ghosts[g], p);
}

inline Complex average(const std::vector<Complex>& buf, const std::array<std::int32_t, 4>& st) {
  Complex a = buf[st[0]];
  a += buf[st[1]];
  a += buf[st[2]];
  a += buf[st[3]];
  return 0.25 * a;
}

}  // namespace

std::vector<Complex> sweep_image(const SolverState& s, const std::vector<Complex>& p) {
  std::vector<Complex> buf;
  fill_buffer(s, p, buf);
  std::vector<Complex> out(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) out[k] = average(buf, s.stencil[k]);
  return out;
}

double sweep(SolverState& s, double relaxation) {
  fill_buffer(s, s.p, s.buffer);
  s.next.resize(s.size());
  const std::int64_t m = static_cast<std::int64_t>(s.size());
  double worst = 0.0;
  const bool plain = relaxation == 1.0;
#pragma omp parallel for schedule(static) reduction(max : worst)
  for (std::int64_t k = 0; k < m; ++k) {
    Complex v = average(s.buffer, s.stencil[k]);
    if (!plain) v = s.p[k] + relaxation * (v - s.p[k]);
    worst = std::max(worst, std::abs(v - s.p[k]));
    s.next[k] = v;
  }
  s.p.swap(s.next);
  s.residual = worst / s.target_diameter();
  ++s.iterations;
  s.history.push_back(s.residual);
  return s.residual;
}

SolverState prepare(const CellSpec& source, const CellSpec& target, double delta, int word_cap) {
  const ReflectionGroup gh = reflection_group(source);
  const ReflectionGroup ge = reflection_group(target);
  SolverState s = build_grid(source, delta);
  build_ghost_rules(s, gh, ge, word_cap);
  init_state(s, source, target);
  return s;
}

SolveReport run(SolverState& s, double tol, std::int64_t max_sweeps, const SolverOptions& opts) {
  if (!(opts.relaxation >= 1.0 && opts.relaxation < 1.95))
    throw Error(ErrorCode::InvalidArgument, "relaxation must lie in [1, 1.95)");
  if (!(tol >= 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be nonnegative");
  const auto start = std::chrono::steady_clock::now();
  s.converged = false;
  for (std::int64_t n = 0; n < max_sweeps; ++n) {
    const double r = sweep(s, opts.relaxation);
    if (r <= tol) {
      s.converged = true;
      break;
    }
    if (opts.progress && opts.progress_every > 0 && (n + 1) % opts.progress_every == 0 && !opts.progress(n + 1, r))
      break;
  }
  SolveReport rep;
  rep.iterations = s.iterations;
  rep.final_residual = s.residual;
  rep.converged = s.converged;
  rep.conformality_median = conformality_report(s, 5.0 * s.delta).angle_median;
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

std::pair<SolverState, SolveReport> solve(const CellSpec& source, const CellSpec& target, double delta, double tol,
                                          std::int64_t max_sweeps, const SolverOptions& opts) {
  SolverState s = prepare(source, target, delta, opts.word_cap);
  SolveReport rep = run(s, tol, max_sweeps, opts);
  return {std::move(s), rep};
}

ConformalityStats conformality_report(const SolverState& s, double corner_exclusion) {
  std::vector<Complex> buf;
  fill_buffer(s, s.p, buf);
  std::vector<double> angles, ratios;
  double energy = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (!s.inner[k]) continue;
    const Complex z = s.points[k].point(s.delta);
    bool near_corner = false;
    for (Complex v : s.source.vertices) near_corner = near_corner || std::abs(z - v) <= corner_exclusion;
    if (near_corner) continue;
    const auto& st = s.stencil[k];
    const Complex d1 = 0.5 * (buf[st[0]] - buf[st[1]]);
    const Complex d2 = 0.5 * (buf[st[2]] - buf[st[3]]);
    const double n1 = std::abs(d1), n2 = std::abs(d2);
    if (!(n1 > 0.0) || !(n2 > 0.0)) continue;
    angles.push_back(std::abs(std::arg(d2 / d1) - 0.5 * kPi));
    ratios.push_back(std::abs(n2 / n1 - 1.0));
    energy += std::norm(d1 + Complex{0.0, 1.0} * d2) / (n1 * n1 + n2 * n2);
  }
  ConformalityStats st;
  st.samples = angles.size();
  if (angles.empty()) return st;
  st.angle_max = *std::max_element(angles.begin(), angles.end());
  st.ratio_max = *std::max_element(ratios.begin(), ratios.end());
  st.angle_median = median_of(std::move(angles));
  st.ratio_median = median_of(std::move(ratios));
  st.energy_mean = energy / static_cast<double>(st.samples);
  return st;
}

double modulus_energy(const std::array<int, 4>& orders, const CellSpec& q_e, double t, const ModulusOptions& opts,
                      SolverState* state_out, SolveReport* report_out) {
  const CellSpec q_h = hyperbolic_quadrilateral(orders, t);
  auto [state, rep] = solve(q_h, q_e, opts.delta, opts.solve_tol, opts.max_sweeps, opts.solver);
  if (!rep.converged)
    throw Error(ErrorCode::NotConverged, "not converged at t = " + std::to_string(t) + " after " +
                                             std::to_string(rep.iterations) + " sweeps");
  const double e = conformality_report(state, opts.corner_exclusion_cells * opts.delta).energy_mean;
  if (state_out) *state_out = std::move(state);
  if (report_out) *report_out = rep;
  return e;
}

ModulusResult modulus_search(const std::array<int, 4>& orders, const CellSpec& q_e, double tol,
                             const ModulusOptions& opts) {
  if (q_e.size() != 4 || q_e.kind != GeometryKind::Euclidean)
    throw Error(ErrorCode::InvalidArgument, "modulus search needs a Euclidean rectangle cell");
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "search tolerance must be positive");
  // Surface geometry errors before any solve.
  (void)hyperbolic_quadrilateral(orders, 0.5);

  ModulusResult res;
  double best_e = std::numeric_limits<double>::infinity();
  auto eval = [&](double t) {
    SolverState st;
    SolveReport rep;
    const double e = modulus_energy(orders, q_e, t, opts, &st, &rep);
    res.evaluations.emplace_back(t, e);
    if (e < best_e) {
      best_e = e;
      res.t_star = t;
      res.energy = e;
      res.state = std::move(st);
      res.report = rep;
    }
    return e;
  };

  std::array<double, 9> probe{};
  int arg = 0;
  for (int k = 0; k < 9; ++k) {
    probe[k] = eval(0.1 * (k + 1));
    if (probe[k] < probe[arg]) arg = k;
  }
  if (arg == 0 || arg == 8)
    throw Error(ErrorCode::SearchFailed, "modulus search failed; refine grid (energy minimum at probe t = " +
                                             std::to_string(0.1 * (arg + 1)) + ", bracket not found)");

  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 0.1 * arg, b = 0.1 * (arg + 2);
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  double fc = eval(c), fd = eval(d);
  while (b - a >= tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = eval(d);
    }
  }
  // Best evaluated point inside the final bracket.
  double t_best = 0.5 * (a + b), e_best = std::numeric_limits<double>::infinity();
  for (const auto& [t, e] : res.evaluations) {
    if (t >= a && t <= b && e < e_best) {
      e_best = e;
      t_best = t;
    }
  }
  if (t_best != res.t_star) {
    res.t_star = t_best;
    res.energy = modulus_energy(orders, q_e, t_best, opts, &res.state, &res.report);
  }
  return res;
}

}  // namespace hyperbolize
