#include <doctest.h>

#include <algorithm>

#include "core/problem.hpp"
#include "core/solver.hpp"
#include "support.hpp"

using namespace hyperbolize;
using hyptest::near;

namespace {

const Problem& p433() {
  static const Problem p = make_problem({"*333", {4, 3, 3}});
  return p;
}

const SolverState& solved433() {
  static const SolverState s = [] {
    auto [st, rep] = solve(p433().hyperbolic, p433().euclidean, 0.01, 1e-10, 200000);
    REQUIRE(rep.converged);
    return st;
  }();
  return s;
}

// Lattice points strictly inside a Euclidean triangle, by direct enumeration.
std::size_t count_inside(const CellSpec& t, double delta) {
  auto cross = [](Complex a, Complex b) { return a.real() * b.imag() - a.imag() * b.real(); };
  std::size_t n = 0;
  for (int i = -5; i * delta < 2.0; ++i)
    for (int j = -5; j * delta < 2.0; ++j) {
      const Complex z(i * delta, j * delta);
      bool in = true;
      for (int k = 0; k < 3; ++k) in = in && cross(t.vertices[(k + 1) % 3] - t.vertices[k], z - t.vertices[k]) > 1e-12;
      n += in;
    }
  return n;
}

}  // namespace

TEST_CASE("build_grid: coarse grid is rejected") {
  const CellSpec t = euclidean_triangle(3, 3, 3);
  CHECK(hyptest::error_code_of([&] { build_grid(t, 0.5); }) == ErrorCode::GridTooCoarse);
}

TEST_CASE("build_grid: inner count matches area and enumeration") {
  const CellSpec t = euclidean_triangle(3, 3, 3);
  const SolverState s = build_grid(t, 0.01);
  const double area = std::sqrt(3.0) / 4.0;
  CHECK(std::abs(static_cast<double>(s.inner_count()) - area / 1e-4) <= 0.05 * area / 1e-4);
  CHECK(s.inner_count() == count_inside(t, 0.01));
}

TEST_CASE("build_grid: every point of the cell lies in a complete grid cell") {
  const SolverState s = prepare(p433().hyperbolic, p433().euclidean, 0.02);
  std::mt19937_64 rng(2);
  const Box b = bounding_box(s.source);
  std::uniform_real_distribution<double> ux(b.xmin, b.xmax), uy(b.ymin, b.ymax);
  int tested = 0;
  while (tested < 10000) {
    const Complex z(ux(rng), uy(rng));
    if (!contains(s.source, z)) continue;
    ++tested;
    std::array<std::int32_t, 4> idx;
    std::array<double, 4> w;
    REQUIRE(try_interpolation_cell(s, z, idx, w));
    for (auto k : idx) CHECK(k >= 0);
  }
}

TEST_CASE("ghost rules: structure") {
  const SolverState s = prepare(p433().hyperbolic, p433().euclidean, 0.02);
  REQUIRE_FALSE(s.ghosts.empty());
  for (const GhostRule& g : s.ghosts) {
    double sum = 0;
    for (double w : g.weights) {
      CHECK(w >= 0.0);
      sum += w;
    }
    CHECK(std::abs(sum - 1.0) < 1e-12);
    CHECK(g.fold_word.distinct_labels() <= 2);
    // Points of the active set lying on an edge fold with the empty word.
    if (g.fold_word.empty()) CHECK(contains(s.source, g.source.point(s.delta)));
    CHECK(g.back_motion.is_affine());
    CHECK_FALSE(s.is_inner(g.source));
  }
  // Points of the active set outside the cell still get a rule.
  std::size_t boundary = 0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (s.inner[k]) continue;
    ++boundary;
    CHECK(s.ghost_index_of(s.points[k]) >= 0);
  }
  CHECK(boundary > 0);
  // Inner points never have a rule; every neighbour of the active set is inner or has a rule.
  for (std::size_t k = 0; k < s.size(); ++k) {
    const GridIndex g = s.points[k];
    if (s.inner[k]) CHECK(s.ghost_index_of(g) < 0);
    for (GridIndex n : {GridIndex{g.i + 1, g.j}, GridIndex{g.i - 1, g.j}, GridIndex{g.i, g.j + 1}, GridIndex{g.i, g.j - 1}})
      CHECK((s.is_inner(n) || s.ghost_index_of(n) >= 0));
  }
}

TEST_CASE("ghost rule one step beyond a mid-edge uses that edge's reflection") {
  const SolverState s = prepare(p433().hyperbolic, p433().euclidean, 0.01);
  const ReflectionGroup ge = reflection_group(s.target);
  int checked = 0;
  for (const GhostRule& g : s.ghosts) {
    if (g.fold_word.size() != 1) continue;
    const Complex z = g.source.point(s.delta);
    const int e = g.fold_word.labels[0];
    // Far from the corners only.
    bool far = true;
    for (Complex v : s.source.vertices) far = far && std::abs(z - v) > 0.1;
    if (!far) continue;
    ++checked;
    const Complex w(0.37, 0.11);
    CHECK(near(g.back_motion(w), ge.generators[e](w), 1e-12));
    CHECK(g.back_motion.conjugating);
  }
  CHECK(checked > 10);
}

TEST_CASE("init_state: corners, identity and centroid") {
  SolverState s = build_grid(p433().hyperbolic, 0.01);
  init_state(s, p433().hyperbolic, p433().euclidean);
  // The order-4 corner of T_H sits at the origin, which is a grid point.
  const std::int32_t k0 = s.index_of({0, 0});
  REQUIRE(k0 >= 0);
  CHECK(near(s.p[k0], p433().euclidean.vertices[0], 1e-12));

  const CellSpec e = euclidean_triangle(3, 3, 3);
  SolverState id = build_grid(e, 0.01);
  init_state(id, e, e);
  for (std::size_t k = 0; k < id.size(); ++k) CHECK(near(id.p[k], id.points[k].point(id.delta), 1e-12));
}

TEST_CASE("sweep: neighbour average") {
  const CellSpec e = euclidean_triangle(3, 3, 3);
  SolverState s = prepare(e, e, 0.05);
  // Pick an inner point whose four neighbours are inner.
  std::size_t pick = s.size();
  for (std::size_t k = 0; k < s.size() && pick == s.size(); ++k) {
    const GridIndex g = s.points[k];
    if (s.inner[k] && s.is_inner({g.i + 1, g.j}) && s.is_inner({g.i - 1, g.j}) && s.is_inner({g.i, g.j + 1}) &&
        s.is_inner({g.i, g.j - 1}))
      pick = k;
  }
  REQUIRE(pick < s.size());
  const GridIndex g = s.points[pick];
  std::vector<Complex> p = s.p;
  p[s.index_of({g.i + 1, g.j})] = 0.0;
  p[s.index_of({g.i - 1, g.j})] = 2.0;
  p[s.index_of({g.i, g.j + 1})] = Complex(0, 2);
  p[s.index_of({g.i, g.j - 1})] = Complex(-2, -2);
  CHECK(near(sweep_image(s, p)[pick], 0.0, 1e-15));
}

TEST_CASE("solve: identical cells converge at once to the identity") {
  const CellSpec e = euclidean_triangle(3, 3, 3);
  auto [s, rep] = solve(e, e, 0.01, 1e-12, 5);
  CHECK(rep.converged);
  CHECK(rep.iterations <= 2);
  CHECK(rep.final_residual < 1e-12);
  for (std::size_t k = 0; k < s.size(); ++k) CHECK(near(s.p[k], s.points[k].point(s.delta), 1e-9));
}

TEST_CASE("solve: zero tolerance reports non-convergence") {
  auto [s, rep] = solve(p433().hyperbolic, p433().euclidean, 0.02, 0.0, 5);
  CHECK_FALSE(rep.converged);
  CHECK(rep.iterations == 5);
  CHECK(s.history.size() == 5);
}

TEST_CASE("sweep: first residuals on *333 -> *433") {
  SolverState s = prepare(p433().hyperbolic, p433().euclidean, 0.02);
  const double r1 = sweep(s);
  const double r2 = sweep(s);
  // Recorded from a reference run of this configuration.
  CHECK(r1 == doctest::Approx(0.0605372770821917).epsilon(1e-9));
  CHECK(r2 < r1);
}

TEST_CASE("property: converged state is a fixed point, also under reordered summation") {
  const SolverState& s = solved433();
  const double tol = 1e-10 * s.target_diameter();
  const std::vector<Complex> img = sweep_image(s, s.p);
  double worst = 0;
  for (std::size_t k = 0; k < s.size(); ++k) worst = std::max(worst, std::abs(img[k] - s.p[k]));
  CHECK(worst <= tol);

  // Same update with the neighbours summed in reverse order.
  std::vector<Complex> ghosts;
  evaluate_ghosts(s, s.p, ghosts);
  std::vector<Complex> buf = s.p;
  buf.insert(buf.end(), ghosts.begin(), ghosts.end());
  double worst_rev = 0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const auto& st = s.stencil[k];
    const Complex v = 0.25 * (((buf[st[3]] + buf[st[2]]) + buf[st[1]]) + buf[st[0]]);
    worst_rev = std::max(worst_rev, std::abs(v - s.p[k]));
  }
  CHECK(worst_rev <= 10 * tol);
}

TEST_CASE("property: corner pinning") {
  const SolverState& s = solved433();
  for (std::size_t v = 0; v < 3; ++v) {
    const Complex c = s.source.vertices[v];
    const GridIndex g{static_cast<int>(std::lround(c.real() / s.delta)), static_cast<int>(std::lround(c.imag() / s.delta))};
    const std::int32_t k = s.index_of(g);
    REQUIRE(k >= 0);
    CHECK(std::abs(s.p[k] - s.target.vertices[v]) <= 2 * s.delta * s.target_diameter());
  }
}

TEST_CASE("property: SRP commutation near every edge") {
  const SolverState& s = solved433();
  const ReflectionGroup gh = reflection_group(s.source), ge = reflection_group(s.target);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.05, 0.95), off(0.0, 3.0);
  double worst = 0;
  int on_grid = 0;
  for (std::size_t e = 0; e < 3; ++e) {
    int n = 0;
    while (n < 100) {
      const Complex on = edge_point(s.source, e, u(rng));
      const Complex tangent = s.source.edges[e].tangent_toward(on, s.source.vertices[(e + 1) % 3]);
      Complex normal = Complex(0, 1) * tangent;
      if (s.source.side(e, on + 1e-6 * normal) < 0) normal = -normal;
      const Complex z = on + off(rng) * s.delta * normal;
      if (!contains(s.source, z)) continue;
      const Complex mirrored = gh.generators[e](z);
      std::array<std::int32_t, 4> idx;
      std::array<double, 4> w;
      on_grid += try_interpolation_cell(s, mirrored, idx, w);
      const Complex lhs = extended_map(s, gh, ge, mirrored);
      const Complex rhs = ge.generators[e](interpolate(s, z));
      worst = std::max(worst, std::abs(lhs - rhs));
      ++n;
    }
  }
  CHECK(on_grid > 0);
  CHECK(worst < 10 * s.delta * s.target_diameter());
}

TEST_CASE("property: residual is monotone after the transient") {
  auto [s, rep] = solve(p433().hyperbolic, p433().euclidean, 0.01, 1e-9, 200000);
  REQUIRE(rep.converged);
  const std::size_t n = s.history.size();
  const std::size_t start = n / 100;
  for (std::size_t k = start + 100; k < n; ++k) CHECK(s.history[k] <= s.history[k - 100]);
}

TEST_CASE("interpolate and bilinear weights") {
  const auto w = bilinear_weights(0.25, 0.75);
  CHECK(w[0] == doctest::Approx(0.1875));
  CHECK(w[1] == doctest::Approx(0.0625));
  CHECK(w[2] == doctest::Approx(0.5625));
  CHECK(w[3] == doctest::Approx(0.1875));

  SolverState s = prepare(euclidean_triangle(3, 3, 3), euclidean_triangle(3, 3, 3), 0.05);
  const GridIndex c{6, 3};
  REQUIRE(s.is_inner(c));
  REQUIRE(s.is_inner({7, 3}));
  REQUIRE(s.is_inner({6, 4}));
  REQUIRE(s.is_inner({7, 4}));
  s.p[s.index_of(c)] = 0.0;
  s.p[s.index_of({7, 3})] = 1.0;
  s.p[s.index_of({6, 4})] = Complex(0, 1);
  s.p[s.index_of({7, 4})] = Complex(1, 1);
  CHECK(near(interpolate(s, c.point(s.delta) + Complex(0.5, 0.5) * s.delta), Complex(0.5, 0.5), 1e-14));
  CHECK(near(interpolate(s, c.point(s.delta)), 0.0, 0));
  CHECK(hyptest::error_code_of([&] { interpolate(s, Complex(5, 5)); }) == ErrorCode::OutsideInterpolationDomain);
}

TEST_CASE("conformality_report: identity and similarities are exact") {
  const CellSpec e = euclidean_triangle(3, 3, 3);
  auto [s, rep] = solve(e, e, 0.02, 1e-12, 5);
  ConformalityStats c = conformality_report(s, 0.1);
  CHECK(c.samples > 0);
  CHECK(c.angle_max < 1e-12);
  CHECK(c.ratio_max < 1e-12);
  CHECK(c.energy_mean < 1e-24);
  const Motion sim{std::polar(1.7, 0.6), Complex(0.3, -2.0), 0.0, 1.0, false};
  auto [t, rep2] = solve(e, transformed(e, sim), 0.02, 1e-12, 5);
  CHECK(rep2.converged);
  c = conformality_report(t, 0.1);
  CHECK(c.angle_max < 1e-9);
  CHECK(c.ratio_max < 1e-9);
}

TEST_CASE("modulus search on the square finds the symmetric member") {
  ModulusOptions o;
  o.delta = 0.02;
  o.solve_tol = 1e-9;
  const CellSpec sq = euclidean_rectangle(1.0, 1.0);
  const ModulusResult r = modulus_search({3, 2, 3, 2}, sq, 1e-3, o);
  CHECK(std::abs(r.t_star - 0.5) <= 1e-3);
  for (const auto& [t, e] : r.evaluations) CHECK(r.energy <= e);
  CHECK(hyptest::error_code_of([&] { modulus_search({2, 2, 2, 2}, sq, 1e-3, o); }) == ErrorCode::NotHyperbolic);
}
