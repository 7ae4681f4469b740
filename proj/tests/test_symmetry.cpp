#include <doctest.h>

#include <map>
#include <set>

#include "core/symmetry.hpp"
#include "support.hpp"

using namespace hyperbolize;
using hyptest::near;

namespace {

Motion power(const Motion& m, int n) {
  Motion r = Motion::identity();
  for (int k = 0; k < n; ++k) r = compose(m, r);
  return r;
}

void check_relations(const ReflectionGroup& g) {
  const std::size_t n = g.cell.size();
  std::mt19937_64 rng(1);
  for (std::size_t i = 0; i < n; ++i) {
    for (int k = 0; k <= 10; ++k) {
      const Complex on = edge_point(g.cell, i, k / 10.0);
      CHECK(near(g.generators[i](on), on, 1e-10));
    }
    const Complex z = g.cell.kind == GeometryKind::Hyperbolic ? hyptest::random_in_disk(rng, 0.8) : Complex(0.3, 0.2);
    CHECK(near(compose(g.generators[i], g.generators[i])(z), z, 1e-10));
    // Edges i-1 and i meet at vertex i.
    const std::size_t j = (i + n - 1) % n;
    const Motion rot = compose(g.generators[i], g.generators[j]);
    CHECK(near(power(rot, g.cell.corner_orders[i])(z), z, 1e-8));
    if (g.cell.corner_orders[i] > 1) CHECK_FALSE(near(rot(z), z, 1e-6));
  }
}

}  // namespace

TEST_CASE("parse_signature") {
  CHECK(parse_signature("p6m").name == "*632");
  CHECK(parse_signature("P6M").name == "*632");
  CHECK(parse_signature("*442").name == "*442");
  CHECK(parse_signature("22x").name == "22×");
  CHECK(parse_signature("o").name == "○");
  CHECK(parse_signature(" * 3 3 3 ").name == "*333");
  CHECK(hyptest::error_code_of([] { parse_signature("p7"); }) == ErrorCode::NotWallpaperSignature);
  CHECK(hyptest::error_code_of([] { parse_signature("*532"); }) == ErrorCode::NotWallpaperSignature);
}

TEST_CASE("all 17 signatures with their aliases") {
  const std::map<std::string, std::string> expect = {
      {"*632", "p6m"}, {"632", "p6"},    {"*442", "p4m"}, {"442", "p4"},   {"4*2", "p4g"}, {"*333", "p3m1"},
      {"333", "p3"},   {"3*3", "p31m"},  {"*2222", "pmm"}, {"2222", "p2"}, {"22*", "pmg"}, {"22×", "pgg"},
      {"2*22", "cmm"}, {"**", "pm"},     {"*×", "cm"},    {"××", "pg"},    {"○", "p1"}};
  REQUIRE(all_signatures().size() == 17);
  std::set<std::string> seen;
  for (const auto& s : all_signatures()) {
    REQUIRE(expect.count(s.name) == 1);
    CHECK(expect.at(s.name) == s.crystallographic_alias);
    CHECK(parse_signature(s.crystallographic_alias) == s);
    seen.insert(s.name);
  }
  CHECK(seen.size() == 17);
}

TEST_CASE("reflection_group relations") {
  check_relations(reflection_group(euclidean_triangle(3, 3, 3)));
  check_relations(reflection_group(euclidean_triangle(6, 3, 2)));
  check_relations(reflection_group(euclidean_rectangle(2.0, 1.0)));
  check_relations(reflection_group(hyperbolic_triangle(4, 3, 3)));
  check_relations(reflection_group(hyperbolic_triangle(7, 3, 2)));
  check_relations(reflection_group(hyperbolic_quadrilateral({3, 2, 3, 2}, 0.4)));
}

TEST_CASE("locate: trivial and single-reflection words") {
  const ReflectionGroup g = reflection_group(hyperbolic_triangle(4, 3, 3));
  const Complex c = (g.cell.vertices[0] + g.cell.vertices[1] + g.cell.vertices[2]) / 3.0;
  const Located in = locate(g, c, 10);
  CHECK(in.word.empty());
  CHECK(in.z_in == c);
  for (std::size_t e = 0; e < 3; ++e) {
    const Located l = locate(g, g.generators[e](c), 10);
    REQUIRE(l.word.size() == 1);
    CHECK(l.word.labels[0] == e);
    CHECK(near(l.z_in, c, 1e-12));
  }
  // On an edge: inside, empty word.
  CHECK(locate(g, edge_point(g.cell, 1, 0.5), 10).word.empty());
}

TEST_CASE("locate near an order-4 corner uses two alternating labels") {
  const ReflectionGroup g = reflection_group(hyperbolic_triangle(4, 3, 3));
  // Vertex 0 is the order-4 corner at the origin; rotate an interior point by 3 wedges.
  const Complex v = g.cell.vertices[0];
  REQUIRE(std::abs(v) < 1e-14);
  const Complex inside = 0.05 * std::polar(1.0, kPi / 8);
  const Complex z = inside * std::polar(1.0, 3 * kPi / 4 + 0.02);
  const Located l = locate(g, z, 64);
  CHECK(l.word.size() <= 4);
  CHECK(l.word.distinct_labels() == 2);
  CHECK(contains(g.cell, l.z_in));
}

TEST_CASE("locate: word cap and disk bounds") {
  const ReflectionGroup g = reflection_group(hyperbolic_triangle(4, 3, 3));
  CHECK(hyptest::error_code_of([&] { locate(g, Complex(0.999, 0.0001), 3); }) == ErrorCode::WordLengthExceeded);
  Located out;
  CHECK_FALSE(try_locate(g, Complex(0.9999, 0.001), 2, out));
}

TEST_CASE("property: locate and corresponding_word are consistent") {
  const ReflectionGroup g = reflection_group(hyperbolic_triangle(5, 4, 3));
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> lab(0, 2);
  const Complex c = (g.cell.vertices[0] + g.cell.vertices[1] + g.cell.vertices[2]) / 3.0;
  for (int n = 0; n < 200; ++n) {
    // Random interior point and a random word.
    std::uniform_real_distribution<double> u(0.05, 0.9);
    const double a = u(rng), b = u(rng) * (1 - a);
    const Complex z = c + a * (g.cell.vertices[1] - c) * 0.8 + b * (g.cell.vertices[2] - c) * 0.8;
    Complex w = z;
    for (int k = 0; k < 1 + n % 12; ++k) w = g.generators[lab(rng)](w);
    const Located l = locate(g, w, 64);
    CHECK(contains(g.cell, l.z_in, 1e-9));
    const Motion m = corresponding_word(l.word, g);
    CHECK(near(m(w), l.z_in, 1e-9));
    CHECK(near(inverse(m)(l.z_in), w, 1e-9));
  }
}

TEST_CASE("property: folding tiles a disk of hyperbolic radius 3") {
  for (const CellSpec& cell : {hyperbolic_triangle(4, 3, 3), hyperbolic_quadrilateral({3, 2, 3, 2}, 0.5)}) {
    const ReflectionGroup g = reflection_group(cell);
    std::mt19937_64 rng(9);
    const double r = std::tanh(3.0 / 2.0);
    for (int n = 0; n < 10000; ++n) {
      const Complex z = hyptest::random_in_disk(rng, r);
      Located l;
      REQUIRE(try_locate(g, z, 64, l));
      CHECK(contains(g.cell, l.z_in, 1e-9));
    }
  }
}

TEST_CASE("corresponding_word") {
  const ReflectionGroup g = reflection_group(euclidean_triangle(4, 4, 2));
  const Complex z(0.3, 0.1);
  CHECK(near(corresponding_word({}, g)(z), z, 0));
  GroupWord one{{1}};
  const Motion m1 = corresponding_word(one, g);
  CHECK(m1.conjugating);
  CHECK(near(m1(z), g.generators[1](z), 1e-14));
  // Two labels around vertex 2 (edges 1 and 2): rotation by 2 pi / 2 about it.
  GroupWord two{{1, 2}};
  const Motion m2 = corresponding_word(two, g);
  CHECK_FALSE(m2.conjugating);
  const Complex v = g.cell.vertices[2];
  CHECK(near(m2(v), v, 1e-12));
  const Complex turned = (m2(v + 0.1) - v) / 0.1;
  CHECK(std::abs(std::abs(std::arg(turned)) - 2 * kPi / g.cell.corner_orders[2]) < 1e-9);
  GroupWord bad{{7}};
  CHECK(hyptest::error_code_of([&] { corresponding_word(bad, g); }) == ErrorCode::LabelMismatch);
}

TEST_CASE("supergroup_reduction examples") {
  const auto r442 = supergroup_reduction(parse_signature("442"));
  CHECK(r442.supergroup_signature.name == "*442");
  CHECK(r442.index == 2);
  const auto r632 = supergroup_reduction(parse_signature("*632"));
  CHECK(r632.supergroup_signature.name == "*632");
  CHECK(r632.index == 1);
  const auto r22x = supergroup_reduction(parse_signature("22x"));
  CHECK(r22x.supergroup_signature.name == "*2222");
  CHECK(r22x.index == 4);
  CHECK(hyptest::error_code_of([] { supergroup_reduction(parse_signature("2222")); }) == ErrorCode::Unsupported);
  CHECK(supergroup_reduction(parse_signature("2222"), true).supergroup_signature.name == "*2222");
}

TEST_CASE("property: reductions land on reflection groups") {
  int ok = 0;
  for (const auto& s : all_signatures()) {
    const auto r = supergroup_reduction(s, true);
    CHECK(is_reflection_group(r.supergroup_signature));
    CHECK(r.index >= 1);
    if (is_reflection_group(s)) CHECK(r.index == 1);
    try {
      supergroup_reduction(s, false);
      ++ok;
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Unsupported);
      CHECK((s.name == "2222" || s.name == "○"));
    }
  }
  CHECK(ok == 15);
}

TEST_CASE("validate_target") {
  CHECK(validate_target(parse_signature("*333"), {4, 3, 3}) == GeometryKind::Hyperbolic);
  CHECK(validate_target(parse_signature("*333"), {5, 4, 3}) == GeometryKind::Hyperbolic);
  CHECK(validate_target(parse_signature("p6m"), {7, 3, 2}) == GeometryKind::Hyperbolic);
  CHECK(hyptest::error_code_of([] { validate_target(parse_signature("*442"), {4, 4, 2}); }) ==
        ErrorCode::TargetNotHyperbolic);
  CHECK(hyptest::error_code_of([] { validate_target(parse_signature("*333"), {3, 3, 3}); }) ==
        ErrorCode::TargetNotHyperbolic);
  CHECK(hyptest::error_code_of([] { validate_target(parse_signature("*333"), {4, 3, 3, 3}); }) ==
        ErrorCode::InvalidArgument);
  CHECK(validate_target(parse_signature("*2222"), {3, 2, 3, 2}) == GeometryKind::Hyperbolic);
}
