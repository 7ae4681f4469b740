// Acceptance gate. `acceptance` runs every criterion; `acceptance N` runs one.
// Prints one PASS/FAIL line per criterion; exit status is the failure count.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "core/error.hpp"
#include "core/problem.hpp"
#include "core/renderer.hpp"
#include "core/verifier.hpp"

using namespace hyperbolize;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Problem problem(const char* sig, std::vector<int> orders) { return make_problem({sig, std::move(orders)}); }

SolverState solved(const Problem& p, double delta, double tol) {
  auto [s, rep] = solve(p.hyperbolic, p.euclidean, delta, tol, 2000000);
  if (!rep.converged) throw Error(ErrorCode::NotConverged, "desk instance did not converge");
  return s;
}

std::vector<std::int32_t> inner_component(const SolverState& s, const SparseOperator& op) {
  std::vector<std::int32_t> seeds;
  for (std::size_t k = 0; k < s.size(); ++k)
    if (s.inner[k]) seeds.push_back(static_cast<std::int32_t>(k));
  return irreducible_component(op, seeds);
}

// 1
Outcome identity_fixed_point() {
  const auto t0 = std::chrono::steady_clock::now();
  const CellSpec e = euclidean_triangle(3, 3, 3);
  auto [s, rep] = solve(e, e, 0.01, 1e-12, 2);
  double err = 0;
  for (std::size_t k = 0; k < s.size(); ++k) err = std::max(err, std::abs(s.p[k] - s.points[k].point(s.delta)));
  const double t = seconds_since(t0);
  const double res = s.history.empty() ? 0.0 : s.history.back();
  return {rep.converged && rep.iterations <= 2 && res < 1e-12 && err < 1e-9 && t < 1.0,
          fmt("sweeps %lld, residual %.1e, max |p-z| %.1e, %.2f s", static_cast<long long>(rep.iterations), res, err,
              t)};
}

// 2
Outcome flagship_convergence() {
  const auto t0 = std::chrono::steady_clock::now();
  const Problem p = problem("*333", {4, 3, 3});
  auto [s, rep] = solve(p.hyperbolic, p.euclidean, 0.0025, 1e-8, 500000);
  const std::size_t n = s.history.size();
  std::size_t violations = 0;
  for (std::size_t k = n / 100 + 100; k < n; ++k) violations += s.history[k] > s.history[k - 100];
  return {rep.converged && s.size() >= 5000 && s.size() <= 20000 && violations == 0,
          fmt("m = %zu, %lld sweeps, residual %.2e (relative), window violations %zu, %.1f s", s.size(),
              static_cast<long long>(rep.iterations), rep.final_residual, violations, seconds_since(t0))};
}

// 3
Outcome row_sums() {
  double worst = 0;
  std::string sizes;
  for (auto [sig, orders, d] : {std::tuple{"*333", std::vector<int>{4, 3, 3}, 0.01},
                                std::tuple{"*333", std::vector<int>{5, 4, 3}, 0.01},
                                std::tuple{"*632", std::vector<int>{7, 3, 2}, 0.01}}) {
    const Problem p = problem(sig, orders);
    const SolverState s = solved(p, d, 1e-8);
    const SparseOperator op = assemble(s);
    worst = std::max(worst, row_sum_deviation(op));
    sizes += fmt(" %d%d%d:%zu", orders[0], orders[1], orders[2], op.dim());
  }
  return {worst <= 1e-12, fmt("max |sum|a| - 1| = %.1e over rows of dims%s", worst, sizes.c_str())};
}

// 4
Outcome contractivity() {
  bool ok = true;
  std::string detail;
  double worst_gap = 1, worst_dense = 0;
  for (auto [sig, orders, d] : {std::tuple{"*333", std::vector<int>{4, 3, 3}, 0.02},
                                std::tuple{"*333", std::vector<int>{5, 4, 3}, 0.02},
                                std::tuple{"*632", std::vector<int>{7, 3, 2}, 0.01},
                                std::tuple{"*333", std::vector<int>{4, 3, 3}, 0.01}}) {
    const Problem p = problem(sig, orders);
    const SolverState s = solved(p, d, 1e-8);
    if (s.size() > 2000) continue;
    const SparseOperator op = assemble(s);
    const auto comp = inner_component(s, op);
    const SpectralReport r = spectral_radius(op, comp, 1e-12, 2000000);
    ok = ok && r.converged && r.rho_estimate < 1.0 - 1e-6;
    worst_gap = std::min(worst_gap, 1.0 - r.rho_estimate);
    detail += fmt(" m=%zu rho=%.8f", s.size(), r.rho_estimate);
    if (s.size() <= 300) {
      const double dense = dense_spectral_radius(op, comp);
      worst_dense = std::max(worst_dense, std::abs(dense - r.rho_estimate));
      ok = ok && std::abs(dense - r.rho_estimate) <= 1e-6;
      detail += fmt(" (dense %.8f)", dense);
    }
  }
  return {ok, fmt("min 1-rho %.2e, max |power - dense| %.1e;", worst_gap, worst_dense) + detail};
}

// 5
Outcome equivalence() {
  double worst = 0;
  for (auto [sig, orders, d] : {std::tuple{"*333", std::vector<int>{4, 3, 3}, 0.02},
                                std::tuple{"*333", std::vector<int>{5, 4, 3}, 0.02},
                                std::tuple{"*632", std::vector<int>{7, 3, 2}, 0.01}}) {
    const Problem p = problem(sig, orders);
    const SolverState s = solved(p, d, 1e-8);
    worst = std::max(worst, sweep_equivalence(s, assemble(s)));
  }
  const Problem p = problem("*333", {4, 3, 3});
  const SolverState s = solved(p, 0.02, 1e-13);
  const std::vector<Complex> x = direct_fixed_point(assemble(s));
  double err = 0;
  for (std::size_t k = 0; k < s.size(); ++k) err = std::max(err, std::abs(x[k] - s.p[k]));
  const double bound = 1e-6 * s.target_diameter();
  return {worst <= 1e-12 && err <= bound,
          fmt("sweep vs operator %.1e on 3 instances; direct vs iterative %.1e (bound %.1e)", worst, err, bound)};
}

// 6
Outcome srp_commutation() {
  const Problem p = problem("*333", {4, 3, 3});
  const SolverState s = solved(p, 0.01, 1e-8);
  const ReflectionGroup &gh = p.g_h, &ge = p.g_e;
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> along(0.02, 0.98), off(0.0, 3.0);
  double worst = 0;
  std::size_t probes = 0;
  for (std::size_t e = 0; e < s.source.size(); ++e) {
    int n = 0;
    while (n < 100) {
      const Complex on = edge_point(s.source, e, along(rng));
      const Complex tangent = s.source.edges[e].tangent_toward(on, s.source.vertices[(e + 1) % s.source.size()]);
      Complex normal = Complex(0, 1) * tangent;
      if (s.source.side(e, on + 1e-6 * normal) < 0) normal = -normal;
      const Complex z = on + off(rng) * s.delta * normal;
      if (!contains(s.source, z)) continue;
      const Complex lhs = extended_map(s, gh, ge, gh.generators[e](z));
      const Complex rhs = ge.generators[e](interpolate(s, z));
      worst = std::max(worst, std::abs(lhs - rhs));
      ++n;
      ++probes;
    }
  }
  const double bound = 10 * s.delta * s.target_diameter();
  return {worst < bound, fmt("max defect %.2e over %zu probes (bound %.2e)", worst, probes, bound)};
}

// 7
Outcome conformality() {
  const Problem p = problem("*333", {4, 3, 3});
  std::vector<ConformalityStats> st;
  std::string detail;
  for (double d : {0.01, 0.005, 0.0025}) {
    const SolverState s = solved(p, d, 1e-10);
    st.push_back(conformality_report(s, 5 * d));
    detail += fmt(" d=%g: angle %.4f deg, ratio %.5f;", d, st.back().angle_median * 180 / kPi, st.back().ratio_median);
  }
  bool ok = true;
  for (std::size_t k = 1; k < st.size(); ++k) ok = ok && st[k].angle_median < st[k - 1].angle_median;
  ok = ok && st.back().angle_median * 180 / kPi < 1.0;
  for (const auto& c : st) ok = ok && c.ratio_median < 0.02;
  return {ok, "tol 1e-10;" + detail};
}

// 8
Outcome euclidean_triples() {
  std::set<std::multiset<int>> accepted;
  int rejected = 0, total = 0;
  for (int a = 1; a <= 12; ++a)
    for (int b = 1; b <= 12; ++b)
      for (int c = 1; c <= 12; ++c) {
        ++total;
        try {
          const CellSpec t = euclidean_triangle(a, b, c);
          if (t.size() == 3) accepted.insert({a, b, c});
        } catch (const Error&) {
          ++rejected;
        }
      }
  const std::set<std::multiset<int>> expect = {{3, 3, 3}, {4, 4, 2}, {6, 3, 2}};
  const int accepted_ordered = total - rejected;  // 1 + 3 + 6 permutations
  return {accepted == expect && accepted_ordered == 10,
          fmt("%d of %d ordered triples accepted, %zu unordered classes", accepted_ordered, total, accepted.size())};
}

// 9
Outcome modulus_symmetry() {
  const auto t0 = std::chrono::steady_clock::now();
  const CellSpec square = euclidean_rectangle(1.0, 1.0);
  const std::array<int, 4> orders{3, 2, 3, 2};
  ModulusOptions opts;
  const ModulusResult r = modulus_search(orders, square, 1e-3, opts);
  double probe_min = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 9; ++k) probe_min = std::min(probe_min, modulus_energy(orders, square, k / 10.0, opts));
  const bool ok = std::abs(r.t_star - 0.5) <= 1e-3 && r.energy <= probe_min;
  return {ok, fmt("t* = %.6f, E(t*) = %.10f, min over 9 probes %.10f, %zu evaluations, %.1f s", r.t_star, r.energy,
                  probe_min, r.evaluations.size(), seconds_since(t0))};
}

// 10
Outcome rendered_symmetry() {
  const auto t0 = std::chrono::steady_clock::now();
  const Problem p = problem("*333", {4, 3, 3});
  const SolverState s = solved(p, 0.01, 1e-8);
  RenderConfig cfg;
  cfg.resolution = 1024;
  OrnamentSampler orn = synthesize_test_ornament(OrnamentKind::Checkerboard, p.g_e);
  const Image img = render(s, p.g_h, p.g_e, orn, cfg);
  const SymmetryCheck good = symmetry_check(img, p.g_h.generators, 10000, 1);
  orn.shift = 0.23 * euclidean_diameter(p.euclidean) * std::polar(1.0, 0.7);
  const Image ctl = render(s, p.g_h, p.g_e, orn, cfg);
  const SymmetryCheck bad = symmetry_check(ctl, p.g_h.generators, 10000, 1);
  // Same probes kept away from the rim, for the record.
  const SymmetryCheck inner = symmetry_check(img, p.g_h.generators, 10000, 1, 0.05);
  return {good.max_mismatch < 0.05 && bad.max_mismatch > 0.5,
          fmt("max %.4f (mean %.5f), control %.4f; within |z| < 0.95: max %.4f; %.1f s", good.max_mismatch,
              good.mean_mismatch, bad.max_mismatch, inner.max_mismatch, seconds_since(t0))};
}

// 11
Outcome signature_totality() {
  int ok = 0;
  std::vector<std::string> failed;
  for (const auto& sig : all_signatures()) {
    try {
      supergroup_reduction(sig, false);
      ++ok;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::Unsupported) failed.push_back(sig.name);
    }
  }
  std::sort(failed.begin(), failed.end());
  const bool pass = all_signatures().size() == 17 && ok == 15 &&
                    failed == std::vector<std::string>{"2222", "○"};
  return {pass, fmt("%d of %zu reduce; refused: %s %s", ok, all_signatures().size(),
                    failed.size() > 0 ? failed[0].c_str() : "-", failed.size() > 1 ? failed[1].c_str() : "-")};
}

struct Criterion {
  const char* name;
  std::function<Outcome()> run;
};

const std::vector<Criterion> kCriteria = {
    {"identity fixed point", identity_fixed_point},
    {"flagship *433 convergence", flagship_convergence},
    {"row sums", row_sums},
    {"contractivity", contractivity},
    {"operator and solver equivalence", equivalence},
    {"reflection commutation", srp_commutation},
    {"conformality under refinement", conformality},
    {"Euclidean triangle gate", euclidean_triples},
    {"modulus search symmetry", modulus_symmetry},
    {"rendered symmetry", rendered_symmetry},
    {"signature totality", signature_totality},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> which;
  for (int k = 1; k < argc; ++k) which.push_back(std::atoi(argv[k]));
  if (which.empty())
    for (int k = 1; k <= static_cast<int>(kCriteria.size()); ++k) which.push_back(k);
  int failures = 0;
  for (int n : which) {
    if (n < 1 || n > static_cast<int>(kCriteria.size())) {
      std::fprintf(stderr, "no criterion %d\n", n);
      return 64;
    }
    Outcome o;
    try {
      o = kCriteria[n - 1].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s  %2d %s: %s\n", o.pass ? "PASS" : "FAIL", n, kCriteria[n - 1].name, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures;
}
